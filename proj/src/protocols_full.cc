#include <algorithm>
#include <cmath>
#include <limits>

#include "protocols_internal.h"

namespace cgames {
namespace {

using internal::BurnMap;

constexpr double kReachSlack = 1e-12;

PlanStage FullSupportStage(const Game& game, CaseTag tag,
                           const MixedProfile& sigma, const Profile& target,
                           std::vector<double> ceiling, bool fallback) {
  PlanStage stage;
  stage.tag = tag;
  stage.baseline = sigma;
  stage.reference_support = Support(sigma);
  stage.ceiling = std::move(ceiling);
  stage.target = target;
  stage.target_bound = internal::TargetPayoffs(game, target);
  stage.monotonicity = Monotonicity::kUtilities;
  stage.allow_fallback = fallback;
  return stage;
}

ProtocolPlan StartPlan(const Game& game, const MixedProfile& sigma,
                       const Profile& target, double delta, CaseTag tag) {
  if (!(delta > 0.0)) throw GameError("delta must be positive");
  ProtocolPlan plan;
  plan.case_tag = tag;
  plan.delta = delta;
  plan.mode = Mode::kBurnOnly;
  plan.permutation = internal::CanonicalOrder(game, target);
  plan.target = {target, TargetRole::kParetoImprover};
  plan.baseline = sigma;
  return plan;
}

// Block entry X(row, col) for `player` in canonical labels. Player 0 rows
// range over its own actions and columns over the opponent's; player 1 is
// the mirror image.
double BlockEntry(const Game& game, const std::vector<std::vector<int>>& order,
                  int player, int row, int col) {
  const int other = 1 - player;
  Profile ref(2), cmp(2);
  ref[player] = order[player][0];
  cmp[player] = order[player][row];
  ref[other] = cmp[other] = order[other][col];
  return game.utility(player, ref) - game.utility(player, cmp);
}

Profile BlockOutcome(const std::vector<std::vector<int>>& order, int player,
                     int row, int col) {
  Profile p(2);
  p[player] = order[player][row];
  p[1 - player] = order[1 - player][col];
  return p;
}

// Per-outcome burns realizing row_r += mult[r] * row_pivot for every r.
BurnMap RowOperationBurns(const Game& game,
                          const std::vector<std::vector<int>>& order,
                          int player, int pivot,
                          const std::vector<double>& mult) {
  const int rows = static_cast<int>(order[player].size());
  const int cols = static_cast<int>(order[1 - player].size());
  BurnMap burns;
  for (int r = 1; r < rows; ++r) {
    if (mult[r] == 0.0) continue;
    for (int k = 0; k < cols; ++k) {
      const double change = mult[r] * BlockEntry(game, order, player, pivot, k);
      if (change > 0.0) {
        // P: lower u at (row r, col k).
        burns[{player, game.ProfileIndex(BlockOutcome(order, player, r, k))}] +=
            change;
      } else if (change < 0.0) {
        if (k == 0)
          throw InfeasibleError("row operation would touch the target column");
        // M: lower u at every other row of column k.
        for (int a = 0; a < rows; ++a) {
          if (a == r) continue;
          burns[{player,
                 game.ProfileIndex(BlockOutcome(order, player, a, k))}] +=
              -change;
        }
      }
    }
  }
  return burns;
}

// Row operations until every non-normalization entry of the first column
// reaches delta.
std::vector<CommitmentRound> RowOperationRounds(
    Game game, const std::vector<std::vector<int>>& order, int player,
    double delta) {
  const int rows = static_cast<int>(order[player].size());
  std::vector<CommitmentRound> rounds;
  const double eta = delta;
  for (int batch = 0; batch < 4 * rows + 4; ++batch) {
    std::vector<double> first(rows, 0.0);
    bool done = true;
    for (int r = 1; r < rows; ++r) {
      first[r] = BlockEntry(game, order, player, r, 0);
      if (first[r] < eta - kReachSlack) done = false;
    }
    if (done) return rounds;

    int arg_max = 1, arg_min = 1;
    for (int r = 2; r < rows; ++r) {
      if (first[r] > first[arg_max]) arg_max = r;
      if (first[r] < first[arg_min]) arg_min = r;
    }
    int pivot = -1;
    if (first[arg_max] > 0.0) {
      pivot = arg_max;
      bool others_need = false;
      for (int r = 1; r < rows; ++r)
        if (r != pivot && first[r] < eta - kReachSlack) others_need = true;
      if (!others_need) {
        // Only the pivot is short: lift it with the best other positive row.
        int alt = -1;
        for (int r = 1; r < rows; ++r)
          if (r != pivot && first[r] > 0.0 &&
              (alt < 0 || first[r] > first[alt]))
            alt = r;
        if (alt < 0)
          throw InfeasibleError("no positive pivot row available");
        pivot = alt;
      }
    } else if (first[arg_min] < 0.0) {
      pivot = arg_min;
    } else {
      // Whole first column is zero: the target is already a weak best reply.
      return rounds;
    }

    std::vector<double> mult(rows, 0.0);
    for (int r = 1; r < rows; ++r)
      if (r != pivot && first[r] < eta - kReachSlack)
        mult[r] = (eta - first[r]) / first[pivot];

    double remaining = 1.0;
    while (remaining > 0.0) {
      std::vector<double> scaled(mult);
      for (double& m : scaled) m *= remaining;
      BurnMap burns = RowOperationBurns(game, order, player, pivot, scaled);
      double peak = 0.0;
      for (const auto& [key, amount] : burns) peak = std::max(peak, amount);
      if (peak <= 0.0) break;
      double frac = std::min(1.0, delta / peak);
      CommitmentRound round = internal::BurnRound(game, burns, frac);
      // The pivot row is untouched, so partial steps compose linearly.
      game = ApplyTransfers(game, round);
      rounds.push_back(std::move(round));
      remaining = frac >= 1.0 ? 0.0 : remaining * (1.0 - frac);
      if (remaining < 1e-15) remaining = 0.0;
    }
  }
  throw InfeasibleError("row-operation schedule did not converge");
}

}  // namespace

ProtocolPlan BuildTwoPlayerFullSupportPlan(const Game& game,
                                           const MixedProfile& sigma,
                                           const Profile& target,
                                           double delta) {
  if (game.num_players() != 2)
    throw InfeasibleError("two-player construction needs exactly two players");
  if (game.num_actions(0) != game.num_actions(1))
    throw InfeasibleError(
        "full-support two-player equilibria need equal action counts "
        "(square blocks); got " +
        std::to_string(game.num_actions(0)) + " and " +
        std::to_string(game.num_actions(1)));
  const CaseTag tag = ClassifyCase(game, sigma, target);
  if (tag != CaseTag::kFullSupport2p)
    throw InfeasibleError(std::string("row-operation construction does not "
                                      "apply to case ") +
                          CaseTagName(tag));
  ProtocolPlan plan = StartPlan(game, sigma, target, delta, tag);
  const auto& order = plan.permutation;
  std::vector<std::vector<CommitmentRound>> lists(2);
  for (int player = 0; player < 2; ++player)
    lists[player] = RowOperationRounds(game, order, player, delta);
  internal::AppendStage(
      plan,
      FullSupportStage(game, tag, sigma, target,
                       internal::ParetoCeiling(game, sigma, target), false),
      internal::ZipRounds(lists));
  FinalizePlan(game, plan);
  return plan;
}

ProtocolPlan BuildMultiplayerPlan(const Game& game, const MixedProfile& sigma,
                                  const Profile& target, double delta) {
  const CaseTag tag = ClassifyCase(game, sigma, target);
  if (tag != CaseTag::kFullSupportNp)
    throw InfeasibleError(std::string("coefficient-array construction does "
                                      "not apply to case ") +
                          CaseTagName(tag));
  ProtocolPlan plan = StartPlan(game, sigma, target, delta, tag);
  const auto& order = plan.permutation;
  const int n = game.num_players();
  std::vector<std::vector<CommitmentRound>> lists(n);

  for (int i = 0; i < n; ++i) {
    Game g = game;
    const std::vector<double> x =
        CoefficientArray(sigma, i, order, game.action_counts());
    double x_first = 0.0;
    {
      std::vector<int> counts = game.action_counts();
      counts[i] = 1;
      Profile rest = target;
      rest[i] = 0;
      // Position of target_-i in the lexicographic opposing order.
      std::int64_t pos = 0;
      for (int j = 0; j < n; ++j) pos = pos * counts[j] + rest[j];
      x_first = x[pos];
    }
    if (!(x_first > 0.0))
      throw InfeasibleError("coefficient array has a nonpositive lead entry");

    // lambda per compared action so the target coefficient reaches delta.
    std::vector<double> lambda(game.num_actions(i), 0.0);
    bool any = false;
    Profile dev = target;
    for (int a = 0; a < game.num_actions(i); ++a) {
      if (a == target[i]) continue;
      dev[i] = a;
      const double coef = game.utility(i, target) - game.utility(i, dev);
      if (coef < delta - kReachSlack) {
        lambda[a] = (delta - coef) / x_first;
        any = true;
      }
    }
    if (!any) continue;

    auto burns_for = [&](double scale) {
      BurnMap burns;
      for (int a = 0; a < game.num_actions(i); ++a) {
        if (lambda[a] == 0.0) continue;
        ElementaryCommitment c;
        c.kind = ElementaryCommitment::Kind::kR;
        c.player = i;
        c.reference_action = target[i];
        c.compared_action = a;
        c.coefficients = x;
        for (double& v : c.coefficients) v *= lambda[a] * scale;
        for (const Pledge& p : Compile(g, c))
          burns[{i, g.ProfileIndex(p.outcome)}] += p.amount;
      }
      return burns;
    };
    double remaining = 1.0;
    while (remaining > 0.0) {
      BurnMap burns = burns_for(remaining);
      double peak = 0.0;
      for (const auto& [key, amount] : burns) peak = std::max(peak, amount);
      if (peak <= 0.0) break;
      const double frac = std::min(1.0, delta / peak);
      CommitmentRound round = internal::BurnRound(g, burns, frac);
      g = ApplyTransfers(g, round);
      lists[i].push_back(std::move(round));
      remaining = frac >= 1.0 ? 0.0 : remaining * (1.0 - frac);
      if (remaining < 1e-15) remaining = 0.0;
    }
  }
  internal::AppendStage(
      plan,
      FullSupportStage(game, tag, sigma, target,
                       internal::ParetoCeiling(game, sigma, target), false),
      internal::ZipRounds(lists));
  FinalizePlan(game, plan);
  return plan;
}

ProtocolPlan Build2x2Plan(const Game& game, const MixedProfile& sigma,
                          const Profile& target, double delta) {
  if (game.num_players() != 2 || game.num_actions(0) != 2 ||
      game.num_actions(1) != 2)
    throw InfeasibleError("binary construction needs a 2x2 game");
  ValidateProfile(game, sigma);
  if (!HasFullSupport(game, sigma))
    throw InfeasibleError("binary construction needs a full-support sigma");
  NashCheck nash = IsNash(game, sigma);
  if (!nash.ok) throw InfeasibleError("sigma is not a Nash equilibrium");
  internal::RequireStrictImprovement(game, sigma, target);

  ProtocolPlan plan =
      StartPlan(game, sigma, target, delta, CaseTag::kTwoByTwo);
  const auto& order = plan.permutation;
  // Canonical outcome: 0 is the target action, 1 the other.
  auto at = [&](int player, int own, int opp) {
    Profile p(2);
    p[player] = order[player][own];
    p[1 - player] = order[1 - player][opp];
    return p;
  };

  // gap0 = u(1,0) - u(0,0), gap1 = u(0,1) - u(1,1) in own-first notation.
  std::vector<bool> type3(2, false);
  double bound = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    const double d0 = game.utility(i, at(i, 0, 0)) - game.utility(i, at(i, 1, 0));
    const double d1 = game.utility(i, at(i, 0, 1)) - game.utility(i, at(i, 1, 1));
    if (d0 < 0.0 && d1 > 0.0) {
      type3[i] = true;
      bound = std::min({bound, -d0, d1});
    }
  }
  if (!(delta < bound))
    throw InfeasibleError("delta must stay below " + std::to_string(bound) +
                          " for the binary construction");

  Game g = game;
  std::vector<CommitmentRound> rounds;
  auto push = [&](CommitmentRound r) {
    g = ApplyTransfers(g, r);
    rounds.push_back(std::move(r));
  };

  // Step 1: each player pays delta on its two opp=1 outcomes until u(0,0)
  // strictly exceeds both.
  for (int guard = 0;; ++guard) {
    if (guard > 1000000) throw InfeasibleError("step 1 did not terminate");
    CommitmentRound r;
    for (int i = 0; i < 2; ++i) {
      const double top = std::max(g.utility(i, at(i, 0, 1)),
                                  g.utility(i, at(i, 1, 1)));
      if (g.utility(i, at(i, 0, 0)) > top) continue;
      r.pledges.push_back({i, at(i, 0, 1), kBurn, delta});
      r.pledges.push_back({i, at(i, 1, 1), kBurn, delta});
    }
    if (r.pledges.empty()) break;
    push(std::move(r));
  }

  // Step 2: type (iii) players shrink both gaps to exactly delta.
  for (int guard = 0;; ++guard) {
    if (guard > 1000000) throw InfeasibleError("step 2 did not terminate");
    CommitmentRound r;
    for (int i = 0; i < 2; ++i) {
      if (!type3[i]) continue;
      const double gap0 = g.utility(i, at(i, 1, 0)) - g.utility(i, at(i, 0, 0));
      const double gap1 = g.utility(i, at(i, 0, 1)) - g.utility(i, at(i, 1, 1));
      const double pay0 = std::min(delta, gap0 - delta);
      const double pay1 = std::min(delta, gap1 - delta);
      if (pay0 > kReachSlack) r.pledges.push_back({i, at(i, 1, 0), kBurn, pay0});
      if (pay1 > kReachSlack) r.pledges.push_back({i, at(i, 0, 1), kBurn, pay1});
    }
    if (r.pledges.empty()) break;
    push(std::move(r));
  }

  // Step 3: the final delta on both outcomes.
  CommitmentRound last;
  for (int i = 0; i < 2; ++i) {
    if (!type3[i]) continue;
    last.pledges.push_back({i, at(i, 1, 0), kBurn, delta});
    last.pledges.push_back({i, at(i, 0, 1), kBurn, delta});
  }
  if (!last.pledges.empty()) push(std::move(last));

  internal::AppendStage(
      plan,
      FullSupportStage(game, CaseTag::kTwoByTwo, sigma, target,
                       internal::TargetPayoffs(game, target), true),
      rounds);
  FinalizePlan(game, plan);
  return plan;
}

}  // namespace cgames
