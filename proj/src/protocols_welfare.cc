#include <algorithm>
#include <cmath>
#include <limits>

#include "protocols_internal.h"

namespace cgames {
namespace {

constexpr double kFeasibleSlack = 1e-9;

// Per-outcome payments realizing the signed adjustments `change` (one entry
// per player): losers pay gainers pro rata and burn the rest.
std::vector<Pledge> SettleOutcome(const Profile& outcome,
                                  const std::vector<double>& change,
                                  double scale) {
  double gain = 0.0, loss = 0.0;
  for (double c : change) {
    if (c > 0.0) gain += c;
    if (c < 0.0) loss -= c;
  }
  if (gain > loss * (1.0 + 1e-12) + 1e-12)
    throw InfeasibleError("adjustment would raise welfare at an outcome");
  std::vector<Pledge> out;
  const int n = static_cast<int>(change.size());
  for (int i = 0; i < n; ++i) {
    if (!(change[i] < 0.0)) continue;
    const double owe = -change[i] * scale;
    double paid = 0.0;
    for (int r = 0; r < n; ++r) {
      if (!(change[r] > 0.0)) continue;
      const double amount = owe * change[r] / loss;
      out.push_back({i, outcome, r, amount});
      paid += amount;
    }
    if (owe - paid > 0.0) out.push_back({i, outcome, kBurn, owe - paid});
  }
  return out;
}

}  // namespace

Game WelfarePathAt(const Game& game, const WelfareStage& stage,
                   double lambda) {
  std::vector<double> payoffs = game.payoffs();
  const auto& dir = stage.direction.payoffs();
  for (size_t k = 0; k < payoffs.size(); ++k) payoffs[k] += lambda * dir[k];
  return Game(game.action_counts(), std::move(payoffs), game.action_names());
}

WelfareStage BuildWelfareTransferStage(const Game& game,
                                       const MixedProfile& sigma,
                                       const std::vector<double>& x,
                                       double delta, bool allow_direct) {
  if (!(delta > 0.0)) throw GameError("delta must be positive");
  const int n = game.num_players();
  if (static_cast<int>(x.size()) != n)
    throw GameError("one payoff target per player required");
  internal::RequireNonDegenerateNash(game, sigma);

  const auto [w_max, sw] = WelfareMax(game);
  double total = 0.0;
  for (double v : x) total += v;
  if (std::abs(total - w_max) > kFeasibleSlack * std::max(1.0, std::abs(w_max)))
    throw InfeasibleError("payoff targets sum to " + std::to_string(total) +
                          " but the maximum welfare is " +
                          std::to_string(w_max));
  const std::vector<double> base = ExpectedUtilities(game, sigma);
  for (int i = 0; i < n; ++i)
    if (!(x[i] > base[i]))
      throw InfeasibleError("payoff target of player " + std::to_string(i + 1) +
                            " does not strictly exceed its utility under sigma");

  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = x[i] - game.utility(i, sw);

  WelfareStage stage;
  stage.welfare_profile = sw;
  stage.direction = Game::Zero(game.action_counts());
  Game& dir = stage.direction;

  bool direct = allow_direct;
  for (int i = 0; i < n && direct; ++i)
    if (ProfileProbability(sigma, sw, i) > kSupportEpsilon) direct = false;
  stage.direct = direct;

  if (direct) {
    // Only the welfare-maximizing outcome moves; sigma never reaches it.
    for (int i = 0; i < n; ++i) dir.add_utility(i, sw, g[i]);
  } else {
    for (int i = 0; i < n; ++i) {
      if (g[i] < 0.0) {
        Profile a(n, 0);
        do dir.add_utility(i, a, g[i]);
        while (NextProfile(game.action_counts(), a));
        continue;
      }
      if (g[i] == 0.0) continue;
      const int next = (i + 1) % n;
      std::vector<int> counts(n, 1);
      counts[i] = game.num_actions(i);
      // +g on (., sw_-i).
      Profile p(n, 0);
      do {
        Profile q = sw;
        q[i] = p[i];
        dir.add_utility(i, q, g[i]);
      } while (NextProfile(counts, p));
      // Compensation on (., alt_{i+1}, sw_-{i,i+1}) keeps u_i(sigma) fixed.
      const double hit = sigma[next][sw[next]];
      if (hit <= kSupportEpsilon) continue;
      int alt = -1;
      for (int b = 0; b < game.num_actions(next); ++b)
        if (b != sw[next] && sigma[next][b] > kSupportEpsilon) {
          alt = b;
          break;
        }
      if (alt < 0)
        throw InfeasibleError(
            "compensation for player " + std::to_string(i + 1) +
            " needs a second support action of player " +
            std::to_string(next + 1));
      const double ratio = hit / sigma[next][alt];
      std::fill(p.begin(), p.end(), 0);
      do {
        Profile q = sw;
        q[i] = p[i];
        q[next] = alt;
        dir.add_utility(i, q, -ratio * g[i]);
      } while (NextProfile(counts, p));
    }
  }

  double peak = 0.0;
  for (double v : dir.payoffs()) peak = std::max(peak, -v);
  // Payers pay |change|; a player that only gains pays nothing, so the cap
  // binds on the largest loss.
  ProtocolPlan& plan = stage.plan;
  plan.case_tag = CaseTag::kWelfareTransferStage;
  plan.delta = delta;
  plan.mode = Mode::kTransfers;
  plan.permutation = internal::CanonicalOrder(game, sw);
  plan.target = {sw, TargetRole::kWelfareMaximizer};
  plan.baseline = sigma;

  std::vector<CommitmentRound> rounds;
  std::vector<double> lambdas{0.0};
  if (peak > 0.0) {
    const double step = delta / peak;
    const int count = static_cast<int>(std::ceil(peak / delta - 1e-12));
    double prev = 0.0;
    for (int k = 1; k <= count; ++k) {
      const double lam = k == count ? 1.0 : std::min(1.0, k * step);
      const double scale = lam - prev;
      CommitmentRound r;
      Profile a(n, 0);
      std::vector<double> change(n);
      do {
        const std::int64_t idx = dir.ProfileIndex(a);
        bool any = false;
        for (int i = 0; i < n; ++i) {
          change[i] = dir.utility_at(i, idx);
          any = any || change[i] != 0.0;
        }
        if (!any) continue;
        for (Pledge& pl : SettleOutcome(a, change, scale))
          r.pledges.push_back(std::move(pl));
      } while (NextProfile(game.action_counts(), a));
      rounds.push_back(std::move(r));
      lambdas.push_back(lam);
      prev = lam;
    }
  }

  PlanStage ps;
  ps.tag = CaseTag::kWelfareTransferStage;
  ps.baseline = sigma;
  ps.reference_support = Support(sigma);
  double spread = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) spread = std::max(spread, x[i] - base[i]);
  ps.ceiling = base;
  for (double& c : ps.ceiling) c += spread;
  ps.target = sw;
  ps.target_bound = internal::TargetPayoffs(game, sw);
  ps.monotonicity = Monotonicity::kWelfare;
  ps.preserves_target = false;
  internal::AppendStage(plan, ps, rounds);
  plan.checkpoint_lambda = lambdas;
  FinalizePlan(game, plan);
  stage.terminal = ApplyRounds(game, plan.rounds);
  return stage;
}

ProtocolPlan BuildWelfarePlan(const Game& game, const MixedProfile& sigma,
                              const std::vector<double>& x, double delta,
                              bool allow_direct) {
  WelfareStage stage =
      BuildWelfareTransferStage(game, sigma, x, delta, allow_direct);
  ProtocolPlan chained =
      BuildParetoPlan(stage.terminal, sigma, stage.welfare_profile, delta);
  ProtocolPlan plan = std::move(stage.plan);
  const int offset = static_cast<int>(plan.rounds.size());
  plan.rounds.insert(plan.rounds.end(), chained.rounds.begin(),
                     chained.rounds.end());
  for (PlanStage s : chained.stages) {
    s.first_round += offset;
    s.end_round += offset;
    plan.stages.push_back(std::move(s));
  }
  FinalizePlan(game, plan);
  return plan;
}

}  // namespace cgames
