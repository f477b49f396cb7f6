#include <algorithm>
#include <cmath>

#include "protocols_internal.h"

namespace cgames {

const char* CaseTagName(CaseTag tag) {
  switch (tag) {
    case CaseTag::kPartialSupportDisjoint:
      return "partial_support_disjoint";
    case CaseTag::kPartialSupportMixed:
      return "partial_support_mixed";
    case CaseTag::kInSupportIndirect:
      return "in_support_indirect";
    case CaseTag::kFullSupport2p:
      return "full_support_2p";
    case CaseTag::kFullSupportNp:
      return "full_support_np";
    case CaseTag::kTwoByTwo:
      return "two_by_two";
    case CaseTag::kWelfareTransferStage:
      return "welfare_transfer_stage";
  }
  return "unknown";
}

CaseTag ParseCaseTag(const std::string& name) {
  for (CaseTag tag :
       {CaseTag::kPartialSupportDisjoint, CaseTag::kPartialSupportMixed,
        CaseTag::kInSupportIndirect, CaseTag::kFullSupport2p,
        CaseTag::kFullSupportNp, CaseTag::kTwoByTwo,
        CaseTag::kWelfareTransferStage})
    if (name == CaseTagName(tag)) return tag;
  throw GameError("unknown case tag '" + name + "'");
}

std::vector<Pledge> Compile(const Game& game, const ElementaryCommitment& c) {
  std::vector<Pledge> out;
  switch (c.kind) {
    case ElementaryCommitment::Kind::kP:
      if (!(c.amount >= 0.0)) throw GameError("P amounts must be nonnegative");
      out.push_back({c.player, c.outcome, kBurn, c.amount});
      break;
    case ElementaryCommitment::Kind::kM:
      if (!(c.amount >= 0.0)) throw GameError("M amounts must be nonnegative");
      for (int a = 0; a < game.num_actions(c.player); ++a) {
        if (a == c.outcome[c.player]) continue;
        Profile p = c.outcome;
        p[c.player] = a;
        out.push_back({c.player, p, kBurn, c.amount});
      }
      break;
    case ElementaryCommitment::Kind::kR: {
      std::vector<int> others = game.action_counts();
      others[c.player] = 1;
      Profile rest(game.num_players(), 0);
      size_t k = 0;
      do {
        if (k >= c.coefficients.size())
          throw GameError("R coefficient array too short");
        const double x = c.coefficients[k++];
        if (x == 0.0) continue;
        Profile p = rest;
        if (x > 0.0) {
          // Lowering u_i(compared, a_-i) raises the coefficient.
          p[c.player] = c.compared_action;
          out.push_back({c.player, p, kBurn, x});
        } else {
          for (int a = 0; a < game.num_actions(c.player); ++a) {
            if (a == c.compared_action) continue;
            p[c.player] = a;
            out.push_back({c.player, p, kBurn, -x});
          }
        }
      } while (NextProfile(others, rest));
      if (k != c.coefficients.size())
        throw GameError("R coefficient array has the wrong length");
      break;
    }
  }
  return out;
}

const PlanStage& ProtocolPlan::StageAt(int prefix) const {
  if (stages.empty()) throw GameError("plan has no stages");
  for (const PlanStage& s : stages)
    if (prefix >= s.first_round && prefix < s.end_round) return s;
  // Terminal checkpoint (or an empty stage list tail) uses the last stage.
  for (auto it = stages.rbegin(); it != stages.rend(); ++it)
    if (it->first_round <= prefix) return *it;
  return stages.front();
}

std::vector<Game> Checkpoints(const Game& base, const ProtocolPlan& plan) {
  std::vector<Game> out;
  out.reserve(plan.rounds.size() + 1);
  out.push_back(base);
  for (const auto& r : plan.rounds) out.push_back(ApplyTransfers(out.back(), r));
  return out;
}

void FinalizePlan(const Game& base, ProtocolPlan& plan) {
  plan.base_hash = base.ContentHash();
  plan.checkpoints.clear();
  std::vector<Game> games = Checkpoints(base, plan);
  for (const Game& g : games) plan.checkpoints.push_back(g.ContentHash());
  plan.expected_terminal_payoffs = internal::TargetPayoffs(games.back(),
                                                           plan.target.profile);
}

CaseTag ClassifyCase(const Game& game, const MixedProfile& sigma,
                     const Profile& target) {
  internal::RequireNonDegenerateNash(game, sigma);
  internal::RequireStrictImprovement(game, sigma, target);
  const int n = game.num_players();
  int in_support = 0;
  for (int i = 0; i < n; ++i)
    if (sigma[i][target[i]] > kSupportEpsilon) ++in_support;
  if (in_support == 0) return CaseTag::kPartialSupportDisjoint;
  if (in_support < n) return CaseTag::kPartialSupportMixed;
  if (!HasFullSupport(game, sigma)) return CaseTag::kInSupportIndirect;
  if (n >= 3) return CaseTag::kFullSupportNp;
  if (game.num_actions(0) == 2 && game.num_actions(1) == 2)
    return CaseTag::kTwoByTwo;
  return CaseTag::kFullSupport2p;
}

ProtocolPlan BuildParetoPlan(const Game& game, const MixedProfile& sigma,
                             const Profile& target, double delta) {
  switch (ClassifyCase(game, sigma, target)) {
    case CaseTag::kPartialSupportDisjoint:
    case CaseTag::kPartialSupportMixed:
    case CaseTag::kInSupportIndirect:
      return BuildPartialSupportPlan(game, sigma, target, delta);
    case CaseTag::kFullSupport2p:
      return BuildTwoPlayerFullSupportPlan(game, sigma, target, delta);
    case CaseTag::kFullSupportNp:
      return BuildMultiplayerPlan(game, sigma, target, delta);
    case CaseTag::kTwoByTwo:
      return Build2x2Plan(game, sigma, target, delta);
    case CaseTag::kWelfareTransferStage:
      break;
  }
  throw InfeasibleError("no construction applies");
}

std::vector<double> CoefficientArray(
    const MixedProfile& sigma, int player,
    const std::vector<std::vector<int>>& order,
    const std::vector<int>& action_counts) {
  const int n = static_cast<int>(action_counts.size());
  for (int j = 0; j < n; ++j)
    if (j != player && order[j].size() < 2)
      throw InfeasibleError("player " + std::to_string(j + 1) +
                            " needs at least two support actions");
  std::vector<int> others = action_counts;
  others[player] = 1;
  std::vector<double> out;
  Profile rest(n, 0);
  do {
    double value = 1.0;
    int index_sum = 0;
    for (int j = 0; j < n && value != 0.0; ++j) {
      if (j == player) continue;
      int idx = 0;
      if (rest[j] == order[j][0]) idx = 1;
      else if (rest[j] == order[j][1]) idx = 2;
      if (idx == 0) {
        value = 0.0;
        break;
      }
      index_sum += idx;
      value *= sigma[j][order[j][idx == 1 ? 1 : 0]];
    }
    if (value != 0.0 && (index_sum + n + 1) % 2 != 0) value = -value;
    out.push_back(value);
  } while (NextProfile(others, rest));
  return out;
}

std::vector<double> CoefficientArray(const MixedProfile& canonical_sigma) {
  const int n = static_cast<int>(canonical_sigma.size());
  if (n < 3) throw InfeasibleError("the coefficient array needs n >= 3");
  std::vector<int> counts(n);
  std::vector<std::vector<int>> order(n);
  for (int j = 0; j < n; ++j) {
    counts[j] = static_cast<int>(canonical_sigma[j].size());
    for (int a = 0; a < counts[j]; ++a) order[j].push_back(a);
    if (j > 0 && (counts[j] < 2 || canonical_sigma[j][0] <= kSupportEpsilon ||
                  canonical_sigma[j][1] <= kSupportEpsilon))
      throw InfeasibleError("player " + std::to_string(j + 1) +
                            " has a singleton support");
  }
  return CoefficientArray(canonical_sigma, 0, order, counts);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> CanonicalBlocks(
    const Game& game, const std::vector<std::vector<int>>& order) {
  const int n1 = static_cast<int>(order[0].size());
  const int n2 = static_cast<int>(order[1].size());
  Eigen::MatrixXd x1 = Eigen::MatrixXd::Zero(n1, n2);
  Eigen::MatrixXd x2 = Eigen::MatrixXd::Zero(n2, n1);
  x1.row(0).setOnes();
  x2.row(0).setOnes();
  for (int j = 1; j < n1; ++j)
    for (int k = 0; k < n2; ++k)
      x1(j, k) = game.utility(0, {order[0][0], order[1][k]}) -
                 game.utility(0, {order[0][j], order[1][k]});
  for (int j = 1; j < n2; ++j)
    for (int k = 0; k < n1; ++k)
      x2(j, k) = game.utility(1, {order[0][k], order[1][0]}) -
                 game.utility(1, {order[0][k], order[1][j]});
  return {x1, x2};
}

namespace internal {

std::vector<CommitmentRound> BurnSchedule(const Game& game,
                                          const BurnMap& needs, double delta) {
  BurnMap remaining;
  for (const auto& [key, amount] : needs)
    if (amount > 0.0) remaining[key] = amount;
  std::vector<CommitmentRound> rounds;
  while (!remaining.empty()) {
    CommitmentRound round;
    for (auto it = remaining.begin(); it != remaining.end();) {
      double pay = it->second <= delta + 1e-13 ? it->second : delta;
      round.pledges.push_back(
          {it->first.first, game.ProfileAt(it->first.second), kBurn, pay});
      if (pay == it->second) {
        it = remaining.erase(it);
      } else {
        it->second -= pay;
        ++it;
      }
    }
    rounds.push_back(std::move(round));
  }
  return rounds;
}

CommitmentRound BurnRound(const Game& game, const BurnMap& burns,
                          double scale) {
  CommitmentRound round;
  for (const auto& [key, amount] : burns)
    if (amount * scale > 0.0)
      round.pledges.push_back(
          {key.first, game.ProfileAt(key.second), kBurn, amount * scale});
  return round;
}

std::vector<CommitmentRound> ZipRounds(
    const std::vector<std::vector<CommitmentRound>>& lists) {
  size_t len = 0;
  for (const auto& l : lists) len = std::max(len, l.size());
  std::vector<CommitmentRound> out(len);
  for (const auto& l : lists)
    for (size_t k = 0; k < l.size(); ++k)
      out[k].pledges.insert(out[k].pledges.end(), l[k].pledges.begin(),
                            l[k].pledges.end());
  return out;
}

std::vector<std::vector<int>> CanonicalOrder(const Game& game,
                                             const Profile& target) {
  std::vector<std::vector<int>> order(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    order[i].push_back(target[i]);
    for (int a = 0; a < game.num_actions(i); ++a)
      if (a != target[i]) order[i].push_back(a);
  }
  return order;
}

void AppendStage(ProtocolPlan& plan, PlanStage stage,
                 const std::vector<CommitmentRound>& rounds) {
  stage.first_round = static_cast<int>(plan.rounds.size());
  plan.rounds.insert(plan.rounds.end(), rounds.begin(), rounds.end());
  stage.end_round = static_cast<int>(plan.rounds.size());
  plan.stages.push_back(std::move(stage));
}

std::vector<double> TargetPayoffs(const Game& game, const Profile& target) {
  std::vector<double> out(game.num_players());
  for (int i = 0; i < game.num_players(); ++i)
    out[i] = game.utility(i, target);
  return out;
}

std::vector<double> ParetoCeiling(const Game& game, const MixedProfile& sigma,
                                  const Profile& target) {
  std::vector<double> u = ExpectedUtilities(game, sigma);
  const double margin = ParetoImproves(game, target, sigma).margin;
  for (double& v : u) v += margin;
  return u;
}

void RequireNonDegenerateNash(const Game& game, const MixedProfile& sigma) {
  ValidateProfile(game, sigma);
  NashCheck nash = IsNash(game, sigma);
  if (!nash.ok)
    throw InfeasibleError("sigma is not a Nash equilibrium (player " +
                          std::to_string(nash.player + 1) + " gains " +
                          std::to_string(nash.gain) + " by deviating)");
  NonDegeneracy nd = IsNonDegenerate(game, sigma);
  if (!nd.non_degenerate)
    throw InfeasibleError("sigma is a degenerate equilibrium (det " +
                          std::to_string(nd.determinant) + ", min residual " +
                          std::to_string(nd.min_residual) + ")");
}

void RequireStrictImprovement(const Game& game, const MixedProfile& sigma,
                              const Profile& target) {
  if (!game.ValidProfile(target)) throw GameError("target out of range");
  if (!ParetoImproves(game, target, sigma).improves)
    throw InfeasibleError("target does not strictly Pareto improve sigma");
}

}  // namespace internal
}  // namespace cgames
