#include <algorithm>
#include <cmath>

#include "protocols_internal.h"

namespace cgames {
namespace {

using internal::BurnMap;

// Burns making `goal` a Nash equilibrium with the given margin. Outcomes
// burned either have zero probability under `baseline` or are burned
// uniformly across a player's actions, so the baseline's indifferences and
// out-of-support slacks survive. One round list per player.
std::vector<std::vector<CommitmentRound>> TowardPure(
    const Game& game, const MixedProfile& baseline, const Profile& goal,
    double margin, double delta) {
  const int n = game.num_players();
  std::vector<std::vector<CommitmentRound>> lists(n);
  for (int i = 0; i < n; ++i) {
    Profile dev = goal;
    const double at_goal = game.utility(i, goal);
    std::vector<double> need(game.num_actions(i), 0.0);
    double top = 0.0;
    for (int a = 0; a < game.num_actions(i); ++a) {
      if (a == goal[i]) continue;
      dev[i] = a;
      need[a] = std::max(0.0, game.utility(i, dev) - at_goal + margin);
      top = std::max(top, need[a]);
    }
    if (top <= 0.0) continue;

    const double w = ProfileProbability(baseline, goal, i);
    BurnMap lower_goal_row, column;
    if (w > kSupportEpsilon) {
      if (baseline[i][goal[i]] > kSupportEpsilon)
        throw InfeasibleError("goal outcome lies in the support of sigma");
      // Lowering u_i(goal_i, .) off goal_-i keeps goal_i a strict
      // non-best-response once the whole column drops by top.
      const double x = std::max(top, top * w / (1.0 - w));
      std::vector<int> counts = game.action_counts();
      counts[i] = 1;
      Profile rest(n, 0);
      do {
        Profile p = rest;
        p[i] = goal[i];
        if (p == goal) continue;
        lower_goal_row[{i, game.ProfileIndex(p)}] = x;
      } while (NextProfile(counts, rest));
      for (int a = 0; a < game.num_actions(i); ++a) {
        if (a == goal[i]) continue;
        dev[i] = a;
        column[{i, game.ProfileIndex(dev)}] = top;
      }
    } else {
      for (int a = 0; a < game.num_actions(i); ++a) {
        if (a == goal[i] || need[a] <= 0.0) continue;
        dev[i] = a;
        column[{i, game.ProfileIndex(dev)}] = need[a];
      }
    }
    lists[i] = internal::BurnSchedule(game, lower_goal_row, delta);
    auto second = internal::BurnSchedule(game, column, delta);
    lists[i].insert(lists[i].end(), second.begin(), second.end());
  }
  return lists;
}

bool SameProfile(const MixedProfile& a, const MixedProfile& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (size_t k = 0; k < a[i].size(); ++k)
      if (std::abs(a[i][k] - b[i][k]) > kDefaultTolerance) return false;
  }
  return true;
}

ProtocolPlan EmptyPlan(const Game& game, const MixedProfile& sigma,
                       const Profile& target, double delta, CaseTag tag) {
  ProtocolPlan plan;
  plan.case_tag = tag;
  plan.delta = delta;
  plan.mode = Mode::kBurnOnly;
  plan.permutation = internal::CanonicalOrder(game, target);
  plan.target = {target, TargetRole::kParetoImprover};
  plan.baseline = sigma;
  return plan;
}

PlanStage MakeStage(const Game& game, CaseTag tag, const MixedProfile& baseline,
                    const Profile& target, std::vector<double> ceiling) {
  PlanStage stage;
  stage.tag = tag;
  stage.baseline = baseline;
  stage.reference_support = Support(baseline);
  stage.ceiling = std::move(ceiling);
  stage.target = target;
  stage.target_bound = internal::TargetPayoffs(game, target);
  stage.monotonicity = Monotonicity::kUtilities;
  return stage;
}

}  // namespace

ProtocolPlan BuildPartialSupportPlan(const Game& game,
                                     const MixedProfile& sigma,
                                     const Profile& target, double delta) {
  if (!(delta > 0.0)) throw GameError("delta must be positive");
  ValidateProfile(game, sigma);
  if (!game.ValidProfile(target)) throw GameError("target out of range");

  if (SameProfile(sigma, PureProfile(game, target)) &&
      IsPureNash(game, target)) {
    ProtocolPlan plan =
        EmptyPlan(game, sigma, target, delta, CaseTag::kInSupportIndirect);
    PlanStage stage = MakeStage(game, plan.case_tag, sigma, target,
                                internal::TargetPayoffs(game, target));
    internal::AppendStage(plan, stage, {});
    FinalizePlan(game, plan);
    return plan;
  }

  const CaseTag tag = ClassifyCase(game, sigma, target);
  if (tag != CaseTag::kPartialSupportDisjoint &&
      tag != CaseTag::kPartialSupportMixed &&
      tag != CaseTag::kInSupportIndirect)
    throw InfeasibleError(std::string("partial-support construction does not "
                                      "apply to case ") +
                          CaseTagName(tag));
  ProtocolPlan plan = EmptyPlan(game, sigma, target, delta, tag);
  const std::vector<double> ceiling =
      internal::ParetoCeiling(game, sigma, target);

  if (tag != CaseTag::kInSupportIndirect) {
    auto lists = TowardPure(game, sigma, target, 0.0, delta);
    internal::AppendStage(plan, MakeStage(game, tag, sigma, target, ceiling),
                          internal::ZipRounds(lists));
    FinalizePlan(game, plan);
    return plan;
  }

  // Auxiliary outcome: differs from the target in every coordinate and has
  // zero probability under sigma.
  const int n = game.num_players();
  std::optional<Profile> aux;
  Profile a(n, 0);
  do {
    bool differs = true;
    for (int i = 0; i < n && differs; ++i) differs = a[i] != target[i];
    if (differs && ProfileProbability(sigma, a) <= kSupportEpsilon) {
      aux = a;
      break;
    }
  } while (NextProfile(game.action_counts(), a));
  if (!aux)
    throw InfeasibleError(
        "no auxiliary outcome differing from the target in every coordinate "
        "lies outside the support");

  // Stage 1: push u(aux) below u(target) by at least delta.
  BurnMap at_aux;
  for (int i = 0; i < n; ++i) {
    const double need =
        game.utility(i, *aux) - game.utility(i, target) + delta;
    if (need > 0.0) at_aux[{i, game.ProfileIndex(*aux)}] = need;
  }
  auto stage1 = internal::BurnSchedule(game, at_aux, delta);
  internal::AppendStage(plan, MakeStage(game, tag, sigma, target, ceiling),
                        stage1);
  Game g1 = ApplyRounds(game, stage1);

  // Stage 2: make aux a strict Nash equilibrium whose slack survives a
  // delta change of every entry.
  auto stage2 = internal::ZipRounds(
      TowardPure(g1, sigma, *aux, 2.0 * delta + 1e-9, delta));
  internal::AppendStage(plan, MakeStage(g1, tag, sigma, target, ceiling),
                        stage2);
  Game g2 = ApplyRounds(g1, stage2);

  // Stage 3: aux is the punishment; move the target to a Nash equilibrium.
  // Stage 1 left u(aux) + delta below the untouched target payoffs.
  const MixedProfile pure_aux = PureProfile(g2, *aux);
  auto stage3 =
      internal::ZipRounds(TowardPure(g2, pure_aux, target, 0.0, delta));
  internal::AppendStage(
      plan,
      MakeStage(g2, tag, pure_aux, target, internal::TargetPayoffs(g2, target)),
      stage3);
  FinalizePlan(game, plan);
  return plan;
}

}  // namespace cgames
