#include <functional>

#include "commitment_games/protocols.h"
#include "commitment_games/verifier.h"

namespace cgames {
namespace {

DeltaChoice Search(const Game& game, const DeltaSearchOptions& options,
                   const std::function<ProtocolPlan(double)>& build) {
  DeltaChoice choice;
  double delta = options.initial ? *options.initial : 0.01 * game.UtilityRange();
  if (!(delta > 0.0)) {
    choice.failure = "game has no utility range to scale delta from";
    return choice;
  }
  GridOptions grid;
  grid.deviation_budget = options.deviation_budget;
  grid.probe_samples = options.probe_samples;
  for (; delta >= options.floor; delta *= 0.5) {
    choice.tried.push_back(delta);
    try {
      ProtocolPlan plan = build(delta);
      VerificationReport report = VerifyPlan(game, plan, grid);
      if (report.accepted) {
        choice.found = true;
        choice.delta = delta;
        choice.rounds = static_cast<int>(plan.rounds.size());
        choice.failure.clear();
        return choice;
      }
      choice.failure = "verification rejected delta " + std::to_string(delta);
    } catch (const InfeasibleError& e) {
      choice.failure = e.what();
    }
  }
  choice.failure = "delta floor reached; last failure: " + choice.failure;
  return choice;
}

}  // namespace

DeltaChoice ChooseDeltaForTarget(const Game& game, const MixedProfile& sigma,
                                 const Profile& target,
                                 const DeltaSearchOptions& options) {
  try {
    ClassifyCase(game, sigma, target);
  } catch (const InfeasibleError& e) {
    DeltaChoice choice;
    choice.failure = e.what();
    return choice;
  }
  return Search(game, options, [&](double delta) {
    return BuildParetoPlan(game, sigma, target, delta);
  });
}

DeltaChoice ChooseDeltaForPayoffs(const Game& game, const MixedProfile& sigma,
                                  const std::vector<double>& x,
                                  const DeltaSearchOptions& options) {
  try {
    BuildWelfareTransferStage(game, sigma, x, 1.0);
  } catch (const InfeasibleError& e) {
    DeltaChoice choice;
    choice.failure = e.what();
    return choice;
  }
  return Search(game, options, [&](double delta) {
    return BuildWelfarePlan(game, sigma, x, delta);
  });
}

}  // namespace cgames
