#ifndef COMMITMENT_GAMES_CORPUS_H_
#define COMMITMENT_GAMES_CORPUS_H_

#include <optional>
#include <string>
#include <vector>

#include "commitment_games/game.h"
#include "commitment_games/protocols.h"
#include "commitment_games/verifier.h"

namespace cgames::corpus {

// Prisoner's dilemma, actions C, D.
Game PrisonersDilemma();
// Each player pays the other 1 whenever the other cooperates.
CommitmentRound ReciprocalPledges();
// Expected matrix after ReciprocalPledges.
Game PrisonersDilemmaCommitted();

// Asymmetric chicken, actions Swerve, Straight.
Game Chicken();
// Player 1 pays player 2 20 on (Swerve, Straight).
CommitmentRound ChickenPledge();

// (A,A) is the unique equilibrium; (B,B) maximizes welfare.
Game Unfair();

// Rock-paper-scissors block plus a fourth action per player; the uniform
// mix over the block is a non-degenerate equilibrium.
Game FourActionDisjoint();
// Variant where the target's row action lies in the support.
Game FourActionMixed();

// 3x3 game whose (1/2, 1/2) mix over the first two actions is
// non-degenerate.
Game NonDegenerate3x3();
// 3x3 game where a single commitment round can remove the (A,A)
// equilibrium.
Game CounterGame();

// Three players, two actions each, uniform full-support equilibrium.
Game ThreePlayerBinary();
// Matching-pennies style 2x2 game whose first-action outcome Pareto
// improves on the mixed equilibrium.
Game PenniesWithBonus();

// Single round in which player 1 pays `delta` to player 2 on (A,B) and
// burns `delta` on (A,A).
CommitmentRound AdversarialMove(const Game& counter, double delta);

struct AdversarialCheck {
  int responses = 0;          // opposing grid responses tried
  int dominated_responses = 0;  // responses after which B is strictly dominant
  std::string first_failure;  // empty when every response kept B dominant
  bool ok() const { return responses > 0 && responses == dominated_responses; }
};
// Applies the adversarial move together with every same-round grid
// response of player 2 and checks that action B is strictly dominant for at
// least one player.
AdversarialCheck CheckAdversarialMove(const Game& counter, double delta,
                                      const GridOptions& grid = {});

// Both players burn delta each round everywhere except (A,A) and (C,C)
// until (C,C) is an equilibrium, with (A,A) as the threat.
ProtocolPlan NaivePlan(const Game& counter, double delta);

// A plan input: pure target or welfare payoff vector.
struct PlanCase {
  std::string id;
  std::string description;
  Game game;
  MixedProfile sigma;
  std::optional<Profile> target;
  std::optional<std::vector<double>> payoffs;
  double delta = 0.0;
};
std::vector<PlanCase> PlanCases();
ProtocolPlan BuildCasePlan(const PlanCase& c, double delta);

struct ReproduceRow {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
};
std::vector<std::string> ReproduceIds();
// Throws std::invalid_argument for an unknown id; "all"
// runs every row.
std::vector<ReproduceRow> Reproduce(const std::string& id);

}  // namespace cgames::corpus

#endif  // COMMITMENT_GAMES_CORPUS_H_
