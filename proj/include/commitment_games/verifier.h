#ifndef COMMITMENT_GAMES_VERIFIER_H_
#define COMMITMENT_GAMES_VERIFIER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "commitment_games/commitment.h"
#include "commitment_games/protocols.h"

namespace cgames {

struct GridOptions {
  // Deviation amounts as fractions of delta.
  std::vector<double> amount_fractions{0.5, 1.0};
  // Prefixes checked for deviations, evenly spaced; 0 means every prefix.
  int deviation_budget = 0;
  // Transfer at one outcome plus a burn at another sharing the deviator's
  // action.
  bool adversarial_pairs = true;
  // Perturbed games sampled per checkpoint for the punishability margin.
  int probe_samples = 4;
  std::uint64_t rng_seed = 1;
  double gain_tolerance = kDefaultTolerance;
};

enum class PropertyStatus { kPass, kFail, kNotApplicable };
const char* PropertyStatusName(PropertyStatus status);

struct PropertyResult {
  std::string name;
  PropertyStatus status = PropertyStatus::kNotApplicable;
  int prefix = -1;      // first failing checkpoint
  std::string witness;  // empty unless failed
};

struct OnPathReport {
  std::vector<PropertyResult> properties;
  bool ok = true;
  std::optional<Transcript> witness;
};

enum class DeviationClass {
  kCommitment = 0,
  kEarlyStop = 1,
  kContinueWhenStop = 2,
  kTerminalAction = 3,
};
const char* DeviationClassName(DeviationClass c);

struct DeviationOutcome {
  bool evaluated = false;
  double worst_gain = 0.0;
  int prefix = -1;
  int player = -1;
  std::string description;
  int cases = 0;
  std::optional<Transcript> witness;
};

struct DeviationReport {
  std::array<DeviationOutcome, 4> classes;
  std::vector<int> prefixes;
  std::vector<std::string> structural_failures;
  std::optional<Transcript> structural_witness;
  bool ok(double tol = kDefaultTolerance) const;
};

struct RoundBound {
  int rounds = 0;
  double bound = 0.0;
  double constant = 0.0;
  bool ok = true;
};

struct VerificationReport {
  OnPathReport on_path;
  DeviationReport deviations;
  RoundBound round_bound;
  GridOptions grid;
  bool accepted = false;
  std::string label = "grid-certified";
  // First available counterexample transcript.
  std::optional<Transcript> witness;
};

// Candidate replacement pledge sets for `player` in one round.
std::vector<std::vector<Pledge>> DeviationGrid(const Game& game, int player,
                                               double delta, Mode mode,
                                               const GridOptions& grid);

OnPathReport CheckOnPath(const Game& base, const ProtocolPlan& plan,
                         const GridOptions& grid = {});
DeviationReport CheckDeviations(const Game& base, const ProtocolPlan& plan,
                                const GridOptions& grid = {});
// |rounds| <= C * n / delta * U_range * max_i N_i.
RoundBound RoundBoundCheck(const Game& base, const ProtocolPlan& plan,
                           double constant);
VerificationReport VerifyPlan(const Game& base, const ProtocolPlan& plan,
                              const GridOptions& grid = {});

// Transcript of the prescribed play: every round, unanimous continue votes
// except a final stop, then the target.
Transcript OnPathTranscript(const Game& base, const ProtocolPlan& plan);

}  // namespace cgames

#endif  // COMMITMENT_GAMES_VERIFIER_H_
