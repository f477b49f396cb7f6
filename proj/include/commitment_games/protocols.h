#ifndef COMMITMENT_GAMES_PROTOCOLS_H_
#define COMMITMENT_GAMES_PROTOCOLS_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "commitment_games/commitment.h"
#include "commitment_games/equilibria.h"
#include "commitment_games/game.h"

namespace cgames {

// Construction preconditions not met, or a construction that cannot proceed.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CaseTag {
  kPartialSupportDisjoint,
  kPartialSupportMixed,
  kInSupportIndirect,
  kFullSupport2p,
  kFullSupportNp,
  kTwoByTwo,
  kWelfareTransferStage,
};
const char* CaseTagName(CaseTag tag);
CaseTag ParseCaseTag(const std::string& name);

enum class TargetRole { kParetoImprover, kWelfareMaximizer };

struct OutcomeTarget {
  Profile profile;
  TargetRole role = TargetRole::kParetoImprover;
};

// P: burn x at one outcome. M: burn x at every (a', a_-i) with a' != a_i.
// R: add coefficients to one indifference row of the player (component is
// the compared action), coefficients indexed over opposing profiles in
// lexicographic order.
struct ElementaryCommitment {
  enum class Kind { kP, kM, kR };
  Kind kind = Kind::kP;
  int player = 0;
  Profile outcome;
  double amount = 0.0;
  int reference_action = 0;  // R only
  int compared_action = 0;   // R only
  std::vector<double> coefficients;
};

// Burn pledges realizing the commitment.
std::vector<Pledge> Compile(const Game& game, const ElementaryCommitment& c);

enum class Monotonicity { kUtilities, kWelfare };

struct PlanStage {
  CaseTag tag = CaseTag::kPartialSupportDisjoint;
  int first_round = 0;
  int end_round = 0;  // exclusive
  MixedProfile baseline;
  Supports reference_support;
  std::vector<double> ceiling;  // punishment payoff bound per player
  std::vector<double> target_bound;  // u(target) at stage start
  Profile target;
  Monotonicity monotonicity = Monotonicity::kUtilities;
  bool allow_fallback = false;
  bool preserves_target = true;
};

struct ProtocolPlan {
  CaseTag case_tag = CaseTag::kPartialSupportDisjoint;
  double delta = 0.0;
  Mode mode = Mode::kBurnOnly;
  // Canonical action order per player (original indices, target first).
  std::vector<std::vector<int>> permutation;
  std::vector<CommitmentRound> rounds;
  OutcomeTarget target;
  MixedProfile baseline;
  std::vector<PlanStage> stages;
  std::uint64_t base_hash = 0;
  std::vector<std::uint64_t> checkpoints;  // game hash after k rounds
  std::vector<double> checkpoint_lambda;   // path parameter, when defined
  std::vector<double> expected_terminal_payoffs;
  double round_bound_constant = 64.0;

  const PlanStage& StageAt(int prefix) const;
};

// Games after 0..R rounds.
std::vector<Game> Checkpoints(const Game& base, const ProtocolPlan& plan);
void FinalizePlan(const Game& base, ProtocolPlan& plan);

// Requires a non-degenerate Nash sigma and a strictly improving target.
CaseTag ClassifyCase(const Game& game, const MixedProfile& sigma,
                     const Profile& target);

ProtocolPlan BuildPartialSupportPlan(const Game& game,
                                     const MixedProfile& sigma,
                                     const Profile& target, double delta);
ProtocolPlan BuildTwoPlayerFullSupportPlan(const Game& game,
                                           const MixedProfile& sigma,
                                           const Profile& target,
                                           double delta);
ProtocolPlan BuildMultiplayerPlan(const Game& game, const MixedProfile& sigma,
                                  const Profile& target, double delta);
ProtocolPlan Build2x2Plan(const Game& game, const MixedProfile& sigma,
                          const Profile& target, double delta);

// Dispatches on ClassifyCase.
ProtocolPlan BuildParetoPlan(const Game& game, const MixedProfile& sigma,
                             const Profile& target, double delta);

// Coefficient array over opposing profiles (lexicographic, all actions) for
// player `player`; zero unless every opposing index is one of the first two
// entries of `order`. order[j] lists player j's actions, reference first.
std::vector<double> CoefficientArray(
    const MixedProfile& sigma, int player,
    const std::vector<std::vector<int>>& order,
    const std::vector<int>& action_counts);
// Canonical-label form: sigma_j given in canonical order, all players own
// at least two actions; indices (i_2..i_n) over players other than 0.
std::vector<double> CoefficientArray(const MixedProfile& canonical_sigma);

// Two-player blocks in canonical order (reference action first).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> CanonicalBlocks(
    const Game& game, const std::vector<std::vector<int>>& order);

struct WelfareStage {
  ProtocolPlan plan;
  Game terminal;
  Profile welfare_profile;
  bool direct = false;  // only the welfare-maximizing outcome was touched
  // Per-player signed adjustment tensor at lambda = 1.
  Game direction;
};

// Utilities along the path at lambda (direction scaled).
Game WelfarePathAt(const Game& game, const WelfareStage& stage, double lambda);

WelfareStage BuildWelfareTransferStage(const Game& game,
                                       const MixedProfile& sigma,
                                       const std::vector<double>& x,
                                       double delta, bool allow_direct = true);
// Transfer stage followed by the Pareto construction toward the
// welfare-maximizing outcome.
ProtocolPlan BuildWelfarePlan(const Game& game, const MixedProfile& sigma,
                              const std::vector<double>& x, double delta,
                              bool allow_direct = true);

struct DeltaChoice {
  bool found = false;
  double delta = 0.0;
  int rounds = 0;
  std::vector<double> tried;
  std::string failure;
};

struct DeltaSearchOptions {
  std::optional<double> initial;  // default 1% of the utility range
  double floor = 1e-6;
  int deviation_budget = 24;      // prefixes checked per candidate
  int probe_samples = 4;
};

DeltaChoice ChooseDeltaForTarget(const Game& game, const MixedProfile& sigma,
                                 const Profile& target,
                                 const DeltaSearchOptions& options = {});
DeltaChoice ChooseDeltaForPayoffs(const Game& game, const MixedProfile& sigma,
                                  const std::vector<double>& x,
                                  const DeltaSearchOptions& options = {});

}  // namespace cgames

#endif  // COMMITMENT_GAMES_PROTOCOLS_H_
