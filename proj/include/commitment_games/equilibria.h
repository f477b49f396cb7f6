#ifndef COMMITMENT_GAMES_EQUILIBRIA_H_
#define COMMITMENT_GAMES_EQUILIBRIA_H_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "commitment_games/game.h"

namespace cgames {

using Supports = std::vector<std::vector<int>>;

struct NashCheck {
  bool ok = true;
  int player = -1;  // violating player when !ok
  int action = -1;
  double gain = 0.0;
  explicit operator bool() const { return ok; }
};

NashCheck IsNash(const Game& game, const MixedProfile& sigma,
                 double tol = kDefaultTolerance);
bool IsPureNash(const Game& game, const Profile& profile,
                double tol = kDefaultTolerance);
// Sorted lexicographically.
std::vector<Profile> EnumeratePureNash(const Game& game,
                                       double tol = kDefaultTolerance);
// Action that beats every other action against every opposing profile.
std::optional<int> StrictlyDominantAction(const Game& game, int player);

// Product of variables times a coefficient. Variables index into the
// support-restricted probability vector of a CharacteristicSystem.
struct Monomial {
  double coef = 0.0;
  std::vector<int> vars;
};

struct Polynomial {
  std::vector<Monomial> terms;
  double Evaluate(const Eigen::VectorXd& p) const;
  void AddGradient(
      const Eigen::VectorXd& p,
      Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const;
};

// Normalization and indifference equations for one support. Components are
// ordered: n normalization rows, then for each player the indifference
// rows between the reference action (first support action) and each later
// support action. Monomials within an indifference row follow the
// lexicographic order of the opposing profile.
struct CharacteristicSystem {
  int num_players = 0;
  Supports support;
  std::vector<int> offsets;  // first variable of each player
  int num_variables = 0;
  std::vector<Polynomial> components;
  Eigen::VectorXd rhs;
  struct ComponentInfo {
    int player = -1;      // -1 for normalization rows of `norm_player`
    int norm_player = -1;
    int action = -1;      // compared support action
  };
  std::vector<ComponentInfo> info;
  std::vector<Polynomial> residuals;
  std::vector<std::pair<int, int>> residual_info;  // (player, action)

  // Two players only: X1 acts on player 2's variables, X2 on player 1's.
  Eigen::MatrixXd x1, x2;

  int Variable(int player, int support_pos) const {
    return offsets[player] + support_pos;
  }
  Eigen::VectorXd Evaluate(const Eigen::VectorXd& p) const;  // f(p) - rhs
  Eigen::MatrixXd Jacobian(const Eigen::VectorXd& p) const;
  Eigen::VectorXd EvaluateResiduals(const Eigen::VectorXd& p) const;
  Eigen::VectorXd ToVariables(const MixedProfile& sigma) const;
  MixedProfile ToProfile(const Game& game, const Eigen::VectorXd& p) const;
  // Two players: the Jacobian with rows grouped so it is block diagonal
  // diag(X2, X1) over (player 1 vars, player 2 vars), plus the matching rhs.
  Eigen::MatrixXd BlockMatrix() const;
  Eigen::VectorXd BlockRhs() const;
};

CharacteristicSystem BuildCharacteristicSystem(const Game& game,
                                               const Supports& support);

// Relative determinant cutoff: 1e-8 * (max |entry|)^dim.
double DeterminantTolerance(const Eigen::MatrixXd& m);

struct SolveOptions {
  int max_iter = 200;
  double newton_tol = 1e-12;
  double accept_tol = 1e-10;
  double residual_tol = kDefaultTolerance;
};

struct SolveResult {
  std::optional<MixedProfile> profile;
  bool degenerate = false;
  int iterations = 0;
  double residual_norm = 0.0;
  std::string reason;
};

SolveResult SolveOnSupport(const Game& game, const Supports& support,
                           const std::optional<MixedProfile>& seed = {},
                           const SolveOptions& options = {});

struct NonDegeneracy {
  bool non_degenerate = false;
  double determinant = 0.0;
  double det_tol = 0.0;
  double min_residual = 0.0;  // +inf when every action is in the support
};

// Throws GameError when sigma is not a Nash equilibrium.
NonDegeneracy IsNonDegenerate(const Game& game, const MixedProfile& sigma);

struct PunishmentOptions {
  // Fall back to any equilibrium found by bounded support enumeration.
  bool allow_fallback = false;
  int support_budget = 4096;
};

std::optional<MixedProfile> FindPunishmentEquilibrium(
    const Game& game, const Supports& reference_support,
    const MixedProfile& seed, const std::vector<double>& ceiling,
    const PunishmentOptions& options = {});

// Equilibria over all support combinations, at most `budget` of them tried.
// 2x2 games also get the corners of degenerate equilibrium components.
std::vector<MixedProfile> EnumerateEquilibria(const Game& game,
                                              int budget = 4096);

struct ProbeFailure {
  int sample = 0;
  Game perturbed;
  std::string reason;
};

struct PunishabilityReport {
  double epsilon = 0.0;
  double delta = 0.0;
  int samples = 0;
  std::uint64_t rng_seed = 0;
  std::vector<ProbeFailure> failures;  // sorted by sample index
  double worst_excess = 0.0;
  bool passed() const { return failures.empty(); }
};

// Uniform per-entry noise in [-delta, delta]; same-support punishment with
// ceiling u(sigma) + epsilon. Throws GameError on a degenerate profile.
PunishabilityReport ProbeStrongPunishability(const Game& game,
                                             const MixedProfile& sigma,
                                             double epsilon, double delta,
                                             int samples,
                                             std::uint64_t rng_seed);

// Same acceptance rule against caller-supplied perturbed games; only
// requires sigma to be Nash. With allow_fallback, any equilibrium counts.
PunishabilityReport ProbeAgainstGames(const Game& game,
                                      const MixedProfile& sigma,
                                      double epsilon,
                                      const std::vector<Game>& perturbed,
                                      bool allow_fallback = false);

}  // namespace cgames

#endif  // COMMITMENT_GAMES_EQUILIBRIA_H_
