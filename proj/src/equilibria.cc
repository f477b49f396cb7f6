#include "commitment_games/equilibria.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "commitment_games/parallel.h"

namespace cgames {

NashCheck IsNash(const Game& game, const MixedProfile& sigma, double tol) {
  ValidateProfile(game, sigma);
  NashCheck worst;
  for (int i = 0; i < game.num_players(); ++i) {
    const double base = ExpectedUtility(game, sigma, i);
    for (int a = 0; a < game.num_actions(i); ++a) {
      const double gain = DeviationUtility(game, sigma, i, a) - base;
      if (gain > tol && (worst.ok || gain > worst.gain)) {
        worst.ok = false;
        worst.player = i;
        worst.action = a;
        worst.gain = gain;
      }
    }
  }
  return worst;
}

bool IsPureNash(const Game& game, const Profile& profile, double tol) {
  Profile dev = profile;
  for (int i = 0; i < game.num_players(); ++i) {
    const double base = game.utility(i, profile);
    for (int a = 0; a < game.num_actions(i); ++a) {
      dev[i] = a;
      if (game.utility(i, dev) > base + tol) return false;
    }
    dev[i] = profile[i];
  }
  return true;
}

std::vector<Profile> EnumeratePureNash(const Game& game, double tol) {
  std::vector<Profile> out;
  Profile a(game.num_players(), 0);
  do {
    if (IsPureNash(game, a, tol)) out.push_back(a);
  } while (NextProfile(game.action_counts(), a));
  return out;
}

std::optional<int> StrictlyDominantAction(const Game& game, int player) {
  const int n = game.num_players();
  std::vector<int> others = game.action_counts();
  others[player] = 1;
  for (int a = 0; a < game.num_actions(player); ++a) {
    bool dominant = true;
    Profile rest(n, 0);
    do {
      Profile p = rest;
      p[player] = a;
      const double ua = game.utility(player, p);
      for (int b = 0; b < game.num_actions(player) && dominant; ++b) {
        if (b == a) continue;
        p[player] = b;
        if (!(ua > game.utility(player, p))) dominant = false;
      }
    } while (dominant && NextProfile(others, rest));
    if (dominant) return a;
  }
  return std::nullopt;
}

namespace {

bool AcceptSolution(const CharacteristicSystem& sys, const Eigen::VectorXd& p,
                    const SolveOptions& options, SolveResult& result) {
  for (int i = 0; i < sys.num_players; ++i)
    for (size_t m = 0; m < sys.support[i].size(); ++m) {
      const double v = p[sys.offsets[i] + m];
      if (!(v > 0.0) || v > 1.0 + 1e-12) {
        result.reason = "support probability outside (0,1]";
        return false;
      }
    }
  Eigen::VectorXd f = sys.Evaluate(p);
  result.residual_norm = f.size() ? f.norm() : 0.0;
  if (result.residual_norm > options.accept_tol) {
    result.reason = "equations not satisfied";
    return false;
  }
  Eigen::VectorXd r = sys.EvaluateResiduals(p);
  if (r.size() && r.minCoeff() < -options.residual_tol) {
    result.reason = "an action outside the support is a better response";
    return false;
  }
  return true;
}

}  // namespace

SolveResult SolveOnSupport(const Game& game, const Supports& support,
                           const std::optional<MixedProfile>& seed,
                           const SolveOptions& options) {
  SolveResult result;
  CharacteristicSystem sys = BuildCharacteristicSystem(game, support);
  Eigen::VectorXd p;
  if (game.num_players() == 2) {
    Eigen::MatrixXd a = sys.Jacobian(Eigen::VectorXd::Zero(sys.num_variables));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    const double det = lu.determinant();
    if (!lu.isInvertible() || std::abs(det) <= DeterminantTolerance(a)) {
      result.degenerate = true;
      result.reason = "singular system";
      return result;
    }
    p = lu.solve(sys.rhs);
    result.iterations = 1;
  } else {
    p.resize(sys.num_variables);
    for (int i = 0; i < sys.num_players; ++i) {
      double total = 0.0;
      for (size_t m = 0; m < support[i].size(); ++m) {
        double v = seed ? (*seed)[i][support[i][m]] : 1.0;
        if (!(v > 0.0)) v = 1e-3;
        p[sys.offsets[i] + m] = v;
        total += v;
      }
      for (size_t m = 0; m < support[i].size(); ++m)
        p[sys.offsets[i] + m] /= total;
    }
    Eigen::VectorXd f = sys.Evaluate(p);
    double norm = f.norm();
    int it = 0;
    for (; it < options.max_iter && norm > options.newton_tol; ++it) {
      Eigen::MatrixXd jac = sys.Jacobian(p);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
      if (!lu.isInvertible()) {
        result.degenerate = true;
        result.reason = "singular Jacobian during Newton iteration";
        return result;
      }
      Eigen::VectorXd step = lu.solve(f);
      double t = 1.0;
      Eigen::VectorXd trial = p - step;
      double trial_norm = sys.Evaluate(trial).norm();
      for (int halvings = 0; trial_norm > norm && halvings < 40; ++halvings) {
        t *= 0.5;
        trial = p - t * step;
        trial_norm = sys.Evaluate(trial).norm();
      }
      if (trial_norm > norm) break;  // no descent along the Newton direction
      p = trial;
      f = sys.Evaluate(p);
      norm = trial_norm;
    }
    result.iterations = it;
    result.residual_norm = norm;
    if (norm > options.accept_tol) {
      result.reason = "Newton iteration did not converge";
      return result;
    }
  }
  if (!AcceptSolution(sys, p, options, result)) return result;
  result.profile = sys.ToProfile(game, p);
  return result;
}

NonDegeneracy IsNonDegenerate(const Game& game, const MixedProfile& sigma) {
  NashCheck nash = IsNash(game, sigma);
  if (!nash.ok)
    throw GameError("profile is not a Nash equilibrium (player " +
                    std::to_string(nash.player + 1) + " gains " +
                    std::to_string(nash.gain) + ")");
  CharacteristicSystem sys = BuildCharacteristicSystem(game, Support(sigma));
  Eigen::VectorXd p = sys.ToVariables(sigma);
  Eigen::MatrixXd jac = sys.Jacobian(p);
  NonDegeneracy out;
  out.determinant = jac.determinant();
  out.det_tol = DeterminantTolerance(jac);
  Eigen::VectorXd r = sys.EvaluateResiduals(p);
  out.min_residual =
      r.size() ? r.minCoeff() : std::numeric_limits<double>::infinity();
  out.non_degenerate =
      std::abs(out.determinant) > out.det_tol && out.min_residual > 0.0;
  return out;
}

namespace {

bool WithinCeiling(const Game& game, const MixedProfile& sigma,
                   const std::vector<double>& ceiling) {
  for (int i = 0; i < game.num_players(); ++i)
    if (ExpectedUtility(game, sigma, i) > ceiling[i] + kDefaultTolerance)
      return false;
  return true;
}

// Largest ceiling excess over players; smaller is a harsher punishment.
double CeilingExcess(const Game& game, const MixedProfile& sigma,
                     const std::vector<double>& ceiling) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < game.num_players(); ++i)
    worst = std::max(worst, ExpectedUtility(game, sigma, i) - ceiling[i]);
  return worst;
}

}  // namespace

namespace {

bool SameProfile(const MixedProfile& a, const MixedProfile& b) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < a[i].size(); ++k)
      if (std::abs(a[i][k] - b[i][k]) > 1e-12) return false;
  return true;
}

// 2x2 equilibrium components are axis-aligned boxes whose corners take
// each probability from {0, 1, opponent's indifference point}; support
// enumeration misses the corners of degenerate components.
void AddBinaryCorners(const Game& game, std::vector<MixedProfile>& out) {
  std::vector<double> candidates[2];
  for (int i = 0; i < 2; ++i) {
    const int other = 1 - i;
    candidates[i] = {0.0, 1.0};
    // d(p) = p d(0) + (1 - p) d(1), other's gain from action 0 when i
    // plays 0 with probability p.
    double d[2];
    for (int a = 0; a < 2; ++a) {
      Profile zero(2), one(2);
      zero[i] = one[i] = a;
      zero[other] = 0;
      one[other] = 1;
      d[a] = game.utility(other, zero) - game.utility(other, one);
    }
    if (d[0] != d[1]) {
      const double p = d[1] / (d[1] - d[0]);
      if (p > 0.0 && p < 1.0) candidates[i].push_back(p);
    }
  }
  for (double p : candidates[0])
    for (double q : candidates[1]) {
      const MixedProfile sigma{{p, 1.0 - p}, {q, 1.0 - q}};
      if (!IsNash(game, sigma)) continue;
      bool seen = false;
      for (const auto& e : out) seen = seen || SameProfile(e, sigma);
      if (!seen) out.push_back(sigma);
    }
}

}  // namespace

std::vector<MixedProfile> EnumerateEquilibria(const Game& game, int budget) {
  const int n = game.num_players();
  // Every nonempty subset of each player's actions, as bitmasks.
  std::vector<int> subset_counts(n);
  for (int i = 0; i < n; ++i) {
    if (game.num_actions(i) > 20) throw GameError("too many actions to enumerate");
    subset_counts[i] = (1 << game.num_actions(i)) - 1;
  }
  std::vector<MixedProfile> out;
  std::vector<int> choice(n, 0);
  int tried = 0;
  do {
    if (tried++ >= budget) break;
    Supports support(n);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < game.num_actions(i); ++a)
        if ((choice[i] + 1) >> a & 1) support[i].push_back(a);
    SolveResult r = SolveOnSupport(game, support);
    if (r.profile && IsNash(game, *r.profile)) out.push_back(*r.profile);
  } while (NextProfile(subset_counts, choice));
  if (n == 2 && game.num_actions(0) == 2 && game.num_actions(1) == 2)
    AddBinaryCorners(game, out);
  return out;
}

std::optional<MixedProfile> FindPunishmentEquilibrium(
    const Game& game, const Supports& reference_support,
    const MixedProfile& seed, const std::vector<double>& ceiling,
    const PunishmentOptions& options) {
  if (static_cast<int>(ceiling.size()) != game.num_players())
    throw GameError("one ceiling per player required");
  SolveResult r = SolveOnSupport(game, reference_support, seed);
  if (r.profile && IsNash(game, *r.profile) &&
      WithinCeiling(game, *r.profile, ceiling))
    return r.profile;
  if (!options.allow_fallback) return std::nullopt;
  std::optional<MixedProfile> best;
  double best_excess = std::numeric_limits<double>::infinity();
  for (const MixedProfile& eq : EnumerateEquilibria(game, options.support_budget)) {
    if (!WithinCeiling(game, eq, ceiling)) continue;
    const double excess = CeilingExcess(game, eq, ceiling);
    if (excess < best_excess) {
      best_excess = excess;
      best = eq;
    }
  }
  return best;
}

namespace {

PunishabilityReport RunProbe(const Game& game, const MixedProfile& sigma,
                             double epsilon, const std::vector<Game>& perturbed,
                             bool allow_fallback) {
  PunishabilityReport report;
  report.epsilon = epsilon;
  report.samples = static_cast<int>(perturbed.size());
  const Supports support = Support(sigma);
  const std::vector<double> base = ExpectedUtilities(game, sigma);
  std::vector<double> ceiling = base;
  for (double& c : ceiling) c += epsilon;
  PunishmentOptions options;
  options.allow_fallback = allow_fallback;

  std::vector<std::optional<MixedProfile>> found(perturbed.size());
  ParallelFor(static_cast<int>(perturbed.size()), [&](int k) {
    found[k] = FindPunishmentEquilibrium(perturbed[k], support, sigma,
                                         ceiling, options);
  });
  report.worst_excess = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < perturbed.size(); ++k) {
    if (!found[k]) {
      report.failures.push_back(
          {static_cast<int>(k), perturbed[k],
           "no equilibrium within the ceiling"});
      continue;
    }
    for (int i = 0; i < game.num_players(); ++i) {
      const double excess = ExpectedUtility(perturbed[k], *found[k], i) - base[i];
      report.worst_excess = std::max(report.worst_excess, excess);
    }
  }
  // The excess bound is strict.
  for (size_t k = 0; k < perturbed.size(); ++k) {
    if (!found[k]) continue;
    for (int i = 0; i < game.num_players(); ++i) {
      if (!(ExpectedUtility(perturbed[k], *found[k], i) - base[i] < epsilon)) {
        report.failures.push_back(
            {static_cast<int>(k), perturbed[k], "excess not below epsilon"});
        break;
      }
    }
  }
  std::stable_sort(report.failures.begin(), report.failures.end(),
                   [](const ProbeFailure& a, const ProbeFailure& b) {
                     return a.sample < b.sample;
                   });
  if (report.samples == 0) report.worst_excess = 0.0;
  return report;
}

}  // namespace

PunishabilityReport ProbeStrongPunishability(const Game& game,
                                             const MixedProfile& sigma,
                                             double epsilon, double delta,
                                             int samples,
                                             std::uint64_t rng_seed) {
  NonDegeneracy nd = IsNonDegenerate(game, sigma);
  if (!nd.non_degenerate)
    throw GameError("probe requires a non-degenerate equilibrium");
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> noise(-delta, delta);
  std::vector<Game> perturbed;
  perturbed.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    std::vector<double> payoffs = game.payoffs();
    if (delta > 0.0)
      for (double& v : payoffs) v += noise(rng);
    perturbed.emplace_back(game.action_counts(), std::move(payoffs),
                           game.action_names());
  }
  PunishabilityReport report = RunProbe(game, sigma, epsilon, perturbed, false);
  report.delta = delta;
  report.rng_seed = rng_seed;
  return report;
}

PunishabilityReport ProbeAgainstGames(const Game& game,
                                      const MixedProfile& sigma,
                                      double epsilon,
                                      const std::vector<Game>& perturbed,
                                      bool allow_fallback) {
  NashCheck nash = IsNash(game, sigma);
  if (!nash.ok) throw GameError("probe requires a Nash equilibrium");
  PunishabilityReport report =
      RunProbe(game, sigma, epsilon, perturbed, allow_fallback);
  for (const Game& g : perturbed)
    report.delta = std::max(report.delta, GameDistance(game, g));
  return report;
}

}  // namespace cgames
