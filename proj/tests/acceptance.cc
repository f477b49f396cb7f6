// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "commitment_games/corpus.h"
#include "commitment_games/equilibria.h"
#include "commitment_games/protocols.h"
#include "commitment_games/verifier.h"

using namespace cgames;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Game RandomGame(std::mt19937_64& rng, const std::vector<int>& counts,
                double lo = 0.0, double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Game g = Game::Zero(counts);
  std::vector<double> flat(g.payoffs().size());
  for (double& v : flat) v = u(rng);
  return Game(counts, std::move(flat));
}

// Criterion 1: reciprocal pledges reproduce the committed matrix exactly.
Outcome PrisonersDilemma() {
  const Game after =
      ApplyTransfers(corpus::PrisonersDilemma(), corpus::ReciprocalPledges());
  const bool exact = after.payoffs() == corpus::PrisonersDilemmaCommitted().payoffs();
  const auto nash = EnumeratePureNash(after, 0.0);
  bool cc = false;
  for (const auto& p : nash) cc = cc || p == Profile{0, 0};
  return {exact && cc, std::string("matrix ") + (exact ? "exact" : "differs") +
                           ", (C,C) " + (cc ? "in" : "not in") + " pure set"};
}

// Criterion 2: chicken pledge.
Outcome Chicken() {
  const Game after = ApplyTransfers(corpus::Chicken(), corpus::ChickenPledge());
  const bool entry =
      after.utility(0, {0, 1}) == -19.0 && after.utility(1, {0, 1}) == 22.0;
  const auto nash = EnumeratePureNash(after);
  const bool only = nash.size() == 1 && nash[0] == Profile{1, 0};
  return {entry && only, "entry (" + Num(after.utility(0, {0, 1})) + "," +
                             Num(after.utility(1, {0, 1})) + "), " +
                             std::to_string(nash.size()) + " pure equilibria"};
}

// Criterion 3: payoffs (4,3) with delta 1 on the unfair game.
Outcome Unfair() {
  const Game g = corpus::Unfair();
  const ProtocolPlan plan =
      BuildWelfarePlan(g, PureProfile(g, {0, 0}), {4.0, 3.0}, 1.0);
  bool threat = true;
  const auto games = Checkpoints(g, plan);
  for (const Game& c : games) threat = threat && IsPureNash(c, {0, 0});
  const Game& last = games.back();
  const bool terminal = IsPureNash(last, {1, 1}) &&
                        std::abs(last.utility(0, {1, 1}) - 4.0) <= 1e-12 &&
                        std::abs(last.utility(1, {1, 1}) - 3.0) <= 1e-12;
  GridOptions grid;
  grid.amount_fractions = {0.5, 1.0};
  grid.deviation_budget = 0;
  const DeviationReport dev = CheckDeviations(g, plan, grid);
  double worst = -INFINITY;
  bool all_classes = true;
  for (const auto& c : dev.classes) {
    all_classes = all_classes && c.evaluated;
    if (c.evaluated) worst = std::max(worst, c.worst_gain);
  }
  const bool ok = plan.rounds.size() == 6 && threat && terminal &&
                  all_classes && worst <= 1e-9 && dev.structural_failures.empty();
  return {ok, std::to_string(plan.rounds.size()) + " rounds, threat " +
                  (threat ? "kept" : "lost") + ", terminal " +
                  (terminal ? "(4,3) Nash" : "wrong") + ", worst gain " +
                  Num(worst)};
}

// Criterion 4: characteristic system of the 3x3 example.
Outcome CharacteristicMatrix() {
  const Game g = corpus::NonDegenerate3x3();
  const Supports support{{0, 1}, {0, 1}};
  const CharacteristicSystem sys = BuildCharacteristicSystem(g, support);
  Eigen::MatrixXd want(4, 4);
  want << 1, 1, 0, 0, 4, -4, 0, 0, 0, 0, 1, 1, 0, 0, 4, -4;
  Eigen::VectorXd rhs(4);
  rhs << 1, 0, 1, 0;
  const bool exact = sys.BlockMatrix() == want && sys.BlockRhs() == rhs;
  const SolveResult r = SolveOnSupport(g, support);
  double err = INFINITY;
  if (r.profile) {
    err = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 2; ++a)
        err = std::max(err, std::abs((*r.profile)[i][a] - 0.5));
  }
  const bool nd = r.profile && IsNonDegenerate(g, *r.profile).non_degenerate;
  return {exact && err <= 1e-12 && nd,
          std::string("matrix ") + (exact ? "exact" : "differs") +
              ", max |p - 1/2| " + Num(err) + ", " +
              (nd ? "non-degenerate" : "degenerate")};
}

// Criterion 5: adversarial move and the naive plan.
Outcome Counter() {
  const Game g = corpus::CounterGame();
  const double delta = 0.1;
  const corpus::AdversarialCheck adv = corpus::CheckAdversarialMove(g, delta);
  const ProtocolPlan naive = corpus::NaivePlan(g, delta);
  const DeviationReport dev = CheckDeviations(g, naive);
  const DeviationOutcome& c = dev.classes[0];
  const bool rejected = c.evaluated && c.worst_gain > 0.0;
  return {adv.ok() && rejected,
          "B dominant in " + std::to_string(adv.dominated_responses) + "/" +
              std::to_string(adv.responses) +
              " responses, naive plan worst gain " + Num(c.worst_gain)};
}

// Criterion 6: punishability probe.
Outcome Probe() {
  const Game g = corpus::NonDegenerate3x3();
  const MixedProfile sigma = UniformOver(g, {{0, 1}, {0, 1}});
  const PunishabilityReport r =
      ProbeStrongPunishability(g, sigma, 1.0, 0.05, 100, 20240601);
  return {r.samples == 100 && r.failures.empty() && r.worst_excess < 1.0,
          std::to_string(r.failures.size()) + " failures, worst excess " +
              Num(r.worst_excess)};
}

// Criterion 7: coefficient-array identities against a direct summation.
Outcome CoefficientIdentities() {
  std::mt19937_64 rng(7);
  double worst_q1 = 0.0, worst_q2 = 0.0;
  bool first_positive = true;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 2;
    std::uniform_int_distribution<int> count(2, 3);
    std::vector<int> counts(n);
    for (int& c : counts) c = count(rng);
    MixedProfile sigma(n);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int j = 0; j < n; ++j) {
      double total = 0.0;
      for (int a = 0; a < counts[j]; ++a) {
        sigma[j].push_back(u(rng));
        total += sigma[j].back();
      }
      for (double& v : sigma[j]) v /= total;
    }
    const int player = trial % n;
    std::vector<std::vector<int>> order(n);
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < counts[j]; ++a) order[j].push_back(a);
      std::shuffle(order[j].begin(), order[j].end(), rng);
    }
    const std::vector<double> x = CoefficientArray(sigma, player, order, counts);

    std::vector<int> others = counts;
    others[player] = 1;
    Profile first(n, 0);
    for (int j = 0; j < n; ++j)
      if (j != player) first[j] = order[j][0];
    double q1 = 0.0;
    // gradient over every opposing variable (j, b)
    std::vector<std::vector<double>> grad(n);
    for (int j = 0; j < n; ++j) grad[j].assign(counts[j], 0.0);
    Profile a(n, 0);
    size_t k = 0;
    do {
      const double coef = x.at(k++);
      if (a == first && !(coef > 0.0)) first_positive = false;
      double prod = coef;
      for (int j = 0; j < n; ++j)
        if (j != player) prod *= sigma[j][a[j]];
      q1 += prod;
      for (int j = 0; j < n; ++j) {
        if (j == player) continue;
        double rest = coef;
        for (int m = 0; m < n; ++m)
          if (m != player && m != j) rest *= sigma[m][a[m]];
        grad[j][a[j]] += rest;
      }
    } while (NextProfile(others, a));
    if (k != x.size()) first_positive = false;
    worst_q1 = std::max(worst_q1, std::abs(q1));
    for (const auto& row : grad)
      for (double v : row) worst_q2 = std::max(worst_q2, std::abs(v));
  }
  return {worst_q1 <= 1e-10 && worst_q2 <= 1e-9 && first_positive,
          "max |Q1| " + Num(worst_q1) + ", max |grad| " + Num(worst_q2) +
              (first_positive ? ", first entry positive" : ", first entry not positive")};
}

// Random 3x3 game with a non-degenerate full-support equilibrium and a
// strictly Pareto-improving pure profile that is not already Nash.
bool FullSupportInstance(std::mt19937_64& rng, Game& g, MixedProfile& sigma,
                         Profile& target) {
  for (int attempt = 0; attempt < 2000; ++attempt) {
    g = RandomGame(rng, {3, 3});
    const SolveResult r = SolveOnSupport(g, {{0, 1, 2}, {0, 1, 2}});
    if (!r.profile || !IsNash(g, *r.profile)) continue;
    if (!IsNonDegenerate(g, *r.profile).non_degenerate) continue;
    sigma = *r.profile;
    double best = -INFINITY;
    bool found = false;
    Profile p(2, 0);
    do {
      const ParetoResult pr = ParetoImproves(g, p, sigma);
      if (pr.improves && pr.margin > 0.5 && !IsPureNash(g, p) && pr.margin > best) {
        best = pr.margin;
        target = p;
        found = true;
      }
    } while (NextProfile(g.action_counts(), p));
    if (found) return true;
  }
  return false;
}

// Criterion 8: two-player full-support builder.
Outcome FullSupport2p() {
  std::mt19937_64 rng(8);
  int built = 0;
  double worst_drift = 0.0;
  std::string failure;
  for (int trial = 0; trial < 50; ++trial) {
    Game g;
    MixedProfile sigma;
    Profile target;
    if (!FullSupportInstance(rng, g, sigma, target)) {
      failure = "instance generation failed";
      break;
    }
    const double delta = 0.05;
    ProtocolPlan plan;
    try {
      plan = BuildTwoPlayerFullSupportPlan(g, sigma, target, delta);
    } catch (const InfeasibleError& e) {
      failure = std::string("trial ") + std::to_string(trial) + ": " + e.what();
      break;
    }
    const Supports full{{0, 1, 2}, {0, 1, 2}};
    const CharacteristicSystem base = BuildCharacteristicSystem(g, full);
    const double d1 = base.x1.determinant(), d2 = base.x2.determinant();
    bool ok = true;
    const auto games = Checkpoints(g, plan);
    for (size_t k = 0; k < games.size() && ok; ++k) {
      const Game& c = games[k];
      if (plan.StageAt(static_cast<int>(k)).tag == CaseTag::kFullSupport2p &&
          !IsNash(c, sigma)) {
        failure = "sigma not Nash at checkpoint " + std::to_string(k);
        ok = false;
      }
      const CharacteristicSystem sys = BuildCharacteristicSystem(c, full);
      worst_drift = std::max({worst_drift,
                              std::abs(sys.x1.determinant() - d1) / std::abs(d1),
                              std::abs(sys.x2.determinant() - d2) / std::abs(d2)});
    }
    if (ok && !IsPureNash(games.back(), target)) {
      failure = "terminal target not Nash in trial " + std::to_string(trial);
      ok = false;
    }
    if (!ok) break;
    ++built;
  }
  return {built == 50 && worst_drift <= 1e-7,
          std::to_string(built) + "/50 plans, max det drift " + Num(worst_drift) +
              (failure.empty() ? "" : ", " + failure)};
}

// Criterion 9: welfare transfer path.
Outcome WelfarePath() {
  std::mt19937_64 rng(9);
  int done = 0, attempts = 0;
  double worst_x = 0.0, worst_const = 0.0, worst_rise = 0.0;
  while (done < 20 && attempts < 5000) {
    ++attempts;
    const Game g = RandomGame(rng, {3, 3});
    const auto eqs = EnumerateEquilibria(g);
    if (eqs.empty()) continue;
    const MixedProfile& sigma = eqs[attempts % eqs.size()];
    const auto [wmax, sw] = WelfareMax(g);
    const std::vector<double> base = ExpectedUtilities(g, sigma);
    double slack = wmax;
    for (double b : base) slack -= b;
    if (slack < 0.5) continue;
    std::uniform_real_distribution<double> share(0.2, 0.8);
    const double s = share(rng);
    const std::vector<double> x{base[0] + s * slack, base[1] + (1 - s) * slack};
    WelfareStage stage;
    try {
      stage = BuildWelfareTransferStage(g, sigma, x, 0.1);
    } catch (const InfeasibleError&) {
      continue;
    }
    ++done;
    for (int i = 0; i < 2; ++i)
      worst_x = std::max(worst_x, std::abs(stage.terminal.utility(i, sw) - x[i]));
    Game prev = WelfarePathAt(g, stage, 0.0);
    for (int step = 1; step <= 10; ++step) {
      const Game cur = WelfarePathAt(g, stage, step / 10.0);
      for (std::int64_t p = 0; p < g.num_profiles(); ++p) {
        double w0 = 0.0, w1 = 0.0;
        for (int i = 0; i < 2; ++i) {
          w0 += prev.utility_at(i, p);
          w1 += cur.utility_at(i, p);
        }
        worst_rise = std::max(worst_rise, w1 - w0);
      }
      for (int i = 0; i < 2; ++i)
        if (x[i] > g.utility(i, sw))
          worst_const = std::max(
              worst_const,
              std::abs(ExpectedUtility(cur, sigma, i) - base[i]));
      prev = cur;
    }
  }
  return {done == 20 && worst_x <= 1e-9 && worst_rise <= 1e-9 &&
              worst_const <= 1e-9,
          std::to_string(done) + "/20 instances, |u(SW) - x| " + Num(worst_x) +
              ", max welfare rise " + Num(worst_rise) +
              ", compensated drift " + Num(worst_const)};
}

// Random 2x2 game with a full-support equilibrium and a Pareto-improving,
// non-Nash (0,0).
bool TwoByTwoInstance(std::mt19937_64& rng, Game& g, MixedProfile& sigma) {
  for (int attempt = 0; attempt < 5000; ++attempt) {
    g = RandomGame(rng, {2, 2});
    const SolveResult r = SolveOnSupport(g, {{0, 1}, {0, 1}});
    if (!r.profile || !IsNash(g, *r.profile)) continue;
    if (!IsNonDegenerate(g, *r.profile).non_degenerate) continue;
    const ParetoResult pr = ParetoImproves(g, {0, 0}, *r.profile);
    if (!pr.improves || pr.margin < 0.5 || IsPureNash(g, {0, 0})) continue;
    sigma = *r.profile;
    return true;
  }
  return false;
}

constexpr int kRandomTwoByTwo = 30;

// Criterion 10: 2x2 protocol.
Outcome TwoByTwo() {
  std::mt19937_64 rng(10);
  std::vector<std::pair<Game, MixedProfile>> cases;
  {
    const Game g = corpus::PenniesWithBonus();
    cases.emplace_back(g, UniformOver(g, {{0, 1}, {0, 1}}));
  }
  for (int k = 0; k < kRandomTwoByTwo; ++k) {
    Game g;
    MixedProfile sigma;
    if (TwoByTwoInstance(rng, g, sigma)) cases.emplace_back(g, sigma);
  }
  int ok_cases = 0, deviations = 0, failures = 0;
  std::string failure;
  for (const auto& [g, sigma] : cases) {
    double delta = 0.1;
    std::optional<ProtocolPlan> built;
    while (!built && delta > 1e-6) {
      try {
        built = Build2x2Plan(g, sigma, {0, 0}, delta);
      } catch (const InfeasibleError&) {
        delta /= 2.0;
      }
    }
    if (!built) {
      if (failure.empty()) failure = "no admissible delta";
      continue;
    }
    const ProtocolPlan& plan = *built;
    const auto games = Checkpoints(g, plan);
    bool ok = IsPureNash(games.back(), {0, 0});
    if (!ok && failure.empty()) failure = "terminal (0,0) not Nash";
    std::vector<double> ceiling{g.utility(0, {0, 0}) + 1e-9,
                                g.utility(1, {0, 0}) + 1e-9};
    PunishmentOptions options;
    options.allow_fallback = true;
    for (size_t k = 0; k < games.size(); ++k) {
      const CommitmentRound on_path =
          k < plan.rounds.size() ? plan.rounds[k] : CommitmentRound{};
      for (int i = 0; i < 2; ++i) {
        std::vector<Pledge> others;
        for (const Pledge& p : on_path.pledges)
          if (p.payer != i) others.push_back(p);
        for (const auto& element :
             DeviationGrid(games[k], i, delta, plan.mode, GridOptions{})) {
          CommitmentRound r;
          r.pledges = others;
          r.pledges.insert(r.pledges.end(), element.begin(), element.end());
          if (!ValidateRound(games[k], delta, plan.mode, r).ok()) continue;
          ++deviations;
          const Game dev = ApplyTransfers(games[k], r);
          if (!FindPunishmentEquilibrium(dev, {{0, 1}, {0, 1}}, sigma, ceiling,
                                         options)) {
            ++failures;
            ok = false;
            if (failure.empty())
              failure = "no punishment after " + std::to_string(k) + " rounds";
          }
        }
      }
    }
    if (ok) ++ok_cases;
  }
  const int want = kRandomTwoByTwo + 1;
  return {static_cast<int>(cases.size()) == want && ok_cases == want,
          std::to_string(ok_cases) + "/" + std::to_string(cases.size()) +
              " instances, " + std::to_string(deviations) + " deviations, " +
              std::to_string(failures) + " without punishment" +
              (failure.empty() ? "" : " (" + failure + ")")};
}

// Criterion 11: round bound and delta scaling on the corpus.
Outcome RoundCounts() {
  bool ok = true;
  double worst_ratio = 0.0, worst_use = 0.0;
  std::string failure;
  for (const corpus::PlanCase& c : corpus::PlanCases()) {
    const ProtocolPlan full = corpus::BuildCasePlan(c, c.delta);
    const ProtocolPlan half = corpus::BuildCasePlan(c, c.delta / 2);
    for (const ProtocolPlan* p : {&full, &half}) {
      const RoundBound b = RoundBoundCheck(c.game, *p, 64.0);
      worst_use = std::max(worst_use, b.rounds / b.bound);
      if (!b.ok) {
        ok = false;
        failure = c.id + " exceeds the bound";
      }
    }
    const double ratio = full.rounds.empty()
                             ? (half.rounds.empty() ? 1.0 : INFINITY)
                             : static_cast<double>(half.rounds.size()) /
                                   static_cast<double>(full.rounds.size());
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio > 2.5) {
      ok = false;
      failure = c.id + " grows by " + Num(ratio);
    }
  }
  return {ok, "max rounds/bound " + Num(worst_use) + ", max halving ratio " +
                  Num(worst_ratio) + (failure.empty() ? "" : ", " + failure)};
}

// Criterion 12: pure-equilibrium oracle and Jacobian finite differences.
Outcome Oracles() {
  std::mt19937_64 rng(12);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> players(2, 3), actions(1, 4);
    std::vector<int> counts(players(rng));
    for (int& c : counts) c = actions(rng);
    // Integer payoffs make ties, and hence weak equilibria, common.
    Game g = RandomGame(rng, counts, 0.0, 4.0);
    std::vector<double> flat = g.payoffs();
    for (double& v : flat) v = std::floor(v);
    g = Game(counts, flat);
    std::vector<Profile> scan;
    Profile p(counts.size(), 0);
    do {
      bool stable = true;
      for (size_t i = 0; i < counts.size() && stable; ++i)
        for (int b = 0; b < counts[i] && stable; ++b) {
          Profile q = p;
          q[i] = b;
          if (g.utility(static_cast<int>(i), q) > g.utility(static_cast<int>(i), p))
            stable = false;
        }
      if (stable) scan.push_back(p);
    } while (NextProfile(counts, p));
    if (scan != EnumeratePureNash(g)) ++mismatches;
  }

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    std::vector<int> counts(n, 3);
    const Game g = RandomGame(rng, counts, -5.0, 5.0);
    Supports support(n);
    std::uniform_int_distribution<int> size(1, 3);
    for (int i = 0; i < n; ++i) {
      std::vector<int> all{0, 1, 2};
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(size(rng));
      std::sort(all.begin(), all.end());
      support[i] = all;
    }
    const CharacteristicSystem sys = BuildCharacteristicSystem(g, support);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd x(sys.num_variables);
    for (int k = 0; k < sys.num_variables; ++k) x[k] = u(rng);
    const Eigen::MatrixXd jac = sys.Jacobian(x);
    const double h = 1e-6;
    for (int k = 0; k < sys.num_variables; ++k) {
      Eigen::VectorXd up = x, down = x;
      up[k] += h;
      down[k] -= h;
      const Eigen::VectorXd fd = (sys.Evaluate(up) - sys.Evaluate(down)) / (2 * h);
      worst = std::max(worst, (fd - jac.col(k)).cwiseAbs().maxCoeff());
    }
  }
  return {mismatches == 0 && worst <= 1e-5,
          std::to_string(mismatches) + "/500 pure-set mismatches, max Jacobian error " +
              Num(worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"prisoner's dilemma pledges", PrisonersDilemma},
      {"chicken pledge", Chicken},
      {"unfair game to (4,3)", Unfair},
      {"3x3 characteristic system", CharacteristicMatrix},
      {"adversarial single round", Counter},
      {"punishability probe", Probe},
      {"coefficient array identities", CoefficientIdentities},
      {"two-player full-support builder", FullSupport2p},
      {"welfare transfer path", WelfarePath},
      {"2x2 protocol", TwoByTwo},
      {"round counts", RoundCounts},
      {"oracles", Oracles},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    std::printf("[%s] %2zu %-32s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), o.detail.c_str(), secs);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
