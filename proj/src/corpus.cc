#include "commitment_games/corpus.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "commitment_games/equilibria.h"

namespace cgames::corpus {
namespace {

// Rows of (u_1, u_2) pairs for a two-player game, row player first.
Game Bimatrix(std::vector<std::string> names1, std::vector<std::string> names2,
              const std::vector<std::vector<std::pair<double, double>>>& rows) {
  std::vector<double> flat;
  for (const auto& row : rows)
    for (const auto& [a, b] : row) {
      flat.push_back(a);
      flat.push_back(b);
    }
  std::vector<int> counts{static_cast<int>(names1.size()),
                          static_cast<int>(names2.size())};
  return Game(counts, std::move(flat), {std::move(names1), std::move(names2)});
}

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string FmtVec(const std::vector<double>& v) {
  std::string s = "(";
  for (size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + Fmt(v[k]);
  return s + ")";
}

ReproduceRow Row(std::string id, std::string description) {
  ReproduceRow r;
  r.id = std::move(id);
  r.description = std::move(description);
  return r;
}

ReproduceRow PrisonersDilemmaRow() {
  ReproduceRow r = Row("ex1", "reciprocal 1-unit pledges make (C,C) an equilibrium");
  const Game after = ApplyTransfers(PrisonersDilemma(), ReciprocalPledges());
  const bool exact = after.payoffs() == PrisonersDilemmaCommitted().payoffs();
  const bool nash = IsPureNash(after, {0, 0}, 0.0);
  r.pass = exact && nash;
  r.detail = std::string("matrix ") + (exact ? "matches" : "differs") +
             ", (C,C) " + (nash ? "is" : "is not") + " a pure equilibrium";
  return r;
}

ReproduceRow ChickenRow() {
  ReproduceRow r = Row("ex2", "20-unit pledge leaves (Straight,Swerve) as the only equilibrium");
  const Game g = Chicken();
  const Game after = ApplyTransfers(g, ChickenPledge());
  const Profile ss{0, 1};
  const bool entry = after.utility(0, ss) == -19.0 && after.utility(1, ss) == 22.0;
  const auto nash = EnumeratePureNash(after);
  const bool unique = nash.size() == 1 && nash[0] == Profile{1, 0};
  r.pass = entry && unique;
  r.detail = "(Swerve,Straight) -> (" + Fmt(after.utility(0, ss)) + "," +
             Fmt(after.utility(1, ss)) + "), pure equilibria " +
             std::to_string(nash.size());
  return r;
}

ReproduceRow UnfairRow() {
  ReproduceRow r = Row("ex3", "payoffs (4,3) reached in 6 rounds with delta 1");
  const Game g = Unfair();
  const MixedProfile aa = PureProfile(g, {0, 0});
  const ProtocolPlan plan = BuildWelfarePlan(g, aa, {4.0, 3.0}, 1.0);
  const auto games = Checkpoints(g, plan);
  bool threat = true;
  for (const Game& c : games) threat = threat && IsPureNash(c, {0, 0});
  const Game& last = games.back();
  const bool terminal = IsPureNash(last, {1, 1}) &&
                        std::abs(last.utility(0, {1, 1}) - 4.0) <= 1e-12 &&
                        std::abs(last.utility(1, {1, 1}) - 3.0) <= 1e-12;
  const VerificationReport report = VerifyPlan(g, plan);
  double worst = -INFINITY;
  for (const auto& c : report.deviations.classes)
    if (c.evaluated) worst = std::max(worst, c.worst_gain);
  r.pass = plan.rounds.size() == 6 && threat && terminal && report.accepted &&
           worst <= 1e-9;
  r.detail = std::to_string(plan.rounds.size()) + " rounds, (A,A) threat " +
             (threat ? "kept" : "lost") + ", terminal " +
             FmtVec({last.utility(0, {1, 1}), last.utility(1, {1, 1})}) +
             ", worst deviation gain " + Fmt(worst) +
             (report.accepted ? ", verified" : ", rejected");
  return r;
}

ReproduceRow NonDegenerateRow() {
  ReproduceRow r = Row("sec23_3x3", "characteristic system and its (1/2,1/2) solution");
  const Game g = NonDegenerate3x3();
  const Supports support{{0, 1}, {0, 1}};
  const CharacteristicSystem sys = BuildCharacteristicSystem(g, support);
  Eigen::MatrixXd want(4, 4);
  want << 1, 1, 0, 0, 4, -4, 0, 0, 0, 0, 1, 1, 0, 0, 4, -4;
  Eigen::VectorXd rhs(4);
  rhs << 1, 0, 1, 0;
  const bool matrix = sys.BlockMatrix() == want && sys.BlockRhs() == rhs;
  const SolveResult solved = SolveOnSupport(g, support);
  bool half = solved.profile.has_value();
  if (half)
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 2; ++a)
        half = half && std::abs((*solved.profile)[i][a] - 0.5) <= 1e-12;
  bool nd = false;
  if (half) nd = IsNonDegenerate(g, *solved.profile).non_degenerate;
  r.pass = matrix && half && nd;
  r.detail = std::string("matrix ") + (matrix ? "exact" : "differs") +
             ", solution " + (half ? "(1/2,1/2)" : "off") + ", " +
             (nd ? "non-degenerate" : "degenerate");
  return r;
}

ReproduceRow CounterRow() {
  ReproduceRow r = Row("sec23_counter", "one adversarial round defeats the naive plan");
  const Game g = CounterGame();
  const double delta = 0.1;
  const AdversarialCheck adv = CheckAdversarialMove(g, delta);
  const ProtocolPlan plan = NaivePlan(g, delta);
  GridOptions grid;
  grid.deviation_budget = 4;
  const DeviationReport dev = CheckDeviations(g, plan, grid);
  const DeviationOutcome& commit = dev.classes[0];
  r.pass = adv.ok() && commit.evaluated && commit.worst_gain > grid.gain_tolerance;
  r.detail = "B dominant after " + std::to_string(adv.dominated_responses) +
             "/" + std::to_string(adv.responses) +
             " responses, naive plan worst gain " + Fmt(commit.worst_gain);
  return r;
}

ReproduceRow PlanRow(const PlanCase& c) {
  ReproduceRow r = Row(c.id, c.description);
  try {
    const ProtocolPlan plan = BuildCasePlan(c, c.delta);
    GridOptions grid;
    grid.deviation_budget = 8;
    const VerificationReport report = VerifyPlan(c.game, plan, grid);
    r.pass = report.accepted;
    r.detail = std::string(CaseTagName(plan.case_tag)) + ", delta " +
               Fmt(c.delta) + ", " + std::to_string(plan.rounds.size()) +
               " rounds, terminal " + FmtVec(plan.expected_terminal_payoffs) +
               (report.accepted ? ", verified" : ", rejected");
  } catch (const std::exception& e) {
    r.detail = e.what();
  }
  return r;
}

}  // namespace

Game PrisonersDilemma() {
  return Bimatrix({"C", "D"}, {"C", "D"},
                  {{{0, 0}, {-2, 1}}, {{1, -2}, {-1, -1}}});
}

CommitmentRound ReciprocalPledges() {
  CommitmentRound r;
  for (int a = 0; a < 2; ++a) {
    r.pledges.push_back({0, {a, 0}, 1, 1.0});
    r.pledges.push_back({1, {0, a}, 0, 1.0});
  }
  return r;
}

Game PrisonersDilemmaCommitted() {
  return Bimatrix({"C", "D"}, {"C", "D"},
                  {{{0, 0}, {-1, 0}}, {{0, -1}, {-1, -1}}});
}

Game Chicken() {
  return Bimatrix({"Swerve", "Straight"}, {"Swerve", "Straight"},
                  {{{0, 0}, {1, 2}}, {{2, 0}, {-10, -10}}});
}

CommitmentRound ChickenPledge() {
  CommitmentRound r;
  r.pledges.push_back({0, {0, 1}, 1, 20.0});
  return r;
}

Game Unfair() {
  return Bimatrix({"A", "B"}, {"A", "B"},
                  {{{0, 0}, {-2, -2}}, {{-2, -2}, {10, -3}}});
}

Game FourActionDisjoint() {
  const std::vector<std::string> names{"a1", "a2", "a3", "a4"};
  return Bimatrix(names, names,
                  {{{2, 2}, {5, 2}, {2, 5}, {6, 0}},
                   {{2, 5}, {2, 2}, {5, 2}, {0, 0}},
                   {{5, 2}, {2, 5}, {2, 2}, {0, 0}},
                   {{0, 6}, {0, 0}, {0, 0}, {4, 4}}});
}

Game FourActionMixed() {
  const std::vector<std::string> names{"a1", "a2", "a3", "a4"};
  return Bimatrix(names, names,
                  {{{2, 2}, {5, 2}, {2, 5}, {2, 2}},
                   {{2, 5}, {2, 2}, {5, 2}, {0, 0}},
                   {{5, 2}, {2, 5}, {2, 2}, {1, 1}},
                   {{2, 2}, {2.5, 2}, {4, 4}, {0, 0}}});
}

Game NonDegenerate3x3() {
  const std::vector<std::string> names{"a1", "a2", "a3"};
  return Bimatrix(names, names,
                  {{{5, 5}, {1, 1}, {1, 0}},
                   {{1, 1}, {5, 5}, {0, 1}},
                   {{0, 1}, {1, 0}, {2, 2}}});
}

Game CounterGame() {
  const std::vector<std::string> names{"A", "B", "C"};
  return Bimatrix(names, names,
                  {{{5, 5}, {0, 5}, {0, 0}},
                   {{5, 0}, {9, 2}, {7, 1}},
                   {{0, 0}, {1, 7}, {6, 6}}});
}

Game ThreePlayerBinary() {
  // u_i = h(a_-i) + [a_i = 0] d(a_-i): d averages to zero under the uniform
  // mix, h rewards the all-zero outcome.
  const std::vector<double> d{-3, 1, 1, 1};
  const std::vector<double> h{10, 0, 0, 0};
  Game g = Game::Zero({2, 2, 2});
  Profile p(3, 0);
  do {
    for (int i = 0; i < 3; ++i) {
      int k = 0;
      for (int j = 0; j < 3; ++j)
        if (j != i) k = 2 * k + p[j];
      g.set_utility(i, p, h[k] + (p[i] == 0 ? d[k] : 0.0));
    }
  } while (NextProfile(g.action_counts(), p));
  return g;
}

Game PenniesWithBonus() {
  return Bimatrix({"H", "T"}, {"H", "T"},
                  {{{5, 5}, {2, 4}}, {{6, 1}, {1, 2}}});
}

CommitmentRound AdversarialMove(const Game& counter, double delta) {
  (void)counter;
  CommitmentRound r;
  r.pledges.push_back({0, {0, 1}, 1, delta});
  r.pledges.push_back({0, {0, 0}, kBurn, delta});
  return r;
}

AdversarialCheck CheckAdversarialMove(const Game& counter, double delta,
                                      const GridOptions& grid) {
  AdversarialCheck out;
  const CommitmentRound move = AdversarialMove(counter, delta);
  const int b = 1;
  for (const auto& response :
       DeviationGrid(counter, 1, delta, Mode::kTransfers, grid)) {
    CommitmentRound r = move;
    r.pledges.insert(r.pledges.end(), response.begin(), response.end());
    if (!ValidateRound(counter, delta, Mode::kTransfers, r).ok()) continue;
    ++out.responses;
    const Game after = ApplyTransfers(counter, r);
    bool dominant = false;
    for (int i = 0; i < 2; ++i)
      dominant = dominant || StrictlyDominantAction(after, i) == b;
    if (dominant) {
      ++out.dominated_responses;
    } else if (out.first_failure.empty()) {
      out.first_failure = "response with " + std::to_string(response.size()) +
                          " pledges leaves no dominant B";
    }
  }
  return out;
}

ProtocolPlan NaivePlan(const Game& counter, double delta) {
  const Profile threat{0, 0}, target{2, 2};
  ProtocolPlan plan;
  plan.case_tag = CaseTag::kPartialSupportDisjoint;
  plan.delta = delta;
  plan.mode = Mode::kTransfers;
  plan.permutation = {{2, 0, 1}, {2, 0, 1}};
  plan.target = {target, TargetRole::kParetoImprover};
  plan.baseline = PureProfile(counter, threat);

  Game g = counter;
  auto done = [&] {
    return g.utility(0, {1, 2}) < g.utility(0, target) &&
           g.utility(1, {2, 1}) < g.utility(1, target);
  };
  while (!done()) {
    CommitmentRound r;
    Profile p(2, 0);
    do {
      if (p == threat || p == target) continue;
      for (int i = 0; i < 2; ++i) r.pledges.push_back({i, p, kBurn, delta});
    } while (NextProfile(counter.action_counts(), p));
    g = ApplyTransfers(g, r);
    plan.rounds.push_back(std::move(r));
  }

  PlanStage stage;
  stage.tag = plan.case_tag;
  stage.first_round = 0;
  stage.end_round = static_cast<int>(plan.rounds.size());
  stage.baseline = plan.baseline;
  stage.reference_support = {{0}, {0}};
  stage.ceiling = {counter.utility(0, target), counter.utility(1, target)};
  stage.target_bound = stage.ceiling;
  stage.target = target;
  plan.stages.push_back(stage);
  FinalizePlan(counter, plan);
  return plan;
}

std::vector<PlanCase> PlanCases() {
  std::vector<PlanCase> cases;
  {
    PlanCase c{"ex3", "welfare payoffs (4,3) from (A,A)", Unfair(), {}, {},
               std::vector<double>{4.0, 3.0}, 1.0};
    c.sigma = PureProfile(c.game, {0, 0});
    cases.push_back(std::move(c));
  }
  {
    PlanCase c{"ex4", "uniform rock-paper-scissors mix to (a4,a4)",
               FourActionDisjoint(), {}, Profile{3, 3}, {}, 0.25};
    c.sigma = UniformOver(c.game, {{0, 1, 2}, {0, 1, 2}});
    cases.push_back(std::move(c));
  }
  {
    PlanCase c{"ex5", "uniform mix to (a4,a3) with a3 in support",
               FourActionMixed(), {}, Profile{3, 2}, {}, 0.25};
    c.sigma = UniformOver(c.game, {{0, 1, 2}, {0, 1, 2}});
    cases.push_back(std::move(c));
  }
  {
    PlanCase c{"sec23_in_support", "(1/2,1/2) mix to (a1,a1) inside the support",
               NonDegenerate3x3(), {}, Profile{0, 0}, {}, 0.1};
    c.sigma = UniformOver(c.game, {{0, 1}, {0, 1}});
    cases.push_back(std::move(c));
  }
  {
    PlanCase c{"ex6", "three-player uniform mix to the all-first outcome",
               ThreePlayerBinary(), {}, Profile{0, 0, 0}, {}, 0.1};
    c.sigma = UniformOver(c.game, {{0, 1}, {0, 1}, {0, 1}});
    cases.push_back(std::move(c));
  }
  {
    PlanCase c{"pennies_2x2", "2x2 mixed equilibrium to the first-action outcome",
               PenniesWithBonus(), {}, Profile{0, 0}, {}, 0.1};
    c.sigma = UniformOver(c.game, {{0, 1}, {0, 1}});
    cases.push_back(std::move(c));
  }
  return cases;
}

ProtocolPlan BuildCasePlan(const PlanCase& c, double delta) {
  if (c.payoffs) return BuildWelfarePlan(c.game, c.sigma, *c.payoffs, delta);
  return BuildParetoPlan(c.game, c.sigma, *c.target, delta);
}

std::vector<std::string> ReproduceIds() {
  return {"ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "sec23_3x3", "sec23_counter"};
}

std::vector<ReproduceRow> Reproduce(const std::string& id) {
  std::vector<ReproduceRow> rows;
  const bool all = id == "all";
  bool known = all;
  auto want = [&](const std::string& name) {
    if (all || id == name) {
      known = true;
      return true;
    }
    return false;
  };
  if (want("ex1")) rows.push_back(PrisonersDilemmaRow());
  if (want("ex2")) rows.push_back(ChickenRow());
  if (want("ex3")) rows.push_back(UnfairRow());
  for (const PlanCase& c : PlanCases())
    if ((c.id == "ex4" || c.id == "ex5" || c.id == "ex6") && want(c.id))
      rows.push_back(PlanRow(c));
  if (want("sec23_3x3")) rows.push_back(NonDegenerateRow());
  if (want("sec23_counter")) rows.push_back(CounterRow());
  if (!known) throw std::invalid_argument("unknown example id '" + id + "'");
  return rows;
}

}  // namespace cgames::corpus
