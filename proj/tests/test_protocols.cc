#include <map>

#include "commitment_games/commitment.h"
#include "commitment_games/corpus.h"
#include "commitment_games/equilibria.h"
#include "commitment_games/protocols.h"
#include "doctest.h"

using namespace cgames;

namespace {

const corpus::PlanCase& FindCase(const std::vector<corpus::PlanCase>& cases,
                                 const std::string& id) {
  for (const auto& c : cases)
    if (c.id == id) return c;
  throw std::runtime_error("missing case " + id);
}

void CheckPlanInvariants(const Game& g, const ProtocolPlan& plan) {
  const auto games = Checkpoints(g, plan);
  REQUIRE(games.size() == plan.rounds.size() + 1);
  for (size_t k = 0; k < plan.rounds.size(); ++k)
    CHECK(ValidateRound(games[k], plan.delta, plan.mode, plan.rounds[k]).ok());
  for (size_t k = 0; k < games.size(); ++k)
    CHECK(games[k].ContentHash() == plan.checkpoints.at(k));
  CHECK(EnumeratePureNash(games.back()).size() >= 1);
  if (plan.target.role == TargetRole::kParetoImprover) {
    CHECK(IsPureNash(games.back(), plan.target.profile));
  }
  if (plan.mode == Mode::kBurnOnly) {
    for (size_t k = 1; k < games.size(); ++k)
      for (std::int64_t p = 0; p < g.num_profiles(); ++p)
        for (int i = 0; i < g.num_players(); ++i)
          CHECK(games[k].utility_at(i, p) <= games[k - 1].utility_at(i, p));
  }
  for (int i = 0; i < g.num_players(); ++i)
    CHECK(games.back().utility(i, plan.target.profile) ==
          doctest::Approx(plan.expected_terminal_payoffs.at(i)));
}

}  // namespace

TEST_CASE("elementary commitments compile to burn pledges") {
  const Game g = Game::Zero({3, 2});
  const auto p = Compile(g, {ElementaryCommitment::Kind::kP, 0, {1, 1}, 0.5});
  REQUIRE(p.size() == 1);
  CHECK(p[0] == Pledge{0, {1, 1}, kBurn, 0.5});

  const auto m = Compile(g, {ElementaryCommitment::Kind::kM, 0, {1, 1}, 0.5});
  CHECK(m.size() == 2);
  for (const Pledge& x : m) {
    CHECK(x.recipient == kBurn);
    CHECK(x.outcome[1] == 1);
    CHECK(x.outcome[0] != 1);
  }

  ElementaryCommitment r{ElementaryCommitment::Kind::kR, 0, {0, 0}, 0.0};
  r.compared_action = 2;
  r.coefficients = {0.25, -0.5};
  const auto rp = Compile(g, r);
  CHECK(rp.size() == 3);
  CHECK(rp[0] == Pledge{0, {2, 0}, kBurn, 0.25});
  r.coefficients = {0.25};
  CHECK_THROWS_AS(Compile(g, r), GameError);
  CHECK_THROWS_AS(
      Compile(g, {ElementaryCommitment::Kind::kP, 0, {0, 0}, -1.0}), GameError);
}

TEST_CASE("case classification") {
  const auto cases = corpus::PlanCases();
  std::map<std::string, CaseTag> want{
      {"ex4", CaseTag::kPartialSupportDisjoint},
      {"ex5", CaseTag::kPartialSupportMixed},
      {"sec23_in_support", CaseTag::kInSupportIndirect},
      {"ex6", CaseTag::kFullSupportNp},
      {"pennies_2x2", CaseTag::kTwoByTwo},
  };
  for (const auto& [id, tag] : want) {
    const auto& c = FindCase(cases, id);
    CAPTURE(id);
    CHECK(ClassifyCase(c.game, c.sigma, *c.target) == tag);
  }
}

TEST_CASE("every corpus plan satisfies its path invariants") {
  for (const auto& c : corpus::PlanCases()) {
    CAPTURE(c.id);
    const ProtocolPlan plan = corpus::BuildCasePlan(c, c.delta);
    CHECK(!plan.rounds.empty());
    CheckPlanInvariants(c.game, plan);
  }
}

TEST_CASE("builders reject infeasible inputs") {
  const Game pd = corpus::PrisonersDilemma();
  const MixedProfile dd = PureProfile(pd, {1, 1});
  CHECK_THROWS_AS(BuildParetoPlan(pd, dd, {0, 1}, 0.1), InfeasibleError);
  CHECK_THROWS_AS(BuildParetoPlan(pd, PureProfile(pd, {0, 0}), {1, 1}, 0.1),
                  InfeasibleError);
  CHECK_THROWS_AS(Build2x2Plan(corpus::NonDegenerate3x3(),
                               UniformOver(corpus::NonDegenerate3x3(),
                                           {{0, 1}, {0, 1}}),
                               {2, 2}, 0.1),
                  InfeasibleError);
  const Game unfair = corpus::Unfair();
  CHECK_THROWS_AS(BuildWelfarePlan(unfair, PureProfile(unfair, {0, 0}),
                                   {100.0, 100.0}, 1.0),
                  InfeasibleError);
}

TEST_CASE("2x2 construction enforces its delta bound") {
  const Game g = corpus::PenniesWithBonus();
  const MixedProfile s = UniformOver(g, {{0, 1}, {0, 1}});
  CHECK_THROWS_AS(Build2x2Plan(g, s, {0, 0}, 100.0), InfeasibleError);
  CheckPlanInvariants(g, Build2x2Plan(g, s, {0, 0}, 0.1));
}

TEST_CASE("welfare stage reaches the requested payoffs") {
  const Game g = corpus::Unfair();
  const MixedProfile a = PureProfile(g, {0, 0});
  const auto [w, at] = WelfareMax(g);
  const std::vector<double> x{w / 2.0 + 0.5, w / 2.0 - 0.5};
  const WelfareStage stage = BuildWelfareTransferStage(g, a, x, 1.0);
  CHECK(stage.welfare_profile == at);
  for (int i = 0; i < 2; ++i)
    CHECK(stage.terminal.utility(i, at) == doctest::Approx(x[i]));
  const ProtocolPlan plan = BuildWelfarePlan(g, a, x, 1.0);
  const Game last = Checkpoints(g, plan).back();
  for (int i = 0; i < 2; ++i)
    CHECK(last.utility(i, at) == doctest::Approx(x[i]));
  CHECK(IsPureNash(last, at));

  double prev = SocialWelfare(g, a);
  for (const Game& k : Checkpoints(g, plan)) {
    const double now = SocialWelfare(k, PureProfile(k, {0, 0}));
    CHECK(now <= prev + 1e-9);
    prev = now;
  }
}

TEST_CASE("coefficient array of a three-player mix") {
  const MixedProfile s{{0.5, 0.5}, {0.25, 0.75}, {0.4, 0.6}};
  const auto c = CoefficientArray(s);
  CHECK(c.size() == 4);
  for (double x : c) CHECK(std::isfinite(x));
  CHECK_THROWS(CoefficientArray(MixedProfile{{0.5, 0.5}, {0.25, 0.75}}));
}

TEST_CASE("automatic delta search finds an accepted delta") {
  const auto cases = corpus::PlanCases();
  const auto& c = FindCase(cases, "ex4");
  const DeltaChoice d = ChooseDeltaForTarget(c.game, c.sigma, *c.target);
  CHECK(d.found);
  CHECK(d.delta > 0.0);
  CHECK(d.rounds > 0);
}
