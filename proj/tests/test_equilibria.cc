#include <random>

#include "commitment_games/corpus.h"
#include "commitment_games/equilibria.h"
#include "doctest.h"

using namespace cgames;

namespace {

Game RandomGame(std::mt19937_64& rng, std::vector<int> counts) {
  Game g = Game::Zero(counts);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (std::int64_t k = 0; k < g.num_profiles(); ++k)
    for (int i = 0; i < g.num_players(); ++i) g.add_utility_at(i, k, u(rng));
  return g;
}

bool Close(const MixedProfile& a, const MixedProfile& b, double tol) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j)
      if (std::abs(a[i][j] - b[i][j]) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("pure equilibria and dominance") {
  const Game pd = corpus::PrisonersDilemma();
  CHECK(EnumeratePureNash(pd) == std::vector<Profile>{{1, 1}});
  CHECK(StrictlyDominantAction(pd, 0) == 1);
  CHECK(StrictlyDominantAction(pd, 1) == 1);
  const Game committed = corpus::PrisonersDilemmaCommitted();
  CHECK(IsPureNash(committed, {0, 0}));
  CHECK_FALSE(StrictlyDominantAction(committed, 0).has_value());

  const auto check = IsNash(pd, PureProfile(pd, {0, 0}));
  CHECK_FALSE(check.ok);
  CHECK(check.action == 1);
  CHECK(check.gain == doctest::Approx(1.0));
}

TEST_CASE("support solve recovers the uniform mix") {
  const Game g = corpus::NonDegenerate3x3();
  const SolveResult r = SolveOnSupport(g, {{0, 1}, {0, 1}});
  REQUIRE(r.profile);
  CHECK(Close(*r.profile, {{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}}, 1e-10));
  CHECK(IsNash(g, *r.profile));
  CHECK(IsNonDegenerate(g, *r.profile).non_degenerate);

  const Game rps = corpus::FourActionDisjoint();
  const MixedProfile u = UniformOver(rps, {{0, 1, 2}, {0, 1, 2}});
  CHECK(IsNash(rps, u));
  CHECK(IsNonDegenerate(rps, u).non_degenerate);
}

TEST_CASE("support solve on random games yields verified equilibria") {
  std::mt19937_64 rng(11);
  int solved = 0;
  for (int k = 0; k < 40; ++k) {
    const Game g = RandomGame(rng, {3, 3});
    for (const MixedProfile& s : EnumerateEquilibria(g)) {
      CHECK(IsNash(g, s));
      ++solved;
    }
  }
  CHECK(solved >= 40);
}

TEST_CASE("characteristic Jacobian matches finite differences") {
  std::mt19937_64 rng(7);
  const Game g = RandomGame(rng, {3, 3, 2});
  const CharacteristicSystem sys =
      BuildCharacteristicSystem(g, {{0, 1, 2}, {0, 2}, {0, 1}});
  std::uniform_real_distribution<double> u(0.1, 0.9);
  Eigen::VectorXd p(sys.num_variables);
  for (int v = 0; v < sys.num_variables; ++v) p[v] = u(rng);
  const Eigen::MatrixXd j = sys.Jacobian(p);
  const double h = 1e-6;
  for (int v = 0; v < sys.num_variables; ++v) {
    Eigen::VectorXd hi = p, lo = p;
    hi[v] += h;
    lo[v] -= h;
    const Eigen::VectorXd fd = (sys.Evaluate(hi) - sys.Evaluate(lo)) / (2 * h);
    CHECK((fd - j.col(v)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("three-player uniform equilibrium") {
  const Game g = corpus::ThreePlayerBinary();
  const MixedProfile u = UniformOver(g, {{0, 1}, {0, 1}, {0, 1}});
  CHECK(IsNash(g, u));
  CHECK(IsNonDegenerate(g, u).non_degenerate);
}

TEST_CASE("degenerate 2x2 continuum exposes its corners") {
  // Row player is indifferent everywhere; column player matches the row.
  const Game g({2, 2}, {0, 1, 0, 0, 0, 0, 0, 1});
  const auto eqs = EnumerateEquilibria(g);
  for (const auto& s : eqs) CHECK(IsNash(g, s));
  auto has = [&](const MixedProfile& want) {
    for (const auto& s : eqs)
      if (Close(s, want, 1e-9)) return true;
    return false;
  };
  CHECK(has({{1, 0}, {1, 0}}));
  CHECK(has({{0, 1}, {0, 1}}));
  CHECK(has({{0.5, 0.5}, {1, 0}}));
  CHECK(has({{0.5, 0.5}, {0, 1}}));
}

TEST_CASE("punishment search respects the ceiling") {
  const Game pd = corpus::PrisonersDilemma();
  const auto found = FindPunishmentEquilibrium(
      pd, {{1}, {1}}, PureProfile(pd, {1, 1}), {-0.5, -0.5});
  REQUIRE(found);
  CHECK(IsNash(pd, *found));
  CHECK_FALSE(FindPunishmentEquilibrium(pd, {{1}, {1}}, PureProfile(pd, {1, 1}),
                                        {-1.5, -1.5}));
}

TEST_CASE("probe is deterministic for a fixed seed") {
  const Game g = corpus::NonDegenerate3x3();
  const MixedProfile s = UniformOver(g, {{0, 1}, {0, 1}});
  const auto a = ProbeStrongPunishability(g, s, 0.05, 0.01, 16, 99);
  const auto b = ProbeStrongPunishability(g, s, 0.05, 0.01, 16, 99);
  CHECK(a.samples == 16);
  CHECK(a.failures.size() == b.failures.size());
  CHECK(a.worst_excess == b.worst_excess);
  CHECK(a.passed());
}
