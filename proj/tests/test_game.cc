#include <random>

#include "commitment_games/corpus.h"
#include "commitment_games/game.h"
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

}  // namespace

TEST_CASE("profile index round-trips with last player fastest") {
  const Game g = Game::Zero({2, 3, 4});
  CHECK(g.num_profiles() == 24);
  CHECK(g.ProfileIndex({0, 0, 1}) == 1);
  CHECK(g.ProfileIndex({0, 1, 0}) == 4);
  CHECK(g.ProfileIndex({1, 0, 0}) == 12);
  for (std::int64_t k = 0; k < g.num_profiles(); ++k)
    CHECK(g.ProfileIndex(g.ProfileAt(k)) == k);
  Profile p(3, 0);
  int visited = 1;
  while (NextProfile(g.action_counts(), p)) ++visited;
  CHECK(visited == 24);
}

TEST_CASE("constructor rejects malformed games") {
  CHECK_THROWS_AS(Game({2}, {0, 0}), GameError);
  CHECK_THROWS_AS(Game({2, 2}, {0, 0, 0}), GameError);
  CHECK_THROWS_AS(Game({2, 0}, {}), GameError);
  std::vector<double> payoffs(8, 0.0);
  payoffs[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Game({2, 2}, payoffs), GameError);
}

TEST_CASE("action names resolve to indices") {
  const Game g = corpus::PrisonersDilemma();
  CHECK(g.ActionIndex(0, "D") == 1);
  CHECK(g.ActionIndex(1, "1") == 0);
  CHECK_THROWS_AS(g.ActionIndex(0, "X"), GameError);
}

TEST_CASE("mixed profile validation") {
  const Game g = Game::Zero({2, 3});
  ValidateProfile(g, {{0.5, 0.5}, {0.2, 0.3, 0.5}});
  CHECK_THROWS_AS(ValidateProfile(g, {{0.5, 0.5}}), GameError);
  CHECK_THROWS_AS(ValidateProfile(g, {{0.5, 0.6}, {1, 0, 0}}), GameError);
  CHECK_THROWS_AS(ValidateProfile(g, {{1.5, -0.5}, {1, 0, 0}}), GameError);
  CHECK_THROWS_AS(ValidateProfile(g, {{1, 0}, {1, 0}}), GameError);
  const auto s = Support({{0.0, 1.0}, {0.2, 0.0, 0.8}});
  CHECK(s == std::vector<std::vector<int>>{{1}, {0, 2}});
}

TEST_CASE("expected utility matches brute-force sum") {
  std::mt19937_64 rng(3);
  const Game g = RandomGame(rng, {2, 3, 2});
  const MixedProfile sigma{{0.3, 0.7}, {0.2, 0.5, 0.3}, {0.6, 0.4}};
  for (int i = 0; i < 3; ++i) {
    double sum = 0.0;
    Profile p(3, 0);
    do {
      sum += ProfileProbability(sigma, p) * g.utility(i, p);
    } while (NextProfile(g.action_counts(), p));
    CHECK(ExpectedUtility(g, sigma, i) == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("transfers conserve total payoff and burning removes it") {
  std::mt19937_64 rng(5);
  const Game g = RandomGame(rng, {3, 3});
  CommitmentRound r;
  r.pledges.push_back({0, {1, 2}, 1, 0.4});
  r.pledges.push_back({1, {0, 0}, kBurn, 0.25});
  const Game h = ApplyTransfers(g, r);
  CHECK(h.utility(0, {1, 2}) == doctest::Approx(g.utility(0, {1, 2}) - 0.4));
  CHECK(h.utility(1, {1, 2}) == doctest::Approx(g.utility(1, {1, 2}) + 0.4));
  CHECK(SocialWelfare(h, Profile{1, 2}) ==
        doctest::Approx(SocialWelfare(g, Profile{1, 2})));
  CHECK(SocialWelfare(h, Profile{0, 0}) ==
        doctest::Approx(SocialWelfare(g, Profile{0, 0}) - 0.25));
  CHECK(GameDistance(g, h) == doctest::Approx(0.4));
}

TEST_CASE("pledge shape errors") {
  const Game g = Game::Zero({2, 2});
  CHECK_THROWS_AS(CheckPledgeShape(g, {0, {0, 0}, 0, 1.0}), GameError);
  CHECK_THROWS_AS(CheckPledgeShape(g, {2, {0, 0}, kBurn, 1.0}), GameError);
  CHECK_THROWS_AS(CheckPledgeShape(g, {0, {0, 2}, kBurn, 1.0}), GameError);
  CHECK_THROWS_AS(CheckPledgeShape(g, {0, {0, 0}, 1, -1.0}), GameError);
}

TEST_CASE("content hash depends on payoffs and shape") {
  const Game a = corpus::PrisonersDilemma();
  Game b = a;
  CHECK(a.ContentHash() == b.ContentHash());
  b.add_utility(0, {0, 0}, 1e-9);
  CHECK(a.ContentHash() != b.ContentHash());
  CHECK(Game::Zero({2, 3}).ContentHash() != Game::Zero({3, 2}).ContentHash());
}

TEST_CASE("pareto improvement margin") {
  const Game g = corpus::PrisonersDilemma();
  const auto r = ParetoImproves(g, {0, 0}, PureProfile(g, {1, 1}));
  CHECK(r.improves);
  CHECK(r.margin > 0.0);
  CHECK_FALSE(ParetoImproves(g, {0, 1}, PureProfile(g, {1, 1})).improves);
  const auto [w, at] = WelfareMax(g);
  CHECK(at == Profile{0, 0});
  CHECK(w == doctest::Approx(SocialWelfare(g, Profile{0, 0})));
}
