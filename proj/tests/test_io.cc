#include "commitment_games/corpus.h"
#include "commitment_games/io.h"
#include "commitment_games/protocols.h"
#include "doctest.h"

using namespace cgames;

TEST_CASE("hash hex round-trip") {
  CHECK(HashHex(0x1f) == "000000000000001f");
  CHECK(ParseHashHex(HashHex(0xdeadbeefcafef00dULL)) == 0xdeadbeefcafef00dULL);
  CHECK_THROWS_AS(ParseHashHex("xyz"), InputError);
}

TEST_CASE("malformed json reports line and column") {
  try {
    ParseJson("{\n  \"players\": 2\n  \"actions\": [2, 2]\n}", "game.json");
    FAIL("parse succeeded");
  } catch (const InputError& e) {
    const std::string what = e.what();
    CHECK(what.find("game.json") != std::string::npos);
    CHECK(what.find("line 3") != std::string::npos);
    CHECK(what.find("column") != std::string::npos);
  }
}

TEST_CASE("game json round-trip preserves payoffs and names") {
  const Game g = corpus::Chicken();
  const Game back = GameFromJson(ParseJson(GameToJson(g).dump()));
  CHECK(back.payoffs() == g.payoffs());
  CHECK(back.action_names() == g.action_names());
  CHECK(back.ContentHash() == g.ContentHash());
}

TEST_CASE("invalid game documents are input errors") {
  CHECK_THROWS_AS(GameFromJson(ParseJson("{\"players\": 2}")), InputError);
  CHECK_THROWS_AS(
      GameFromJson(ParseJson(
          "{\"players\": 2, \"actions\": [2, 2], \"payoffs\": [[1, 2]]}")),
      InputError);
}

TEST_CASE("profiles accept names and 1-based indices") {
  const Game g = corpus::PrisonersDilemma();
  CHECK(ProfileFromJson(g, ParseJson("[\"D\", 1]")) == Profile{1, 0});
  CHECK(ProfileToJson({1, 0}).dump() == "[2,1]");
  CHECK_THROWS_AS(ProfileFromJson(g, ParseJson("[3, 1]")), InputError);
  const MixedProfile s{{0.25, 0.75}, {1.0, 0.0}};
  CHECK(MixedFromJson(g, MixedToJson(s)) == s);
}

TEST_CASE("rounds and pledges round-trip") {
  const Game g = corpus::Chicken();
  CommitmentRound r = corpus::ChickenPledge();
  r.pledges.push_back({1, {0, 0}, kBurn, 0.125});
  const CommitmentRound back = RoundFromJson(g, ParseJson(RoundToJson(r).dump()));
  CHECK(back == r);
}

TEST_CASE("transcript round-trip and base mismatch") {
  const Game g = corpus::PrisonersDilemma();
  Transcript t;
  t.rounds.push_back(corpus::ReciprocalPledges());
  t.votes.push_back({Vote::kContinue, Vote::kStop});
  t.terminal_actions = Profile{0, 0};
  t.final_payoffs = std::vector<double>{0.0, 0.0};
  const Json doc = TranscriptToJson(g, 1.0, Mode::kTransfers, t);
  const TranscriptFile f = TranscriptFromJson(ParseJson(doc.dump()), &g);
  CHECK(f.delta == 1.0);
  CHECK(f.mode == Mode::kTransfers);
  CHECK(f.transcript.rounds == t.rounds);
  CHECK(f.transcript.votes == t.votes);
  CHECK(*f.transcript.terminal_actions == *t.terminal_actions);
  const Game other = corpus::Chicken();
  CHECK_THROWS_AS(TranscriptFromJson(doc, &other), InputError);
}

TEST_CASE("plan round-trip reproduces rounds and checkpoints") {
  const Game g = corpus::Unfair();
  const ProtocolPlan plan =
      BuildWelfarePlan(g, PureProfile(g, {0, 0}), {4.0, 3.0}, 1.0);
  const ProtocolPlan back = PlanFromJson(g, ParseJson(PlanToJson(plan).dump()));
  CHECK(back.rounds == plan.rounds);
  CHECK(back.checkpoints == plan.checkpoints);
  CHECK(back.case_tag == plan.case_tag);
  CHECK(back.delta == plan.delta);
  CHECK(back.stages.size() == plan.stages.size());
  CHECK(back.expected_terminal_payoffs == plan.expected_terminal_payoffs);
  const Game other = corpus::PrisonersDilemma();
  const ProtocolPlan foreign = PlanFromJson(other, PlanToJson(plan));
  CHECK(foreign.base_hash != other.ContentHash());
}

TEST_CASE("doubles survive a text round-trip exactly") {
  const Game g({2, 2}, {0.1, 1.0 / 3.0, -2.5e-17, 7.0, 1e300, -0.0, 3.14159, 2.0});
  CHECK(GameFromJson(ParseJson(GameToJson(g).dump())).payoffs() == g.payoffs());
}
