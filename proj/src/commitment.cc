#include "commitment_games/commitment.h"

#include <cmath>
#include <map>
#include <utility>

namespace cgames {

const char* ModeName(Mode mode) {
  return mode == Mode::kTransfers ? "transfers" : "burn_only";
}

const char* PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kCommitting:
      return "committing";
    case Phase::kVoting:
      return "voting";
    case Phase::kPlaying:
      return "playing";
    case Phase::kDone:
      return "done";
  }
  return "unknown";
}

SessionState OpenSession(const Game& game, double delta, Mode mode) {
  if (!(delta > 0.0)) throw EngineError("delta must be strictly positive");
  SessionState state;
  state.base_game = game;
  state.current_game = game;
  state.delta = delta;
  state.mode = mode;
  return state;
}

RoundViolation ValidateRound(const Game& game, double delta, Mode mode,
                             const CommitmentRound& round) {
  RoundViolation v;
  std::map<std::pair<int, std::int64_t>, double> spent;
  for (const Pledge& p : round.pledges) {
    v.payer = p.payer;
    v.outcome = p.outcome;
    if (p.payer < 0 || p.payer >= game.num_players() ||
        !game.ValidProfile(p.outcome) ||
        (p.recipient != kBurn &&
         (p.recipient < 0 || p.recipient >= game.num_players()))) {
      v.kind = RoundViolation::Kind::kShape;
      v.message = "pledge indices out of range";
      return v;
    }
    if (!(p.amount >= 0.0)) {
      v.kind = RoundViolation::Kind::kNegative;
      v.message = "negative pledge amount";
      return v;
    }
    if (p.recipient == p.payer) {
      v.kind = RoundViolation::Kind::kSelfPayment;
      v.message = "a player cannot pay itself";
      return v;
    }
    if (mode == Mode::kBurnOnly && p.recipient != kBurn) {
      v.kind = RoundViolation::Kind::kMode;
      v.message = "burn-only mode allows only BURN recipients";
      return v;
    }
    spent[{p.payer, game.ProfileIndex(p.outcome)}] += p.amount;
  }
  for (const auto& [key, total] : spent) {
    if (total > delta + kCapSlack) {
      v.kind = RoundViolation::Kind::kCap;
      v.payer = key.first;
      v.outcome = game.ProfileAt(key.second);
      v.total = total;
      v.message = "player " + std::to_string(key.first + 1) + " pays " +
                  std::to_string(total) + " at " +
                  game.ProfileName(v.outcome) + ", above the cap " +
                  std::to_string(delta);
      return v;
    }
  }
  return RoundViolation{};
}

RoundViolation ValidateRound(const SessionState& state,
                             const CommitmentRound& round) {
  return ValidateRound(state.current_game, state.delta, state.mode, round);
}

SessionState SubmitRound(const SessionState& state,
                         const CommitmentRound& round) {
  if (state.phase != Phase::kCommitting)
    throw EngineError(std::string("cannot submit a round in phase ") +
                      PhaseName(state.phase));
  RoundViolation v = ValidateRound(state, round);
  if (!v.ok()) throw EngineError("invalid round: " + v.message);
  SessionState next = state;
  next.current_game = ApplyTransfers(state.current_game, round);
  next.transcript.rounds.push_back(round);
  next.phase = Phase::kVoting;
  return next;
}

SessionState CastVotes(const SessionState& state,
                       const std::vector<Vote>& votes) {
  if (state.phase != Phase::kVoting)
    throw EngineError(std::string("cannot vote in phase ") +
                      PhaseName(state.phase));
  if (static_cast<int>(votes.size()) != state.current_game.num_players())
    throw EngineError("one vote per player required");
  SessionState next = state;
  next.transcript.votes.push_back(votes);
  bool all_continue = true;
  for (Vote v : votes) all_continue = all_continue && v == Vote::kContinue;
  next.phase = all_continue ? Phase::kCommitting : Phase::kPlaying;
  return next;
}

SessionState PlayTerminal(const SessionState& state, const Profile& actions) {
  if (state.phase != Phase::kPlaying)
    throw EngineError(std::string("cannot play in phase ") +
                      PhaseName(state.phase));
  if (!state.current_game.ValidProfile(actions))
    throw EngineError("terminal actions out of range");
  SessionState next = state;
  next.transcript.terminal_actions = actions;
  std::vector<double> payoffs(actions.size());
  for (int i = 0; i < state.current_game.num_players(); ++i)
    payoffs[i] = state.current_game.utility(i, actions);
  next.transcript.final_payoffs = payoffs;
  next.phase = Phase::kDone;
  return next;
}

SessionState Replay(const Game& base, double delta, Mode mode,
                    const Transcript& transcript) {
  SessionState state = OpenSession(base, delta, mode);
  if (transcript.votes.size() != transcript.rounds.size())
    throw ReplayError(static_cast<int>(transcript.votes.size()),
                      "every round needs a vote record");
  for (size_t r = 0; r < transcript.rounds.size(); ++r) {
    try {
      if (state.phase != Phase::kCommitting)
        throw EngineError("round submitted after the commitment phase ended");
      state = SubmitRound(state, transcript.rounds[r]);
      state = CastVotes(state, transcript.votes[r]);
    } catch (const EngineError& e) {
      throw ReplayError(static_cast<int>(r), e.what());
    } catch (const GameError& e) {
      throw ReplayError(static_cast<int>(r), e.what());
    }
  }
  if (transcript.terminal_actions) {
    try {
      state = PlayTerminal(state, *transcript.terminal_actions);
    } catch (const EngineError& e) {
      throw ReplayError(static_cast<int>(transcript.rounds.size()), e.what());
    }
    if (transcript.final_payoffs) {
      const auto& want = *transcript.final_payoffs;
      const auto& got = *state.transcript.final_payoffs;
      for (size_t i = 0; i < got.size(); ++i)
        if (i >= want.size() || std::abs(want[i] - got[i]) > 1e-12)
          throw ReplayError(static_cast<int>(transcript.rounds.size()),
                            "recorded final payoffs do not match");
    }
  }
  return state;
}

Game ApplyRounds(const Game& game, const std::vector<CommitmentRound>& rounds) {
  CommitmentRound all;
  for (const auto& r : rounds)
    all.pledges.insert(all.pledges.end(), r.pledges.begin(), r.pledges.end());
  return ApplyTransfers(game, all);
}

}  // namespace cgames
