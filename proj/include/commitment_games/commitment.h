#ifndef COMMITMENT_GAMES_COMMITMENT_H_
#define COMMITMENT_GAMES_COMMITMENT_H_

#include <optional>
#include <string>
#include <vector>

#include "commitment_games/game.h"

namespace cgames {

constexpr double kCapSlack = 1e-12;

enum class Mode { kTransfers, kBurnOnly };
enum class Phase { kCommitting, kVoting, kPlaying, kDone };

const char* ModeName(Mode mode);
const char* PhaseName(Phase phase);

enum class Vote { kContinue, kStop };

struct Transcript {
  std::vector<CommitmentRound> rounds;
  std::vector<std::vector<Vote>> votes;  // one vector per round
  std::optional<Profile> terminal_actions;
  std::optional<std::vector<double>> final_payoffs;
};

struct RoundViolation {
  enum class Kind { kNone, kShape, kNegative, kSelfPayment, kMode, kCap };
  Kind kind = Kind::kNone;
  int payer = -1;
  Profile outcome;
  double total = 0.0;  // for cap violations, the summed amount
  std::string message;

  bool ok() const { return kind == Kind::kNone; }
};

// Immutable value; every transition returns a new state.
struct SessionState {
  Game base_game;
  Game current_game;
  double delta = 0.0;
  Mode mode = Mode::kTransfers;
  Phase phase = Phase::kCommitting;
  Transcript transcript;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReplayError : public EngineError {
 public:
  ReplayError(int step, const std::string& what)
      : EngineError("replay failed at round " + std::to_string(step + 1) +
                    ": " + what),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

SessionState OpenSession(const Game& game, double delta, Mode mode);

// Per payer and outcome, amounts summed over recipients must stay within
// delta + kCapSlack.
RoundViolation ValidateRound(const Game& game, double delta, Mode mode,
                             const CommitmentRound& round);
RoundViolation ValidateRound(const SessionState& state,
                             const CommitmentRound& round);

SessionState SubmitRound(const SessionState& state,
                         const CommitmentRound& round);
SessionState CastVotes(const SessionState& state,
                       const std::vector<Vote>& votes);
SessionState PlayTerminal(const SessionState& state, const Profile& actions);

// Re-executes a transcript; throws ReplayError naming the failing round.
SessionState Replay(const Game& base, double delta, Mode mode,
                    const Transcript& transcript);

// Sum of all pledges as a utility-delta tensor added to `game`.
Game ApplyRounds(const Game& game, const std::vector<CommitmentRound>& rounds);

}  // namespace cgames

#endif  // COMMITMENT_GAMES_COMMITMENT_H_
