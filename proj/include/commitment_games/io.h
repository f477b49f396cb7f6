#ifndef COMMITMENT_GAMES_IO_H_
#define COMMITMENT_GAMES_IO_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "commitment_games/commitment.h"
#include "commitment_games/equilibria.h"
#include "commitment_games/protocols.h"
#include "commitment_games/verifier.h"
#include "json.hpp"

namespace cgames {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Malformed or inconsistent input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

std::string HashHex(std::uint64_t hash);
std::uint64_t ParseHashHex(const std::string& text);

// Parse errors carry line and column of the offending byte.
Json ParseJson(const std::string& text, const std::string& source = "input");
Json LoadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& doc);

// All indices in files are 1-based.
Json GameToJson(const Game& game);
Game GameFromJson(const Json& doc);
Game LoadGame(const std::string& path);

Json ProfileToJson(const Profile& profile);
Profile ProfileFromJson(const Game& game, const Json& doc);
Json MixedToJson(const MixedProfile& sigma);
MixedProfile MixedFromJson(const Game& game, const Json& doc);

Json PledgeToJson(const Pledge& pledge);
Pledge PledgeFromJson(const Game& game, const Json& doc);
Json RoundToJson(const CommitmentRound& round);
CommitmentRound RoundFromJson(const Game& game, const Json& doc);

Json TranscriptToJson(const Game& base, double delta, Mode mode,
                      const Transcript& transcript);
struct TranscriptFile {
  Game base;
  double delta = 0.0;
  Mode mode = Mode::kTransfers;
  Transcript transcript;
};
// `base` is used when the file references the game by hash only.
TranscriptFile TranscriptFromJson(const Json& doc, const Game* base = nullptr);

Json PlanToJson(const ProtocolPlan& plan);
ProtocolPlan PlanFromJson(const Game& game, const Json& doc);

Json PunishabilityToJson(const PunishabilityReport& report);
Json VerificationToJson(const Game& base, const ProtocolPlan& plan,
                        const VerificationReport& report);

}  // namespace cgames

#endif  // COMMITMENT_GAMES_IO_H_
