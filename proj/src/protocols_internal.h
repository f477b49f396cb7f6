#ifndef COMMITMENT_GAMES_SRC_PROTOCOLS_INTERNAL_H_
#define COMMITMENT_GAMES_SRC_PROTOCOLS_INTERNAL_H_

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "commitment_games/protocols.h"

namespace cgames::internal {

// Per (payer, outcome index) amounts accumulated before scheduling.
using BurnMap = std::map<std::pair<int, std::int64_t>, double>;

// Each round burns min(delta, remaining) of every entry.
std::vector<CommitmentRound> BurnSchedule(const Game& game,
                                          const BurnMap& needs, double delta);

// Turns a burn map into a single round (amounts must respect the cap).
CommitmentRound BurnRound(const Game& game, const BurnMap& burns,
                          double scale = 1.0);

// Round k of the result merges round k of every input list.
std::vector<CommitmentRound> ZipRounds(
    const std::vector<std::vector<CommitmentRound>>& lists);

// Per player: the target action first, then the rest in index order.
std::vector<std::vector<int>> CanonicalOrder(const Game& game,
                                             const Profile& target);

void AppendStage(ProtocolPlan& plan, PlanStage stage,
                 const std::vector<CommitmentRound>& rounds);

// Ceiling u(sigma) + min_i(u_i(target) - u_i(sigma)).
std::vector<double> ParetoCeiling(const Game& game, const MixedProfile& sigma,
                                  const Profile& target);
std::vector<double> TargetPayoffs(const Game& game, const Profile& target);

void RequireNonDegenerateNash(const Game& game, const MixedProfile& sigma);
void RequireStrictImprovement(const Game& game, const MixedProfile& sigma,
                              const Profile& target);

}  // namespace cgames::internal

#endif  // COMMITMENT_GAMES_SRC_PROTOCOLS_INTERNAL_H_
