#ifndef COMMITMENT_GAMES_PARALLEL_H_
#define COMMITMENT_GAMES_PARALLEL_H_

#include <functional>

namespace cgames {

// Worker count: COMMITMENT_GAMES_THREADS if set and positive, else the
// hardware concurrency.
int ThreadCap();

// Runs body(k) for k in [0, count). Each index runs exactly once; callers
// write results into per-index slots so output order is deterministic.
void ParallelFor(int count, const std::function<void(int)>& body);

}  // namespace cgames

#endif  // COMMITMENT_GAMES_PARALLEL_H_
