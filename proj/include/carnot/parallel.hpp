#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace carnot {

/// Worker cap: CARNOT_THREADS if set and positive, else hardware concurrency.
int thread_cap();

/// Runs task(k) for k in [0, count). Tasks must be independent; results are
/// expected to be written to per-task slots and reduced by the caller in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

/// SplitMix64 mix of (root, stream); gives independent, reproducible per-batch seeds.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace carnot
