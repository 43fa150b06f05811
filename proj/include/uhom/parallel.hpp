#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>

namespace uhom {

//! One SplitMix64 step; advances state.
std::uint64_t splitmix64(std::uint64_t& state);

//! Deterministic child seed from a parent seed and a list of keys.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

//! Bit pattern of a double, for use as a seed key.
std::uint64_t double_key(double x);

/*!
 * Runs body(i) for i in [0, n) on up to `threads` workers.
 *
 * Work is handed out by an atomic counter; results must be written to slots
 * keyed by i, so the outcome never depends on scheduling. The exception from
 * the lowest failing index is rethrown after all workers finish.
 */
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace uhom
