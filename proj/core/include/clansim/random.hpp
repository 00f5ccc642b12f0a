#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>

namespace clansim {

using Rng = std::mt19937_64;

// Seeds are chained through std::seed_seq, whose output is fixed by the
// C++ standard, so a (seed, key) pair names the same stream everywhere.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
Rng make_stream(std::uint64_t seed, std::initializer_list<std::int64_t> key);
Rng make_stream(std::uint64_t seed, const std::int64_t* key, std::size_t n);

// Uniform on [0,1), never 1.
double uniform01(Rng& rng);

// Runs body(i) for i in [0,n) on up to `workers` threads (0 = hardware).
// Each index is visited exactly once; exceptions are rethrown in order of
// the lowest failing index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

}  // namespace clansim
