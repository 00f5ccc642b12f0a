#include "clansim/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

namespace clansim {

namespace {

void push64(std::vector<std::uint32_t>& words, std::uint64_t v) {
  words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
  words.push_back(static_cast<std::uint32_t>(v >> 32));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::vector<std::uint32_t> words;
  push64(words, seed);
  push64(words, index);
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

Rng make_stream(std::uint64_t seed, const std::int64_t* key, std::size_t n) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * n + 2);
  push64(words, seed);
  for (std::size_t i = 0; i < n; ++i) push64(words, static_cast<std::uint64_t>(key[i]));
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

Rng make_stream(std::uint64_t seed, std::initializer_list<std::int64_t> key) {
  return make_stream(seed, key.begin(), key.size());
}

double uniform01(Rng& rng) {
  double u = std::generate_canonical<double, 53>(rng);
  if (u >= 1.0) u = std::nextafter(1.0, 0.0);
  return u;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace clansim
