#include "kspin/random.hpp"

#include <vector>

namespace kspin {

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  push(stream.size());
  for (std::uint64_t id : stream) push(id);
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

}  // namespace kspin
