#include "kspin/combinatorics.hpp"

#include <limits>
#include <string>

#include "kspin/error.hpp"

namespace kspin {

std::uint64_t binomial(int n, int r) {
  if (r < 0 || n < 0 || r > n) return 0;
  if (r > n - r) r = n - r;
  unsigned __int128 acc = 1;
  for (int i = 1; i <= r; ++i) {
    // acc * (n - r + i) / i stays integral at every step.
    acc = acc * static_cast<unsigned>(n - r + i) / static_cast<unsigned>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(ErrorKind::InvalidArgument,
                  "binomial C(" + std::to_string(n) + "," + std::to_string(r) + ") overflows");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace kspin
