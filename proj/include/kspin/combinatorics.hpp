#pragma once

#include <cstdint>

namespace kspin {

// C(n, r); throws Error(InvalidArgument) when the value does not fit in 64 bits.
std::uint64_t binomial(int n, int r);

// k! as a double (exact for k <= 20).
double factorial(int k);

}  // namespace kspin
