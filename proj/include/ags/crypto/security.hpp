#pragma once

#include <gmpxx.h>

#include <cstdint>

namespace ags::crypto {

// Probability that at least two of n uniform draws from d values coincide:
// 1 - prod_{k=0}^{n-1} (1 - k/d). Returns exactly 1.0 when n > d.
double collision_probability(std::uint64_t n, std::uint64_t d);

// 2^bits, exact.
mpz_class key_space_size(unsigned bits);

}  // namespace ags::crypto
