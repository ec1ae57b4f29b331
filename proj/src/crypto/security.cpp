#include "ags/crypto/security.hpp"

#include "ags/error.hpp"

namespace ags::crypto {

double collision_probability(std::uint64_t n, std::uint64_t d) {
  if (d < 1) throw Error(ErrorCode::invalid, "domain size must be at least 1");
  if (n > d) return 1.0;
  double all_distinct = 1.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    all_distinct *= 1.0 - static_cast<double>(k) / static_cast<double>(d);
  }
  return 1.0 - all_distinct;
}

mpz_class key_space_size(unsigned bits) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, bits);
  return out;
}

}  // namespace ags::crypto
