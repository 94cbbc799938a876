#pragma once

#include "lvpir/model.hpp"

namespace fixtures {

// 2x3: one balanced column, two mirrored ones.
inline constexpr const char* kExample1 = "2 3\n0.1 0.9 0.5\n0.9 0.1 0.5\n";

// 3x6: two groups of identical columns, sizes 4 and 2.
inline constexpr const char* kExample2 =
    "3 6\n"
    "0.3 0.3 0.3 0.3 0.4 0.4\n"
    "0.1 0.1 0.1 0.1 0.3 0.3\n"
    "0.6 0.6 0.6 0.6 0.3 0.3\n";

// 3x4: all columns distinct, but {1,2} and {3,4} average to the prior.
inline constexpr const char* kExample3 =
    "3 4\n"
    "0.3 0.1 0.1 0.3\n"
    "0.4 0.2 0.5 0.1\n"
    "0.3 0.7 0.4 0.6\n";

inline lvpir::CharMatrix example1() { return lvpir::parse_matrix(kExample1); }
inline lvpir::CharMatrix example2() { return lvpir::parse_matrix(kExample2); }
inline lvpir::CharMatrix example3() { return lvpir::parse_matrix(kExample3); }

inline lvpir::CharMatrix identity(std::size_t n) {
  std::vector<lvpir::Rational> entries(n * n, lvpir::Rational(0));
  for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = 1;
  return lvpir::CharMatrix(n, n, std::move(entries));
}

// K copies of the same column; every non-empty subset is private.
inline lvpir::CharMatrix identical_columns(std::size_t latent_count, std::size_t message_count) {
  std::vector<lvpir::Rational> entries;
  const lvpir::Rational p = lvpir::make_rational(1, static_cast<long>(latent_count));
  for (std::size_t t = 0; t < latent_count; ++t)
    for (std::size_t k = 0; k < message_count; ++k) entries.push_back(p);
  return lvpir::CharMatrix(latent_count, message_count, std::move(entries));
}

}  // namespace fixtures
