#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ferm2sat {

using complexd = std::complex<double>;

/// Default numeric policy. All comparisons of coefficient identities use
/// `match` as a relative tolerance; `classical_threshold` decides when a
/// quantum amplitude pair degenerates into a basis-state exclusion.
struct Tol {
  static constexpr double norm_window = 1e-6;          // |a|^2+|b|^2 rescale window
  static constexpr double classical_threshold = 1e-9;  // min component before demotion
  static constexpr double match = 1e-9;                // coefficient identities
  static constexpr double oracle_sat = 1e-10;          // null-space eigenvalue cut
  static constexpr double gaussian = 1e-8;             // ||M^T M - I||_F cut
};

inline bool approx_eq(complexd a, complexd b, double tol = Tol::match) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

inline bool finite(complexd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Two-mode occupation pattern on an edge (j,k), value = 2*x_j + x_k.
enum class Pattern : uint8_t { p00 = 0, p01 = 1, p10 = 2, p11 = 3 };

inline int pattern_xj(Pattern p) { return (static_cast<int>(p) >> 1) & 1; }
inline int pattern_xk(Pattern p) { return static_cast<int>(p) & 1; }
inline Pattern make_pattern(int xj, int xk) { return static_cast<Pattern>(((xj & 1) << 1) | (xk & 1)); }

inline std::string pattern_string(Pattern p) {
  std::string s(2, '0');
  s[0] = static_cast<char>('0' + pattern_xj(p));
  s[1] = static_cast<char>('0' + pattern_xk(p));
  return s;
}

inline Pattern parse_pattern(const std::string& s) {
  if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1'))
    throw std::invalid_argument("bad occupation pattern '" + s + "'");
  return make_pattern(s[0] - '0', s[1] - '0');
}

// ---- occupation masks -------------------------------------------------
// Bit i of a mask is the occupation of mode i; creation-operator words are
// kept in ascending mode order, so a^dag_S|vac> maps to the plain mask S.

inline uint64_t bit(int i) { return uint64_t{1} << i; }

inline int popcount_below(uint64_t mask, int pos) {
  return std::popcount(mask & (bit(pos) - 1));
}

/// Reordering sign for pulling a^dag_l to the front of a^dag_T (l in T).
inline int reorder_sign(int l, uint64_t t) {
  return (popcount_below(t, l) & 1) ? -1 : 1;
}

/// Sign for reordering a^dag_T to a^dag_l a^dag_m a^dag_{T\{l,m}}, l < m in T.
inline int reorder_sign2(int l, int m, uint64_t t) {
  int c = popcount_below(t, l) + popcount_below(t & ~bit(l), m);
  return (c & 1) ? -1 : 1;
}

/// True if the occupation string of `a` (read x_0 x_1 ...) sorts before `b`.
inline bool string_less(uint64_t a, uint64_t b) {
  if (a == b) return false;
  int d = std::countr_zero(a ^ b);
  return (a & bit(d)) == 0;
}

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ferm2sat
