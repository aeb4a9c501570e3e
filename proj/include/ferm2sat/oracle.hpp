#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cstdint>
#include <optional>
#include <vector>

#include "instance.hpp"
#include "types.hpp"

namespace ferm2sat::oracle {

inline constexpr int kMaxModes = 14;

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline void check_size(int n) {
  if (n < 0 || n > kMaxModes)
    throw std::invalid_argument("dense workspace limited to " + std::to_string(kMaxModes) + " modes");
}

// ---- elementary operators on the occupation basis -----------------------
// Basis index: bit i = occupation of mode i (mode 0 = least significant).
// Creation picks up the string sign over occupied lower modes.

inline Mat creation_matrix(int n, int mode) {
  check_size(n);
  const int64_t dim = int64_t{1} << n;
  Mat m = Mat::Zero(dim, dim);
  for (int64_t s = 0; s < dim; ++s) {
    if (s & static_cast<int64_t>(bit(mode))) continue;
    int64_t t = s | static_cast<int64_t>(bit(mode));
    m(t, s) = reorder_sign(mode, static_cast<uint64_t>(t));
  }
  return m;
}

inline Mat annihilation_matrix(int n, int mode) { return creation_matrix(n, mode).adjoint(); }

/// Matrix of one clause, acting on the full 2^n space.
inline Mat jw_clause_matrix(int n, const Clause& c) {
  check_size(n);
  const int64_t dim = int64_t{1} << n;
  Mat m = Mat::Zero(dim, dim);
  const uint64_t bj = bit(c.j), bk = bit(c.k);
  switch (c.kind) {
    case ClauseKind::ClassicalExclude: {
      for (int64_t s = 0; s < dim; ++s) {
        int xj = (s >> c.j) & 1, xk = (s >> c.k) & 1;
        if (xj == pattern_xj(c.pattern) && xk == pattern_xk(c.pattern)) m(s, s) = 1.0;
      }
      break;
    }
    case ClauseKind::QuantumOdd: {
      // sum over partner pairs of |w><w| with w = sign(j,S) a |S> + sign(k,S') b |S'>
      for (int64_t s = 0; s < dim; ++s) {
        uint64_t us = static_cast<uint64_t>(s);
        if (!(us & bj) || (us & bk)) continue;
        uint64_t sp = (us & ~bj) | bk;
        complexd wj = static_cast<double>(reorder_sign(c.j, us)) * c.a;
        complexd wk = static_cast<double>(reorder_sign(c.k, sp)) * c.b;
        m(s, s) += wj * std::conj(wj);
        m(s, sp) += wj * std::conj(wk);
        m(sp, s) += wk * std::conj(wj);
        m(sp, sp) += wk * std::conj(wk);
      }
      break;
    }
    case ClauseKind::QuantumEven: {
      // pairs |S> (both filled) and |S'> = S \ {j,k}
      for (int64_t s = 0; s < dim; ++s) {
        uint64_t us = static_cast<uint64_t>(s);
        if (!(us & bj) || !(us & bk)) continue;
        uint64_t sp = us & ~(bj | bk);
        complexd wfull = static_cast<double>(reorder_sign2(c.j, c.k, us)) * c.b;  // delta side
        complexd wempty = c.a;                                                    // alpha side
        m(s, s) += wfull * std::conj(wfull);
        m(s, sp) += wfull * std::conj(wempty);
        m(sp, s) += wempty * std::conj(wfull);
        m(sp, sp) += wempty * std::conj(wempty);
      }
      break;
    }
  }
  return m;
}

struct DenseOperator {
  int n_modes = 0;
  Mat matrix;
};

/// Sum of all clause projectors of an instance.
inline DenseOperator jw_operator(const Instance& inst) {
  check_size(inst.n_modes);
  DenseOperator op;
  op.n_modes = inst.n_modes;
  const int64_t dim = int64_t{1} << inst.n_modes;
  op.matrix = Mat::Zero(dim, dim);
  for (const auto& c : inst.clauses) op.matrix += jw_clause_matrix(inst.n_modes, c);
  return op;
}

// ---- sector-restricted decision ------------------------------------------

struct Sector {
  enum class Kind : uint8_t { None, Parity, Number } kind = Kind::None;
  int parity = 0;      // 0 = even, 1 = odd
  int64_t number = 0;

  static Sector none() { return {}; }
  static Sector with_parity(int p) {
    Sector s;
    s.kind = Kind::Parity;
    s.parity = p & 1;
    return s;
  }
  static Sector with_number(int64_t n) {
    Sector s;
    s.kind = Kind::Number;
    s.number = n;
    return s;
  }

  bool contains(uint64_t mask) const {
    switch (kind) {
      case Kind::None: return true;
      case Kind::Parity: return (std::popcount(mask) & 1) == parity;
      case Kind::Number: return std::popcount(mask) == number;
    }
    return true;
  }
};

struct BruteForceResult {
  bool sat = false;
  double min_eigenvalue = 0.0;
  std::vector<int64_t> sector_basis;  // full-space indices of the sector
  Mat null_basis;                     // columns: orthonormal null vectors (sector coordinates)

  /// Embed a null-basis column back into the full 2^n space.
  Vec full_vector(int n_modes, int col) const {
    Vec v = Vec::Zero(int64_t{1} << n_modes);
    for (size_t i = 0; i < sector_basis.size(); ++i) v(sector_basis[i]) = null_basis(i, col);
    return v;
  }
};

inline BruteForceResult brute_force_decide(const Instance& inst, Sector sector = Sector::none()) {
  DenseOperator op = jw_operator(inst);
  const int64_t dim = int64_t{1} << inst.n_modes;
  BruteForceResult r;
  for (int64_t s = 0; s < dim; ++s)
    if (sector.contains(static_cast<uint64_t>(s))) r.sector_basis.push_back(s);
  const int64_t d = static_cast<int64_t>(r.sector_basis.size());
  if (d == 0) return r;  // empty sector: trivially NO
  Mat sub(d, d);
  for (int64_t x = 0; x < d; ++x)
    for (int64_t y = 0; y < d; ++y) sub(x, y) = op.matrix(r.sector_basis[x], r.sector_basis[y]);
  Eigen::SelfAdjointEigenSolver<Mat> es(sub);
  r.min_eigenvalue = es.eigenvalues()(0);
  int null_dim = 0;
  while (null_dim < d && es.eigenvalues()(null_dim) < Tol::oracle_sat) ++null_dim;
  r.sat = null_dim > 0;
  r.null_basis = es.eigenvectors().leftCols(null_dim);
  return r;
}

inline int null_space_dimension(const Instance& inst, Sector sector) {
  return static_cast<int>(brute_force_decide(inst, sector).null_basis.cols());
}

// ---- Gaussianity ---------------------------------------------------------

struct GaussianityResult {
  bool is_gaussian = false;
  double deviation = 0.0;
  Eigen::MatrixXd correlation;  // 2n x 2n real antisymmetric
};

/// Correlation-matrix test for pure states: M^T M = I iff Gaussian.
/// Majorana order: index 2m -> a_m + a^dag_m, index 2m+1 -> i(a_m - a^dag_m).
inline GaussianityResult gaussianity_check(int n, const Vec& state) {
  check_size(n);
  const int64_t dim = int64_t{1} << n;
  if (state.size() != dim) throw std::invalid_argument("state dimension mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-8) throw std::invalid_argument("state not normalized");

  // w[a] = c_a |psi> computed by direct bit manipulation
  std::vector<Vec> w(2 * n, Vec::Zero(dim));
  for (int m = 0; m < n; ++m) {
    for (int64_t s = 0; s < dim; ++s) {
      if (state(s) == complexd{}) continue;
      uint64_t us = static_cast<uint64_t>(s);
      uint64_t flipped = us ^ bit(m);
      double sign = reorder_sign(m, us | bit(m));
      // a_m + a^dag_m: both directions carry the same string sign
      w[2 * m](flipped) += sign * state(s);
      // i(a_m - a^dag_m): -i on creation, +i on annihilation
      bool occupied = us & bit(m);
      w[2 * m + 1](flipped) += (occupied ? complexd(0, 1) : complexd(0, -1)) * sign * state(s);
    }
  }
  GaussianityResult r;
  r.correlation = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a)
    for (int b = a + 1; b < 2 * n; ++b) {
      complexd exp_ab = w[a].dot(w[b]);  // <c_a psi | c_b psi>
      double entry = -exp_ab.imag();     // i(<c_a c_b> - delta_ab), real part
      r.correlation(a, b) = entry;
      r.correlation(b, a) = -entry;
    }
  Eigen::MatrixXd dev = r.correlation.transpose() * r.correlation - Eigen::MatrixXd::Identity(2 * n, 2 * n);
  r.deviation = dev.norm();
  r.is_gaussian = r.deviation <= Tol::gaussian;
  return r;
}

// ---- unitaries used by property checks ------------------------------------

/// Particle-hole unitary on a mode set: tensor of X on the set's qubits.
inline Mat ks_matrix(int n, uint64_t s_mask) {
  check_size(n);
  const int64_t dim = int64_t{1} << n;
  Mat m = Mat::Zero(dim, dim);
  for (int64_t s = 0; s < dim; ++s) m(s ^ static_cast<int64_t>(s_mask), s) = 1.0;
  return m;
}

/// exp(theta (a_j^dag a_k - a_k^dag a_j)): mixes modes j and k.
inline Mat mode_rotation_matrix(int n, int j, int k, double theta) {
  Mat aj = creation_matrix(n, j), ak = creation_matrix(n, k);
  Mat g = theta * (aj * ak.adjoint() - ak * aj.adjoint());
  // g is anti-Hermitian: diagonalize i*g and exponentiate on the spectrum
  Eigen::SelfAdjointEigenSolver<Mat> es(complexd(0, 1) * g);
  Vec phases(es.eigenvalues().size());
  for (int i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(complexd(0, -1) * es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Fock-space unitary of a mode permutation: U a^dag_j U^-1 = a^dag_perm[j].
inline Mat permutation_matrix(int n, const std::vector<int>& perm) {
  check_size(n);
  const int64_t dim = int64_t{1} << n;
  Mat m = Mat::Zero(dim, dim);
  for (int64_t s = 0; s < dim; ++s) {
    std::vector<int> imgs;
    for (int i = 0; i < n; ++i)
      if (s & static_cast<int64_t>(bit(i))) imgs.push_back(perm[i]);
    // parity of the sort permutation of the image list
    int sign = 1;
    int64_t target = 0;
    for (size_t x = 0; x < imgs.size(); ++x) {
      target |= static_cast<int64_t>(bit(imgs[x]));
      for (size_t y = x + 1; y < imgs.size(); ++y)
        if (imgs[y] < imgs[x]) sign = -sign;
    }
    m(target, s) = sign;
  }
  return m;
}

}  // namespace ferm2sat::oracle
