#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "types.hpp"

namespace ferm2sat {

enum class ClauseKind : uint8_t { QuantumOdd, QuantumEven, ClassicalExclude };

/// One rank-1 constraint on an ordered mode pair (j < k).
///
/// QuantumOdd  excludes  a*|10> + b*|01>   (a = beta,  b = gamma)
/// QuantumEven excludes  a*|00> + b*|11>   (a = alpha, b = delta)
/// ClassicalExclude excludes one occupation pattern of the pair.
struct Clause {
  ClauseKind kind = ClauseKind::ClassicalExclude;
  int j = 0, k = 0;
  complexd a{}, b{};
  Pattern pattern = Pattern::p00;

  static Clause classical(int j, int k, Pattern p) {
    Clause c;
    c.kind = ClauseKind::ClassicalExclude;
    c.j = j;
    c.k = k;
    c.pattern = p;
    return c;
  }

  // Quantum constructors normalize the amplitude pair and demote to a
  // classical exclusion when one component falls below the threshold.
  static Clause quantum_odd(int j, int k, complexd beta, complexd gamma) {
    return make_quantum(ClauseKind::QuantumOdd, j, k, beta, gamma);
  }
  static Clause quantum_even(int j, int k, complexd alpha, complexd delta) {
    return make_quantum(ClauseKind::QuantumEven, j, k, alpha, delta);
  }

  bool is_quantum() const { return kind != ClauseKind::ClassicalExclude; }

 private:
  static Clause make_quantum(ClauseKind kind, int j, int k, complexd a, complexd b) {
    double n = std::sqrt(std::norm(a) + std::norm(b));
    if (!(n > 0) || !std::isfinite(n)) throw ParseError("quantum clause with zero or non-finite amplitudes");
    a /= n;
    b /= n;
    if (std::abs(b) < Tol::classical_threshold)
      return classical(j, k, kind == ClauseKind::QuantumOdd ? Pattern::p10 : Pattern::p00);
    if (std::abs(a) < Tol::classical_threshold)
      return classical(j, k, kind == ClauseKind::QuantumOdd ? Pattern::p01 : Pattern::p11);
    Clause c;
    c.kind = kind;
    c.j = j;
    c.k = k;
    c.a = a;
    c.b = b;
    return c;
  }
};

struct Instance {
  int n_modes = 0;
  std::vector<Clause> clauses;
  double tol = Tol::match;
};

// ---- JSON parsing / serialization --------------------------------------

namespace detail {

inline complexd parse_amp(const nlohmann::json& v, const char* what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(std::string(what) + " must be a [re, im] pair");
  complexd z(v[0].get<double>(), v[1].get<double>());
  if (!finite(z)) throw ParseError(std::string(what) + " is not finite");
  return z;
}

inline std::pair<int, int> parse_edge(const nlohmann::json& v, int n_modes) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ParseError("edge must be an [j, k] integer pair");
  int j = v[0].get<int>(), k = v[1].get<int>();
  if (j < 0 || k < 0 || j >= n_modes || k >= n_modes)
    throw ParseError("edge [" + std::to_string(j) + "," + std::to_string(k) + "] out of range");
  if (j == k) throw ParseError("self-edge [" + std::to_string(j) + "," + std::to_string(j) + "]");
  if (j > k) throw ParseError("edge [" + std::to_string(j) + "," + std::to_string(k) + "] must have j < k");
  return {j, k};
}

// Enforce |a|^2 + |b|^2 = 1 within the rescale window, else reject.
inline void check_normalizable(complexd a, complexd b) {
  double n2 = std::norm(a) + std::norm(b);
  if (std::abs(n2 - 1.0) > Tol::norm_window)
    throw ParseError("amplitudes not normalizable: |a|^2+|b|^2 = " + std::to_string(n2));
}

}  // namespace detail

inline Instance parse_instance(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("instance must be a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) throw ParseError("missing integer field 'n'");
  Instance inst;
  inst.n_modes = doc["n"].get<int>();
  if (inst.n_modes <= 0) throw ParseError("'n' must be positive");
  if (doc.contains("tol")) inst.tol = doc["tol"].get<double>();
  if (!doc.contains("clauses") || !doc["clauses"].is_array()) throw ParseError("missing array field 'clauses'");
  for (const auto& c : doc["clauses"]) {
    if (!c.is_object() || !c.contains("type")) throw ParseError("clause must be an object with 'type'");
    std::string type = c["type"].get<std::string>();
    auto [j, k] = detail::parse_edge(c.at("edge"), inst.n_modes);
    if (type == "q_odd") {
      complexd beta = detail::parse_amp(c.at("beta"), "beta");
      complexd gamma = detail::parse_amp(c.at("gamma"), "gamma");
      detail::check_normalizable(beta, gamma);
      inst.clauses.push_back(Clause::quantum_odd(j, k, beta, gamma));
    } else if (type == "q_even") {
      complexd alpha = detail::parse_amp(c.at("alpha"), "alpha");
      complexd delta = detail::parse_amp(c.at("delta"), "delta");
      detail::check_normalizable(alpha, delta);
      inst.clauses.push_back(Clause::quantum_even(j, k, alpha, delta));
    } else if (type == "classical") {
      inst.clauses.push_back(Clause::classical(j, k, parse_pattern(c.at("exclude").get<std::string>())));
    } else {
      throw ParseError("unknown clause type '" + type + "'");
    }
  }
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_instance(doc);
}

inline Instance parse_instance(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc;
  doc["n"] = inst.n_modes;
  doc["clauses"] = nlohmann::json::array();
  for (const auto& c : inst.clauses) {
    nlohmann::json jc;
    jc["edge"] = {c.j, c.k};
    switch (c.kind) {
      case ClauseKind::QuantumOdd:
        jc["type"] = "q_odd";
        jc["beta"] = {c.a.real(), c.a.imag()};
        jc["gamma"] = {c.b.real(), c.b.imag()};
        break;
      case ClauseKind::QuantumEven:
        jc["type"] = "q_even";
        jc["alpha"] = {c.a.real(), c.a.imag()};
        jc["delta"] = {c.b.real(), c.b.imag()};
        break;
      case ClauseKind::ClassicalExclude:
        jc["type"] = "classical";
        jc["exclude"] = pattern_string(c.pattern);
        break;
    }
    doc["clauses"].push_back(std::move(jc));
  }
  return doc;
}

inline std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(2); }

// ---- per-edge canonical form -------------------------------------------

/// Joint excluded subspace of one parity sector of a two-mode edge.
/// rank 0: nothing excluded; rank 1: the span of (c0, c1); rank 2: the
/// whole sector. Basis per sector: odd c0 -> |10>, c1 -> |01>; even
/// c0 -> |00>, c1 -> |11>.
struct SectorProjector {
  int rank = 0;
  complexd c0{}, c1{};

  bool quantum() const {
    return rank == 1 && std::min(std::abs(c0), std::abs(c1)) >= Tol::classical_threshold;
  }
};

/// Canonical per-edge merge of all clauses on a mode pair.
struct EdgeProjector {
  int j = 0, k = 0;
  SectorProjector odd;   // span{|10>, |01>}
  SectorProjector even;  // span{|00>, |11>}

  int rank() const { return odd.rank + even.rank; }

  complexd u() const { return std::conj(odd.c1) / std::conj(odd.c0); }   // gamma*/beta*
  complexd v() const { return std::conj(even.c0) / std::conj(even.c1); } // alpha*/delta*

  bool has_quantum() const { return odd.quantum() || even.quantum(); }

  /// Patterns excluded outright (full sectors and basis-aligned rank-1 sectors).
  std::vector<Pattern> excluded_patterns() const {
    std::vector<Pattern> out;
    auto sector = [&](const SectorProjector& s, Pattern lo, Pattern hi) {
      if (s.rank == 2) {
        out.push_back(lo);
        out.push_back(hi);
      } else if (s.rank == 1 && !s.quantum()) {
        out.push_back(std::abs(s.c1) < std::abs(s.c0) ? lo : hi);
      }
    };
    sector(odd, Pattern::p10, Pattern::p01);
    sector(even, Pattern::p00, Pattern::p11);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// The defining rank-1 exclusions, as plain clauses.
  std::vector<Clause> to_clauses() const {
    std::vector<Clause> out;
    if (odd.rank == 2) {
      out.push_back(Clause::classical(j, k, Pattern::p10));
      out.push_back(Clause::classical(j, k, Pattern::p01));
    } else if (odd.rank == 1) {
      out.push_back(Clause::quantum_odd(j, k, odd.c0, odd.c1));
    }
    if (even.rank == 2) {
      out.push_back(Clause::classical(j, k, Pattern::p00));
      out.push_back(Clause::classical(j, k, Pattern::p11));
    } else if (even.rank == 1) {
      out.push_back(Clause::quantum_even(j, k, even.c0, even.c1));
    }
    return out;
  }
};

namespace detail {

// Accumulate a new excluded vector into a 2-dim sector span.
inline void accumulate(SectorProjector& s, complexd c0, complexd c1, double tol) {
  double n = std::sqrt(std::norm(c0) + std::norm(c1));
  c0 /= n;
  c1 /= n;
  if (s.rank == 0) {
    s.rank = 1;
    s.c0 = c0;
    s.c1 = c1;
    return;
  }
  if (s.rank == 2) return;
  // parallel within tolerance collapses to one; anything else spans the sector
  complexd det = s.c0 * c1 - s.c1 * c0;
  if (std::abs(det) > tol) {
    s.rank = 2;
    s.c0 = s.c1 = complexd{};
  }
}

// Deterministic phase: largest component real positive, unit norm.
inline void fix_phase(SectorProjector& s) {
  if (s.rank != 1) return;
  complexd anchor = std::abs(s.c0) >= std::abs(s.c1) ? s.c0 : s.c1;
  complexd ph = anchor / std::abs(anchor);
  s.c0 /= ph;
  s.c1 /= ph;
  // snap near-classical vectors onto the basis state they approximate
  if (!s.quantum()) {
    if (std::abs(s.c0) >= std::abs(s.c1)) {
      s.c0 = 1.0;
      s.c1 = 0.0;
    } else {
      s.c0 = 0.0;
      s.c1 = 1.0;
    }
  }
}

}  // namespace detail

/// Merge every clause on each edge into its canonical two-sector form.
/// Returned vector is sorted by (j, k). Rank-4 edges are legal output.
inline std::vector<EdgeProjector> canonicalize_edges(const Instance& inst) {
  std::vector<uint32_t> order(inst.clauses.size());
  for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](uint32_t x, uint32_t y) {
    const Clause &a = inst.clauses[x], &b = inst.clauses[y];
    if (a.j != b.j) return a.j < b.j;
    if (a.k != b.k) return a.k < b.k;
    return x < y;
  });

  std::vector<EdgeProjector> edges;
  for (uint32_t idx : order) {
    const Clause& c = inst.clauses[idx];
    if (edges.empty() || edges.back().j != c.j || edges.back().k != c.k) {
      EdgeProjector e;
      e.j = c.j;
      e.k = c.k;
      edges.push_back(e);
    }
    EdgeProjector& e = edges.back();
    switch (c.kind) {
      case ClauseKind::QuantumOdd:
        detail::accumulate(e.odd, c.a, c.b, inst.tol);
        break;
      case ClauseKind::QuantumEven:
        detail::accumulate(e.even, c.a, c.b, inst.tol);
        break;
      case ClauseKind::ClassicalExclude:
        switch (c.pattern) {
          case Pattern::p10: detail::accumulate(e.odd, 1.0, 0.0, inst.tol); break;
          case Pattern::p01: detail::accumulate(e.odd, 0.0, 1.0, inst.tol); break;
          case Pattern::p00: detail::accumulate(e.even, 1.0, 0.0, inst.tol); break;
          case Pattern::p11: detail::accumulate(e.even, 0.0, 1.0, inst.tol); break;
        }
        break;
    }
  }
  for (auto& e : edges) {
    detail::fix_phase(e.odd);
    detail::fix_phase(e.even);
  }
  return edges;
}

// ---- validation ----------------------------------------------------------

struct ValidationReport {
  std::vector<std::string> normalization_violations;
  std::vector<std::string> demotions;
  std::vector<std::pair<int, int>> rank4_edges;

  bool clean() const {
    return normalization_violations.empty() && demotions.empty() && rank4_edges.empty();
  }
};

/// Report normalization drift, near-classical quantum clauses (these are
/// auto-demoted on construction) and fully excluded edges.
inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto edge_str = [](const Clause& c) {
    return "(" + std::to_string(c.j) + "," + std::to_string(c.k) + ")";
  };
  for (const auto& c : inst.clauses) {
    if (!c.is_quantum()) continue;
    double n2 = std::norm(c.a) + std::norm(c.b);
    if (std::abs(n2 - 1.0) > Tol::norm_window)
      rep.normalization_violations.push_back("clause on " + edge_str(c) + ": |a|^2+|b|^2 = " + std::to_string(n2));
    if (std::min(std::abs(c.a), std::abs(c.b)) < Tol::classical_threshold)
      rep.demotions.push_back("clause on " + edge_str(c) + " is classical within threshold");
  }
  for (const auto& e : canonicalize_edges(inst))
    if (e.rank() == 4) rep.rank4_edges.emplace_back(e.j, e.k);
  return rep;
}

}  // namespace ferm2sat
