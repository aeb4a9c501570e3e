#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <vector>

#include <json.hpp>

#include "instance.hpp"

namespace ferm2sat {

/// Canonicalized instance viewed as a graph: modes are vertices, merged
/// edge projectors are edges, split into quantum and classical edge sets.
struct ConstraintGraph {
  int n_modes = 0;
  std::vector<EdgeProjector> edges;          // sorted by (j, k)
  std::vector<uint32_t> quantum_edges;       // indices into edges
  std::vector<uint32_t> classical_edges;     // indices into edges (rank > 0, no quantum clause)
  std::vector<uint32_t> rank4_edges;

  bool has_rank4() const { return !rank4_edges.empty(); }
};

inline ConstraintGraph build_constraint_graph(const Instance& inst) {
  ConstraintGraph g;
  g.n_modes = inst.n_modes;
  g.edges = canonicalize_edges(inst);
  for (uint32_t i = 0; i < g.edges.size(); ++i) {
    const EdgeProjector& e = g.edges[i];
    if (e.rank() == 4) g.rank4_edges.push_back(i);
    if (e.has_quantum())
      g.quantum_edges.push_back(i);
    else if (e.rank() > 0)
      g.classical_edges.push_back(i);
  }
  return g;
}

/// Connected component of the quantum-edge subgraph. Vertices are stored
/// in ascending global order; local index = position in `vertices`.
struct QuantumCluster {
  enum class Shape : uint8_t { Line, Loop, Branching };

  struct LocalEdge {
    int a = 0, b = 0;        // local endpoints, a < b
    uint32_t edge_idx = 0;   // into ConstraintGraph::edges
  };

  int id = 0;
  std::vector<int> vertices;
  std::vector<LocalEdge> edges;
  int max_degree = 0;
  Shape shape = Shape::Line;

  int n_q() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int local_index(int mode) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), mode);
    return static_cast<int>(it - vertices.begin());
  }
};

struct ClusterDecomposition {
  std::vector<QuantumCluster> clusters;
  std::vector<int> classical_modes;  // modes touching no quantum edge
};

inline ClusterDecomposition extract_quantum_clusters(const ConstraintGraph& g) {
  // CSR adjacency over quantum edges
  std::vector<uint32_t> deg(g.n_modes, 0);
  for (uint32_t ei : g.quantum_edges) {
    deg[g.edges[ei].j]++;
    deg[g.edges[ei].k]++;
  }
  std::vector<uint32_t> off(g.n_modes + 1, 0);
  for (int v = 0; v < g.n_modes; ++v) off[v + 1] = off[v] + deg[v];
  std::vector<std::pair<int, uint32_t>> adj(off[g.n_modes]);  // (neighbor, edge idx)
  {
    std::vector<uint32_t> cur(off.begin(), off.end() - 1);
    for (uint32_t ei : g.quantum_edges) {
      const EdgeProjector& e = g.edges[ei];
      adj[cur[e.j]++] = {e.k, ei};
      adj[cur[e.k]++] = {e.j, ei};
    }
  }

  ClusterDecomposition out;
  std::vector<int> comp(g.n_modes, -1);
  for (int start = 0; start < g.n_modes; ++start) {
    if (deg[start] == 0) {
      out.classical_modes.push_back(start);
      continue;
    }
    if (comp[start] >= 0) continue;
    QuantumCluster c;
    c.id = static_cast<int>(out.clusters.size());
    std::vector<int> stack{start};
    comp[start] = c.id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      c.vertices.push_back(v);
      for (uint32_t t = off[v]; t < off[v + 1]; ++t) {
        int w = adj[t].first;
        if (comp[w] < 0) {
          comp[w] = c.id;
          stack.push_back(w);
        }
      }
    }
    std::sort(c.vertices.begin(), c.vertices.end());
    out.clusters.push_back(std::move(c));
  }

  for (uint32_t ei : g.quantum_edges) {
    const EdgeProjector& e = g.edges[ei];
    QuantumCluster& c = out.clusters[comp[e.j]];
    c.edges.push_back({c.local_index(e.j), c.local_index(e.k), ei});
  }
  for (auto& c : out.clusters) {
    std::sort(c.edges.begin(), c.edges.end(), [](const auto& x, const auto& y) {
      return std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });
    std::vector<int> d(c.vertices.size(), 0);
    for (const auto& e : c.edges) {
      d[e.a]++;
      d[e.b]++;
    }
    c.max_degree = *std::max_element(d.begin(), d.end());
    int nq = c.n_q(), m = c.edge_count();
    if (c.max_degree <= 2 && m == nq - 1)
      c.shape = QuantumCluster::Shape::Line;
    else if (c.max_degree == 2 && m == nq)
      c.shape = QuantumCluster::Shape::Loop;  // 2-regular and connected
    else
      c.shape = QuantumCluster::Shape::Branching;
  }
  return out;
}

/// Maximal spanning subgraph of a cluster whose clauses admit a bipartition
/// A|B with same-side clauses odd and cross-side clauses even. `tq` is the
/// kept clause set, `extras` the incompatible remainder; the cluster is
/// hidden-number-conserving iff `extras` is empty.
struct HpncSubgraph {
  struct ClauseRef {
    int a = 0, b = 0;   // local endpoints, a < b
    bool even = false;  // which sector of the edge projector
  };

  int cluster_id = 0;
  std::vector<uint8_t> side;  // 0 = A, 1 = B, per local vertex
  std::vector<ClauseRef> tq;
  std::vector<ClauseRef> extras;
  bool is_hpnc = true;

  std::vector<int> b_modes(const QuantumCluster& c) const {
    std::vector<int> out;
    for (int i = 0; i < c.n_q(); ++i)
      if (side[i]) out.push_back(c.vertices[i]);
    return out;
  }
  int b_count() const {
    int n = 0;
    for (uint8_t s : side) n += s;
    return n;
  }
};

inline HpncSubgraph build_spanning_hpnc_subgraph(const ConstraintGraph& g, const QuantumCluster& c) {
  const int n = c.n_q();
  HpncSubgraph t;
  t.cluster_id = c.id;
  t.side.assign(n, 0);

  // local adjacency
  std::vector<std::vector<uint32_t>> adj(n);  // indices into c.edges
  for (uint32_t i = 0; i < c.edges.size(); ++i) {
    adj[c.edges[i].a].push_back(i);
    adj[c.edges[i].b].push_back(i);
  }
  auto edge_odd_quantum = [&](const QuantumCluster::LocalEdge& e) {
    return g.edges[e.edge_idx].odd.quantum();
  };
  auto edge_even_quantum = [&](const QuantumCluster::LocalEdge& e) {
    return g.edges[e.edge_idx].even.quantum();
  };

  std::vector<uint8_t> assigned(n, 0), edge_in_walk(c.edges.size(), 0);

  // Walk order: loops with a rank-2 edge are cut at the first such edge so
  // the closing clause lands there (exactly one of its two sectors can be
  // bipartition-compatible, making the kept subgraph span the whole loop).
  // Otherwise breadth-first from a branching vertex if one exists.
  int start = 0;
  int skip_edge = -1;
  if (c.shape == QuantumCluster::Shape::Loop) {
    for (uint32_t i = 0; i < c.edges.size(); ++i) {
      const auto& e = c.edges[i];
      if (edge_odd_quantum(e) && edge_even_quantum(e)) {
        skip_edge = static_cast<int>(i);
        start = e.a;
        break;
      }
    }
  } else if (c.max_degree >= 3) {
    std::vector<int> d(n, 0);
    for (const auto& e : c.edges) {
      d[e.a]++;
      d[e.b]++;
    }
    for (int v = 0; v < n; ++v)
      if (d[v] >= 3) {
        start = v;
        break;
      }
  }

  std::queue<int> q;
  q.push(start);
  assigned[start] = 1;
  t.side[start] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (uint32_t i : adj[v]) {
      if (static_cast<int>(i) == skip_edge) continue;
      const auto& e = c.edges[i];
      int w = e.a == v ? e.b : e.a;
      if (assigned[w]) continue;
      // odd keeps the side, even flips it; rank-2 edges contribute odd
      bool via_even = !edge_odd_quantum(e);
      t.side[w] = via_even ? (t.side[v] ^ 1) : t.side[v];
      t.tq.push_back({e.a, e.b, via_even});
      edge_in_walk[i] = 1;
      assigned[w] = 1;
      q.push(w);
    }
  }

  // Maximality sweep: keep every remaining clause compatible with the
  // bipartition, everything else is an extra. The walk placed the odd
  // clause of each traversed edge (or the even one if the edge has no odd).
  for (uint32_t i = 0; i < c.edges.size(); ++i) {
    const auto& e = c.edges[i];
    bool same_side = t.side[e.a] == t.side[e.b];
    bool walk_used_odd = edge_in_walk[i] && edge_odd_quantum(e);
    bool walk_used_even = edge_in_walk[i] && !edge_odd_quantum(e);
    if (edge_odd_quantum(e) && !walk_used_odd) {
      if (same_side)
        t.tq.push_back({e.a, e.b, false});
      else
        t.extras.push_back({e.a, e.b, false});
    }
    if (edge_even_quantum(e) && !walk_used_even) {
      if (!same_side)
        t.tq.push_back({e.a, e.b, true});
      else
        t.extras.push_back({e.a, e.b, true});
    }
  }
  t.is_hpnc = t.extras.empty();
  return t;
}

/// A clause after conjugation by the particle-hole unitary on a mode set S.
/// `sign` is the accumulated string factor over global modes in [j, k) ∩ S.
struct PhClause {
  ClauseKind kind = ClauseKind::QuantumOdd;
  int j = 0, k = 0;  // global modes, j < k
  complexd a{}, b{};
  int sign = 1;
};

namespace detail {

template <class InS>
PhClause ph_transform_quantum(ClauseKind kind, int j, int k, complexd a, complexd b, InS in_s) {
  int parity = 0;
  for (int i = j; i < k; ++i)
    if (in_s(i)) parity ^= 1;
  double p = parity ? -1.0 : 1.0;
  bool js = in_s(j), ks = in_s(k);
  PhClause out;
  out.j = j;
  out.k = k;
  out.sign = parity ? -1 : 1;
  bool odd = kind == ClauseKind::QuantumOdd;
  if (js && !ks) {
    out.kind = odd ? ClauseKind::QuantumEven : ClauseKind::QuantumOdd;
    out.a = -p * a;
    out.b = b;
  } else if (!js && ks) {
    out.kind = odd ? ClauseKind::QuantumEven : ClauseKind::QuantumOdd;
    out.a = p * b;
    out.b = a;
  } else if (js && ks) {
    out.kind = kind;
    out.a = -p * b;
    out.b = a;
  } else {
    out.kind = kind;
    out.a = p * a;
    out.b = b;
  }
  return out;
}

}  // namespace detail

/// Conjugate a single quantum clause by the particle-hole unitary on S
/// (S given as a sorted list of global modes).
inline PhClause ph_transform_clause(const Clause& c, const std::vector<int>& s_sorted) {
  auto in_s = [&](int m) {
    return std::binary_search(s_sorted.begin(), s_sorted.end(), m);
  };
  if (c.kind == ClauseKind::ClassicalExclude) {
    PhClause out;
    out.kind = ClauseKind::ClassicalExclude;
    out.j = c.j;
    out.k = c.k;
    // pattern bits flip on transformed modes; encode as amplitudes (1,0)/(0,1)
    int xj = pattern_xj(c.pattern) ^ (in_s(c.j) ? 1 : 0);
    int xk = pattern_xk(c.pattern) ^ (in_s(c.k) ? 1 : 0);
    out.a = complexd(2 * xj + xk, 0);  // repurposed: pattern value
    out.b = {};
    return out;
  }
  return detail::ph_transform_quantum(c.kind, c.j, c.k, c.a, c.b, in_s);
}

/// All quantum clauses of a cluster conjugated by the particle-hole unitary
/// on S ⊆ cluster vertices. Classical content on the cluster's edges is not
/// returned here; it is handled pattern-wise by callers.
inline std::vector<PhClause> apply_particle_hole(const ConstraintGraph& g, const QuantumCluster& c,
                                                 const std::vector<int>& s_sorted) {
  auto in_s = [&](int m) {
    return std::binary_search(s_sorted.begin(), s_sorted.end(), m);
  };
  std::vector<PhClause> out;
  out.reserve(c.edges.size());
  for (const auto& le : c.edges) {
    const EdgeProjector& e = g.edges[le.edge_idx];
    if (e.odd.quantum())
      out.push_back(detail::ph_transform_quantum(ClauseKind::QuantumOdd, e.j, e.k, e.odd.c0, e.odd.c1, in_s));
    if (e.even.quantum())
      out.push_back(detail::ph_transform_quantum(ClauseKind::QuantumEven, e.j, e.k, e.even.c0, e.even.c1, in_s));
  }
  return out;
}

inline nlohmann::json cluster_debug_json(const QuantumCluster& c, const HpncSubgraph& t) {
  nlohmann::json doc;
  doc["cluster"] = c.id;
  doc["vertices"] = c.vertices;
  doc["side"] = nlohmann::json::array();
  for (uint8_t s : t.side) doc["side"].push_back(s ? "B" : "A");
  doc["is_hpnc"] = t.is_hpnc;
  return doc;
}

}  // namespace ferm2sat
