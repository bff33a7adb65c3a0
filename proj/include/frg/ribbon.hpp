#pragma once

// Ribbon graphs over multi-trace interaction vertices: effective vertices by
// boundary walk, the one-loop classifier, and enumeration of the one-loop
// chains that make up the k-th Hessian power.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "frg/hessalg.hpp"
#include "frg/invariants.hpp"
#include "frg/scalar_poly.hpp"
#include "frg/word.hpp"

namespace frg::ribbon {

class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HalfEdge {
  std::size_t vertex = 0;
  std::size_t trace = 0;
  std::size_t position = 0;

  auto operator<=>(const HalfEdge&) const = default;
  bool operator==(const HalfEdge&) const = default;
};

// Traces keep their clockwise orientation; weight and n_power are the
// operator's symmetry factor and N power.
struct IVertex {
  std::vector<Word> traces;
  Symbol coupling;
  Rational weight{1};
  int n_power = 0;

  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& t : traces) d += t.size();
    return d;
  }
  bool operator==(const IVertex&) const = default;
};

inline IVertex vertex_from_operator(const Operator& op) {
  return {trace_words(op.shape), op.coupling, op.symmetry_factor, op.shape.n_power()};
}

struct RibbonGraph {
  std::vector<IVertex> vertices;
  std::vector<std::pair<HalfEdge, HalfEdge>> propagators;

  bool operator==(const RibbonGraph&) const = default;
};

struct EffectiveVertex {
  TraceMonomial invariant;
  ScalarPoly weight;
};

namespace detail {

inline Letter letter_at(const RibbonGraph& g, const HalfEdge& h) {
  if (h.vertex >= g.vertices.size() || h.trace >= g.vertices[h.vertex].traces.size() ||
      h.position >= g.vertices[h.vertex].traces[h.trace].size())
    throw StructuralError("half-edge out of range");
  return g.vertices[h.vertex].traces[h.trace][h.position];
}

inline HalfEdge next(const RibbonGraph& g, const HalfEdge& h) {
  const std::size_t len = g.vertices[h.vertex].traces[h.trace].size();
  return {h.vertex, h.trace, (h.position + 1) % len};
}

inline std::map<HalfEdge, HalfEdge> partner_map(const RibbonGraph& g) {
  std::map<HalfEdge, HalfEdge> partner;
  for (const auto& [x, y] : g.propagators) {
    if (letter_at(g, x) != letter_at(g, y)) throw StructuralError("propagator joins different letters");
    if (x == y) throw StructuralError("propagator joins a half-edge to itself");
    if (!partner.emplace(x, y).second || !partner.emplace(y, x).second)
      throw StructuralError("half-edge used by two propagators");
  }
  return partner;
}

}  // namespace detail

// Faces are read by leaving each contracted half-edge through its partner and
// following the vertex orientation, recording uncontracted letters, until the
// next contracted half-edge. A face with no letters contributes N.
inline EffectiveVertex boundary_walk(const RibbonGraph& g) {
  const auto partner = detail::partner_map(g);
  std::vector<CyclicWord> faces;
  int n_power = 0;
  ScalarPoly weight(1);
  for (const auto& v : g.vertices) {
    weight *= ScalarPoly(v.coupling) * v.weight;
    n_power += v.n_power;
  }

  std::map<HalfEdge, bool> used;
  for (const auto& [start, other] : partner) {
    if (used[start]) continue;
    Word face;
    HalfEdge h = start;
    do {
      used[h] = true;
      HalfEdge cur = detail::next(g, partner.at(h));
      while (!partner.count(cur)) {
        face.push_back(detail::letter_at(g, cur));
        cur = detail::next(g, cur);
      }
      h = cur;
    } while (h != start);
    if (face.empty())
      ++n_power;
    else
      faces.emplace_back(face);
  }

  // Traces without contracted half-edges stay as they are.
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (std::size_t t = 0; t < g.vertices[v].traces.size(); ++t) {
      const Word& w = g.vertices[v].traces[t];
      bool touched = false;
      for (std::size_t p = 0; p < w.size() && !touched; ++p) touched = partner.count({v, t, p}) > 0;
      if (!touched) {
        if (w.empty())
          ++n_power;
        else
          faces.emplace_back(w);
      }
    }
  return {TraceMonomial(std::move(faces), n_power), weight};
}

// Vertices collapsed to nodes, propagators as edges (self-loops kept).
struct Skeleton {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline Skeleton skeleton(const RibbonGraph& g) {
  Skeleton s{g.vertices.size(), {}};
  for (const auto& [x, y] : g.propagators) s.edges.emplace_back(x.vertex, y.vertex);
  return s;
}

inline std::size_t component_count(const Skeleton& s, std::optional<std::size_t> skip_edge = {}) {
  std::vector<std::size_t> parent(s.nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t comps = s.nodes;
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    if (skip_edge && *skip_edge == e) continue;
    auto a = find(s.edges[e].first), b = find(s.edges[e].second);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps;
}

// b1 = |E| - |V| + |components|
inline long betti_number(const Skeleton& s) {
  return static_cast<long>(s.edges.size()) - static_cast<long>(s.nodes) + static_cast<long>(component_count(s));
}

inline bool has_bridge(const Skeleton& s) {
  const std::size_t base = component_count(s);
  for (std::size_t e = 0; e < s.edges.size(); ++e)
    if (component_count(s, e) > base) return true;
  return false;
}

inline bool is_one_loop(const RibbonGraph& g) {
  Skeleton s = skeleton(g);
  if (s.nodes == 0 || component_count(s) != 1) return false;
  return betti_number(s) == 1 && !has_bridge(s);
}

// One equivalence class of chains: the representative graph lists the
// operators in chain order, with propagators out(i) -> in(i+1).
struct ChainClass {
  RibbonGraph graph;
  std::vector<std::size_t> operators;
  std::uint64_t multiplicity = 0;
};

namespace detail {

// Half-edge permutations of one vertex: permutations of identical traces
// combined with rotations fixing each trace.
class VertexSymmetry {
 public:
  explicit VertexSymmetry(const IVertex& v) {
    for (std::size_t t = 0; t < v.traces.size(); ++t) {
      offsets_.push_back(total_);
      lengths_.push_back(v.traces[t].size());
      total_ += v.traces[t].size();
    }
    std::vector<std::size_t> perm(v.traces.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      bool ok = true;
      for (std::size_t t = 0; t < perm.size() && ok; ++t) ok = v.traces[perm[t]] == v.traces[t];
      if (ok) add_rotations(v, perm, 0, std::vector<std::size_t>(perm.size(), 0));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  std::size_t size() const { return total_; }
  std::size_t index(std::size_t trace, std::size_t pos) const { return offsets_[trace] + pos; }
  HalfEdge half_edge(std::size_t vertex, std::size_t idx) const {
    std::size_t t = 0;
    while (t + 1 < offsets_.size() && offsets_[t + 1] <= idx) ++t;
    return {vertex, t, idx - offsets_[t]};
  }

  // Smallest image of the ordered pair (p, q) under the group.
  std::pair<std::size_t, std::size_t> orbit_key(std::size_t p, std::size_t q) const {
    std::pair<std::size_t, std::size_t> best{p, q};
    for (const auto& g : maps_) best = std::min(best, std::make_pair(g[p], g[q]));
    return best;
  }

 private:
  void add_rotations(const IVertex& v, const std::vector<std::size_t>& perm, std::size_t t,
                     std::vector<std::size_t> rot) {
    if (t == perm.size()) {
      std::vector<std::size_t> m(total_);
      for (std::size_t s = 0; s < perm.size(); ++s)
        for (std::size_t p = 0; p < lengths_[s]; ++p)
          m[offsets_[s] + p] = offsets_[perm[s]] + (p + rot[s]) % std::max<std::size_t>(lengths_[s], 1);
      maps_.push_back(std::move(m));
      return;
    }
    const Word& w = v.traces[t];
    for (std::size_t r = 0; r < std::max<std::size_t>(w.size(), 1); ++r) {
      if (w.rotated(r) != w) continue;
      rot[t] = r;
      add_rotations(v, perm, t + 1, rot);
    }
  }

  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> lengths_;
  std::size_t total_ = 0;
  std::vector<std::vector<std::size_t>> maps_;
};

}  // namespace detail

// All chains of k operators (with repetition) where operator i is entered at
// half-edge p_i and left at q_i != p_i, and q_i is contracted with p_{i+1}
// (cyclically). Labeled chains are grouped up to rotation of the chain and
// the symmetries of each vertex; each class records its labeled count.
// Chains whose effective vertex would exceed degree_max are skipped.
inline std::vector<ChainClass> enumerate_one_loop_chains(const std::vector<Operator>& ops, unsigned k,
                                                         std::optional<std::size_t> degree_max = {}) {
  if (k == 0) throw std::invalid_argument("chain length must be positive");
  struct Pair {
    std::size_t p, q;
    Letter in, out;
    std::pair<std::size_t, std::size_t> orbit;
  };
  std::vector<IVertex> verts;
  std::vector<detail::VertexSymmetry> sym;
  std::vector<std::vector<Pair>> pairs(ops.size());
  for (std::size_t a = 0; a < ops.size(); ++a) {
    verts.push_back(vertex_from_operator(ops[a]));
    sym.emplace_back(verts.back());
    std::vector<Letter> letters;
    for (const auto& t : verts.back().traces)
      for (std::size_t p = 0; p < t.size(); ++p) letters.push_back(t[p]);
    for (std::size_t p = 0; p < letters.size(); ++p)
      for (std::size_t q = 0; q < letters.size(); ++q)
        if (p != q) pairs[a].push_back({p, q, letters[p], letters[q], sym[a].orbit_key(p, q)});
  }

  using Step = std::tuple<std::size_t, std::size_t, std::size_t>;  // operator, orbit p, orbit q
  std::map<std::vector<Step>, std::size_t> index;
  std::vector<ChainClass> classes;
  std::vector<std::pair<std::size_t, const Pair*>> chain;

  auto record = [&]() {
    std::vector<Step> key;
    for (const auto& [a, pr] : chain) key.emplace_back(a, pr->orbit.first, pr->orbit.second);
    std::vector<Step> best = key;
    for (std::size_t r = 1; r < k; ++r) {
      std::rotate(key.begin(), key.begin() + 1, key.end());
      best = std::min(best, key);
    }
    auto [it, inserted] = index.try_emplace(best, classes.size());
    if (inserted) {
      ChainClass c;
      for (std::size_t i = 0; i < k; ++i) {
        c.graph.vertices.push_back(verts[chain[i].first]);
        c.operators.push_back(chain[i].first);
      }
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = (i + 1) % k;
        c.graph.propagators.emplace_back(sym[chain[i].first].half_edge(i, chain[i].second->q),
                                         sym[chain[j].first].half_edge(j, chain[j].second->p));
      }
      classes.push_back(std::move(c));
    }
    ++classes[it->second].multiplicity;
  };

  auto dfs = [&](auto&& self, std::size_t partial_degree) -> void {
    const std::size_t i = chain.size();
    if (i == k) {
      if (chain.back().second->out == chain.front().second->in) record();
      return;
    }
    for (std::size_t a = 0; a < ops.size(); ++a) {
      const std::size_t d = partial_degree + verts[a].degree() - 2;
      if (verts[a].degree() < 2 || (degree_max && d > *degree_max)) continue;
      for (const auto& pr : pairs[a]) {
        if (i > 0 && pr.in != chain.back().second->out) continue;
        chain.emplace_back(a, &pr);
        self(self, d);
        chain.pop_back();
      }
    }
  };
  dfs(dfs, 0);
  return classes;
}

// Sum over chain classes of multiplicity * weight * effective vertex.
inline InvariantSum chain_sum(const std::vector<ChainClass>& classes) {
  InvariantSum out;
  for (const auto& c : classes) {
    EffectiveVertex ev = boundary_walk(c.graph);
    out.add(ev.invariant, ev.weight * Rational(static_cast<unsigned long>(c.multiplicity)));
  }
  return out;
}

struct CrossCheckReport {
  bool match = false;
  std::size_t graph_classes = 0;
  std::uint64_t labeled_chains = 0;
  InvariantSum graph_side;
  InvariantSum algebra_side;
  std::optional<TraceMonomial> first_difference;
};

// Graph enumeration against STr((sum of Hessians)^k), both truncated to
// effective vertices of degree <= degree_max.
inline CrossCheckReport cross_check_flow(const std::vector<Operator>& ops, std::size_t n_letters, unsigned k,
                                         std::optional<std::size_t> degree_max = {}) {
  CrossCheckReport r;
  auto classes = enumerate_one_loop_chains(ops, k, degree_max);
  r.graph_classes = classes.size();
  for (const auto& c : classes) r.labeled_chains += c.multiplicity;
  r.graph_side = chain_sum(classes);
  r.algebra_side = supertrace(power(hess_sum(ops, n_letters), k, Truncation{degree_max}));
  InvariantSum diff = r.graph_side - r.algebra_side;
  r.match = diff.is_zero();
  if (!r.match) r.first_difference = diff.terms().begin()->first;
  return r;
}

// Line-based text form:
//   ribbon-graph <vertex count> <propagator count>
//   v <coupling> <weight> <n_power> : <letters> ; <letters> ...
//   p <vertex> <trace> <pos> <vertex> <trace> <pos>
inline std::string serialize(const RibbonGraph& g, const Alphabet& alpha) {
  std::ostringstream out;
  out << "ribbon-graph " << g.vertices.size() << ' ' << g.propagators.size() << '\n';
  for (const auto& v : g.vertices) {
    out << "v " << v.coupling.name << ' ' << v.weight.get_str() << ' ' << v.n_power << " :";
    for (std::size_t t = 0; t < v.traces.size(); ++t) {
      if (t > 0) out << " ;";
      for (std::size_t p = 0; p < v.traces[t].size(); ++p) out << ' ' << alpha.name(v.traces[t][p]);
    }
    out << '\n';
  }
  for (const auto& [x, y] : g.propagators)
    out << "p " << x.vertex << ' ' << x.trace << ' ' << x.position << ' ' << y.vertex << ' ' << y.trace << ' '
        << y.position << '\n';
  return out.str();
}

inline RibbonGraph parse_graph(const std::string& text, const Alphabet& alpha) {
  std::istringstream in(text);
  std::string tag;
  std::size_t nv = 0, np = 0;
  if (!(in >> tag >> nv >> np) || tag != "ribbon-graph") throw StructuralError("missing ribbon-graph header");
  RibbonGraph g;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      IVertex v;
      std::string name, weight, colon;
      if (!(ls >> name >> weight >> v.n_power >> colon) || colon != ":") throw StructuralError("bad vertex line");
      v.coupling = Symbol::bare(name);
      v.weight = Rational(weight);
      v.weight.canonicalize();
      v.traces.emplace_back();
      std::string tok;
      while (ls >> tok) {
        if (tok == ";") {
          v.traces.emplace_back();
          continue;
        }
        int idx = alpha.find(tok);
        if (idx < 0) throw StructuralError("unknown letter '" + tok + "'");
        v.traces.back().push_back(static_cast<Letter>(idx));
      }
      g.vertices.push_back(std::move(v));
    } else if (tag == "p") {
      HalfEdge x, y;
      if (!(ls >> x.vertex >> x.trace >> x.position >> y.vertex >> y.trace >> y.position))
        throw StructuralError("bad propagator line");
      g.propagators.emplace_back(x, y);
    } else {
      throw StructuralError("unknown line tag '" + tag + "'");
    }
  }
  if (g.vertices.size() != nv || g.propagators.size() != np) throw StructuralError("count mismatch");
  detail::partner_map(g);
  return g;
}

}  // namespace frg::ribbon
