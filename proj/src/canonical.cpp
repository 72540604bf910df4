//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/canonical.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <utility>

namespace gcnx {

SubstructureGraph::SubstructureGraph(std::vector<ElementLabel> labels,
                                     const std::vector<Bond> &bonds)
    : labels_(std::move(labels)) {
  const int n = size();
  bonds_.assign(static_cast<std::size_t>(n) * n, 0);
  adj_.assign(static_cast<std::size_t>(n), {});
  for (const Bond &b : bonds) {
    if (b.i == b.j || b.i < 0 || b.j < 0 || b.i >= n || b.j >= n)
      throw StructuralError("invalid bond in substructure");
    if (bonds_[b.i * n + b.j] != 0) throw StructuralError("duplicate bond");
    bonds_[b.i * n + b.j] = bonds_[b.j * n + b.i] = static_cast<int>(b.order);
    adj_[b.i].push_back(b.j);
    adj_[b.j].push_back(b.i);
  }
  for (auto &a : adj_) std::sort(a.begin(), a.end());
}

SubstructureGraph SubstructureGraph::from_molecule(const Molecule &molecule) {
  return SubstructureGraph(molecule.graph.node_elements(), molecule.bonds);
}

SubstructureGraph SubstructureGraph::induced(const Molecule &molecule,
                                             const std::vector<int> &vertices) {
  std::vector<int> pos(static_cast<std::size_t>(molecule.n_atoms()), -1);
  std::vector<ElementLabel> labels;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    pos[vertices[k]] = static_cast<int>(k);
    labels.push_back(molecule.graph.node_elements()[vertices[k]]);
  }
  std::vector<Bond> bonds;
  for (const Bond &b : molecule.bonds)
    if (pos[b.i] >= 0 && pos[b.j] >= 0)
      bonds.push_back(Bond{std::min(pos[b.i], pos[b.j]),
                           std::max(pos[b.i], pos[b.j]), b.order});
  return SubstructureGraph(std::move(labels), bonds);
}

std::vector<Bond> SubstructureGraph::bond_list() const {
  std::vector<Bond> out;
  for (int i = 0; i < size(); ++i)
    for (int j : adj_[i])
      if (i < j) out.push_back(Bond{i, j, static_cast<BondOrder>(bond(i, j))});
  return out;
}

bool SubstructureGraph::connected() const {
  if (size() == 0) return true;
  std::vector<bool> seen(static_cast<std::size_t>(size()), false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    ++count;
    for (int v : adj_[u])
      if (!seen[v]) {
        seen[v] = true;
        q.push(v);
      }
  }
  return count == size();
}

SubstructureGraph SubstructureGraph::permuted(const std::vector<int> &perm) const {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  std::vector<ElementLabel> labels;
  for (int p : perm) labels.push_back(labels_[p]);
  std::vector<Bond> bonds;
  for (const Bond &b : bond_list())
    bonds.push_back(Bond{std::min(inv[b.i], inv[b.j]), std::max(inv[b.i], inv[b.j]),
                         b.order});
  return SubstructureGraph(std::move(labels), bonds);
}

Molecule SubstructureGraph::to_molecule() const {
  return make_molecule(labels_, bond_list());
}

namespace {

constexpr long kSearchBudget = 2'000'000;

class CanonicalSearch {
 public:
  explicit CanonicalSearch(const SubstructureGraph &g) : g_(g), n_(g.size()) { }

  CanonicalForm run() {
    std::vector<int> colors(static_cast<std::size_t>(n_));
    std::vector<int> codes(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) codes[v] = g_.labels()[v].code();
    std::vector<std::vector<int>> sigs;
    for (int v = 0; v < n_; ++v) sigs.push_back({codes[v]});
    rerank(sigs, colors);
    refine(colors);
    search(colors);
    return CanonicalForm{encode(best_), best_order_};
  }

 private:
  // Assigns colors by rank of signature; ties keep equal colors.
  static int rerank(const std::vector<std::vector<int>> &sigs,
                    std::vector<int> &colors) {
    std::vector<int> idx(sigs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return sigs[a] < sigs[b]; });
    int c = -1;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k == 0 || sigs[idx[k]] != sigs[idx[k - 1]]) ++c;
      colors[idx[k]] = c;
    }
    return c + 1;
  }

  static int distinct(const std::vector<int> &colors) {
    return colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
  }

  void refine(std::vector<int> &colors) const {
    int count = distinct(colors);
    while (true) {
      std::vector<std::vector<int>> sigs(static_cast<std::size_t>(n_));
      for (int v = 0; v < n_; ++v) {
        std::vector<int> &s = sigs[v];
        s.push_back(colors[v]);
        std::vector<int> nb;
        for (int u : g_.neighbors(v)) nb.push_back(g_.bond(v, u) * 1024 + colors[u]);
        std::sort(nb.begin(), nb.end());
        s.insert(s.end(), nb.begin(), nb.end());
      }
      int next = rerank(sigs, colors);
      if (next == count) return;
      count = next;
    }
  }

  void search(const std::vector<int> &colors) {
    if (++visited_ > kSearchBudget)
      throw CanonicalizationError("canonical search budget exceeded");
    // First non-singleton cell.
    std::vector<int> cell_size(static_cast<std::size_t>(n_), 0);
    for (int c : colors) ++cell_size[c];
    int target = -1;
    for (int c = 0; c < n_; ++c)
      if (cell_size[c] > 1) {
        target = c;
        break;
      }
    if (target < 0) {
      leaf(colors);
      return;
    }
    for (int v = 0; v < n_; ++v) {
      if (colors[v] != target) continue;
      std::vector<std::vector<int>> sigs(static_cast<std::size_t>(n_));
      for (int u = 0; u < n_; ++u) sigs[u] = {colors[u], u == v ? 0 : 1};
      std::vector<int> child(static_cast<std::size_t>(n_));
      rerank(sigs, child);
      refine(child);
      search(child);
    }
  }

  void leaf(const std::vector<int> &colors) {
    std::vector<int> order(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) order[colors[v]] = v;
    std::vector<int> cert;
    cert.reserve(static_cast<std::size_t>(n_ + n_ * (n_ - 1) / 2 + 1));
    cert.push_back(n_);
    for (int p = 0; p < n_; ++p) cert.push_back(g_.labels()[order[p]].code());
    for (int p = 0; p < n_; ++p)
      for (int q = p + 1; q < n_; ++q) cert.push_back(g_.bond(order[p], order[q]));
    if (best_.empty() || cert < best_) {
      best_ = std::move(cert);
      best_order_ = std::move(order);
    }
  }

  std::string encode(const std::vector<int> &cert) const {
    // "n|labels|edges" with labels as text and edges as p-q:order.
    std::string key = std::to_string(n_) + "|";
    for (int p = 0; p < n_; ++p) {
      if (p) key += ',';
      key += to_string(g_.labels()[best_order_[p]]);
    }
    key += '|';
    std::size_t idx = 1 + static_cast<std::size_t>(n_);
    bool first = true;
    for (int p = 0; p < n_; ++p)
      for (int q = p + 1; q < n_; ++q, ++idx) {
        if (cert[idx] == 0) continue;
        if (!first) key += ',';
        first = false;
        key += std::to_string(p) + '-' + std::to_string(q) + ':'
               + std::to_string(cert[idx]);
      }
    return key;
  }

  const SubstructureGraph &g_;
  int n_;
  long visited_ = 0;
  std::vector<int> best_;
  std::vector<int> best_order_;
};

}  // namespace

CanonicalForm canonical_form(const SubstructureGraph &graph) {
  if (graph.size() > kMaxCanonicalNodes)
    throw CanonicalizationError("subgraph with " + std::to_string(graph.size())
                                + " nodes exceeds the canonicalization cap of "
                                + std::to_string(kMaxCanonicalNodes));
  return CanonicalSearch(graph).run();
}

namespace {

class ContainmentSearch {
 public:
  ContainmentSearch(const SubstructureGraph &target,
                    const SubstructureGraph &pattern)
      : t_(target), p_(pattern) { }

  bool run() {
    const int k = p_.size();
    if (k == 0) return true;
    if (k > t_.size()) return false;
    // Label multiset must fit.
    std::map<int, int> need;
    for (const auto &l : p_.labels()) ++need[l.code()];
    std::map<int, int> have;
    for (const auto &l : t_.labels()) ++have[l.code()];
    for (auto &[code, cnt] : need)
      if (have[code] < cnt) return false;

    // Match order: start from the rarest label, then grow along edges so
    // that every later vertex has an already-mapped neighbor when possible.
    std::vector<bool> placed(static_cast<std::size_t>(k), false);
    while (static_cast<int>(order_.size()) < k) {
      int start = -1;
      for (int v = 0; v < k; ++v) {
        if (placed[v]) continue;
        if (start < 0 || have[p_.labels()[v].code()] < have[p_.labels()[start].code()]
            || (have[p_.labels()[v].code()] == have[p_.labels()[start].code()]
                && p_.degree(v) > p_.degree(start)))
          start = v;
      }
      std::queue<int> q;
      q.push(start);
      placed[start] = true;
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        order_.push_back(u);
        for (int w : p_.neighbors(u))
          if (!placed[w]) {
            placed[w] = true;
            q.push(w);
          }
      }
    }
    anchor_.assign(static_cast<std::size_t>(k), -1);
    std::vector<int> rank(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) rank[order_[i]] = i;
    for (int i = 0; i < k; ++i)
      for (int w : p_.neighbors(order_[i]))
        if (rank[w] < i && (anchor_[i] < 0 || rank[w] < rank[anchor_[i]]))
          anchor_[i] = w;

    map_.assign(static_cast<std::size_t>(k), -1);
    used_.assign(static_cast<std::size_t>(t_.size()), false);
    return extend(0);
  }

 private:
  bool feasible(int pv, int tv) const {
    if (used_[tv]) return false;
    if (!(p_.labels()[pv] == t_.labels()[tv])) return false;
    if (t_.degree(tv) < p_.degree(pv)) return false;
    for (int w : p_.neighbors(pv)) {
      if (map_[w] < 0) continue;
      if (t_.bond(tv, map_[w]) != p_.bond(pv, w)) return false;
    }
    return true;
  }

  bool try_map(int depth, int pv, int tv) {
    if (!feasible(pv, tv)) return false;
    map_[pv] = tv;
    used_[tv] = true;
    if (extend(depth + 1)) return true;
    map_[pv] = -1;
    used_[tv] = false;
    return false;
  }

  bool extend(int depth) {
    if (depth == p_.size()) return true;
    const int pv = order_[depth];
    if (anchor_[depth] >= 0) {
      for (int tv : t_.neighbors(map_[anchor_[depth]]))
        if (try_map(depth, pv, tv)) return true;
      return false;
    }
    for (int tv = 0; tv < t_.size(); ++tv)
      if (try_map(depth, pv, tv)) return true;
    return false;
  }

  const SubstructureGraph &t_;
  const SubstructureGraph &p_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<int> map_;
  std::vector<bool> used_;
};

}  // namespace

bool contains_subgraph(const SubstructureGraph &target,
                       const SubstructureGraph &pattern) {
  return ContainmentSearch(target, pattern).run();
}

}  // namespace gcnx
