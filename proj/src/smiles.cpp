//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/smiles.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <tuple>
#include <utility>

#include "gcnx/error.h"

namespace gcnx {

namespace {

constexpr std::array<std::string_view, 118> kPeriodicTable = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
    "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
    "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
    "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
    "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

bool is_element(std::string_view s) {
  return std::find(kPeriodicTable.begin(), kPeriodicTable.end(), s)
         != kPeriodicTable.end();
}

bool is_aromatic_symbol(std::string_view s) {
  return s == "b" || s == "c" || s == "n" || s == "o" || s == "p" || s == "s"
         || s == "se" || s == "as";
}

std::string capitalize(std::string_view s) {
  std::string out(s);
  if (!out.empty())
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

struct PendingAtom {
  ElementLabel label;
  std::string symbol;
};

struct RingOpen {
  int atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) { }

  Molecule run() {
    if (s_.empty()) throw ParseError("empty SMILES", 0);
    for (std::size_t i = 0; i < s_.size(); ++i)
      if (static_cast<unsigned char>(s_[i]) > 127)
        throw ParseError("non-ASCII character", i);

    while (pos_ < s_.size()) {
      const char ch = s_[pos_];
      if (ch == '(') {
        if (prev_ < 0) throw ParseError("branch without a preceding atom", pos_);
        if (pending_) throw ParseError("bond symbol before '('", pos_);
        branches_.emplace_back(prev_, pos_);
        ++pos_;
      } else if (ch == ')') {
        if (branches_.empty()) throw ParseError("unbalanced ')'", pos_);
        if (pending_) throw ParseError("dangling bond symbol", pos_);
        prev_ = branches_.back().first;
        branches_.pop_back();
        ++pos_;
      } else if (ch == '-' || ch == '=' || ch == '#' || ch == ':') {
        if (pending_ || prev_ < 0)
          throw ParseError("unexpected bond symbol", pos_);
        pending_ = ch == '-'   ? BondOrder::kSingle
                   : ch == '=' ? BondOrder::kDouble
                   : ch == '#' ? BondOrder::kTriple
                               : BondOrder::kAromatic;
        pending_offset_ = pos_;
        ++pos_;
      } else if (ch == '/' || ch == '\\') {
        // Directional single bond; geometry is discarded.
        if (prev_ < 0) throw ParseError("unexpected bond symbol", pos_);
        if (!pending_) pending_ = BondOrder::kSingle;
        pending_offset_ = pos_;
        ++pos_;
      } else if (ch == '.') {
        if (pending_) throw ParseError("bond symbol before '.'", pos_);
        prev_ = -1;
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '%') {
        ring_closure();
      } else if (ch == '[') {
        add_atom(bracket_atom());
      } else {
        add_atom(organic_atom());
      }
    }

    if (pending_) throw ParseError("dangling bond symbol", pending_offset_);
    if (!branches_.empty())
      throw ParseError("unbalanced '('", branches_.back().second);
    if (!rings_.empty())
      throw ParseError("unmatched ring-closure digit "
                           + std::to_string(rings_.begin()->first),
                       rings_.begin()->second.offset);
    if (atoms_.empty()) throw ParseError("no atoms", 0);

    std::vector<ElementLabel> labels;
    std::vector<std::string> symbols;
    for (auto &a : atoms_) {
      labels.push_back(a.label);
      symbols.push_back(a.symbol);
    }
    return make_molecule(std::move(labels), std::move(bonds_), std::string(s_),
                         std::move(symbols));
  }

 private:
  void add_atom(PendingAtom atom) {
    const int idx = static_cast<int>(atoms_.size());
    atoms_.push_back(std::move(atom));
    if (prev_ >= 0) connect(prev_, idx, pending_, pos_);
    pending_.reset();
    prev_ = idx;
  }

  void connect(int a, int b, std::optional<BondOrder> order,
               std::size_t offset) {
    if (a == b) throw ParseError("atom bonded to itself", offset);
    for (const Bond &bd : bonds_)
      if ((bd.i == a && bd.j == b) || (bd.i == b && bd.j == a))
        throw ParseError("duplicate bond", offset);
    BondOrder o = order.value_or(atoms_[a].label.aromatic
                                         && atoms_[b].label.aromatic
                                     ? BondOrder::kAromatic
                                     : BondOrder::kSingle);
    bonds_.push_back(Bond{std::min(a, b), std::max(a, b), o});
  }

  void ring_closure() {
    const std::size_t start = pos_;
    int number;
    if (s_[pos_] == '%') {
      if (pos_ + 2 >= s_.size()
          || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))
          || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
        throw ParseError("malformed %nn ring closure", pos_);
      number = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = s_[pos_] - '0';
      ++pos_;
    }
    if (prev_ < 0) throw ParseError("ring closure without an atom", start);
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_.emplace(number, RingOpen{prev_, pending_, start});
    } else {
      std::optional<BondOrder> order = pending_ ? pending_ : it->second.order;
      if (pending_ && it->second.order && *pending_ != *it->second.order)
        throw ParseError("conflicting ring-closure bond orders", start);
      connect(it->second.atom, prev_, order, start);
      rings_.erase(it);
    }
    pending_.reset();
  }

  PendingAtom organic_atom() {
    const std::size_t start = pos_;
    auto two = s_.substr(pos_, 2);
    if (two == "Cl" || two == "Br") {
      pos_ += 2;
      return {ElementLabel{element_from_symbol(two), 0, false}, std::string(two)};
    }
    const char ch = s_[pos_];
    std::string one(1, ch);
    if (ch == 'B' || ch == 'C' || ch == 'N' || ch == 'O' || ch == 'P'
        || ch == 'S' || ch == 'F' || ch == 'I') {
      ++pos_;
      return {ElementLabel{element_from_symbol(one), 0, false}, one};
    }
    if (ch == 'b' || ch == 'c' || ch == 'n' || ch == 'o' || ch == 'p'
        || ch == 's') {
      ++pos_;
      return {ElementLabel{element_from_symbol(one), 0, true}, capitalize(one)};
    }
    throw ParseError(std::string("unknown atom token '") + ch + "'", start);
  }

  PendingAtom bracket_atom() {
    const std::size_t open = pos_;
    ++pos_;  // '['
    auto at_end = [&] { return pos_ >= s_.size(); };
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;  // isotope
    if (at_end()) throw ParseError("unterminated bracket atom", open);

    const std::size_t sym_start = pos_;
    std::string symbol;
    bool aromatic = false;
    const char ch = s_[pos_];
    if (std::isupper(static_cast<unsigned char>(ch))) {
      symbol = ch;
      ++pos_;
      if (!at_end() && std::islower(static_cast<unsigned char>(s_[pos_]))) {
        std::string two = symbol + s_[pos_];
        if (is_element(two)) {
          symbol = two;
          ++pos_;
        }
      }
      if (!is_element(symbol))
        throw ParseError("unknown element '" + symbol + "'", sym_start);
    } else if (std::islower(static_cast<unsigned char>(ch))) {
      auto two = s_.substr(pos_, 2);
      if (two.size() == 2 && is_aromatic_symbol(two)) {
        symbol = capitalize(two);
        pos_ += 2;
      } else if (is_aromatic_symbol(s_.substr(pos_, 1))) {
        symbol = capitalize(s_.substr(pos_, 1));
        ++pos_;
      } else {
        throw ParseError("unknown aromatic atom", sym_start);
      }
      aromatic = true;
    } else {
      throw ParseError("unknown atom token inside brackets", sym_start);
    }

    while (!at_end() && s_[pos_] == '@') ++pos_;  // chirality, discarded
    if (!at_end() && s_[pos_] == 'H') {
      ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
    }
    int charge = 0;
    if (!at_end() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_];
      const int unit = sign == '+' ? 1 : -1;
      ++pos_;
      if (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        int mag = 0;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
          mag = mag * 10 + (s_[pos_++] - '0');
        charge = unit * mag;
      } else {
        charge = unit;
        while (!at_end() && s_[pos_] == sign) {
          charge += unit;
          ++pos_;
        }
      }
    }
    if (!at_end() && s_[pos_] == ':') {  // atom class
      ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
    }
    if (at_end() || s_[pos_] != ']')
      throw ParseError("malformed bracket atom", open);
    ++pos_;
    if (symbol == "H")
      throw ParseError("explicit hydrogen atoms are not supported", open);
    return {ElementLabel{element_from_symbol(symbol), charge, aromatic}, symbol};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  std::optional<BondOrder> pending_;
  std::size_t pending_offset_ = 0;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::map<int, RingOpen> rings_;
  std::vector<PendingAtom> atoms_;
  std::vector<Bond> bonds_;
};

}  // namespace

int Molecule::bond_order(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (const Bond &bd : bonds)
    if (bd.i == a && bd.j == b) return static_cast<int>(bd.order);
  return 0;
}

Molecule make_molecule(std::vector<ElementLabel> atoms, std::vector<Bond> bonds,
                       std::string source,
                       std::vector<std::string> atom_symbols) {
  const int n = static_cast<int>(atoms.size());
  Matrix adjacency = Matrix::Zero(n, n);
  for (Bond &b : bonds) {
    if (b.i > b.j) std::swap(b.i, b.j);
    if (b.i == b.j || b.i < 0 || b.j >= n)
      throw StructuralError("invalid bond (" + std::to_string(b.i) + ", "
                            + std::to_string(b.j) + ")");
    if (adjacency(b.i, b.j) != 0.0) throw StructuralError("duplicate bond");
    adjacency(b.i, b.j) = adjacency(b.j, b.i) = 1.0;
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond &x, const Bond &y) {
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  if (atom_symbols.empty())
    for (const auto &a : atoms)
      atom_symbols.emplace_back(a.symbol == Element::kOther
                                    ? "*"
                                    : element_symbol(a.symbol));
  Molecule m;
  m.graph = AttributedGraph(Matrix(n, 0), std::move(adjacency), std::move(atoms));
  m.bonds = std::move(bonds);
  m.atom_symbols = std::move(atom_symbols);
  m.source_string = std::move(source);
  return m;
}

namespace {

std::string atom_text(const Molecule &m, int a) {
  const ElementLabel &lab = m.graph.node_elements()[a];
  std::string sym = m.atom_symbols[a];
  if (lab.aromatic)
    for (auto &c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::array<std::string_view, 10> organic = {
      "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};
  static const std::array<std::string_view, 6> aromatic_organic = {
      "b", "c", "n", "o", "p", "s"};
  const bool plain =
      lab.formal_charge == 0
      && (lab.aromatic
              ? std::find(aromatic_organic.begin(), aromatic_organic.end(), sym)
                    != aromatic_organic.end()
              : std::find(organic.begin(), organic.end(), sym) != organic.end());
  if (plain) return sym;
  std::string out = "[" + sym;
  if (lab.formal_charge != 0) {
    out += lab.formal_charge > 0 ? '+' : '-';
    if (std::abs(lab.formal_charge) > 1)
      out += std::to_string(std::abs(lab.formal_charge));
  }
  return out + "]";
}

std::string bond_text(const Molecule &m, int a, int b) {
  const auto &el = m.graph.node_elements();
  const bool both_aromatic = el[a].aromatic && el[b].aromatic;
  switch (static_cast<BondOrder>(m.bond_order(a, b))) {
    case BondOrder::kSingle: return both_aromatic ? "-" : "";
    case BondOrder::kDouble: return "=";
    case BondOrder::kTriple: return "#";
    case BondOrder::kAromatic: return both_aromatic ? "" : ":";
  }
  return "";
}

std::string ring_label(int n) {
  return n < 10 ? std::to_string(n) : "%" + std::to_string(n);
}

class Writer {
 public:
  explicit Writer(const Molecule &m)
      : m_(m), n_(m.n_atoms()), visited_(static_cast<std::size_t>(n_), false),
        order_(static_cast<std::size_t>(n_), -1) { }

  std::string run() {
    std::string out;
    for (int s = 0; s < n_; ++s) {
      if (visited_[s]) continue;
      if (!out.empty()) out += '.';
      // First pass: find ring-closure (back) edges of this DFS tree.
      find_tree(s, -1);
      out += emit(s, -1);
    }
    return out;
  }

 private:
  void find_tree(int u, int parent) {
    visited_[u] = true;
    order_[u] = counter_++;
    for (int v : m_.graph.neighbors(u)) {
      if (v == parent) continue;
      if (visited_[v]) {
        if (order_[v] < order_[u]) closures_.emplace_back(v, u);
        continue;
      }
      children_[u].push_back(v);
      find_tree(v, u);
    }
  }

  std::string emit(int u, int parent) {
    std::string out;
    if (parent >= 0) out += bond_text(m_, parent, u);
    out += atom_text(m_, u);
    // Ring closures are opened at the earlier atom and closed at the later.
    for (auto &[a, b] : closures_) {
      if (a == u) {
        int label = next_label();
        open_labels_[{a, b}] = label;
        out += bond_text(m_, a, b) + ring_label(label);
      }
    }
    for (auto &[a, b] : closures_) {
      if (b == u) {
        int label = open_labels_.at({a, b});
        out += bond_text(m_, a, b) + ring_label(label);
        free_labels_.push_back(label);
      }
    }
    const auto &kids = children_[u];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      std::string sub = emit(kids[k], u);
      out += k + 1 < kids.size() ? "(" + sub + ")" : sub;
    }
    return out;
  }

  int next_label() {
    if (!free_labels_.empty()) {
      auto it = std::min_element(free_labels_.begin(), free_labels_.end());
      int l = *it;
      free_labels_.erase(it);
      return l;
    }
    return ++max_label_;
  }

  const Molecule &m_;
  int n_;
  std::vector<bool> visited_;
  std::vector<int> order_;
  int counter_ = 0;
  std::map<int, std::vector<int>> children_;
  std::vector<std::pair<int, int>> closures_;
  std::map<std::pair<int, int>, int> open_labels_;
  std::vector<int> free_labels_;
  int max_label_ = 0;
};

}  // namespace

Molecule parse_smiles(std::string_view smiles) { return Parser(smiles).run(); }

std::string write_smiles(const Molecule &molecule) {
  return Writer(molecule).run();
}

AttributedGraph featurize(const Molecule &molecule,
                          const FeaturizationScheme &scheme) {
  const AttributedGraph &g = molecule.graph;
  const int n = g.n_nodes();
  const int n_el = static_cast<int>(scheme.element_vocab.size());
  const int other_slot = [&] {
    for (int k = 0; k < n_el; ++k)
      if (scheme.element_vocab[k] == Element::kOther) return k;
    return n_el - 1;
  }();
  Matrix x = Matrix::Zero(n, scheme.d_in());
  for (int a = 0; a < n; ++a) {
    const ElementLabel &lab = g.node_elements()[a];
    int slot = other_slot;
    for (int k = 0; k < n_el; ++k)
      if (scheme.element_vocab[k] == lab.symbol) slot = k;
    x(a, slot) = 1.0;
    const int deg = std::min(g.degree(a), scheme.max_degree);
    x(a, n_el + deg) = 1.0;
    const int charge =
        std::clamp(lab.formal_charge, scheme.min_charge, scheme.max_charge);
    x(a, n_el + scheme.degree_slots() + (charge - scheme.min_charge)) = 1.0;
    x(a, scheme.d_in() - 1) = lab.aromatic ? 1.0 : 0.0;
  }
  return g.with_features(std::move(x));
}

}  // namespace gcnx
