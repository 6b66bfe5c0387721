#include "ontoloss/ontology.hpp"

#include <algorithm>
#include <cstdint>

#include "text_io.hpp"

namespace ontoloss {

namespace {

uint64_t pair_key(ClassIndex a, ClassIndex b) {
  return (static_cast<uint64_t>(a) << 32) | b;
}

// row-per-class bitset; plenty for desk-scale ontologies
struct BitTable {
  size_t n = 0;
  size_t words_per_row = 0;
  std::vector<uint64_t> bits;

  explicit BitTable(size_t n_)
      : n(n_), words_per_row((n_ + 63) / 64), bits(n_ * words_per_row, 0) {}

  uint64_t* row(size_t r) { return bits.data() + r * words_per_row; }
  const uint64_t* row(size_t r) const { return bits.data() + r * words_per_row; }

  void set(size_t r, size_t c) { row(r)[c >> 6] |= uint64_t{1} << (c & 63); }
  bool test(size_t r, size_t c) const { return (row(r)[c >> 6] >> (c & 63)) & 1; }

  void or_into(size_t dst, size_t src) {
    uint64_t* d = row(dst);
    const uint64_t* s = row(src);
    for (size_t w = 0; w < words_per_row; ++w) d[w] |= s[w];
  }

  bool rows_intersect(size_t a, size_t b) const {
    const uint64_t* ra = row(a);
    const uint64_t* rb = row(b);
    for (size_t w = 0; w < words_per_row; ++w) {
      if (ra[w] & rb[w]) return true;
    }
    return false;
  }

  std::vector<ClassIndex> row_members(size_t r) const {
    std::vector<ClassIndex> out;
    const uint64_t* words = row(r);
    for (size_t w = 0; w < words_per_row; ++w) {
      uint64_t word = words[w];
      while (word) {
        const int bit = __builtin_ctzll(word);
        out.push_back(static_cast<ClassIndex>(w * 64 + bit));
        word &= word - 1;
      }
    }
    return out;
  }
};

std::vector<std::vector<ClassIndex>> parent_adjacency(const OntologyGraph& g) {
  std::vector<std::vector<ClassIndex>> parents(g.num_classes());
  for (auto [child, parent] : g.subsumptions) parents[child].push_back(parent);
  return parents;
}

std::vector<std::vector<ClassIndex>> child_adjacency(const OntologyGraph& g) {
  std::vector<std::vector<ClassIndex>> children(g.num_classes());
  for (auto [child, parent] : g.subsumptions) children[parent].push_back(child);
  return children;
}

// reach[v] = {v} plus everything reachable along the given adjacency;
// `order` must list every node before all nodes it points to
BitTable reachability(size_t n, const std::vector<std::vector<ClassIndex>>& adj,
                      const std::vector<ClassIndex>& order) {
  BitTable reach(n);
  // walk the order backwards so targets are finished before their sources
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const ClassIndex v = *it;
    reach.set(v, v);
    for (ClassIndex w : adj[v]) reach.or_into(v, w);
  }
  return reach;
}

}  // namespace

ClassIndex OntologyGraph::intern(const std::string& name) {
  auto it = name_to_index.find(name);
  if (it != name_to_index.end()) return it->second;
  const auto idx = static_cast<ClassIndex>(names.size());
  names.push_back(name);
  annotated.push_back(0);
  name_to_index.emplace(name, idx);
  return idx;
}

void OntologyGraph::add_subsumption(ClassIndex child, ClassIndex parent) {
  if (child == parent) {
    throw DomainError("self-subsumption on class '" + names[child] + "'");
  }
  if (sub_keys_.insert(pair_key(child, parent)).second) {
    subsumptions.emplace_back(child, parent);
  }
}

void OntologyGraph::add_disjointness(ClassIndex a, ClassIndex b) {
  if (a == b) {
    throw DomainError("class '" + names[a] + "' declared disjoint with itself");
  }
  const ClassIndex lo = std::min(a, b), hi = std::max(a, b);
  if (disj_keys_.insert(pair_key(lo, hi)).second) {
    disjointness.emplace_back(lo, hi);
  }
}

OntologyGraph parse_ontology(const std::string& edges_path,
                             const std::string& disjoint_path,
                             const std::string& annotated_path) {
  OntologyGraph g;

  {
    auto in = detail::open_input(edges_path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      detail::strip_trailing_cr(line);
      if (detail::is_blank_or_comment(line)) continue;
      const auto cols = detail::split(line, '\t');
      if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
        throw ParseError(edges_path, lineno, "expected 'child<TAB>parent'");
      }
      const ClassIndex child = g.intern(cols[0]);
      const ClassIndex parent = g.intern(cols[1]);
      if (child == parent) {
        // well-formed row asserting an invalid axiom: a domain problem, not a
        // syntax one
        throw DomainError(edges_path + ":" + std::to_string(lineno) +
                          ": self-loop on class '" + cols[0] + "'");
      }
      g.add_subsumption(child, parent);
    }
  }

  if (!disjoint_path.empty()) {
    auto in = detail::open_input(disjoint_path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      detail::strip_trailing_cr(line);
      if (detail::is_blank_or_comment(line)) continue;
      const auto cols = detail::split(line, '\t');
      if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
        throw ParseError(disjoint_path, lineno, "expected 'classA<TAB>classB'");
      }
      if (cols[0] == cols[1]) {
        throw DomainError(disjoint_path + ":" + std::to_string(lineno) + ": class '" +
                          cols[0] + "' declared disjoint with itself");
      }
      g.add_disjointness(g.intern(cols[0]), g.intern(cols[1]));
    }
  }

  if (annotated_path.empty()) {
    // no annotation list: every class counts as annotated
    std::fill(g.annotated.begin(), g.annotated.end(), uint8_t{1});
  } else {
    auto in = detail::open_input(annotated_path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      detail::strip_trailing_cr(line);
      if (detail::is_blank_or_comment(line)) continue;
      if (line.find('\t') != std::string::npos) {
        throw ParseError(annotated_path, lineno, "expected one class name per line");
      }
      g.annotated[g.intern(line)] = 1;
    }
  }

  return g;
}

std::vector<ClassIndex> check_acyclic(const OntologyGraph& graph) {
  const size_t n = graph.num_classes();
  const auto parents = parent_adjacency(graph);

  // Kahn's algorithm over child -> parent edges; children surface first
  std::vector<uint32_t> pending_in(n, 0);
  for (auto [child, parent] : graph.subsumptions) ++pending_in[parent];

  std::vector<ClassIndex> order;
  order.reserve(n);
  for (ClassIndex v = 0; v < n; ++v) {
    if (pending_in[v] == 0) order.push_back(v);
  }
  for (size_t head = 0; head < order.size(); ++head) {
    for (ClassIndex p : parents[order[head]]) {
      if (--pending_in[p] == 0) order.push_back(p);
    }
  }
  if (order.size() == n) return order;

  // Some class never cleared. Every residual class keeps at least one
  // unrelaxed incoming edge, i.e. a residual child, so walking child edges
  // inside the residual subgraph must revisit a node and close a cycle.
  const auto children = child_adjacency(graph);
  std::vector<int8_t> on_path(n, 0);
  std::vector<ClassIndex> path;
  ClassIndex v = 0;
  while (pending_in[v] == 0) ++v;
  for (;;) {
    if (on_path[v]) {
      const auto start = std::find(path.begin(), path.end(), v);
      std::vector<std::string> cycle{graph.names[v]};
      // the walk followed parent -> child; reverse so the witness reads as a
      // chain of child-parent steps, first == last
      for (auto it = path.rbegin(); it != std::make_reverse_iterator(start); ++it) {
        cycle.push_back(graph.names[*it]);
      }
      throw CycleError("subsumption graph contains a cycle through '" +
                           graph.names[v] + "'",
                       std::move(cycle));
    }
    on_path[v] = 1;
    path.push_back(v);
    ClassIndex next = v;
    for (ClassIndex c : children[v]) {
      if (pending_in[c] != 0) {
        next = c;
        break;
      }
    }
    v = next;
  }
}

std::vector<std::vector<ClassIndex>> ancestor_sets(const OntologyGraph& graph) {
  const auto order = check_acyclic(graph);
  // child -> parent edges: reversed topo order finishes parents first
  const auto reach = reachability(graph.num_classes(), parent_adjacency(graph), order);
  std::vector<std::vector<ClassIndex>> out(graph.num_classes());
  for (size_t v = 0; v < graph.num_classes(); ++v) out[v] = reach.row_members(v);
  return out;
}

std::vector<std::vector<ClassIndex>> descendant_sets(const OntologyGraph& graph) {
  auto order = check_acyclic(graph);
  std::reverse(order.begin(), order.end());  // parent -> child edges now
  const auto reach = reachability(graph.num_classes(), child_adjacency(graph), order);
  std::vector<std::vector<ClassIndex>> out(graph.num_classes());
  for (size_t v = 0; v < graph.num_classes(); ++v) out[v] = reach.row_members(v);
  return out;
}

std::vector<ClassIndex> select_labels(const OntologyGraph& graph,
                                      size_t min_annotated_subclasses,
                                      bool count_self) {
  const size_t n = graph.num_classes();
  auto order = check_acyclic(graph);
  std::reverse(order.begin(), order.end());
  const auto down = reachability(n, child_adjacency(graph), order);

  std::vector<ClassIndex> labels;
  for (ClassIndex v = 0; v < n; ++v) {
    size_t count = 0;
    for (ClassIndex d : down.row_members(v)) {
      if (graph.annotated[d] && (count_self || d != v)) ++count;
    }
    if (count >= min_annotated_subclasses) labels.push_back(v);
  }
  std::sort(labels.begin(), labels.end(), [&](ClassIndex a, ClassIndex b) {
    return graph.names[a] < graph.names[b];
  });
  return labels;
}

ConstraintSet compile_constraints(const OntologyGraph& graph,
                                  const std::vector<ClassIndex>& labels) {
  const size_t n = graph.num_classes();
  const auto order = check_acyclic(graph);

  const auto up = reachability(n, parent_adjacency(graph), order);
  auto rev_order = order;
  std::reverse(rev_order.begin(), rev_order.end());
  const auto down = reachability(n, child_adjacency(graph), rev_order);

  // a disjointness axiom whose sides share any class below both is
  // unsatisfiable by every assignment that respects subsumption; collect all
  // such axioms and refuse the compile
  std::vector<std::pair<std::string, std::string>> offending;
  for (auto [c, d] : graph.disjointness) {
    if (down.rows_intersect(c, d)) {
      offending.emplace_back(graph.names[c], graph.names[d]);
    }
  }
  if (!offending.empty()) {
    std::string msg = "disjointness contradicts subsumption for " +
                      std::to_string(offending.size()) + " axiom(s):";
    for (const auto& [a, b] : offending) msg += " {" + a + ", " + b + "}";
    throw InconsistentAxiomsError(msg, std::move(offending));
  }

  // dense re-index in label-name order
  std::vector<ClassIndex> sorted_labels = labels;
  std::sort(sorted_labels.begin(), sorted_labels.end(),
            [&](ClassIndex a, ClassIndex b) { return graph.names[a] < graph.names[b]; });
  sorted_labels.erase(std::unique(sorted_labels.begin(), sorted_labels.end()),
                      sorted_labels.end());
  constexpr ClassIndex kNotLabel = static_cast<ClassIndex>(-1);
  std::vector<ClassIndex> dense(n, kNotLabel);
  for (size_t i = 0; i < sorted_labels.size(); ++i) {
    if (sorted_labels[i] >= n) throw DomainError("label index out of range");
    dense[sorted_labels[i]] = static_cast<ClassIndex>(i);
  }

  ConstraintSet cs;
  cs.universe_size = sorted_labels.size();
  cs.class_names.reserve(sorted_labels.size());
  for (ClassIndex v : sorted_labels) cs.class_names.push_back(graph.names[v]);

  // implications: label pairs joined by any subsumption path, intermediate
  // classes need not be labels themselves
  for (ClassIndex a : sorted_labels) {
    for (ClassIndex b : up.row_members(a)) {
      if (b != a && dense[b] != kNotLabel) {
        cs.implications.emplace_back(dense[a], dense[b]);
      }
    }
  }
  std::sort(cs.implications.begin(), cs.implications.end());

  // disjointness: every axiom spreads over both sides' descendants-or-self
  std::unordered_set<uint64_t> seen;
  for (auto [c, d] : graph.disjointness) {
    for (ClassIndex a : down.row_members(c)) {
      if (dense[a] == kNotLabel) continue;
      for (ClassIndex b : down.row_members(d)) {
        if (dense[b] == kNotLabel || a == b) continue;
        const ClassIndex lo = std::min(dense[a], dense[b]);
        const ClassIndex hi = std::max(dense[a], dense[b]);
        if (seen.insert(pair_key(lo, hi)).second) {
          cs.disjointness.emplace_back(lo, hi);
        }
      }
    }
  }
  std::sort(cs.disjointness.begin(), cs.disjointness.end());

  // the axiom screen above rules this out; double-check the compiled sets
  // rather than hand inconsistent constraints to a training run
  std::unordered_set<uint64_t> impl_keys;
  for (auto [a, b] : cs.implications) impl_keys.insert(pair_key(a, b));
  for (auto [a, b] : cs.disjointness) {
    if (impl_keys.count(pair_key(a, b)) || impl_keys.count(pair_key(b, a))) {
      throw InconsistentAxiomsError(
          "compiled pair {" + cs.class_names[a] + ", " + cs.class_names[b] +
              "} is both implied and disjoint",
          {{cs.class_names[a], cs.class_names[b]}});
    }
  }

  return cs;
}

void save_ontology(const OntologyGraph& graph, const std::string& edges_path,
                   const std::string& disjoint_path,
                   const std::string& annotated_path) {
  {
    auto out = detail::open_output(edges_path);
    for (auto [child, parent] : graph.subsumptions) {
      out << graph.names[child] << '\t' << graph.names[parent] << '\n';
    }
    if (!out) throw IoError("write failed on " + edges_path);
  }
  {
    auto out = detail::open_output(disjoint_path);
    for (auto [a, b] : graph.disjointness) {
      out << graph.names[a] << '\t' << graph.names[b] << '\n';
    }
    if (!out) throw IoError("write failed on " + disjoint_path);
  }
  {
    auto out = detail::open_output(annotated_path);
    for (size_t v = 0; v < graph.num_classes(); ++v) {
      if (graph.annotated[v]) out << graph.names[v] << '\n';
    }
    if (!out) throw IoError("write failed on " + annotated_path);
  }
}

void save_constraints(const ConstraintSet& cs, const std::string& path) {
  auto out = detail::open_output(path);
  out << "[classes]\n";
  for (size_t i = 0; i < cs.class_names.size(); ++i) {
    out << i << '\t' << cs.class_names[i] << '\n';
  }
  out << "[implications]\n";
  for (auto [a, b] : cs.implications) out << a << '\t' << b << '\n';
  out << "[disjointness]\n";
  for (auto [a, b] : cs.disjointness) out << a << '\t' << b << '\n';
  if (!out) throw IoError("write failed on " + path);
}

ConstraintSet load_constraints(const std::string& path) {
  auto in = detail::open_input(path);
  ConstraintSet cs;
  enum class Section { None, Classes, Implications, Disjointness };
  Section section = Section::None;
  std::vector<std::pair<size_t, std::string>> classes;

  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_trailing_cr(line);
    if (detail::is_blank_or_comment(line)) continue;
    if (line == "[classes]") {
      section = Section::Classes;
      continue;
    }
    if (line == "[implications]") {
      section = Section::Implications;
      continue;
    }
    if (line == "[disjointness]") {
      section = Section::Disjointness;
      continue;
    }
    if (line.front() == '[') throw ParseError(path, lineno, "unknown section " + line);

    const auto cols = detail::split(line, '\t');
    if (cols.size() != 2) throw ParseError(path, lineno, "expected two tab-separated fields");
    switch (section) {
      case Section::None:
        throw ParseError(path, lineno, "row before any section header");
      case Section::Classes: {
        const long long id = detail::parse_int(path, lineno, cols[0]);
        if (id < 0 || cols[1].empty()) throw ParseError(path, lineno, "bad class row");
        classes.emplace_back(static_cast<size_t>(id), cols[1]);
        break;
      }
      case Section::Implications:
      case Section::Disjointness: {
        const long long a = detail::parse_int(path, lineno, cols[0]);
        const long long b = detail::parse_int(path, lineno, cols[1]);
        if (a < 0 || b < 0) throw ParseError(path, lineno, "negative class id");
        if (a == b) throw ParseError(path, lineno, "self-referential pair");
        auto& list =
            section == Section::Implications ? cs.implications : cs.disjointness;
        list.emplace_back(static_cast<ClassIndex>(a), static_cast<ClassIndex>(b));
        break;
      }
    }
  }

  cs.universe_size = classes.size();
  cs.class_names.assign(classes.size(), "");
  for (auto& [id, name] : classes) {
    if (id >= classes.size() || !cs.class_names[id].empty()) {
      throw ParseError(path, 0, "class ids must be a permutation of 0.." +
                                    std::to_string(classes.size() - 1));
    }
    cs.class_names[id] = std::move(name);
  }

  auto check_ids = [&](const std::vector<std::pair<ClassIndex, ClassIndex>>& pairs,
                       const char* what) {
    for (auto [a, b] : pairs) {
      if (a >= cs.universe_size || b >= cs.universe_size) {
        throw ParseError(path, 0, std::string(what) + " pair id out of range");
      }
    }
  };
  check_ids(cs.implications, "implication");
  check_ids(cs.disjointness, "disjointness");

  for (auto& [a, b] : cs.disjointness) {
    if (a > b) std::swap(a, b);
  }
  std::sort(cs.implications.begin(), cs.implications.end());
  cs.implications.erase(std::unique(cs.implications.begin(), cs.implications.end()),
                        cs.implications.end());
  std::sort(cs.disjointness.begin(), cs.disjointness.end());
  cs.disjointness.erase(std::unique(cs.disjointness.begin(), cs.disjointness.end()),
                        cs.disjointness.end());

  std::unordered_set<uint64_t> impl_keys;
  for (auto [a, b] : cs.implications) impl_keys.insert(pair_key(a, b));
  for (auto [a, b] : cs.disjointness) {
    if (impl_keys.count(pair_key(a, b)) || impl_keys.count(pair_key(b, a))) {
      throw DomainError("constraint file " + path + " lists {" + cs.class_names[a] +
                        ", " + cs.class_names[b] + "} as both implied and disjoint");
    }
  }

  return cs;
}

}  // namespace ontoloss
