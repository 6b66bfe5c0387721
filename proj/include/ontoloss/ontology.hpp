#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ontoloss/errors.hpp"

namespace ontoloss {

using ClassIndex = uint32_t;

// Subsumption DAG plus direct disjointness axioms over named classes.
// Indices are dense 0..num_classes()-1 in first-seen order; the name map is a
// bijection. Edges are stored deduplicated.
struct OntologyGraph {
  std::vector<std::string> names;
  std::unordered_map<std::string, ClassIndex> name_to_index;
  std::vector<std::pair<ClassIndex, ClassIndex>> subsumptions;  // (child, parent)
  std::vector<std::pair<ClassIndex, ClassIndex>> disjointness;  // (lo, hi), lo < hi
  std::vector<uint8_t> annotated;  // per class: carries instance annotations

  size_t num_classes() const { return names.size(); }

  // returns existing index or interns a new class (annotated defaults to 0)
  ClassIndex intern(const std::string& name);

  // both add_* dedup; self-referential pairs are a DomainError
  void add_subsumption(ClassIndex child, ClassIndex parent);
  void add_disjointness(ClassIndex a, ClassIndex b);

  // dedup indices for the two edge lists; maintained by the add_* methods
  std::unordered_set<uint64_t> sub_keys_, disj_keys_;
};

// Compiled constraints over a dense label universe 0..universe_size-1.
// Implications are ordered pairs (a, b) meaning "a entails b"; disjointness
// pairs are unordered, stored (lo, hi). Both lists are sorted
// lexicographically and duplicate-free, and no pair appears in both lists.
struct ConstraintSet {
  size_t universe_size = 0;
  std::vector<std::pair<ClassIndex, ClassIndex>> implications;
  std::vector<std::pair<ClassIndex, ClassIndex>> disjointness;
  std::vector<std::string> class_names;  // label index -> name
};

// Reads a subsumption edge list (one `child<TAB>parent` per line) plus an
// optional disjointness list (`classA<TAB>classB`) and an optional annotation
// list (one class name per line). `#`-prefixed lines and blank lines are
// skipped. Classes are interned across all three files. When no annotation
// file is given every class counts as annotated.
// Errors: IoError on unreadable files, ParseError with line number on
// malformed rows, DomainError on self-loops and self-disjointness.
OntologyGraph parse_ontology(const std::string& edges_path,
                             const std::string& disjoint_path = "",
                             const std::string& annotated_path = "");

// Topological order of all classes: every child precedes every class it
// subsumes into (its parents). Throws CycleError carrying one witness cycle
// when the subsumption graph is cyclic.
std::vector<ClassIndex> check_acyclic(const OntologyGraph& graph);

// Reflexive-transitive reachability along subsumption edges, one sorted id
// list per class. ancestor_sets[v] holds v and everything v entails;
// descendant_sets[v] holds v and everything below it. Throw on cycles.
std::vector<std::vector<ClassIndex>> ancestor_sets(const OntologyGraph& graph);
std::vector<std::vector<ClassIndex>> descendant_sets(const OntologyGraph& graph);

// Classes whose annotated descendant count reaches the threshold. With
// count_self (default) a class's own annotation counts alongside its strict
// descendants'. Result is sorted by class name.
std::vector<ClassIndex> select_labels(const OntologyGraph& graph,
                                      size_t min_annotated_subclasses,
                                      bool count_self = true);

// Closes subsumption transitively and propagates each direct disjointness
// axiom {c, d} to every pair {a, b} with a below-or-equal c and b
// below-or-equal d. Both closures are then restricted to the given label
// classes (paths may run through non-label classes) and re-indexed densely in
// label-name order. Throws InconsistentAxiomsError when a disjointness axiom
// contradicts the subsumption closure (some class sits below both sides);
// offending pairs are reported, never repaired. Throws CycleError on cyclic
// input.
ConstraintSet compile_constraints(const OntologyGraph& graph,
                                  const std::vector<ClassIndex>& labels);

// Writes the graph as the three TSV files parse_ontology reads back:
// subsumption edges, disjointness pairs, annotated class names.
void save_ontology(const OntologyGraph& graph, const std::string& edges_path,
                   const std::string& disjoint_path,
                   const std::string& annotated_path);

// Text format, deterministic (ids ascending within each section):
//   [classes]        id<TAB>name
//   [implications]   idA<TAB>idB
//   [disjointness]   idA<TAB>idB
void save_constraints(const ConstraintSet& cs, const std::string& path);
ConstraintSet load_constraints(const std::string& path);

}  // namespace ontoloss
