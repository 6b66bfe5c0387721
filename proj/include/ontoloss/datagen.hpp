#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ontoloss/dataset.hpp"
#include "ontoloss/ontology.hpp"

namespace ontoloss {

// Synthetic benchmark description. The generated subsumption graph is a DAG
// (edges sampled under a random topological order); each sample draws one
// direct class, its label row is the upward closure, and its features are
// that class's template plus isotropic noise. Disjointness axioms are only
// placed between classes with no common descendant-or-self, so generated
// labels never violate the compiled constraints (before label noise).
struct SyntheticSpec {
  size_t n_classes = 50;
  double dag_density = 0.08;      // per ordered ancestor pair edge probability
  size_t n_disjoint_axioms = 8;
  size_t n_samples = 5000;
  size_t feature_dim = 64;
  double label_noise = 0.0;       // post-closure per-bit flip probability
  uint64_t seed = 0;
  double feature_noise = 0.5;     // stddev of the additive feature noise
  size_t fingerprint_bits = 128;
  double fingerprint_flip = 0.05; // per-bit flip off the class template
};

struct SyntheticData {
  OntologyGraph graph;
  Dataset data;
  Matrix class_templates;               // n_classes x feature_dim
  std::vector<std::vector<uint8_t>> fingerprints;  // one per sample, 0/1 bits
};

SyntheticData generate(const SyntheticSpec& spec);

// Fresh samples from the same ontology with every class template displaced
// by `shift` along a per-class random direction: a shifted-cluster cousin of
// the base distribution. With labelled=false the label bits are zeroed and
// the rows flagged unlabelled.
Dataset generate_shifted(const SyntheticData& base, const SyntheticSpec& spec,
                         size_t n_samples, double shift, uint64_t seed,
                         bool labelled);

// |a AND b| / |a OR b|; two all-zero vectors score 0. Lengths must match.
double tanimoto(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b);

// Diversity-driven subsampling: the pool is shuffled (seeded), cut into
// groups of group_size, and each group keeps its keep_per_group members with
// the lowest total pairwise similarity to the rest of the group (ties: lowest
// original index). A final partial group of size s keeps
// floor(keep_per_group * s / group_size). Returns original-pool indices,
// ascending.
std::vector<size_t> diversity_subsample(const std::vector<std::vector<uint8_t>>& fingerprints,
                                        size_t group_size, size_t keep_per_group,
                                        uint64_t seed);

struct SplitIndices {
  std::vector<size_t> train, val, test;
};

// Seeded shuffle then contiguous cut. Ratios are normalized, each part is
// floor-rounded, and the remainder goes to train. A part whose ratio is
// positive but whose rounded size is zero is a DomainError.
SplitIndices split(size_t n, double r_train, double r_val, double r_test,
                   uint64_t seed);

// one lowercase-hex bit vector per line, 4 bits per digit, MSB first; every
// line must decode to the same bit count
std::vector<std::vector<uint8_t>> load_fingerprints(const std::string& path);
void save_fingerprints(const std::vector<std::vector<uint8_t>>& fps,
                       const std::string& path);

}  // namespace ontoloss
