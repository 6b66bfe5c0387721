#include "ontoloss/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ontoloss/rng.hpp"
#include "text_io.hpp"

namespace ontoloss {

namespace {

std::string class_name(size_t idx, size_t n_classes) {
  size_t width = 1;
  for (size_t v = n_classes > 0 ? n_classes - 1 : 0; v >= 10; v /= 10) ++width;
  width = std::max<size_t>(width, 3);  // C000-style names sort numerically
  std::string digits = std::to_string(idx);
  return "C" + std::string(width - digits.size(), '0') + digits;
}

void validate_spec(const SyntheticSpec& spec) {
  if (spec.n_classes == 0) throw DomainError("n_classes must be positive");
  if (!(spec.dag_density >= 0.0 && spec.dag_density <= 1.0)) {
    throw DomainError("dag_density must lie in [0, 1]");
  }
  if (spec.feature_dim == 0) throw DomainError("feature_dim must be positive");
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) {
    throw DomainError("label_noise must lie in [0, 1]");
  }
  if (!(spec.feature_noise >= 0.0)) throw DomainError("feature_noise must be >= 0");
  if (!(spec.fingerprint_flip >= 0.0 && spec.fingerprint_flip <= 1.0)) {
    throw DomainError("fingerprint_flip must lie in [0, 1]");
  }
}

Matrix unit_row_templates(size_t rows, size_t cols, RandomStream& rng) {
  Matrix t(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    auto row = t.row(r);
    double norm2 = 0.0;
    for (double& v : row) {
      v = rng.normal();
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : row) v *= inv;
  }
  return t;
}

// sample one row: direct-class template plus isotropic noise, labels from the
// upward closure
void emit_sample(const Matrix& templates, double feature_noise,
                 const std::vector<std::vector<ClassIndex>>& up, size_t direct,
                 bool labelled, RandomStream& rng, Dataset& out) {
  const size_t row = out.features.rows;
  out.features.rows = out.labels.rows = row + 1;
  out.features.values.resize(out.features.rows * out.features.cols);
  out.labels.values.resize(out.labels.rows * out.labels.cols, 0);
  out.labels.labelled.push_back(labelled ? 1 : 0);

  auto f = out.features.row(row);
  const auto t = templates.row(direct);
  for (size_t c = 0; c < f.size(); ++c) f[c] = t[c] + feature_noise * rng.normal();

  if (labelled) {
    auto bits = out.labels.row(row);
    for (ClassIndex a : up[direct]) bits[a] = 1;
  }
}

}  // namespace

SyntheticData generate(const SyntheticSpec& spec) {
  validate_spec(spec);
  RandomStream rng(spec.seed);
  const size_t n = spec.n_classes;

  SyntheticData out;
  for (size_t i = 0; i < n; ++i) out.graph.intern(class_name(i, n));

  // random topological order, then independent edge coin flips toward every
  // earlier (more general) class
  std::vector<ClassIndex> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<ClassIndex>(i);
  rng.shuffle(order);
  for (size_t i = 0; i + 1 < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < spec.dag_density) {
        out.graph.add_subsumption(order[j], order[i]);
      }
    }
  }

  // disjointness only between classes with no shared descendant-or-self, so
  // no reachable label assignment can violate an axiom
  if (spec.n_disjoint_axioms > 0) {
    const auto down = descendant_sets(out.graph);
    std::vector<std::pair<ClassIndex, ClassIndex>> eligible;
    for (ClassIndex a = 0; a < n; ++a) {
      for (ClassIndex b = a + 1; b < n; ++b) {
        std::vector<ClassIndex> common;
        std::set_intersection(down[a].begin(), down[a].end(), down[b].begin(),
                              down[b].end(), std::back_inserter(common));
        if (common.empty()) eligible.emplace_back(a, b);
      }
    }
    if (eligible.size() < spec.n_disjoint_axioms) {
      throw DomainError("spec infeasible: " + std::to_string(spec.n_disjoint_axioms) +
                        " disjoint axioms requested but only " +
                        std::to_string(eligible.size()) + " eligible pairs exist");
    }
    rng.shuffle(eligible);
    for (size_t i = 0; i < spec.n_disjoint_axioms; ++i) {
      out.graph.add_disjointness(eligible[i].first, eligible[i].second);
    }
  }

  out.class_templates = unit_row_templates(n, spec.feature_dim, rng);

  // per-class fingerprint prototypes; sample fingerprints flip a few bits off
  // their class prototype so clusters stay recognizable
  std::vector<std::vector<uint8_t>> fp_proto(n);
  for (auto& proto : fp_proto) {
    proto.resize(spec.fingerprint_bits);
    for (auto& bit : proto) bit = rng.uniform() < 0.5 ? 1 : 0;
  }

  const auto up = ancestor_sets(out.graph);
  out.data.features.cols = spec.feature_dim;
  out.data.labels.cols = n;

  for (size_t s = 0; s < spec.n_samples; ++s) {
    const size_t direct = rng.below(n);
    out.graph.annotated[direct] = 1;
    emit_sample(out.class_templates, spec.feature_noise, up, direct, true, rng,
                out.data);

    if (spec.label_noise > 0.0) {
      auto bits = out.data.labels.row(out.data.size() - 1);
      for (auto& bit : bits) {
        if (rng.uniform() < spec.label_noise) bit ^= 1;
      }
    }

    auto fp = fp_proto[direct];
    if (spec.fingerprint_flip > 0.0) {
      for (auto& bit : fp) {
        if (rng.uniform() < spec.fingerprint_flip) bit ^= 1;
      }
    }
    out.fingerprints.push_back(std::move(fp));
  }

  return out;
}

Dataset generate_shifted(const SyntheticData& base, const SyntheticSpec& spec,
                         size_t n_samples, double shift, uint64_t seed,
                         bool labelled) {
  validate_spec(spec);
  if (!(shift >= 0.0)) throw DomainError("shift must be >= 0");
  RandomStream rng(seed);
  const size_t n = base.class_templates.rows;
  const size_t d = base.class_templates.cols;

  // displace every cluster along its own random direction
  Matrix shifted = base.class_templates;
  for (size_t c = 0; c < n; ++c) {
    std::vector<double> dir(d);
    double norm2 = 0.0;
    for (double& v : dir) {
      v = rng.normal();
      norm2 += v * v;
    }
    const double scale = shift / std::sqrt(norm2);
    auto row = shifted.row(c);
    for (size_t i = 0; i < d; ++i) row[i] += scale * dir[i];
  }

  const auto up = ancestor_sets(base.graph);
  Dataset out;
  out.features.cols = d;
  out.labels.cols = n;
  for (size_t s = 0; s < n_samples; ++s) {
    emit_sample(shifted, spec.feature_noise, up, rng.below(n), labelled, rng, out);
  }
  return out;
}

double tanimoto(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
  if (a.size() != b.size()) throw DomainError("fingerprint length mismatch");
  size_t inter = 0, uni = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const bool ba = a[i] != 0, bb = b[i] != 0;
    inter += ba && bb;
    uni += ba || bb;
  }
  if (uni == 0) return 0.0;  // two empty vectors count as dissimilar
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<size_t> diversity_subsample(
    const std::vector<std::vector<uint8_t>>& fingerprints, size_t group_size,
    size_t keep_per_group, uint64_t seed) {
  if (group_size == 0) throw DomainError("group_size must be positive");
  if (keep_per_group > group_size) {
    throw DomainError("keep_per_group cannot exceed group_size");
  }

  const size_t n = fingerprints.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  RandomStream rng(seed);
  rng.shuffle(order);

  std::vector<size_t> selected;
  for (size_t start = 0; start < n; start += group_size) {
    const size_t stop = std::min(start + group_size, n);
    const size_t size = stop - start;
    // a trailing partial group keeps its proportional share, floored
    const size_t keep = size == group_size
                            ? keep_per_group
                            : keep_per_group * size / group_size;
    if (keep == 0) continue;

    // total similarity to the rest of the group; most redundant members score
    // highest and get dropped
    std::vector<std::pair<double, size_t>> scored;  // (score, original index)
    for (size_t i = start; i < stop; ++i) {
      double score = 0.0;
      for (size_t j = start; j < stop; ++j) {
        if (j != i) score += tanimoto(fingerprints[order[i]], fingerprints[order[j]]);
      }
      scored.emplace_back(score, order[i]);
    }
    std::sort(scored.begin(), scored.end());
    for (size_t i = 0; i < keep; ++i) selected.push_back(scored[i].second);
  }

  std::sort(selected.begin(), selected.end());
  return selected;
}

SplitIndices split(size_t n, double r_train, double r_val, double r_test,
                   uint64_t seed) {
  if (!(r_train >= 0.0 && r_val >= 0.0 && r_test >= 0.0)) {
    throw DomainError("split ratios must be nonnegative");
  }
  const double total = r_train + r_val + r_test;
  if (!(total > 0.0)) throw DomainError("split ratios sum to zero");

  const auto nd = static_cast<double>(n);
  const size_t n_val = static_cast<size_t>(std::floor(nd * r_val / total));
  const size_t n_test = static_cast<size_t>(std::floor(nd * r_test / total));
  const size_t n_train = n - n_val - n_test;  // train's floor plus the remainder

  if ((r_train > 0.0 && n_train == 0) || (r_val > 0.0 && n_val == 0) ||
      (r_test > 0.0 && n_test == 0)) {
    throw DomainError("a split with positive ratio rounded to zero rows");
  }

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  RandomStream rng(seed);
  rng.shuffle(order);

  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  out.test.assign(order.begin() + n_train + n_val, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::vector<uint8_t>> load_fingerprints(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<std::vector<uint8_t>> out;
  std::string line;
  size_t lineno = 0;
  size_t bits = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_trailing_cr(line);
    if (line.empty()) continue;
    std::vector<uint8_t> fp;
    fp.reserve(line.size() * 4);
    for (char ch : line) {
      int v;
      if (ch >= '0' && ch <= '9') {
        v = ch - '0';
      } else if (ch >= 'a' && ch <= 'f') {
        v = ch - 'a' + 10;
      } else if (ch >= 'A' && ch <= 'F') {
        v = ch - 'A' + 10;
      } else {
        throw ParseError(path, lineno, "invalid hex digit");
      }
      for (int bit = 3; bit >= 0; --bit) fp.push_back((v >> bit) & 1);
    }
    if (out.empty()) {
      bits = fp.size();
    } else if (fp.size() != bits) {
      throw ParseError(path, lineno, "fingerprint length differs from first line");
    }
    out.push_back(std::move(fp));
  }
  return out;
}

void save_fingerprints(const std::vector<std::vector<uint8_t>>& fps,
                       const std::string& path) {
  auto out = detail::open_output(path);
  for (const auto& fp : fps) {
    if (fp.size() % 4 != 0) {
      throw DomainError("fingerprint length must be a multiple of 4 for hex output");
    }
    for (size_t i = 0; i < fp.size(); i += 4) {
      int v = 0;
      for (size_t b = 0; b < 4; ++b) v = (v << 1) | (fp[i + b] ? 1 : 0);
      out << "0123456789abcdef"[v];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed on " + path);
}

}  // namespace ontoloss
