#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ontoloss/dataset.hpp"
#include "ontoloss/ontology.hpp"

namespace ontoloss {

// Pooled constraint-violation counts at a fixed decision threshold. A class
// counts as predicted-positive strictly above the threshold. Disjointness
// pairs are scanned in both orders, so fn_disj is always even.
struct ViolationCounts {
  uint64_t tp_impl = 0;  // antecedent and consequent both positive
  uint64_t fn_impl = 0;  // antecedent positive, consequent negative
  uint64_t tp_disj = 0;  // first positive, second negative (per direction)
  uint64_t fn_disj = 0;  // both positive (per direction)
  double threshold = 0.5;
};

enum class AxiomFamily { Implication, Disjointness };

// scores: n_samples x universe_size, threshold in (0,1) exclusive
ViolationCounts count_violations(const ConstraintSet& cs, const Matrix& scores,
                                 double threshold);

// per-sample diagnostics, same conventions
std::vector<ViolationCounts> count_violations_per_sample(const ConstraintSet& cs,
                                                         const Matrix& scores,
                                                         double threshold);

// FN / (FN + TP); nullopt when the family has no counted pairs at all
std::optional<double> fnr(const ViolationCounts& counts, AxiomFamily family);

struct F1Pair {
  double micro = 0.0;
  double macro = 0.0;
};

// Micro/macro F1 over labelled rows only (DomainError when there are none).
// Per-class F1 is 0 when a class has neither true nor predicted positives;
// every class enters the macro mean.
F1Pair f1_scores(const LabelMatrix& labels, const Matrix& scores, double threshold);

struct AucPair {
  double micro = 0.0;           // NaN when the pooled cells are single-class
  double macro = 0.0;           // NaN when no class has both a pos and a neg
  size_t macro_classes_used = 0;
};

// Rank-based (Mann-Whitney) ROC-AUC; tied scores credit 0.5. Micro pools all
// (sample, class) cells of labelled rows; macro averages per-class AUC over
// classes that have at least one positive and one negative.
AucPair roc_auc(const LabelMatrix& labels, const Matrix& scores);

// Grid search over thresholds {step, 2*step, ...} < 1 maximizing micro F1.
// Ties prefer the threshold nearest 0.5, then the smaller one. step must
// divide 1 (to within 1e-9) and lie in (0, 0.5].
double optimal_threshold(const LabelMatrix& labels, const Matrix& scores,
                         double grid_step = 0.05);

}  // namespace ontoloss
