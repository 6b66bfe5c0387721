#include "ontoloss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ontoloss/errors.hpp"

namespace ontoloss {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_shapes(const ConstraintSet& cs, const Matrix& scores, double threshold) {
  if (scores.cols != cs.universe_size) {
    throw DomainError("score matrix width does not match the constraint universe");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("threshold must lie strictly inside (0, 1)");
  }
}

// positive prediction is strictly-above-threshold everywhere in this module
void count_row(const ConstraintSet& cs, std::span<const double> row, double threshold,
               ViolationCounts& out) {
  for (auto [a, b] : cs.implications) {
    if (row[a] > threshold) {
      if (row[b] > threshold) {
        ++out.tp_impl;
      } else {
        ++out.fn_impl;
      }
    }
  }
  // both orders per unordered axiom pair, so fn_disj comes out even
  for (auto [c, d] : cs.disjointness) {
    if (row[c] > threshold && row[d] > threshold) {
      out.fn_disj += 2;
    } else {
      if (row[c] > threshold && row[d] <= threshold) ++out.tp_disj;
      if (row[d] > threshold && row[c] <= threshold) ++out.tp_disj;
    }
  }
}

struct BinaryCounts {
  uint64_t tp = 0, fp = 0, fn = 0;
};

double f1_from(const BinaryCounts& c) {
  const uint64_t denom = 2 * c.tp + c.fp + c.fn;
  // no true and no predicted positives: scored 0 by convention
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

// Mann-Whitney AUC over (score, label) cells with 0.5 credit for ties;
// NaN when either class is empty
double rank_auc(std::vector<std::pair<double, uint8_t>>& cells) {
  uint64_t n_pos = 0;
  for (const auto& [s, y] : cells) n_pos += y;
  const uint64_t n_neg = cells.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return kNaN;

  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double pos_rank_sum = 0.0;
  size_t i = 0;
  while (i < cells.size()) {
    size_t j = i;
    while (j < cells.size() && cells[j].first == cells[i].first) ++j;
    // average rank of the tie group, ranks 1-based
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t t = i; t < j; ++t) {
      if (cells[t].second) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

void validate_eval_inputs(const LabelMatrix& labels, const Matrix& scores) {
  if (labels.rows != scores.rows || labels.cols != scores.cols) {
    throw DomainError("label and score matrix shapes differ");
  }
  bool any = false;
  for (uint8_t f : labels.labelled) any |= f != 0;
  if (!any) throw DomainError("no labelled rows to evaluate");
}

}  // namespace

ViolationCounts count_violations(const ConstraintSet& cs, const Matrix& scores,
                                 double threshold) {
  validate_shapes(cs, scores, threshold);
  ViolationCounts out;
  out.threshold = threshold;
  for (size_t r = 0; r < scores.rows; ++r) count_row(cs, scores.row(r), threshold, out);
  return out;
}

std::vector<ViolationCounts> count_violations_per_sample(const ConstraintSet& cs,
                                                         const Matrix& scores,
                                                         double threshold) {
  validate_shapes(cs, scores, threshold);
  std::vector<ViolationCounts> out(scores.rows);
  for (size_t r = 0; r < scores.rows; ++r) {
    out[r].threshold = threshold;
    count_row(cs, scores.row(r), threshold, out[r]);
  }
  return out;
}

std::optional<double> fnr(const ViolationCounts& counts, AxiomFamily family) {
  const uint64_t fn = family == AxiomFamily::Implication ? counts.fn_impl : counts.fn_disj;
  const uint64_t tp = family == AxiomFamily::Implication ? counts.tp_impl : counts.tp_disj;
  if (fn + tp == 0) return std::nullopt;
  return static_cast<double>(fn) / static_cast<double>(fn + tp);
}

F1Pair f1_scores(const LabelMatrix& labels, const Matrix& scores, double threshold) {
  validate_eval_inputs(labels, scores);
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("threshold must lie strictly inside (0, 1)");
  }

  BinaryCounts micro;
  std::vector<BinaryCounts> per_class(labels.cols);
  for (size_t r = 0; r < labels.rows; ++r) {
    if (!labels.labelled[r]) continue;
    const auto y = labels.row(r);
    const auto s = scores.row(r);
    for (size_t c = 0; c < labels.cols; ++c) {
      const bool pred = s[c] > threshold;
      if (pred && y[c]) {
        ++micro.tp;
        ++per_class[c].tp;
      } else if (pred) {
        ++micro.fp;
        ++per_class[c].fp;
      } else if (y[c]) {
        ++micro.fn;
        ++per_class[c].fn;
      }
    }
  }

  F1Pair out;
  out.micro = f1_from(micro);
  double macro_sum = 0.0;
  for (const auto& c : per_class) macro_sum += f1_from(c);
  out.macro = labels.cols ? macro_sum / static_cast<double>(labels.cols) : 0.0;
  return out;
}

AucPair roc_auc(const LabelMatrix& labels, const Matrix& scores) {
  validate_eval_inputs(labels, scores);

  AucPair out;
  std::vector<std::pair<double, uint8_t>> pooled;
  std::vector<std::pair<double, uint8_t>> column;
  double macro_sum = 0.0;

  for (size_t c = 0; c < labels.cols; ++c) {
    column.clear();
    for (size_t r = 0; r < labels.rows; ++r) {
      if (!labels.labelled[r]) continue;
      column.emplace_back(scores.at(r, c), labels.at(r, c));
      pooled.emplace_back(scores.at(r, c), labels.at(r, c));
    }
    const double auc = rank_auc(column);
    if (!std::isnan(auc)) {
      macro_sum += auc;
      ++out.macro_classes_used;
    }
  }

  out.micro = rank_auc(pooled);
  out.macro = out.macro_classes_used
                  ? macro_sum / static_cast<double>(out.macro_classes_used)
                  : kNaN;
  return out;
}

double optimal_threshold(const LabelMatrix& labels, const Matrix& scores,
                         double grid_step) {
  validate_eval_inputs(labels, scores);
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw DomainError("grid_step must lie in (0, 0.5]");
  }
  const double slots = 1.0 / grid_step;
  const auto n_slots = static_cast<long long>(std::llround(slots));
  if (std::abs(slots - static_cast<double>(n_slots)) > 1e-9) {
    throw DomainError("grid_step must divide 1");
  }

  double best_t = 0.0;
  double best_f1 = -1.0;
  for (long long i = 1; i < n_slots; ++i) {
    const double t = static_cast<double>(i) * grid_step;
    const double f1 = f1_scores(labels, scores, t).micro;
    // ties prefer the threshold nearest 0.5, then the smaller value
    const bool better =
        f1 > best_f1 ||
        (f1 == best_f1 && std::abs(t - 0.5) < std::abs(best_t - 0.5));
    if (better) {
      best_f1 = f1;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace ontoloss
