#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ontoloss/dataset.hpp"
#include "ontoloss/ontology.hpp"

namespace ontoloss {

enum class TNormKind { Product, Lukasiewicz };

enum class LossVariantKind {
  FuzzyStandard,  // T(a, 1-b) per implication
  FuzzyBalanced,  // antecedent rescaled, consequent sharpened (k, epsilon)
  XuSemantic,     // -log(1 - a*(1-b))
};

// Loss configuration. class_counts, when non-empty, holds per-class positive
// counts from which effective class weights are derived; explicit_weights,
// when non-empty, overrides that derivation. With neither set all classes
// weigh 1.
struct LossConfig {
  TNormKind tnorm = TNormKind::Product;
  LossVariantKind variant = LossVariantKind::FuzzyStandard;
  double k = 2.0;        // balanced variant exponent, > 1 in configs
  double epsilon = 0.01; // balanced variant offset, > 0 in configs
  double w_impl = 0.01;
  double w_disj = 100.0;
  double beta = 0.99;    // class-weight decay
  std::vector<double> class_counts;
  std::vector<double> explicit_weights;
};

// lower clamp for every log argument (base loss and Xu variant)
inline constexpr double kLogFloor = 1e-12;

// tolerated excursion outside [0,1] before inputs are rejected
inline constexpr double kUnitSlack = 1e-9;

// T(a, b). Inputs outside [0,1] beyond kUnitSlack raise DomainError; values
// inside the slack band are clamped before use.
double tnorm(TNormKind kind, double a, double b);

// Loss charged to an implication "a entails b" given scores (ya, yb), and its
// gradient. The balanced variant accepts k >= 1, epsilon >= 0 here (configs
// are stricter) so boundary behaviour at epsilon = 0 stays checkable.
// Non-differentiable points (Lukasiewicz kink, Xu log clamp) take
// subgradient 0.
double implication_loss(const LossConfig& cfg, double ya, double yb);
void implication_loss_grad(const LossConfig& cfg, double ya, double yb,
                           double& d_ya, double& d_yb);

// Loss charged to a disjointness pair {c, d}; symmetric in its arguments.
// The balanced variant treats disjointness exactly as the standard variant.
double disjointness_loss(const LossConfig& cfg, double yc, double yd);
void disjointness_loss_grad(const LossConfig& cfg, double yc, double yd,
                            double& d_yc, double& d_yd);

// Per-class weights: w'_c = (1-beta)/(1-beta^{n_c}), classes with n_c = 0 get
// w' = 1, then normalized to sum to n_labels. explicit_weights pass through
// unnormalized. Empty config yields all ones.
std::vector<double> class_weights(const LossConfig& cfg, size_t n_labels);

// Weighted binary cross-entropy summed over classes; the weight scales only
// the positive term. Log arguments are clamped to [kLogFloor, 1].
double base_loss(const LossConfig& cfg, const LabelVector& y,
                 std::span<const double> yhat);
double base_loss_weighted(std::span<const double> weights, const LabelVector& y,
                          std::span<const double> yhat);

struct LossBreakdown {
  double base = 0.0;
  double impl_term = 0.0;  // unweighted sum over implication pairs
  double disj_term = 0.0;  // unweighted sum over disjointness pairs
  double total = 0.0;      // base + w_impl*impl_term + w_disj*disj_term
};

// Binds a config to a constraint set; precomputes class weights (and, for the
// balanced variant, per-class transforms) so per-sample evaluation stays
// cheap inside training loops. Unlabelled samples contribute no base term.
class LossEvaluator {
 public:
  LossEvaluator(LossConfig cfg, const ConstraintSet& cs);

  LossBreakdown loss(const LabelVector& y, std::span<const double> yhat) const;

  // grad must have size universe_size; it is overwritten, not accumulated
  LossBreakdown loss_and_grad(const LabelVector& y, std::span<const double> yhat,
                              std::span<double> grad) const;

  const std::vector<double>& weights() const { return weights_; }
  const LossConfig& config() const { return cfg_; }

 private:
  LossBreakdown eval(const LabelVector& y, std::span<const double> yhat,
                     double* grad) const;

  LossConfig cfg_;
  const ConstraintSet* cs_;
  std::vector<double> weights_;
};

// One-shot conveniences over LossEvaluator.
LossBreakdown combined_loss(const LossConfig& cfg, const ConstraintSet& cs,
                            const LabelVector& y, std::span<const double> yhat);
std::vector<double> combined_loss_grad(const LossConfig& cfg, const ConstraintSet& cs,
                                       const LabelVector& y,
                                       std::span<const double> yhat);

}  // namespace ontoloss
