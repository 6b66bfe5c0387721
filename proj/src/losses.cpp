#include "ontoloss/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ontoloss/errors.hpp"

namespace ontoloss {

namespace {

// reject clearly-out-of-range scores, forgive float dust, clamp the rest
double checked_unit(double v, const char* what) {
  if (!(v >= -kUnitSlack && v <= 1.0 + kUnitSlack)) {
    throw DomainError(std::string(what) + " = " + std::to_string(v) +
                      " outside [0,1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

double tnorm_unchecked(TNormKind kind, double a, double b) {
  switch (kind) {
    case TNormKind::Product:
      return a * b;
    case TNormKind::Lukasiewicz:
      return std::max(a + b - 1.0, 0.0);
  }
  throw DomainError("unknown t-norm");
}

// T(x, y) partial derivatives; the Lukasiewicz kink (x + y = 1) takes
// subgradient 0 on both components
void tnorm_grad_unchecked(TNormKind kind, double x, double y, double& dx, double& dy) {
  switch (kind) {
    case TNormKind::Product:
      dx = y;
      dy = x;
      return;
    case TNormKind::Lukasiewicz:
      if (x + y - 1.0 > 0.0) {
        dx = 1.0;
        dy = 1.0;
      } else {
        dx = 0.0;
        dy = 0.0;
      }
      return;
  }
  throw DomainError("unknown t-norm");
}

void validate_balanced(double k, double epsilon) {
  if (!(k >= 1.0)) throw DomainError("balanced variant needs k >= 1");
  if (!(epsilon >= 0.0)) throw DomainError("balanced variant needs epsilon >= 0");
}

// antecedent rescale F(a) = ((a+eps)^{1/k} - eps^{1/k}) / ((1+eps)^{1/k} - eps^{1/k});
// maps [0,1] onto [0,1] exactly at the endpoints because numerator and
// denominator are built from the same pow() calls
struct BalancedTransforms {
  double inv_k;
  double eps_pow;   // eps^{1/k}
  double denom;     // (1+eps)^{1/k} - eps^{1/k}
  double k;

  BalancedTransforms(double k_, double epsilon) : inv_k(1.0 / k_), k(k_) {
    eps_pow = std::pow(epsilon, inv_k);
    denom = std::pow(1.0 + epsilon, inv_k) - eps_pow;
    eps_ = epsilon;
  }

  double antecedent(double a) const {
    return (std::pow(a + eps_, inv_k) - eps_pow) / denom;
  }
  // dF/da, reusing the same pow as antecedent()
  double antecedent_grad(double a) const {
    return std::pow(a + eps_, inv_k) / (k * denom * (a + eps_));
  }
  double consequent(double b) const { return std::pow(1.0 - b, k); }
  // dG/db = -k (1-b)^{k-1}
  double consequent_grad(double b) const { return -k * std::pow(1.0 - b, k - 1.0); }

 private:
  double eps_;
};

double xu_term(double p) {
  // p = inconsistency mass; the log argument is clamped below at kLogFloor
  return -std::log(std::max(1.0 - p, kLogFloor));
}

}  // namespace

double tnorm(TNormKind kind, double a, double b) {
  return tnorm_unchecked(kind, checked_unit(a, "tnorm input a"),
                         checked_unit(b, "tnorm input b"));
}

double implication_loss(const LossConfig& cfg, double ya, double yb) {
  const double a = checked_unit(ya, "antecedent score");
  const double b = checked_unit(yb, "consequent score");
  switch (cfg.variant) {
    case LossVariantKind::FuzzyStandard:
      return tnorm_unchecked(cfg.tnorm, a, 1.0 - b);
    case LossVariantKind::FuzzyBalanced: {
      validate_balanced(cfg.k, cfg.epsilon);
      const BalancedTransforms t(cfg.k, cfg.epsilon);
      return tnorm_unchecked(cfg.tnorm, t.antecedent(a), t.consequent(b));
    }
    case LossVariantKind::XuSemantic:
      return xu_term(a * (1.0 - b));
  }
  throw DomainError("unknown loss variant");
}

void implication_loss_grad(const LossConfig& cfg, double ya, double yb,
                           double& d_ya, double& d_yb) {
  const double a = checked_unit(ya, "antecedent score");
  const double b = checked_unit(yb, "consequent score");
  switch (cfg.variant) {
    case LossVariantKind::FuzzyStandard: {
      double dx, dy;
      tnorm_grad_unchecked(cfg.tnorm, a, 1.0 - b, dx, dy);
      d_ya = dx;
      d_yb = -dy;  // chain through y = 1 - b
      return;
    }
    case LossVariantKind::FuzzyBalanced: {
      validate_balanced(cfg.k, cfg.epsilon);
      const BalancedTransforms t(cfg.k, cfg.epsilon);
      double dx, dy;
      tnorm_grad_unchecked(cfg.tnorm, t.antecedent(a), t.consequent(b), dx, dy);
      d_ya = dx * t.antecedent_grad(a);
      d_yb = dy * t.consequent_grad(b);
      return;
    }
    case LossVariantKind::XuSemantic: {
      const double p = a * (1.0 - b);
      if (1.0 - p <= kLogFloor) {
        // inside the log clamp the loss is constant
        d_ya = 0.0;
        d_yb = 0.0;
      } else {
        d_ya = (1.0 - b) / (1.0 - p);
        d_yb = -a / (1.0 - p);
      }
      return;
    }
  }
  throw DomainError("unknown loss variant");
}

double disjointness_loss(const LossConfig& cfg, double yc, double yd) {
  const double c = checked_unit(yc, "disjointness score");
  const double d = checked_unit(yd, "disjointness score");
  // the balanced rescale applies to implications only; disjointness falls
  // back to the plain t-norm
  if (cfg.variant == LossVariantKind::XuSemantic) return xu_term(c * d);
  return tnorm_unchecked(cfg.tnorm, c, d);
}

void disjointness_loss_grad(const LossConfig& cfg, double yc, double yd,
                            double& d_yc, double& d_yd) {
  const double c = checked_unit(yc, "disjointness score");
  const double d = checked_unit(yd, "disjointness score");
  if (cfg.variant == LossVariantKind::XuSemantic) {
    const double p = c * d;
    if (1.0 - p <= kLogFloor) {
      d_yc = 0.0;
      d_yd = 0.0;
    } else {
      d_yc = d / (1.0 - p);
      d_yd = c / (1.0 - p);
    }
    return;
  }
  tnorm_grad_unchecked(cfg.tnorm, c, d, d_yc, d_yd);
}

std::vector<double> class_weights(const LossConfig& cfg, size_t n_labels) {
  if (!cfg.explicit_weights.empty()) {
    if (cfg.explicit_weights.size() != n_labels) {
      throw DomainError("explicit_weights size mismatch");
    }
    return cfg.explicit_weights;
  }
  std::vector<double> w(n_labels, 1.0);
  if (cfg.class_counts.empty()) return w;
  if (cfg.class_counts.size() != n_labels) {
    throw DomainError("class_counts size mismatch");
  }
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) {
    throw DomainError("beta must lie in [0, 1)");
  }

  double sum = 0.0;
  for (size_t c = 0; c < n_labels; ++c) {
    const double n_c = cfg.class_counts[c];
    if (n_c < 0.0) throw DomainError("negative class count");
    // empty classes take the n_c = 1 weight of 1 instead of dividing by zero
    w[c] = n_c <= 0.0 ? 1.0 : (1.0 - cfg.beta) / (1.0 - std::pow(cfg.beta, n_c));
    sum += w[c];
  }
  const double scale = static_cast<double>(n_labels) / sum;
  for (double& v : w) v *= scale;
  return w;
}

double base_loss_weighted(std::span<const double> weights, const LabelVector& y,
                          std::span<const double> yhat) {
  if (!y.labelled) return 0.0;
  if (y.values.size() != yhat.size() || weights.size() != yhat.size()) {
    throw DomainError("base loss dimension mismatch");
  }
  double loss = 0.0;
  for (size_t c = 0; c < yhat.size(); ++c) {
    const double p = checked_unit(yhat[c], "prediction");
    if (y.values[c]) {
      loss -= weights[c] * std::log(std::max(p, kLogFloor));
    } else {
      loss -= std::log(std::max(1.0 - p, kLogFloor));
    }
  }
  return loss;
}

double base_loss(const LossConfig& cfg, const LabelVector& y,
                 std::span<const double> yhat) {
  return base_loss_weighted(class_weights(cfg, yhat.size()), y, yhat);
}

LossEvaluator::LossEvaluator(LossConfig cfg, const ConstraintSet& cs)
    : cfg_(std::move(cfg)), cs_(&cs), weights_(class_weights(cfg_, cs.universe_size)) {
  if (cfg_.variant == LossVariantKind::FuzzyBalanced) {
    validate_balanced(cfg_.k, cfg_.epsilon);
  }
  if (!(cfg_.w_impl >= 0.0) || !(cfg_.w_disj >= 0.0)) {
    throw DomainError("constraint-term weights must be nonnegative");
  }
}

LossBreakdown LossEvaluator::loss(const LabelVector& y,
                                  std::span<const double> yhat) const {
  return eval(y, yhat, nullptr);
}

LossBreakdown LossEvaluator::loss_and_grad(const LabelVector& y,
                                           std::span<const double> yhat,
                                           std::span<double> grad) const {
  if (grad.size() != cs_->universe_size) {
    throw DomainError("gradient buffer size mismatch");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  return eval(y, yhat, grad.data());
}

// Single pass shared by loss() and loss_and_grad(). For the balanced variant
// the per-class antecedent/consequent transforms are computed once per class
// instead of once per pair; each expression matches implication_loss exactly.
LossBreakdown LossEvaluator::eval(const LabelVector& y, std::span<const double> yhat,
                                  double* grad) const {
  const size_t n = cs_->universe_size;
  if (yhat.size() != n) throw DomainError("prediction vector size mismatch");
  if (y.labelled && y.values.size() != n) throw DomainError("label vector size mismatch");

  std::vector<double> p(n);
  for (size_t c = 0; c < n; ++c) p[c] = checked_unit(yhat[c], "prediction");

  LossBreakdown out;

  if (y.labelled) {
    for (size_t c = 0; c < n; ++c) {
      if (y.values[c]) {
        out.base -= weights_[c] * std::log(std::max(p[c], kLogFloor));
        if (grad) grad[c] -= p[c] > kLogFloor ? weights_[c] / p[c] : 0.0;
      } else {
        out.base -= std::log(std::max(1.0 - p[c], kLogFloor));
        if (grad) grad[c] += 1.0 - p[c] > kLogFloor ? 1.0 / (1.0 - p[c]) : 0.0;
      }
    }
  }

  // Terms are accumulated even under zero weights: the sums are nonnegative,
  // so the weighted contributions are exactly +0.0 and a zero-weight run
  // stays bitwise identical to one with no constraints at all, while the
  // breakdown still reports the raw sums.
  if (!cs_->implications.empty()) {
    switch (cfg_.variant) {
      case LossVariantKind::FuzzyStandard: {
        for (auto [a, b] : cs_->implications) {
          out.impl_term += tnorm_unchecked(cfg_.tnorm, p[a], 1.0 - p[b]);
          if (grad) {
            double dx, dy;
            tnorm_grad_unchecked(cfg_.tnorm, p[a], 1.0 - p[b], dx, dy);
            grad[a] += cfg_.w_impl * dx;
            grad[b] -= cfg_.w_impl * dy;
          }
        }
        break;
      }
      case LossVariantKind::FuzzyBalanced: {
        const BalancedTransforms t(cfg_.k, cfg_.epsilon);
        std::vector<double> F(n), G(n);
        for (size_t c = 0; c < n; ++c) {
          F[c] = t.antecedent(p[c]);
          G[c] = t.consequent(p[c]);
        }
        for (auto [a, b] : cs_->implications) {
          out.impl_term += tnorm_unchecked(cfg_.tnorm, F[a], G[b]);
          if (grad) {
            double dx, dy;
            tnorm_grad_unchecked(cfg_.tnorm, F[a], G[b], dx, dy);
            grad[a] += cfg_.w_impl * dx * t.antecedent_grad(p[a]);
            grad[b] += cfg_.w_impl * dy * t.consequent_grad(p[b]);
          }
        }
        break;
      }
      case LossVariantKind::XuSemantic: {
        for (auto [a, b] : cs_->implications) {
          const double mass = p[a] * (1.0 - p[b]);
          out.impl_term += xu_term(mass);
          if (grad && 1.0 - mass > kLogFloor) {
            grad[a] += cfg_.w_impl * (1.0 - p[b]) / (1.0 - mass);
            grad[b] -= cfg_.w_impl * p[a] / (1.0 - mass);
          }
        }
        break;
      }
    }
  }

  if (!cs_->disjointness.empty()) {
    if (cfg_.variant == LossVariantKind::XuSemantic) {
      for (auto [c, d] : cs_->disjointness) {
        const double mass = p[c] * p[d];
        out.disj_term += xu_term(mass);
        if (grad && 1.0 - mass > kLogFloor) {
          grad[c] += cfg_.w_disj * p[d] / (1.0 - mass);
          grad[d] += cfg_.w_disj * p[c] / (1.0 - mass);
        }
      }
    } else {
      for (auto [c, d] : cs_->disjointness) {
        out.disj_term += tnorm_unchecked(cfg_.tnorm, p[c], p[d]);
        if (grad) {
          double dx, dy;
          tnorm_grad_unchecked(cfg_.tnorm, p[c], p[d], dx, dy);
          grad[c] += cfg_.w_disj * dx;
          grad[d] += cfg_.w_disj * dy;
        }
      }
    }
  }

  out.total = out.base + cfg_.w_impl * out.impl_term + cfg_.w_disj * out.disj_term;
  return out;
}

LossBreakdown combined_loss(const LossConfig& cfg, const ConstraintSet& cs,
                            const LabelVector& y, std::span<const double> yhat) {
  return LossEvaluator(cfg, cs).loss(y, yhat);
}

std::vector<double> combined_loss_grad(const LossConfig& cfg, const ConstraintSet& cs,
                                       const LabelVector& y,
                                       std::span<const double> yhat) {
  std::vector<double> grad(cs.universe_size, 0.0);
  LossEvaluator(cfg, cs).loss_and_grad(y, yhat, grad);
  return grad;
}

}  // namespace ontoloss
