#include "ontoloss/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "ontoloss/errors.hpp"
#include "ontoloss/rng.hpp"

namespace ontoloss {

namespace {

// componentwise relative error; the denominator floor absorbs central-diff
// roundoff on components much smaller than the objective itself
double rel_error(double analytic, double numeric, double floor = 1e-12) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct Worst {
  double err = 0.0;
  std::string where;

  void offer(double e, std::string w) {
    if (e > err) {
      err = e;
      where = std::move(w);
    }
  }
};

std::string describe(const char* variant, const char* term, const std::string& comp,
                     double a, double b, double analytic, double numeric) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%s %s %s at (%.6f, %.6f): analytic %.9g vs fd %.9g",
                variant, term, comp.c_str(), a, b, analytic, numeric);
  return buf;
}

// margin keeping sampled points clear of Lukasiewicz kinks, where central
// differences straddle the fold and disagree with the subgradient convention
constexpr double kKinkMargin = 1e-4;

bool is_lukasiewicz_fold(const LossConfig& cfg) {
  return cfg.tnorm == TNormKind::Lukasiewicz &&
         cfg.variant != LossVariantKind::XuSemantic;
}

// distance of an implication point from the T_luka(x, y) = max(x+y-1, 0) fold
double impl_kink_gap(const LossConfig& cfg, double a, double b) {
  if (cfg.variant == LossVariantKind::FuzzyBalanced) {
    const double inv_k = 1.0 / cfg.k;
    const double eps_pow = std::pow(cfg.epsilon, inv_k);
    const double f = (std::pow(a + cfg.epsilon, inv_k) - eps_pow) /
                     (std::pow(1.0 + cfg.epsilon, inv_k) - eps_pow);
    const double g = std::pow(1.0 - b, cfg.k);
    return std::abs(f + g - 1.0);
  }
  return std::abs(a - b);  // T_luka(a, 1-b) folds at a = b
}

void nudge_off_kinks(const LossConfig& cfg, const ConstraintSet& cs,
                     std::vector<double>& yhat, RandomStream& rng) {
  for (int sweep = 0; sweep < 256; ++sweep) {
    bool clean = true;
    for (auto [a, b] : cs.implications) {
      if (impl_kink_gap(cfg, yhat[a], yhat[b]) < kKinkMargin) {
        yhat[b] = rng.uniform(0.05, 0.95);
        clean = false;
      }
    }
    for (auto [c, d] : cs.disjointness) {
      if (std::abs(yhat[c] + yhat[d] - 1.0) < kKinkMargin) {
        yhat[d] = rng.uniform(0.05, 0.95);
        clean = false;
      }
    }
    if (clean) return;
  }
  throw DomainError("could not sample a kink-free combined-loss point");
}

struct VariantUnderTest {
  const char* name;
  LossConfig cfg;
};

}  // namespace

GradCheckReport run_gradcheck(const LossConfig& base_cfg, uint64_t trials,
                              uint64_t seed, double tolerance, double fd_step) {
  if (trials == 0) throw DomainError("trials must be positive");
  if (!(fd_step > 0.0 && fd_step < 1e-2)) throw DomainError("bad fd step");

  GradCheckReport report;
  report.tolerance = tolerance;

  RandomStream rng(seed);
  Worst worst;

  std::vector<VariantUnderTest> variants;
  {
    LossConfig c = base_cfg;
    c.variant = LossVariantKind::FuzzyStandard;
    c.tnorm = TNormKind::Product;
    variants.push_back({"standard/product", c});
    c.tnorm = TNormKind::Lukasiewicz;
    variants.push_back({"standard/lukasiewicz", c});
    c.variant = LossVariantKind::FuzzyBalanced;
    c.tnorm = TNormKind::Product;
    variants.push_back({"balanced/product", c});
    c.tnorm = TNormKind::Lukasiewicz;
    variants.push_back({"balanced/lukasiewicz", c});
    c.variant = LossVariantKind::XuSemantic;
    c.tnorm = TNormKind::Product;
    variants.push_back({"xu", c});
  }

  const auto draw = [&] { return rng.uniform(0.05, 0.95); };

  for (const auto& v : variants) {
    const bool folded = is_lukasiewicz_fold(v.cfg);

    for (uint64_t t = 0; t < trials; ++t) {
      double a = draw(), b = draw();
      while (folded && impl_kink_gap(v.cfg, a, b) < kKinkMargin) {
        a = draw();
        b = draw();
      }
      double da = 0.0, db = 0.0;
      implication_loss_grad(v.cfg, a, b, da, db);
      const double fa = central_diff(
          [&](double x) { return implication_loss(v.cfg, x, b); }, a, fd_step);
      const double fb = central_diff(
          [&](double x) { return implication_loss(v.cfg, a, x); }, b, fd_step);
      worst.offer(rel_error(da, fa), describe(v.name, "implication", "d_ya", a, b, da, fa));
      worst.offer(rel_error(db, fb), describe(v.name, "implication", "d_yb", a, b, db, fb));
      report.points_checked += 2;

      double c = draw(), d = draw();
      while (folded && std::abs(c + d - 1.0) < kKinkMargin) {
        c = draw();
        d = draw();
      }
      double dc = 0.0, dd = 0.0;
      disjointness_loss_grad(v.cfg, c, d, dc, dd);
      const double fc = central_diff(
          [&](double x) { return disjointness_loss(v.cfg, x, d); }, c, fd_step);
      const double fd = central_diff(
          [&](double x) { return disjointness_loss(v.cfg, c, x); }, d, fd_step);
      worst.offer(rel_error(dc, fc), describe(v.name, "disjointness", "d_yc", c, d, dc, fc));
      worst.offer(rel_error(dd, fd), describe(v.name, "disjointness", "d_yd", c, d, dd, fd));
      report.points_checked += 2;
    }
  }

  // whole combined-loss gradients on small random constraint sets; exercises
  // the base term, class weights and the pair accumulation
  const uint64_t combined_trials = std::max<uint64_t>(trials / 5, 1);
  for (uint64_t t = 0; t < combined_trials; ++t) {
    const auto& v = variants[t % variants.size()];
    LossConfig cfg = v.cfg;
    cfg.w_impl = rng.uniform(0.0, 2.0);
    cfg.w_disj = rng.uniform(0.0, 5.0);

    const ClassIndex n = static_cast<ClassIndex>(3 + rng.below(6));
    ConstraintSet cs;
    cs.universe_size = n;
    for (ClassIndex i = 0; i < n; ++i) cs.class_names.push_back("L" + std::to_string(i));
    for (ClassIndex i = 0; i < n; ++i) {
      for (ClassIndex j = 0; j < n; ++j) {
        if (i != j && rng.uniform() < 0.25) cs.implications.emplace_back(i, j);
      }
    }
    for (ClassIndex i = 0; i < n; ++i) {
      for (ClassIndex j = i + 1; j < n; ++j) {
        const bool implied =
            std::count(cs.implications.begin(), cs.implications.end(),
                       std::make_pair(i, j)) ||
            std::count(cs.implications.begin(), cs.implications.end(),
                       std::make_pair(j, i));
        if (!implied && rng.uniform() < 0.15) cs.disjointness.emplace_back(i, j);
      }
    }

    cfg.class_counts.clear();
    for (ClassIndex i = 0; i < n; ++i) {
      cfg.class_counts.push_back(static_cast<double>(rng.below(6)));
    }

    std::vector<uint8_t> ybits(n);
    for (auto& bit : ybits) bit = rng.below(2) ? 1 : 0;
    const LabelVector y{ybits, rng.below(4) != 0};

    std::vector<double> yhat(n);
    for (auto& p : yhat) p = draw();
    if (is_lukasiewicz_fold(cfg)) nudge_off_kinks(cfg, cs, yhat, rng);

    const auto analytic = combined_loss_grad(cfg, cs, y, yhat);
    for (ClassIndex i = 0; i < n; ++i) {
      const double fd = central_diff(
          [&](double x) {
            std::vector<double> probe(yhat.begin(), yhat.end());
            probe[i] = x;
            return combined_loss(cfg, cs, y, probe).total;
          },
          yhat[i], fd_step);
      // the summed objective is O(100) here, so FD carries ~1e-8 of absolute
      // roundoff; the floor keeps that from dominating near-zero components
      worst.offer(rel_error(analytic[i], fd, 1e-2),
                  describe(v.name, "combined", "d_y" + std::to_string(i), yhat[i],
                           0.0, analytic[i], fd));
      ++report.points_checked;
    }
  }

  // balanced boundary identity: at (1, 0) with epsilon 0 the gradient must be
  // exactly (1/k, -k)
  {
    LossConfig boundary = base_cfg;
    boundary.variant = LossVariantKind::FuzzyBalanced;
    boundary.tnorm = TNormKind::Product;
    boundary.epsilon = 0.0;
    implication_loss_grad(boundary, 1.0, 0.0, report.boundary_d_ya,
                          report.boundary_d_yb);
    report.boundary_exact = report.boundary_d_ya == 1.0 / boundary.k &&
                            report.boundary_d_yb == -boundary.k;
  }

  report.max_rel_error = worst.err;
  report.worst_location = worst.where;
  report.passed = report.max_rel_error < tolerance && report.boundary_exact;
  return report;
}

}  // namespace ontoloss
