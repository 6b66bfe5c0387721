// Acceptance gate. Eight end-to-end criteria, one verdict line each, exit
// code = number of failures. Criteria 6 and 7 train real models at desk scale
// and carry wall-clock budgets; the rest are exact or tolerance-pinned checks
// against brute-force references.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "ontoloss/datagen.hpp"
#include "ontoloss/errors.hpp"
#include "ontoloss/gradcheck.hpp"
#include "ontoloss/losses.hpp"
#include "ontoloss/metrics.hpp"
#include "ontoloss/model.hpp"
#include "ontoloss/ontology.hpp"
#include "ontoloss/rng.hpp"
#include "ontoloss/trainer.hpp"
#include "oracles.hpp"

using namespace ontoloss;

namespace {

int g_failures = 0;

void verdict(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %d (%s): %s%s%s\n", idx, name, ok ? "PASS" : "FAIL",
              detail.empty() ? "" : "  ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

bool close(double a, double b, double tol) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::abs(a - b) <= tol;
}

/* ---- criterion 1: finite-difference gradient audit ----------------------- */

void criterion_gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_gradcheck(LossConfig{}, 1000, 42);  // tol 1e-5, step 1e-6
  const bool ok = rep.passed && rep.max_rel_error < 1e-5 && rep.boundary_exact;
  verdict(1, "loss gradients match finite differences", ok,
          fmt("max rel err %.3g over %llu points, %.1fs", rep.max_rel_error,
              static_cast<unsigned long long>(rep.points_checked), seconds_since(t0)));
}

/* ---- criterion 2: balanced variant boundary exactness --------------------- */

void criterion_boundaries() {
  bool ok = true;
  std::string why;
  for (double k : {1.5, 2.0, 4.0}) {
    for (double eps : {1e-4, 1e-2, 1e-1}) {
      for (auto tn : {TNormKind::Product, TNormKind::Lukasiewicz}) {
        LossConfig cfg;
        cfg.variant = LossVariantKind::FuzzyBalanced;
        cfg.tnorm = tn;
        cfg.k = k;
        cfg.epsilon = eps;
        for (double b : {0.0, 0.3, 0.7, 1.0}) {
          if (std::abs(implication_loss(cfg, 0.0, b)) > 1e-12) ok = false;
        }
        if (std::abs(implication_loss(cfg, 1.0, 0.0) - 1.0) > 1e-12) ok = false;
      }
    }
    // the epsilon -> 0 limit must hit the corner derivatives exactly
    LossConfig cfg;
    cfg.variant = LossVariantKind::FuzzyBalanced;
    cfg.k = k;
    cfg.epsilon = 0.0;
    double da = 0.0, db = 0.0;
    implication_loss_grad(cfg, 1.0, 0.0, da, db);
    if (da != 1.0 / k || db != -k) {
      ok = false;
      why = fmt("grad at (1,0) for k=%g: (%.17g, %.17g)", k, da, db);
    }
  }
  verdict(2, "balanced loss is exact at its boundaries", ok,
          ok ? "L(0,b)=0, L(1,0)=1 within 1e-12; corner grads (1/k, -k) exact" : why);
}

/* ---- criterion 3: semantic-loss identity ---------------------------------- */

void criterion_xu_identity() {
  RandomStream rng(7);
  LossConfig xu;
  xu.variant = LossVariantKind::XuSemantic;
  LossConfig prod;  // standard fuzzy with the product t-norm

  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    const double impl = std::abs(
        implication_loss(xu, a, b) -
        (-std::log(std::max(1.0 - implication_loss(prod, a, b), kLogFloor))));
    const double disj = std::abs(
        disjointness_loss(xu, a, b) -
        (-std::log(std::max(1.0 - disjointness_loss(prod, a, b), kLogFloor))));
    worst = std::max({worst, impl, disj});
  }
  verdict(3, "log-domain loss equals the product t-norm composition",
          worst < 1e-12, fmt("max abs diff %.3g over 100000 points", worst));
}

/* ---- criterion 4: violation counters and rank metrics vs brute force ------ */

void criterion_metrics() {
  RandomStream rng(2024);
  bool ok = true;
  std::string why;
  bool saw_even_only = true;

  for (int trial = 0; trial < 500 && ok; ++trial) {
    const size_t n_classes = 2 + rng.below(7);  // 2..8
    const size_t n_samples = 1 + rng.below(10); // 1..10

    ConstraintSet cs;
    cs.universe_size = n_classes;
    for (size_t c = 0; c < n_classes; ++c) cs.class_names.push_back("c" + std::to_string(c));
    for (uint32_t a = 0; a < n_classes; ++a) {
      for (uint32_t b = 0; b < n_classes; ++b) {
        if (a != b && rng.uniform() < 0.2) cs.implications.push_back({a, b});
      }
    }
    for (uint32_t a = 0; a < n_classes; ++a) {
      for (uint32_t b = a + 1; b < n_classes; ++b) {
        const bool implied =
            std::find(cs.implications.begin(), cs.implications.end(),
                      std::make_pair(a, b)) != cs.implications.end() ||
            std::find(cs.implications.begin(), cs.implications.end(),
                      std::make_pair(b, a)) != cs.implications.end();
        if (!implied && rng.uniform() < 0.15) cs.disjointness.push_back({a, b});
      }
    }

    Matrix scores(n_samples, n_classes);
    LabelMatrix labels(n_samples, n_classes);
    std::vector<std::vector<double>> score_rows(n_samples, std::vector<double>(n_classes));
    std::vector<std::vector<uint8_t>> label_rows(n_samples, std::vector<uint8_t>(n_classes));
    for (size_t r = 0; r < n_samples; ++r) {
      labels.labelled[r] = r == 0 ? 1 : (rng.below(4) != 0);  // keep one labelled row
      for (size_t c = 0; c < n_classes; ++c) {
        scores.at(r, c) = static_cast<double>(rng.below(11)) / 10.0;  // tie-prone
        labels.at(r, c) = labels.labelled[r] ? static_cast<uint8_t>(rng.below(2)) : 0;
        score_rows[r][c] = scores.at(r, c);
        label_rows[r][c] = labels.at(r, c);
      }
    }

    const auto got = count_violations(cs, scores, 0.5);
    const auto want = oracles::count_violations(cs.implications, cs.disjointness,
                                                score_rows, 0.5);
    if (got.tp_impl != want.tp_impl || got.fn_impl != want.fn_impl ||
        got.tp_disj != want.tp_disj || got.fn_disj != want.fn_disj) {
      ok = false;
      why = fmt("violation counters diverge at trial %d", trial);
    }
    if (got.fn_disj % 2 != 0) saw_even_only = false;

    const auto f1 = f1_scores(labels, scores, 0.5);
    const auto f1o = oracles::f1_scores(label_rows, labels.labelled, score_rows, 0.5);
    if (!close(f1.micro, f1o.micro, 1e-12) || !close(f1.macro, f1o.macro, 1e-12)) {
      ok = false;
      why = fmt("f1 diverges at trial %d", trial);
    }

    // micro: pooled labelled cells; macro: mean over classes with both signs
    std::vector<double> pool_s;
    std::vector<uint8_t> pool_y;
    double macro_sum = 0.0;
    size_t macro_used = 0;
    for (size_t c = 0; c < n_classes; ++c) {
      std::vector<double> cs_scores;
      std::vector<uint8_t> cs_labels;
      for (size_t r = 0; r < n_samples; ++r) {
        if (!labels.labelled[r]) continue;
        cs_scores.push_back(scores.at(r, c));
        cs_labels.push_back(labels.at(r, c));
        pool_s.push_back(scores.at(r, c));
        pool_y.push_back(labels.at(r, c));
      }
      const double a = oracles::auc_pairs(cs_scores, cs_labels);
      if (!std::isnan(a)) {
        macro_sum += a;
        ++macro_used;
      }
    }
    const double micro_want = oracles::auc_pairs(pool_s, pool_y);
    const double macro_want = macro_used == 0
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : macro_sum / static_cast<double>(macro_used);
    const auto auc = roc_auc(labels, scores);
    if (!close(auc.micro, micro_want, 1e-12) || !close(auc.macro, macro_want, 1e-12) ||
        auc.macro_classes_used != macro_used) {
      ok = false;
      why = fmt("auc diverges at trial %d", trial);
    }
  }

  ok = ok && saw_even_only;
  verdict(4, "metrics match brute-force references", ok,
          ok ? "500 random instances; counters, F1, AUC; fn_disj always even" : why);
}

/* ---- criterion 5: constraint closure vs Warshall -------------------------- */

void criterion_closure() {
  RandomStream rng(99);
  bool ok = true;
  std::string why;

  for (int trial = 0; trial < 200 && ok; ++trial) {
    const size_t n = 2 + rng.below(19);  // 2..20
    OntologyGraph g;
    for (size_t v = 0; v < n; ++v) g.intern(fmt("c%02zu", v));
    std::fill(g.annotated.begin(), g.annotated.end(), uint8_t{1});

    // edges respect a shuffled order, so the graph is a DAG by construction
    std::vector<size_t> order(n);
    for (size_t v = 0; v < n; ++v) order[v] = v;
    rng.shuffle(order);
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        if (rng.uniform() < 0.25) {
          g.add_subsumption(static_cast<ClassIndex>(order[i]),
                            static_cast<ClassIndex>(order[j]));
          adj[order[i]][order[j]] = true;
        }
      }
    }

    std::vector<ClassIndex> all(n);
    for (size_t v = 0; v < n; ++v) all[v] = static_cast<ClassIndex>(v);
    // zero-padded names keep label order == id order, so indices line up
    const auto cs = compile_constraints(g, all);

    const auto closed = oracles::reflexive_transitive_closure(adj);
    std::set<std::pair<uint32_t, uint32_t>> want;
    for (uint32_t v = 0; v < n; ++v) {
      for (uint32_t u = 0; u < n; ++u) {
        if (v != u && closed[v][u]) want.insert({v, u});
      }
    }
    const std::set<std::pair<uint32_t, uint32_t>> got(cs.implications.begin(),
                                                      cs.implications.end());
    if (got != want) {
      ok = false;
      why = fmt("closure diverges at trial %d (n=%zu)", trial, n);
    }
  }

  // worked example: disjointness propagates down both sides
  {
    OntologyGraph g;
    const auto a = g.intern("A");
    const auto b = g.intern("B");
    const auto c = g.intern("C");
    const auto d = g.intern("D");
    g.add_subsumption(a, c);
    g.add_subsumption(b, d);
    g.add_disjointness(c, d);
    std::fill(g.annotated.begin(), g.annotated.end(), uint8_t{1});
    const auto cs = compile_constraints(g, {a, b, c, d});
    const std::set<std::pair<uint32_t, uint32_t>> impl(cs.implications.begin(),
                                                       cs.implications.end());
    const std::set<std::pair<uint32_t, uint32_t>> disj(cs.disjointness.begin(),
                                                       cs.disjointness.end());
    if (impl != std::set<std::pair<uint32_t, uint32_t>>{{0, 2}, {1, 3}} ||
        disj != std::set<std::pair<uint32_t, uint32_t>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}}) {
      ok = false;
      why = "worked 4-class example diverges";
    }
  }

  verdict(5, "constraint closure matches the Warshall reference", ok,
          ok ? "200 random DAGs up to 20 nodes plus the worked example" : why);
}

/* ---- criteria 6 and 7: desk-scale training -------------------------------- */

// shared across the two training criteria
struct TrainedSeed {
  Dataset train, val, test;
  ModelState baseline, product, balanced;
  double fnr_base = 0.0, fnr_prod = 0.0;
  uint64_t fn_disj_prod = 0, fn_disj_bal = 0;
  double f1_base = 0.0, f1_bal = 0.0;
  bool impl_term_dropped = false;
};

constexpr double kWImpl = 2.0;
constexpr double kWDisj = 30.0;
constexpr size_t kEpochs = 200;
// class templates are unit-norm, so the shift is measured against ||t|| = 1:
// large enough to degrade a supervised model, small enough that it still
// fires predictions on the shifted clusters
constexpr double kOodShift = 0.5;
constexpr size_t kPoolSize = 5000;
constexpr size_t kOodSize = 1000;

SyntheticSpec bench_spec() {
  SyntheticSpec spec;
  spec.n_classes = 50;
  spec.dag_density = 0.08;
  spec.n_disjoint_axioms = 8;
  spec.n_samples = 5000;
  spec.feature_dim = 64;
  spec.label_noise = 0.02;
  spec.feature_noise = 0.35;
  spec.seed = 424242;
  return spec;
}

TrainConfig bench_config(uint64_t seed) {
  TrainConfig tc;
  tc.max_epochs = kEpochs;
  tc.batch_size = 64;
  tc.learning_rate = 3e-3;
  tc.hidden_dims = {64};
  tc.seed = seed;
  return tc;
}

Dataset slice(const Dataset& d, const std::vector<size_t>& idx) {
  return select_rows(d, idx);
}

void criterion_training(std::vector<TrainedSeed>& seeds, const SyntheticData& sd,
                        const ConstraintSet& cs) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string why;

  double base_fnr_sum = 0.0, prod_fnr_sum = 0.0;
  double base_f1_sum = 0.0, bal_f1_sum = 0.0;
  uint64_t fuzzy_fn_disj = 0;
  bool all_dropped = true;

  for (uint64_t s = 1; s <= 3; ++s) {
    TrainedSeed ts;
    const auto sp = split(sd.data.size(), 0.7, 0.1, 0.2, s);
    ts.train = slice(sd.data, sp.train);
    ts.val = slice(sd.data, sp.val);
    ts.test = slice(sd.data, sp.test);

    auto run = [&](LossVariantKind variant, double w_impl, double w_disj) {
      auto tc = bench_config(s);
      tc.loss.variant = variant;
      tc.loss.w_impl = w_impl;
      tc.loss.w_disj = w_disj;
      return train(ts.train, ts.val, cs, tc);
    };

    const auto base = run(LossVariantKind::FuzzyStandard, 0.0, 0.0);
    const auto prod = run(LossVariantKind::FuzzyStandard, kWImpl, kWDisj);
    const auto bal = run(LossVariantKind::FuzzyBalanced, kWImpl, kWDisj);
    if (base.diverged || prod.diverged || bal.diverged) {
      ok = false;
      why = fmt("training diverged at seed %llu", static_cast<unsigned long long>(s));
      break;
    }

    const auto eval = [&](const ModelState& m, double& fnr_impl, uint64_t& fn_disj,
                          double& micro_f1) {
      const auto scores = predict_all(m, ts.test);
      const auto vc = count_violations(cs, scores, 0.5);
      fnr_impl = fnr(vc, AxiomFamily::Implication).value_or(0.0);
      fn_disj = vc.fn_disj;
      micro_f1 = f1_scores(ts.test.labels, scores, 0.5).micro;
    };

    uint64_t fn_disj_base = 0;
    double f1_prod = 0.0, fnr_bal = 0.0;
    eval(base.model, ts.fnr_base, fn_disj_base, ts.f1_base);
    eval(prod.model, ts.fnr_prod, ts.fn_disj_prod, f1_prod);
    eval(bal.model, fnr_bal, ts.fn_disj_bal, ts.f1_bal);

    ts.impl_term_dropped = prod.log.back().impl_term < prod.log.front().impl_term;
    all_dropped = all_dropped && ts.impl_term_dropped;

    base_fnr_sum += ts.fnr_base;
    prod_fnr_sum += ts.fnr_prod;
    base_f1_sum += ts.f1_base;
    bal_f1_sum += ts.f1_bal;
    fuzzy_fn_disj += ts.fn_disj_prod + ts.fn_disj_bal;

    ts.baseline = base.model;
    ts.product = prod.model;
    ts.balanced = bal.model;
    seeds.push_back(std::move(ts));
  }

  const double elapsed = seconds_since(t0);
  if (ok) {
    const double base_mean = base_fnr_sum / 3.0;
    const double prod_mean = prod_fnr_sum / 3.0;
    const double base_f1 = base_f1_sum / 3.0;
    const double bal_f1 = bal_f1_sum / 3.0;
    ok = base_mean > 0.0 && prod_mean <= 0.2 * base_mean && fuzzy_fn_disj == 0 &&
         bal_f1 >= base_f1 - 0.02 && all_dropped && elapsed < 300.0;
    why = fmt("FNR_impl %.4f -> %.4f, disj violations %llu, micro-F1 %.4f -> %.4f, %.0fs",
              base_mean, prod_mean, static_cast<unsigned long long>(fuzzy_fn_disj),
              base_f1, bal_f1, elapsed);
  }
  verdict(6, "constraint losses cut implication violations at matched accuracy", ok, why);
}

void criterion_semi_supervised(const std::vector<TrainedSeed>& seeds,
                               const SyntheticData& sd, const SyntheticSpec& spec,
                               const ConstraintSet& cs) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = seeds.size() == 3;
  std::string why = ok ? "" : "training criterion did not produce models";

  if (ok) {
    // one batch so the pool and the held-out test share cluster displacements
    const auto shifted =
        generate_shifted(sd, spec, kPoolSize + kOodSize, kOodShift, spec.seed + 1, true);

    Dataset ood;
    ood.features = Matrix(kOodSize, spec.feature_dim);
    ood.labels = LabelMatrix(kOodSize, spec.n_classes);
    for (size_t r = 0; r < kOodSize; ++r) {
      const size_t src = kPoolSize + r;
      std::copy_n(shifted.features.row(src).begin(), spec.feature_dim,
                  ood.features.row(r).begin());
      std::copy_n(shifted.labels.row(src).begin(), spec.n_classes,
                  ood.labels.row(r).begin());
    }

    int wins = 0;
    bool usable = true;
    std::string pairs;
    for (uint64_t s = 1; s <= 3 && usable; ++s) {
      const auto& ts = seeds[s - 1];

      Dataset mixed = ts.train;
      const size_t base_rows = mixed.size();
      mixed.features.values.resize((base_rows + kPoolSize) * spec.feature_dim);
      mixed.features.rows = base_rows + kPoolSize;
      mixed.labels.values.resize((base_rows + kPoolSize) * spec.n_classes, 0);
      mixed.labels.labelled.resize(base_rows + kPoolSize, 0);
      mixed.labels.rows = base_rows + kPoolSize;
      for (size_t r = 0; r < kPoolSize; ++r) {
        std::copy_n(shifted.features.row(r).begin(), spec.feature_dim,
                    mixed.features.row(base_rows + r).begin());
      }

      auto tc = bench_config(s);
      tc.loss.w_impl = kWImpl;
      tc.loss.w_disj = kWDisj;
      tc.semi_supervised = true;
      const auto semi = train(mixed, ts.val, cs, tc);
      if (semi.diverged) {
        usable = false;
        pairs += fmt(" seed %llu diverged", static_cast<unsigned long long>(s));
        break;
      }

      const auto sup_scores = predict_all(ts.product, ood);
      const auto semi_scores = predict_all(semi.model, ood);
      const auto sup_vc = count_violations(cs, sup_scores, 0.5);
      const auto semi_vc = count_violations(cs, semi_scores, 0.5);
      const auto sup_fnr = fnr(sup_vc, AxiomFamily::Implication);
      const auto semi_fnr = fnr(semi_vc, AxiomFamily::Implication);
      if (!sup_fnr || !semi_fnr) {
        usable = false;
        pairs += fmt(" seed %llu fired no implications (sup %llu, semi %llu pairs)",
                     static_cast<unsigned long long>(s),
                     static_cast<unsigned long long>(sup_vc.tp_impl + sup_vc.fn_impl),
                     static_cast<unsigned long long>(semi_vc.tp_impl + semi_vc.fn_impl));
        break;
      }
      if (*semi_fnr < *sup_fnr) ++wins;
      pairs += fmt(" %.4f->%.4f", *sup_fnr, *semi_fnr);
    }

    const double elapsed = seconds_since(t0);
    ok = usable && wins >= 2 && elapsed < 300.0;
    why = fmt("shifted-test FNR_impl%s, %d/3 seeds improved, %.0fs", pairs.c_str(),
              wins, elapsed);
  }
  verdict(7, "unlabelled shifted samples improve out-of-distribution consistency",
          ok, why);
}

/* ---- criterion 8: command-line reproducibility ---------------------------- */

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ONTOLOSS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

void criterion_cli_determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = (std::filesystem::temp_directory_path() /
                    ("otl_accept_" + std::to_string(::getpid())))
                       .string();
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  bool ok = true;
  std::string why;
  if (run_cli("generate --classes 12 --density 0.2 --disjoint-axioms 2 --samples 300 "
              "--feature-dim 16 --seed 11 --out " + dir) != 0 ||
      run_cli("compile-constraints --edges " + dir + "/edges.tsv --disjoint " + dir +
              "/disjoint.tsv --annotated " + dir + "/annotated.tsv --out " + dir +
              "/cs.tsv") != 0) {
    ok = false;
    why = "data preparation commands failed";
  }

  if (ok) {
    std::ofstream cfg(dir + "/train.cfg");
    cfg << "max_epochs = 6\nbatch_size = 32\nhidden_dims = 8\n";
    cfg.close();
    const std::string common = "train --data " + dir + "/dataset.tsv --constraints " +
                               dir + "/cs.tsv --config " + dir + "/train.cfg";
    if (run_cli(common + " --seed 7 --out " + dir + "/r1") != 0 ||
        run_cli(common + " --seed 7 --out " + dir + "/r2") != 0 ||
        run_cli(common + " --seed 8 --out " + dir + "/r3") != 0) {
      ok = false;
      why = "train commands failed";
    }
  }

  if (ok) {
    const bool logs_same = slurp(dir + "/r1/train_log.tsv") == slurp(dir + "/r2/train_log.tsv");
    const bool ckpt_same = slurp(dir + "/r1/model.ckpt") == slurp(dir + "/r2/model.ckpt");
    const bool seed_matters = slurp(dir + "/r1/train_log.tsv") != slurp(dir + "/r3/train_log.tsv");
    ok = logs_same && ckpt_same && seed_matters && !slurp(dir + "/r1/model.ckpt").empty();
    why = fmt("same seed byte-identical: %s, different seed differs: %s, %.0fs",
              logs_same && ckpt_same ? "yes" : "no", seed_matters ? "yes" : "no",
              seconds_since(t0));
  }
  std::filesystem::remove_all(dir);
  verdict(8, "command-line training is byte-reproducible", ok, why);
}

}  // namespace

int main() {
  criterion_gradients();
  criterion_boundaries();
  criterion_xu_identity();
  criterion_metrics();
  criterion_closure();

  const auto spec = bench_spec();
  const auto sd = generate(spec);
  std::vector<ClassIndex> all(spec.n_classes);
  for (size_t c = 0; c < all.size(); ++c) all[c] = static_cast<ClassIndex>(c);
  const auto cs = compile_constraints(sd.graph, all);

  std::vector<TrainedSeed> seeds;
  criterion_training(seeds, sd, cs);
  criterion_semi_supervised(seeds, sd, spec, cs);
  criterion_cli_determinism();

  if (g_failures == 0) {
    std::printf("acceptance: all 8 criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  }
  return g_failures;
}
