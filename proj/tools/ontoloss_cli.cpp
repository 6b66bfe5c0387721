// ontoloss command line front end. Talks to the library exclusively through
// the C API so it doubles as a smoke test of the shared-library surface.
// Exit codes mirror otl_status.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "ontoloss.h"

namespace {

int report_failure(otl_status s) {
  std::fprintf(stderr, "error: %s\n", otl_last_error());
  return static_cast<int>(s);
}

const char* rate_str(double v, char* buf, size_t n) {
  if (std::isnan(v)) return "undefined";
  std::snprintf(buf, n, "%.6g", v);
  return buf;
}

void print_report(const otl_eval_report& r) {
  char buf[64];
  std::printf("threshold\t%.6g\n", r.threshold);
  std::printf("t_max\t%s\n", rate_str(r.t_max, buf, sizeof(buf)));
  std::printf("tp_impl\t%" PRIu64 "\n", r.tp_impl);
  std::printf("fn_impl\t%" PRIu64 "\n", r.fn_impl);
  std::printf("tp_disj\t%" PRIu64 "\n", r.tp_disj);
  std::printf("fn_disj\t%" PRIu64 "\n", r.fn_disj);
  std::printf("fnr_impl\t%s\n", rate_str(r.fnr_impl, buf, sizeof(buf)));
  std::printf("fnr_disj\t%s\n", rate_str(r.fnr_disj, buf, sizeof(buf)));
  std::printf("micro_f1\t%.6g\n", r.micro_f1);
  std::printf("macro_f1\t%.6g\n", r.macro_f1);
  std::printf("micro_auc\t%s\n", rate_str(r.micro_auc, buf, sizeof(buf)));
  std::printf("macro_auc\t%s\n", rate_str(r.macro_auc, buf, sizeof(buf)));
}

struct CompileArgs {
  std::string edges, disjoint, annotated, out;
  uint32_t min_annotated = 1;
  bool no_count_self = false;
};

int cmd_compile(const CompileArgs& a) {
  otl_ontology* g = nullptr;
  otl_status s = otl_ontology_load(a.edges.c_str(),
                                   a.disjoint.empty() ? nullptr : a.disjoint.c_str(),
                                   a.annotated.empty() ? nullptr : a.annotated.c_str(),
                                   &g);
  if (s != OTL_OK) return report_failure(s);

  otl_constraints* cs = nullptr;
  s = otl_constraints_compile(g, a.min_annotated, a.no_count_self ? 0 : 1, &cs);
  otl_ontology_free(g);
  if (s != OTL_OK) return report_failure(s);

  s = otl_constraints_save(cs, a.out.c_str());
  if (s == OTL_OK) {
    std::printf("%zu labels, %zu implications, %zu disjointness\n",
                otl_constraints_num_labels(cs), otl_constraints_num_implications(cs),
                otl_constraints_num_disjointness(cs));
  }
  otl_constraints_free(cs);
  return s == OTL_OK ? 0 : report_failure(s);
}

struct GenerateArgs {
  otl_synth_spec spec;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const otl_status s = otl_generate(&a.spec, a.out.c_str());
  if (s != OTL_OK) return report_failure(s);
  std::printf("wrote ontology, dataset and fingerprints under %s\n", a.out.c_str());
  return 0;
}

struct SubsampleArgs {
  std::string fingerprints, out;
  uint32_t group_size = 20, keep = 5;
  uint64_t seed = 0;
};

int cmd_subsample(const SubsampleArgs& a) {
  const otl_status s = otl_subsample(a.fingerprints.c_str(), a.group_size, a.keep,
                                     a.seed, a.out.c_str());
  if (s != OTL_OK) return report_failure(s);
  std::printf("wrote selected indices to %s\n", a.out.c_str());
  return 0;
}

struct TrainArgs {
  std::string data, constraints, config, out;
  uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a) {
  otl_dataset* data = nullptr;
  otl_status s = otl_dataset_load(a.data.c_str(), &data);
  if (s != OTL_OK) return report_failure(s);

  otl_constraints* cs = nullptr;
  s = otl_constraints_load(a.constraints.c_str(), &cs);
  if (s != OTL_OK) {
    otl_dataset_free(data);
    return report_failure(s);
  }

  otl_config* cfg = nullptr;
  s = otl_config_load(a.config.empty() ? nullptr : a.config.c_str(), &cfg);
  if (s == OTL_OK) s = otl_train(data, cs, cfg, a.seed, a.out.c_str());

  otl_config_free(cfg);
  otl_constraints_free(cs);
  otl_dataset_free(data);
  if (s != OTL_OK) return report_failure(s);
  std::printf("wrote %s/model.ckpt and %s/train_log.tsv\n", a.out.c_str(), a.out.c_str());
  return 0;
}

struct EvaluateArgs {
  std::string model, data, constraints, split = "all", report;
  double threshold = 0.0;  // <= 0: optimum on the recorded train split
};

int cmd_evaluate(const EvaluateArgs& a) {
  otl_dataset* data = nullptr;
  otl_status s = otl_dataset_load(a.data.c_str(), &data);
  if (s != OTL_OK) return report_failure(s);

  otl_constraints* cs = nullptr;
  s = otl_constraints_load(a.constraints.c_str(), &cs);
  if (s != OTL_OK) {
    otl_dataset_free(data);
    return report_failure(s);
  }

  const otl_split_part part = a.split == "train" ? OTL_SPLIT_TRAIN
                              : a.split == "val" ? OTL_SPLIT_VAL
                              : a.split == "test" ? OTL_SPLIT_TEST
                                                  : OTL_SPLIT_ALL;
  otl_eval_report rep;
  s = otl_evaluate(a.model.c_str(), data, cs, a.threshold, part, &rep);
  otl_constraints_free(cs);
  otl_dataset_free(data);
  if (s != OTL_OK) return report_failure(s);

  print_report(rep);
  if (!a.report.empty()) {
    s = otl_report_save(&rep, a.report.c_str());
    if (s != OTL_OK) return report_failure(s);
  }
  return 0;
}

struct GradcheckArgs {
  std::string config;
  uint32_t trials = 100;
  uint64_t seed = 0;
};

int cmd_gradcheck(const GradcheckArgs& a) {
  otl_config* cfg = nullptr;
  otl_status s = otl_config_load(a.config.empty() ? nullptr : a.config.c_str(), &cfg);
  if (s != OTL_OK) return report_failure(s);

  otl_gradcheck_report r;
  s = otl_gradcheck(cfg, a.trials, a.seed, &r);
  otl_config_free(cfg);
  if (s != OTL_OK && s != OTL_ERR_GRADCHECK) return report_failure(s);

  std::printf("points checked: %" PRIu64 "\n", r.points_checked);
  std::printf("max relative error: %.3g (tolerance %.3g)\n", r.max_rel_error,
              r.tolerance);
  std::printf("boundary gradient at (1,0), epsilon 0: (%.17g, %.17g) %s\n",
              r.boundary_d_ya, r.boundary_d_yb, r.boundary_exact ? "exact" : "NOT EXACT");
  if (r.passed) {
    std::printf("gradcheck passed\n");
    return 0;
  }
  std::printf("gradcheck FAILED: %s\n", r.worst_location);
  return report_failure(OTL_ERR_GRADCHECK);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ontology-constrained multi-label training toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", otl_version());

  CompileArgs ca;
  auto* compile = app.add_subcommand(
      "compile-constraints", "compile an ontology into a closed constraint set");
  compile->add_option("--edges", ca.edges, "subsumption edges TSV (child, parent)")
      ->required();
  compile->add_option("--disjoint", ca.disjoint, "disjointness pairs TSV");
  compile->add_option("--annotated", ca.annotated,
                      "annotated class list (default: all classes)");
  compile->add_option("--min-annotated", ca.min_annotated,
                      "annotated-subclass threshold for label selection")
      ->capture_default_str();
  compile->add_flag("--no-count-self", ca.no_count_self,
                    "exclude a class's own annotation from its count");
  compile->add_option("--out", ca.out, "output constraint file")->required();

  GenerateArgs ga;
  otl_synth_spec_init(&ga.spec);
  auto* gen = app.add_subcommand("generate", "generate a synthetic benchmark");
  gen->add_option("--classes", ga.spec.n_classes, "ontology size")->capture_default_str();
  gen->add_option("--density", ga.spec.dag_density, "edge probability per ordered pair")
      ->capture_default_str();
  gen->add_option("--disjoint-axioms", ga.spec.n_disjoint_axioms,
                  "number of disjointness axioms")
      ->capture_default_str();
  gen->add_option("--samples", ga.spec.n_samples, "dataset size")->capture_default_str();
  gen->add_option("--feature-dim", ga.spec.feature_dim, "feature dimension")
      ->capture_default_str();
  gen->add_option("--label-noise", ga.spec.label_noise, "post-closure label flip rate")
      ->capture_default_str();
  gen->add_option("--feature-noise", ga.spec.feature_noise, "feature noise stddev")
      ->capture_default_str();
  gen->add_option("--seed", ga.spec.seed, "generator seed")->capture_default_str();
  gen->add_option("--unlabelled", ga.spec.n_unlabelled,
                  "shifted unlabelled rows appended to the dataset")
      ->capture_default_str();
  gen->add_option("--ood-test", ga.spec.n_ood_test,
                  "size of the shifted held-out test set (ood_test.tsv)")
      ->capture_default_str();
  gen->add_option("--ood-shift", ga.spec.ood_shift, "cluster displacement distance")
      ->capture_default_str();
  gen->add_option("--out", ga.out, "output directory")->required();

  SubsampleArgs sa;
  auto* sub = app.add_subcommand("subsample",
                                 "diversity-subsample a fingerprint pool");
  sub->add_option("--fingerprints", sa.fingerprints, "fingerprint hex file")->required();
  sub->add_option("--group-size", sa.group_size, "shuffled group size")
      ->capture_default_str();
  sub->add_option("--keep", sa.keep, "fingerprints kept per group")->capture_default_str();
  sub->add_option("--seed", sa.seed, "shuffle seed")->capture_default_str();
  sub->add_option("--out", sa.out, "output index file")->required();

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "train the reference MLP");
  tr->add_option("--data", ta.data, "dataset TSV")->required();
  tr->add_option("--constraints", ta.constraints, "compiled constraint file")->required();
  tr->add_option("--config", ta.config, "training config (default settings if omitted)");
  tr->add_option("--seed", ta.seed, "split/init/shuffle seed")->capture_default_str();
  tr->add_option("--out", ta.out, "output directory for model.ckpt and train_log.tsv")
      ->required();

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "evaluate a checkpoint");
  ev->add_option("--model", ea.model, "checkpoint file")->required();
  ev->add_option("--data", ea.data, "dataset TSV")->required();
  ev->add_option("--constraints", ea.constraints, "compiled constraint file")->required();
  ev->add_option("--threshold", ea.threshold,
                 "decision threshold in (0,1); <= 0 picks the micro-F1 optimum "
                 "on the recorded train split")
      ->capture_default_str();
  ev->add_option("--split", ea.split, "slice of --data to evaluate")
      ->check(CLI::IsMember({"all", "train", "val", "test"}))
      ->capture_default_str();
  ev->add_option("--report", ea.report, "also write the report to this file");

  GradcheckArgs gca;
  auto* gc = app.add_subcommand("gradcheck",
                                "finite-difference audit of the loss gradients");
  gc->add_option("--config", gca.config, "training config supplying the loss settings");
  gc->add_option("--trials", gca.trials, "points per loss variant")->capture_default_str();
  gc->add_option("--seed", gca.seed, "sampling seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (compile->parsed()) return cmd_compile(ca);
  if (gen->parsed()) return cmd_generate(ga);
  if (sub->parsed()) return cmd_subsample(sa);
  if (tr->parsed()) return cmd_train(ta);
  if (ev->parsed()) return cmd_evaluate(ea);
  if (gc->parsed()) return cmd_gradcheck(gca);
  return 0;
}
