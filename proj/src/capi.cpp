#include "ontoloss.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ontoloss/config.hpp"
#include "ontoloss/datagen.hpp"
#include "ontoloss/dataset.hpp"
#include "ontoloss/errors.hpp"
#include "ontoloss/gradcheck.hpp"
#include "ontoloss/metrics.hpp"
#include "ontoloss/model.hpp"
#include "ontoloss/ontology.hpp"
#include "ontoloss/trainer.hpp"
#include "text_io.hpp"

// handle definitions; the header only forward-declares these
struct otl_ontology {
  ontoloss::OntologyGraph graph;
};
struct otl_constraints {
  ontoloss::ConstraintSet cs;
};
struct otl_dataset {
  ontoloss::Dataset data;
};
struct otl_config {
  ontoloss::TrainConfig tc;
};
struct otl_model {
  ontoloss::ModelState model;
};

namespace {

namespace fs = std::filesystem;
using namespace ontoloss;

thread_local std::string t_last_error;

otl_status fail(otl_status s, std::string msg) {
  t_last_error = std::move(msg);
  return s;
}

// ParseError is an IoError and Cycle/InconsistentAxioms are DomainErrors, so
// two catch arms cover the whole taxonomy
template <typename Fn>
otl_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    return fail(OTL_ERR_IO, e.what());
  } catch (const DivergenceError& e) {
    return fail(OTL_ERR_DIVERGED, e.what());
  } catch (const std::exception& e) {
    return fail(OTL_ERR_DOMAIN, e.what());
  }
}

std::string cstr(const char* s) { return s ? std::string(s) : std::string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// rows [begin, end) of src appended to dst; as_unlabelled zeroes the bits and
// clears the flag
void append_rows(Dataset& dst, const Dataset& src, size_t begin, size_t end,
                 bool as_unlabelled) {
  for (size_t r = begin; r < end; ++r) {
    const auto f = src.features.row(r);
    dst.features.values.insert(dst.features.values.end(), f.begin(), f.end());
    ++dst.features.rows;
    if (as_unlabelled) {
      dst.labels.values.insert(dst.labels.values.end(), src.labels.cols, 0);
      dst.labels.labelled.push_back(0);
    } else {
      const auto b = src.labels.row(r);
      dst.labels.values.insert(dst.labels.values.end(), b.begin(), b.end());
      dst.labels.labelled.push_back(src.labels.labelled[r]);
    }
    ++dst.labels.rows;
  }
}

}  // namespace

extern "C" {

const char* otl_last_error(void) { return t_last_error.c_str(); }

const char* otl_version(void) { return "0.1.0"; }

/* ---- ontology and compiled constraints ---------------------------------- */

otl_status otl_ontology_load(const char* edges_path, const char* disjoint_path,
                             const char* annotated_path, otl_ontology** out) {
  if (!edges_path || !out) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    auto g = std::make_unique<otl_ontology>();
    g->graph = parse_ontology(edges_path, cstr(disjoint_path), cstr(annotated_path));
    *out = g.release();
    return OTL_OK;
  });
}

void otl_ontology_free(otl_ontology* g) { delete g; }

size_t otl_ontology_num_classes(const otl_ontology* g) {
  return g ? g->graph.names.size() : 0;
}

otl_status otl_constraints_compile(const otl_ontology* g,
                                   uint32_t min_annotated_subclasses,
                                   int count_self, otl_constraints** out) {
  if (!g || !out) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    const auto labels =
        select_labels(g->graph, min_annotated_subclasses, count_self != 0);
    auto h = std::make_unique<otl_constraints>();
    h->cs = compile_constraints(g->graph, labels);
    *out = h.release();
    return OTL_OK;
  });
}

otl_status otl_constraints_load(const char* path, otl_constraints** out) {
  if (!path || !out) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    auto h = std::make_unique<otl_constraints>();
    h->cs = load_constraints(path);
    *out = h.release();
    return OTL_OK;
  });
}

otl_status otl_constraints_save(const otl_constraints* cs, const char* path) {
  if (!cs || !path) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    save_constraints(cs->cs, path);
    return OTL_OK;
  });
}

void otl_constraints_free(otl_constraints* cs) { delete cs; }

size_t otl_constraints_num_labels(const otl_constraints* cs) {
  return cs ? cs->cs.universe_size : 0;
}

size_t otl_constraints_num_implications(const otl_constraints* cs) {
  return cs ? cs->cs.implications.size() : 0;
}

size_t otl_constraints_num_disjointness(const otl_constraints* cs) {
  return cs ? cs->cs.disjointness.size() : 0;
}

/* ---- datasets ------------------------------------------------------------ */

otl_status otl_dataset_load(const char* path, otl_dataset** out) {
  if (!path || !out) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    auto h = std::make_unique<otl_dataset>();
    h->data = load_dataset(path);
    *out = h.release();
    return OTL_OK;
  });
}

otl_status otl_dataset_save(const otl_dataset* d, const char* path) {
  if (!d || !path) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    save_dataset(d->data, path);
    return OTL_OK;
  });
}

void otl_dataset_free(otl_dataset* d) { delete d; }

size_t otl_dataset_num_samples(const otl_dataset* d) { return d ? d->data.size() : 0; }

size_t otl_dataset_feature_dim(const otl_dataset* d) {
  return d ? d->data.feature_dim() : 0;
}

size_t otl_dataset_num_labels(const otl_dataset* d) {
  return d ? d->data.num_labels() : 0;
}

/* ---- synthetic generation ------------------------------------------------ */

void otl_synth_spec_init(otl_synth_spec* spec) {
  if (!spec) return;
  const SyntheticSpec d;
  spec->n_classes = static_cast<uint32_t>(d.n_classes);
  spec->dag_density = d.dag_density;
  spec->n_disjoint_axioms = static_cast<uint32_t>(d.n_disjoint_axioms);
  spec->n_samples = static_cast<uint32_t>(d.n_samples);
  spec->feature_dim = static_cast<uint32_t>(d.feature_dim);
  spec->label_noise = d.label_noise;
  spec->seed = d.seed;
  spec->feature_noise = d.feature_noise;
  spec->n_unlabelled = 0;
  spec->n_ood_test = 0;
  spec->ood_shift = 1.0;
}

otl_status otl_generate(const otl_synth_spec* spec, const char* out_dir) {
  if (!spec || !out_dir) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    SyntheticSpec s;
    s.n_classes = spec->n_classes;
    s.dag_density = spec->dag_density;
    s.n_disjoint_axioms = spec->n_disjoint_axioms;
    s.n_samples = spec->n_samples;
    s.feature_dim = spec->feature_dim;
    s.label_noise = spec->label_noise;
    s.seed = spec->seed;
    s.feature_noise = spec->feature_noise;

    const std::string dir(out_dir);
    ensure_dir(dir);

    auto sd = generate(s);
    save_ontology(sd.graph, join(dir, "edges.tsv"), join(dir, "disjoint.tsv"),
                  join(dir, "annotated.tsv"));
    save_fingerprints(sd.fingerprints, join(dir, "fingerprints.hex"));

    // the unlabelled pool and the held-out shifted test set come from one
    // batch so they share the displaced cluster centers
    const size_t n_shifted = size_t{spec->n_unlabelled} + size_t{spec->n_ood_test};
    Dataset full = sd.data;
    if (n_shifted > 0) {
      const Dataset shifted = generate_shifted(sd, s, n_shifted, spec->ood_shift,
                                               spec->seed + 1, true);
      append_rows(full, shifted, 0, spec->n_unlabelled, true);
      if (spec->n_ood_test > 0) {
        Dataset ood;
        ood.features = Matrix(0, shifted.feature_dim());
        ood.labels = LabelMatrix(0, shifted.num_labels());
        append_rows(ood, shifted, spec->n_unlabelled, n_shifted, false);
        save_dataset(ood, join(dir, "ood_test.tsv"));
      }
    }
    save_dataset(full, join(dir, "dataset.tsv"));
    return OTL_OK;
  });
}

otl_status otl_subsample(const char* fingerprints_path, uint32_t group_size,
                         uint32_t keep_per_group, uint64_t seed,
                         const char* out_path) {
  if (!fingerprints_path || !out_path) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    const auto fps = load_fingerprints(fingerprints_path);
    const auto kept = diversity_subsample(fps, group_size, keep_per_group, seed);
    auto out = detail::open_output(out_path);
    for (size_t idx : kept) out << idx << "\n";
    if (!out) throw IoError(std::string("write failed: ") + out_path);
    return OTL_OK;
  });
}

/* ---- configuration ------------------------------------------------------- */

otl_status otl_config_load(const char* path, otl_config** out) {
  if (!out) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    auto h = std::make_unique<otl_config>();
    h->tc = (path && *path) ? parse_train_config(path) : default_train_config();
    *out = h.release();
    return OTL_OK;
  });
}

void otl_config_free(otl_config* cfg) { delete cfg; }

/* ---- training and evaluation --------------------------------------------- */

otl_status otl_train(const otl_dataset* data, const otl_constraints* cs,
                     const otl_config* cfg, uint64_t seed, const char* out_dir) {
  if (!data || !cs || !cfg || !out_dir) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    TrainConfig tc = cfg->tc;
    tc.seed = seed;

    const std::string dir(out_dir);
    ensure_dir(dir);

    const SplitIndices si = split(data->data.size(), tc.split_train, tc.split_val,
                                  tc.split_test, seed);
    const Dataset train_set = select_rows(data->data, si.train);
    const Dataset val_set = select_rows(data->data, si.val);

    const TrainResult res = train(train_set, val_set, cs->cs, tc);

    Checkpoint ck;
    ck.model = res.model;
    ck.optimizer = res.optimizer;
    ck.epoch = res.best_epoch;
    ck.seed = seed;
    ck.val_micro_f1 = res.best_val_f1;
    ck.diverged = res.diverged;
    ck.data_path = data->data.source_path;
    ck.split_ratios[0] = tc.split_train;
    ck.split_ratios[1] = tc.split_val;
    ck.split_ratios[2] = tc.split_test;
    ck.split_seed = seed;

    save_checkpoint(ck, join(dir, "model.ckpt"));
    write_train_log(res.log, join(dir, "train_log.tsv"));

    if (res.diverged) {
      return fail(OTL_ERR_DIVERGED,
                  "training diverged; the last finite state was checkpointed");
    }
    return OTL_OK;
  });
}

otl_status otl_model_load(const char* path, otl_model** out) {
  if (!path || !out) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    auto h = std::make_unique<otl_model>();
    h->model = load_checkpoint(path).model;
    *out = h.release();
    return OTL_OK;
  });
}

void otl_model_free(otl_model* m) { delete m; }

size_t otl_model_input_dim(const otl_model* m) {
  return m ? m->model.input_dim() : 0;
}

size_t otl_model_output_dim(const otl_model* m) {
  return m ? m->model.output_dim() : 0;
}

otl_status otl_model_predict(const otl_model* m, const double* features,
                             size_t feature_dim, double* scores, size_t output_dim) {
  if (!m || !features || !scores) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    if (feature_dim != m->model.input_dim() || output_dim != m->model.output_dim()) {
      throw DomainError("predict buffer dims do not match the model");
    }
    const auto y = predict(m->model, {features, feature_dim});
    std::memcpy(scores, y.data(), y.size() * sizeof(double));
    return OTL_OK;
  });
}

otl_status otl_evaluate(const char* checkpoint_path, const otl_dataset* data,
                        const otl_constraints* cs, double threshold,
                        otl_split_part part, otl_eval_report* out) {
  if (!checkpoint_path || !data || !cs || !out) {
    return fail(OTL_ERR_DOMAIN, "null argument");
  }
  return guarded([&] {
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    if (ck.model.input_dim() != data->data.feature_dim()) {
      throw DomainError("dataset feature_dim does not match the model");
    }
    if (ck.model.output_dim() != cs->cs.universe_size ||
        data->data.num_labels() != cs->cs.universe_size) {
      throw DomainError("label universe mismatch between model, dataset and constraints");
    }
    if (threshold > 0.0 && threshold >= 1.0) {
      throw DomainError("threshold must lie in (0,1), or be <= 0 for auto");
    }

    Dataset sliced;
    const Dataset* eval_set = &data->data;
    if (part != OTL_SPLIT_ALL) {
      const SplitIndices si = split(data->data.size(), ck.split_ratios[0],
                                    ck.split_ratios[1], ck.split_ratios[2],
                                    ck.split_seed);
      const auto& idx = part == OTL_SPLIT_TRAIN ? si.train
                        : part == OTL_SPLIT_VAL ? si.val
                                                : si.test;
      sliced = select_rows(data->data, idx);
      eval_set = &sliced;
    }

    double t = threshold;
    double t_max = nan_value();
    if (threshold <= 0.0) {
      if (ck.data_path.empty()) {
        throw DomainError(
            "checkpoint records no dataset path; pass an explicit threshold");
      }
      const Dataset recorded = load_dataset(ck.data_path);
      const SplitIndices si = split(recorded.size(), ck.split_ratios[0],
                                    ck.split_ratios[1], ck.split_ratios[2],
                                    ck.split_seed);
      const Dataset train_part = select_rows(recorded, si.train);
      const Matrix train_scores = predict_all(ck.model, train_part);
      t_max = optimal_threshold(train_part.labels, train_scores);
      t = t_max;
    }

    const Matrix scores = predict_all(ck.model, *eval_set);
    const ViolationCounts vc = count_violations(cs->cs, scores, t);
    const F1Pair f1 = f1_scores(eval_set->labels, scores, t);
    const AucPair auc = roc_auc(eval_set->labels, scores);

    out->threshold = t;
    out->t_max = t_max;
    out->tp_impl = vc.tp_impl;
    out->fn_impl = vc.fn_impl;
    out->tp_disj = vc.tp_disj;
    out->fn_disj = vc.fn_disj;
    out->fnr_impl = fnr(vc, AxiomFamily::Implication).value_or(nan_value());
    out->fnr_disj = fnr(vc, AxiomFamily::Disjointness).value_or(nan_value());
    out->micro_f1 = f1.micro;
    out->macro_f1 = f1.macro;
    out->micro_auc = auc.micro;
    out->macro_auc = auc.macro;
    return OTL_OK;
  });
}

otl_status otl_report_save(const otl_eval_report* report, const char* path) {
  if (!report || !path) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    auto out = detail::open_output(path);
    const auto rate = [](double v) {
      return std::isnan(v) ? std::string("undefined") : detail::format_double(v);
    };
    out << "threshold\t" << detail::format_double(report->threshold) << "\n";
    out << "t_max\t" << detail::format_double(report->t_max) << "\n";
    out << "tp_impl\t" << report->tp_impl << "\n";
    out << "fn_impl\t" << report->fn_impl << "\n";
    out << "tp_disj\t" << report->tp_disj << "\n";
    out << "fn_disj\t" << report->fn_disj << "\n";
    out << "fnr_impl\t" << rate(report->fnr_impl) << "\n";
    out << "fnr_disj\t" << rate(report->fnr_disj) << "\n";
    out << "micro_f1\t" << detail::format_double(report->micro_f1) << "\n";
    out << "macro_f1\t" << detail::format_double(report->macro_f1) << "\n";
    out << "micro_auc\t" << rate(report->micro_auc) << "\n";
    out << "macro_auc\t" << rate(report->macro_auc) << "\n";
    if (!out) throw IoError(std::string("write failed: ") + path);
    return OTL_OK;
  });
}

/* ---- gradient audit ------------------------------------------------------ */

otl_status otl_gradcheck(const otl_config* cfg, uint32_t trials, uint64_t seed,
                         otl_gradcheck_report* out) {
  if (!out) return fail(OTL_ERR_DOMAIN, "null argument");
  return guarded([&] {
    const LossConfig lc = cfg ? cfg->tc.loss : LossConfig{};
    const GradCheckReport r = run_gradcheck(lc, trials, seed);

    out->passed = r.passed ? 1 : 0;
    out->points_checked = r.points_checked;
    out->max_rel_error = r.max_rel_error;
    out->tolerance = r.tolerance;
    out->boundary_d_ya = r.boundary_d_ya;
    out->boundary_d_yb = r.boundary_d_yb;
    out->boundary_exact = r.boundary_exact ? 1 : 0;
    std::snprintf(out->worst_location, sizeof(out->worst_location), "%s",
                  r.worst_location.c_str());

    if (!r.passed) {
      return fail(OTL_ERR_GRADCHECK,
                  r.boundary_exact
                      ? "gradient audit exceeded tolerance: " + r.worst_location
                      : "balanced boundary gradient is not exact");
    }
    return OTL_OK;
  });
}

} /* extern "C" */
