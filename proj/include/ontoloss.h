/* ontoloss C API: ontology-constrained multi-label training behind a stable
 * ABI. Handles are opaque; every fallible call returns an otl_status and
 * leaves a message readable through otl_last_error() on failure. Out-pointers
 * are written only on OTL_OK. Handles are freed with their otl_*_free
 * function; freeing NULL is a no-op. */

#ifndef ONTOLOSS_H
#define ONTOLOSS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ONTOLOSS_BUILD)
#define OTL_API __declspec(dllexport)
#else
#define OTL_API __declspec(dllimport)
#endif
#else
#define OTL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; nonzero values double as CLI exit codes. */
typedef enum otl_status {
  OTL_OK = 0,
  OTL_ERR_DOMAIN = 1,    /* invalid values, inconsistent axioms, bad config */
  OTL_ERR_IO = 2,        /* unreadable, unwritable or malformed files */
  OTL_ERR_DIVERGED = 3,  /* training hit a non-finite loss */
  OTL_ERR_GRADCHECK = 4, /* gradient audit exceeded tolerance */
} otl_status;

/* Message for the most recent failing call on this thread; never NULL. */
OTL_API const char* otl_last_error(void);

OTL_API const char* otl_version(void);

typedef struct otl_ontology otl_ontology;
typedef struct otl_constraints otl_constraints;
typedef struct otl_dataset otl_dataset;
typedef struct otl_config otl_config;
typedef struct otl_model otl_model;

/* ---- ontology and compiled constraints ---------------------------------- */

/* disjoint_path and annotated_path may be NULL or empty. Without an
 * annotation file every class counts as annotated. */
OTL_API otl_status otl_ontology_load(const char* edges_path, const char* disjoint_path,
                                     const char* annotated_path, otl_ontology** out);
OTL_API void otl_ontology_free(otl_ontology* g);
OTL_API size_t otl_ontology_num_classes(const otl_ontology* g);

/* Label selection plus transitive/disjointness closure; count_self nonzero
 * includes a class's own annotation in its subclass count. */
OTL_API otl_status otl_constraints_compile(const otl_ontology* g,
                                           uint32_t min_annotated_subclasses,
                                           int count_self, otl_constraints** out);
OTL_API otl_status otl_constraints_load(const char* path, otl_constraints** out);
OTL_API otl_status otl_constraints_save(const otl_constraints* cs, const char* path);
OTL_API void otl_constraints_free(otl_constraints* cs);
OTL_API size_t otl_constraints_num_labels(const otl_constraints* cs);
OTL_API size_t otl_constraints_num_implications(const otl_constraints* cs);
OTL_API size_t otl_constraints_num_disjointness(const otl_constraints* cs);

/* ---- datasets ------------------------------------------------------------ */

OTL_API otl_status otl_dataset_load(const char* path, otl_dataset** out);
OTL_API otl_status otl_dataset_save(const otl_dataset* d, const char* path);
OTL_API void otl_dataset_free(otl_dataset* d);
OTL_API size_t otl_dataset_num_samples(const otl_dataset* d);
OTL_API size_t otl_dataset_feature_dim(const otl_dataset* d);
OTL_API size_t otl_dataset_num_labels(const otl_dataset* d);

/* ---- synthetic generation ------------------------------------------------ */

typedef struct otl_synth_spec {
  uint32_t n_classes;
  double dag_density;
  uint32_t n_disjoint_axioms;
  uint32_t n_samples;
  uint32_t feature_dim;
  double label_noise;
  uint64_t seed;
  double feature_noise;
  /* extra unlabelled rows appended to the dataset, drawn from clusters
   * displaced by ood_shift; 0 disables */
  uint32_t n_unlabelled;
  /* size of a separate shifted test set written to ood_test.tsv; 0 skips */
  uint32_t n_ood_test;
  double ood_shift;
} otl_synth_spec;

/* Defaults matching the library's synthetic benchmark. */
OTL_API void otl_synth_spec_init(otl_synth_spec* spec);

/* Writes edges.tsv, disjoint.tsv, annotated.tsv, dataset.tsv and
 * fingerprints.hex (plus ood_test.tsv when requested) into out_dir, created
 * if missing. */
OTL_API otl_status otl_generate(const otl_synth_spec* spec, const char* out_dir);

/* Diversity subsampling over a fingerprint file; writes the selected
 * original-pool indices, one per line, ascending. */
OTL_API otl_status otl_subsample(const char* fingerprints_path, uint32_t group_size,
                                 uint32_t keep_per_group, uint64_t seed,
                                 const char* out_path);

/* ---- configuration ------------------------------------------------------- */

/* path NULL or empty loads the documented defaults */
OTL_API otl_status otl_config_load(const char* path, otl_config** out);
OTL_API void otl_config_free(otl_config* cfg);

/* ---- training and evaluation --------------------------------------------- */

/* Splits the dataset (seeded, ratios from the config), trains, and writes
 * model.ckpt and train_log.tsv into out_dir (created if missing). On
 * OTL_ERR_DIVERGED the last finite checkpoint and the log up to the abort are
 * still written. */
OTL_API otl_status otl_train(const otl_dataset* data, const otl_constraints* cs,
                             const otl_config* cfg, uint64_t seed,
                             const char* out_dir);

OTL_API otl_status otl_model_load(const char* path, otl_model** out);
OTL_API void otl_model_free(otl_model* m);
OTL_API size_t otl_model_input_dim(const otl_model* m);
OTL_API size_t otl_model_output_dim(const otl_model* m);

/* scores must hold output_dim doubles */
OTL_API otl_status otl_model_predict(const otl_model* m, const double* features,
                                     size_t feature_dim, double* scores,
                                     size_t output_dim);

/* FNRs and AUCs are NaN when undefined; t_max is NaN unless auto-threshold
 * was requested. */
typedef struct otl_eval_report {
  double threshold;
  double t_max;
  uint64_t tp_impl, fn_impl, tp_disj, fn_disj;
  double fnr_impl, fnr_disj;
  double micro_f1, macro_f1;
  double micro_auc, macro_auc;
} otl_eval_report;

typedef enum otl_split_part {
  OTL_SPLIT_ALL = 0,
  OTL_SPLIT_TRAIN = 1,
  OTL_SPLIT_VAL = 2,
  OTL_SPLIT_TEST = 3,
} otl_split_part;

/* threshold <= 0 requests auto mode: the optimal threshold is computed on the
 * train split recorded in the model checkpoint (its dataset is reloaded from
 * the recorded path). part slices the given dataset with the checkpoint's
 * recorded split before evaluating. */
OTL_API otl_status otl_evaluate(const char* checkpoint_path, const otl_dataset* data,
                                const otl_constraints* cs, double threshold,
                                otl_split_part part, otl_eval_report* out);

/* Line-delimited `key<TAB>value` report; undefined rates serialize as the
 * string "undefined". */
OTL_API otl_status otl_report_save(const otl_eval_report* report, const char* path);

/* ---- gradient audit ------------------------------------------------------ */

typedef struct otl_gradcheck_report {
  int passed;
  uint64_t points_checked;
  double max_rel_error;
  double tolerance;
  double boundary_d_ya, boundary_d_yb; /* balanced grad at (1,0), epsilon 0 */
  int boundary_exact;
  char worst_location[256];
} otl_gradcheck_report;

/* cfg NULL audits the default configuration. Returns OTL_ERR_GRADCHECK when
 * the audit fails; the report is filled either way. */
OTL_API otl_status otl_gradcheck(const otl_config* cfg, uint32_t trials,
                                 uint64_t seed, otl_gradcheck_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ONTOLOSS_H */
