#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ontoloss/dataset.hpp"
#include "ontoloss/losses.hpp"
#include "ontoloss/model.hpp"
#include "ontoloss/ontology.hpp"

namespace ontoloss {

struct TrainConfig {
  size_t max_epochs = 200;
  size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::vector<size_t> hidden_dims = {64};
  uint64_t seed = 0;
  // unlabelled rows in the train split are rejected unless this is set;
  // they then contribute constraint terms only
  bool semi_supervised = false;
  LossConfig loss;
  // split ratios used by file-level entry points (train() itself takes
  // explicit splits); normalized, floor-rounded, remainder to train
  double split_train = 340.0;
  double split_val = 9.0;
  double split_test = 51.0;
};

struct EpochRecord {
  size_t epoch = 0;        // 0-based
  double base = 0.0;       // epoch means over train samples
  double impl_term = 0.0;  // weighted: w_impl * mean implication sum
  double disj_term = 0.0;  // weighted: w_disj * mean disjointness sum
  double total = 0.0;
  double val_micro_f1 = 0.0;
};

struct TrainResult {
  ModelState model;       // best epoch by validation micro-F1 (earliest on ties)
  AdamaxState optimizer;  // state as of the best epoch
  size_t best_epoch = 0;
  double best_val_f1 = 0.0;
  std::vector<EpochRecord> log;
  bool diverged = false;  // true: training aborted, model holds the last
                          // finite state instead of the best checkpoint
};

// Minibatch training with Adamax. Per-batch loss is the arithmetic mean of
// per-sample totals; sample order is reshuffled every epoch from the seeded
// stream; class weights are derived from labelled train rows. Runs every
// epoch to completion (no early stopping); validation micro-F1 at 0.5 picks
// the checkpoint. Non-finite loss or parameters abort with the last finite
// state (diverged = true). Single-threaded and bitwise deterministic for a
// fixed seed.
TrainResult train(const Dataset& train_set, const Dataset& val_set,
                  const ConstraintSet& cs, const TrainConfig& tc);

// Versioned text checkpoint: dims, row-major weights, optimizer state, epoch
// index, seed, plus the metadata evaluate needs to recover the train split.
struct Checkpoint {
  ModelState model;
  AdamaxState optimizer;
  size_t epoch = 0;
  uint64_t seed = 0;
  double val_micro_f1 = 0.0;
  bool diverged = false;
  std::string data_path;  // dataset the model was trained from
  double split_ratios[3] = {340.0, 9.0, 51.0};
  uint64_t split_seed = 0;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// TSV, one row per epoch, header included; numbers printed with %.17g so the
// file is bitwise reproducible for a fixed seed
void write_train_log(const std::vector<EpochRecord>& log, const std::string& path);

}  // namespace ontoloss
