#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ontoloss/errors.hpp"
#include "ontoloss/losses.hpp"
#include "ontoloss/model.hpp"
#include "ontoloss/rng.hpp"
#include "ontoloss/trainer.hpp"
#include "oracles.hpp"

using namespace ontoloss;

namespace {

std::string tmp_dir() {
  static int counter = 0;
  auto d = std::filesystem::temp_directory_path() /
           ("otl_trainer_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(d);
  return d.string();
}

ConstraintSet toy_cs() {
  ConstraintSet cs;
  cs.universe_size = 3;
  cs.class_names = {"A", "B", "C"};
  cs.implications = {{0, 1}};  // A entails B
  cs.disjointness = {{0, 2}};  // A, C disjoint
  return cs;
}

// two separable clusters honoring the constraints: {A,B} near (+1,+1),
// {B,C} near (-1,-1)
Dataset toy_data(size_t n, uint64_t seed, double unlabelled_fraction = 0.0) {
  RandomStream rng(seed);
  Dataset d;
  d.features = Matrix(n, 2);
  d.labels = LabelMatrix(n, 3);
  for (size_t r = 0; r < n; ++r) {
    const bool first = r % 2 == 0;
    d.features.at(r, 0) = (first ? 1.0 : -1.0) + 0.3 * rng.normal();
    d.features.at(r, 1) = (first ? 1.0 : -1.0) + 0.3 * rng.normal();
    if (rng.uniform() < unlabelled_fraction) {
      d.labels.labelled[r] = 0;
    } else {
      d.labels.at(r, 0) = first ? 1 : 0;
      d.labels.at(r, 1) = 1;
      d.labels.at(r, 2) = first ? 0 : 1;
    }
  }
  return d;
}

TrainConfig quick_config() {
  TrainConfig tc;
  tc.max_epochs = 6;
  tc.batch_size = 16;
  tc.hidden_dims = {8};
  tc.seed = 5;
  return tc;
}

bool models_identical(const ModelState& a, const ModelState& b) {
  if (a.dims != b.dims) return false;
  for (size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l].values != b.weights[l].values) return false;
    if (a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("training runs every epoch and tracks the best checkpoint") {
  const auto cs = toy_cs();
  const auto train_set = toy_data(64, 1);
  const auto val_set = toy_data(16, 2);
  auto tc = quick_config();
  tc.max_epochs = 10;

  const auto res = train(train_set, val_set, cs, tc);
  CHECK(!res.diverged);
  REQUIRE(res.log.size() == 10);
  for (size_t e = 0; e < res.log.size(); ++e) {
    CHECK(res.log[e].epoch == e);
    CHECK(std::isfinite(res.log[e].total));
  }

  double best = -1.0;
  size_t best_epoch = 0;
  for (const auto& rec : res.log) {
    if (rec.val_micro_f1 > best) {
      best = rec.val_micro_f1;
      best_epoch = rec.epoch;
    }
  }
  CHECK(res.best_val_f1 == best);
  CHECK(res.best_epoch == best_epoch);  // earliest epoch on ties
}

TEST_CASE("identical seeds give bitwise identical runs") {
  const auto cs = toy_cs();
  const auto train_set = toy_data(64, 1);
  const auto val_set = toy_data(16, 2);
  const auto tc = quick_config();

  const auto r1 = train(train_set, val_set, cs, tc);
  const auto r2 = train(train_set, val_set, cs, tc);

  REQUIRE(r1.log.size() == r2.log.size());
  for (size_t e = 0; e < r1.log.size(); ++e) {
    CHECK(r1.log[e].base == r2.log[e].base);
    CHECK(r1.log[e].impl_term == r2.log[e].impl_term);
    CHECK(r1.log[e].disj_term == r2.log[e].disj_term);
    CHECK(r1.log[e].total == r2.log[e].total);
    CHECK(r1.log[e].val_micro_f1 == r2.log[e].val_micro_f1);
  }
  CHECK(models_identical(r1.model, r2.model));

  auto tc2 = tc;
  tc2.seed = 99;
  const auto r3 = train(train_set, val_set, cs, tc2);
  CHECK(!models_identical(r1.model, r3.model));
}

TEST_CASE("first-epoch log equals an independent loss evaluation") {
  const auto cs = toy_cs();
  const auto train_set = toy_data(32, 7);
  const auto val_set = toy_data(8, 8);

  TrainConfig tc;
  tc.max_epochs = 1;
  tc.batch_size = 32;  // single batch: sums reflect the initial model
  tc.hidden_dims = {4};
  tc.seed = 21;

  const auto res = train(train_set, val_set, cs, tc);
  REQUIRE(res.log.size() == 1);

  // replay the initialization path
  RandomStream rng(tc.seed);
  const auto m0 = ModelState::init({2, 4, 3}, rng);

  LossConfig lc = tc.loss;
  lc.class_counts = {0.0, 0.0, 0.0};
  for (size_t r = 0; r < train_set.size(); ++r) {
    for (size_t c = 0; c < 3; ++c) {
      if (train_set.labels.labelled[r]) {
        lc.class_counts[c] += train_set.labels.at(r, c);
      }
    }
  }
  const LossEvaluator eval(lc, cs);

  double base = 0.0, impl = 0.0, disj = 0.0, total = 0.0;
  for (size_t r = 0; r < train_set.size(); ++r) {
    const auto yhat = predict(m0, train_set.features.row(r));
    const auto bd = eval.loss(train_set.label_row(r), yhat);
    base += bd.base;
    impl += bd.impl_term;
    disj += bd.disj_term;
    total += bd.total;
  }
  const double inv_n = 1.0 / static_cast<double>(train_set.size());

  CHECK(res.log[0].base == doctest::Approx(base * inv_n).epsilon(1e-12));
  CHECK(res.log[0].impl_term ==
        doctest::Approx(tc.loss.w_impl * (impl * inv_n)).epsilon(1e-12));
  CHECK(res.log[0].disj_term ==
        doctest::Approx(tc.loss.w_disj * (disj * inv_n)).epsilon(1e-12));
  CHECK(res.log[0].total == doctest::Approx(total * inv_n).epsilon(1e-12));
}

TEST_CASE("zero constraint weights match an empty constraint set bitwise") {
  const auto train_set = toy_data(64, 1);
  const auto val_set = toy_data(16, 2);

  auto tc = quick_config();
  tc.loss.w_impl = 0.0;
  tc.loss.w_disj = 0.0;

  ConstraintSet empty;
  empty.universe_size = 3;
  empty.class_names = {"A", "B", "C"};

  const auto with_pairs = train(train_set, val_set, toy_cs(), tc);
  const auto without = train(train_set, val_set, empty, tc);

  CHECK(models_identical(with_pairs.model, without.model));
  REQUIRE(with_pairs.log.size() == without.log.size());
  for (size_t e = 0; e < with_pairs.log.size(); ++e) {
    CHECK(with_pairs.log[e].total == without.log[e].total);
    CHECK(with_pairs.log[e].impl_term == 0.0);
    CHECK(with_pairs.log[e].disj_term == 0.0);
  }
}

TEST_CASE("unlabelled rows require the semi-supervised switch") {
  const auto cs = toy_cs();
  const auto mixed = toy_data(64, 3, 0.4);
  const auto val_set = toy_data(16, 2);

  auto tc = quick_config();
  CHECK_THROWS_AS(train(mixed, val_set, cs, tc), DomainError);

  tc.semi_supervised = true;
  const auto res = train(mixed, val_set, cs, tc);
  CHECK(!res.diverged);
  CHECK(res.log.size() == tc.max_epochs);
}

TEST_CASE("training aborts on divergence and keeps the last finite state") {
  const auto cs = toy_cs();
  const auto train_set = toy_data(64, 1);
  const auto val_set = toy_data(16, 2);

  auto tc = quick_config();
  tc.max_epochs = 50;
  tc.learning_rate = 1e300;

  const auto res = train(train_set, val_set, cs, tc);
  CHECK(res.diverged);
  CHECK(res.log.size() < 50);  // aborted before the epoch budget
  for (const auto& m : res.model.weights) {
    for (double v : m.values) CHECK(std::isfinite(v));
  }
  CHECK(res.best_epoch == (res.log.empty() ? 0 : res.log.back().epoch));
}

TEST_CASE("input validation") {
  const auto cs = toy_cs();
  const auto train_set = toy_data(16, 1);
  const auto val_set = toy_data(8, 2);
  const auto tc = quick_config();

  SUBCASE("empty training split") {
    Dataset empty;
    empty.features = Matrix(0, 2);
    empty.labels = LabelMatrix(0, 3);
    CHECK_THROWS_AS(train(empty, val_set, cs, tc), DomainError);
  }

  SUBCASE("label width must match the universe") {
    auto narrow = train_set;
    narrow.labels = LabelMatrix(16, 2);
    CHECK_THROWS_AS(train(narrow, val_set, cs, tc), DomainError);
  }

  SUBCASE("feature dims must agree between splits") {
    auto wide = val_set;
    wide.features = Matrix(8, 5);
    CHECK_THROWS_AS(train(train_set, wide, cs, tc), DomainError);
  }

  SUBCASE("batch size and epochs must be positive") {
    auto bad = tc;
    bad.batch_size = 0;
    CHECK_THROWS_AS(train(train_set, val_set, cs, bad), DomainError);
  }

  SUBCASE("validation needs at least one labelled row") {
    auto blind = val_set;
    std::fill(blind.labels.labelled.begin(), blind.labels.labelled.end(), 0);
    CHECK_THROWS_AS(train(train_set, blind, cs, tc), DomainError);
  }
}

TEST_CASE("checkpoints round-trip bitwise") {
  const auto cs = toy_cs();
  const auto res = train(toy_data(64, 1), toy_data(16, 2), cs, quick_config());

  Checkpoint ck;
  ck.model = res.model;
  ck.optimizer = res.optimizer;
  ck.epoch = res.best_epoch;
  ck.seed = 5;
  ck.val_micro_f1 = res.best_val_f1;
  ck.diverged = false;
  ck.data_path = "some/data file.tsv";  // spaces must survive
  ck.split_ratios[0] = 340.0;
  ck.split_ratios[1] = 9.0;
  ck.split_ratios[2] = 51.0;
  ck.split_seed = 17;

  const auto path = tmp_dir() + "/model.ckpt";
  save_checkpoint(ck, path);
  const auto back = load_checkpoint(path);

  CHECK(models_identical(back.model, ck.model));
  CHECK(back.optimizer.step_count == ck.optimizer.step_count);
  CHECK(back.optimizer.learning_rate == ck.optimizer.learning_rate);
  for (size_t l = 0; l < ck.optimizer.m_weights.size(); ++l) {
    CHECK(back.optimizer.m_weights[l].values == ck.optimizer.m_weights[l].values);
    CHECK(back.optimizer.u_weights[l].values == ck.optimizer.u_weights[l].values);
  }
  CHECK(back.epoch == ck.epoch);
  CHECK(back.seed == ck.seed);
  CHECK(back.val_micro_f1 == ck.val_micro_f1);
  CHECK(back.diverged == ck.diverged);
  CHECK(back.data_path == ck.data_path);
  CHECK(back.split_ratios[0] == ck.split_ratios[0]);
  CHECK(back.split_ratios[1] == ck.split_ratios[1]);
  CHECK(back.split_ratios[2] == ck.split_ratios[2]);
  CHECK(back.split_seed == ck.split_seed);

  SUBCASE("version line is enforced") {
    std::ofstream bad(path);
    bad << "ontoloss-checkpoint v9\n";
    bad.close();
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
  }
}

TEST_CASE("train log serializes with full precision") {
  std::vector<EpochRecord> log(2);
  log[0] = {0, 0.1 + 0.2, 1.0 / 3.0, 2.0 / 7.0, 0.123456789012345678, 0.5};
  log[1] = {1, 1e-17, 3.0, 4.0, 5.0, 1.0};

  const auto path = tmp_dir() + "/train_log.tsv";
  write_train_log(log, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "epoch\tbase\timpl_term\tdisj_term\ttotal\tval_micro_f1");

  for (const auto& rec : log) {
    size_t epoch = 99;
    double base = 0, impl = 0, disj = 0, total = 0, f1 = 0;
    in >> epoch >> base >> impl >> disj >> total >> f1;
    CHECK(epoch == rec.epoch);
    CHECK(base == rec.base);  // %.17g round-trips exactly
    CHECK(impl == rec.impl_term);
    CHECK(disj == rec.disj_term);
    CHECK(total == rec.total);
    CHECK(f1 == rec.val_micro_f1);
  }
}
