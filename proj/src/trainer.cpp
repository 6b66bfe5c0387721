#include "ontoloss/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ontoloss/metrics.hpp"
#include "text_io.hpp"

namespace ontoloss {

namespace {

bool all_finite(const ModelState& m) {
  for (const auto& w : m.weights) {
    for (double v : w.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  for (const auto& b : m.biases) {
    for (double v : b) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::vector<double> positive_counts(const Dataset& train_set) {
  std::vector<double> counts(train_set.num_labels(), 0.0);
  for (size_t r = 0; r < train_set.size(); ++r) {
    if (!train_set.labels.labelled[r]) continue;
    const auto row = train_set.labels.row(r);
    for (size_t c = 0; c < counts.size(); ++c) counts[c] += row[c];
  }
  return counts;
}

}  // namespace

TrainResult train(const Dataset& train_set, const Dataset& val_set,
                  const ConstraintSet& cs, const TrainConfig& tc) {
  if (train_set.size() == 0) throw DomainError("empty training split");
  if (train_set.num_labels() != cs.universe_size ||
      val_set.num_labels() != cs.universe_size) {
    throw DomainError("label width does not match the constraint universe");
  }
  if (val_set.feature_dim() != train_set.feature_dim()) {
    throw DomainError("train/val feature_dim mismatch");
  }
  if (tc.batch_size == 0 || tc.max_epochs == 0) {
    throw DomainError("batch_size and max_epochs must be positive");
  }
  bool val_labelled = false;
  for (uint8_t f : val_set.labels.labelled) val_labelled |= f != 0;
  if (!val_labelled) throw DomainError("validation split has no labelled rows");
  if (!tc.semi_supervised) {
    for (uint8_t f : train_set.labels.labelled) {
      if (!f) {
        throw DomainError(
            "training split contains unlabelled rows; set semi_supervised");
      }
    }
  }

  // class weights always reflect the labelled part of this train split
  LossConfig loss_cfg = tc.loss;
  loss_cfg.class_counts = positive_counts(train_set);
  const LossEvaluator evaluator(loss_cfg, cs);

  RandomStream rng(tc.seed);
  std::vector<size_t> dims{train_set.feature_dim()};
  dims.insert(dims.end(), tc.hidden_dims.begin(), tc.hidden_dims.end());
  dims.push_back(cs.universe_size);
  ModelState model = ModelState::init(dims, rng);
  AdamaxState opt(model, tc.learning_rate);

  TrainResult result;
  result.model = model;  // placeholder until the first epoch reports
  result.optimizer = opt;
  result.best_val_f1 = -1.0;

  ModelState last_finite_model = model;
  AdamaxState last_finite_opt = opt;

  const size_t n = train_set.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  Gradients grads(model);
  ForwardCache cache;
  std::vector<double> yhat_grad;

  for (size_t epoch = 0; epoch < tc.max_epochs; ++epoch) {
    rng.shuffle(order);

    double sum_base = 0.0, sum_impl = 0.0, sum_disj = 0.0, sum_total = 0.0;
    bool finite = true;

    for (size_t start = 0; start < n && finite; start += tc.batch_size) {
      const size_t stop = std::min(start + tc.batch_size, n);
      grads.zero();
      for (size_t i = start; i < stop; ++i) {
        const size_t r = order[i];
        LossBreakdown bd;
        try {
          bd = sample_gradients(model, evaluator, train_set.features.row(r),
                                train_set.label_row(r), cache, yhat_grad, grads);
        } catch (const DivergenceError&) {
          finite = false;
          break;
        }
        sum_base += bd.base;
        sum_impl += bd.impl_term;
        sum_disj += bd.disj_term;
        sum_total += bd.total;
        if (!std::isfinite(bd.total)) {
          finite = false;
          break;
        }
      }
      if (!finite) break;
      grads.scale(1.0 / static_cast<double>(stop - start));
      adamax_step(opt, model, grads);
      if (!all_finite(model)) {
        finite = false;
        break;
      }
    }

    if (!finite) {
      result.diverged = true;
      result.model = last_finite_model;
      result.optimizer = last_finite_opt;
      // best_epoch reports the last epoch that ended finite
      result.best_epoch = result.log.empty() ? 0 : result.log.back().epoch;
      result.best_val_f1 =
          result.log.empty() ? 0.0 : result.log.back().val_micro_f1;
      return result;
    }

    const Matrix val_scores = predict_all(model, val_set);
    const double val_f1 = f1_scores(val_set.labels, val_scores, 0.5).micro;

    const double inv_n = 1.0 / static_cast<double>(n);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.base = sum_base * inv_n;
    rec.impl_term = tc.loss.w_impl * (sum_impl * inv_n);
    rec.disj_term = tc.loss.w_disj * (sum_disj * inv_n);
    rec.total = sum_total * inv_n;
    rec.val_micro_f1 = val_f1;
    result.log.push_back(rec);

    if (val_f1 > result.best_val_f1) {
      result.best_val_f1 = val_f1;
      result.best_epoch = epoch;
      result.model = model;
      result.optimizer = opt;
    }
    last_finite_model = model;
    last_finite_opt = opt;
  }

  return result;
}

void write_train_log(const std::vector<EpochRecord>& log, const std::string& path) {
  auto out = detail::open_output(path);
  out << "epoch\tbase\timpl_term\tdisj_term\ttotal\tval_micro_f1\n";
  for (const auto& r : log) {
    out << r.epoch << '\t' << detail::format_double(r.base) << '\t'
        << detail::format_double(r.impl_term) << '\t'
        << detail::format_double(r.disj_term) << '\t'
        << detail::format_double(r.total) << '\t'
        << detail::format_double(r.val_micro_f1) << '\n';
  }
  if (!out) throw IoError("write failed on " + path);
}

namespace {

void write_values(std::ofstream& out, const std::vector<double>& v) {
  for (size_t i = 0; i < v.size(); ++i) {
    out << (i ? " " : "") << detail::format_double(v[i]);
  }
  out << '\n';
}

std::vector<double> read_values(std::ifstream& in, size_t count, const std::string& path) {
  std::vector<double> v(count);
  for (size_t i = 0; i < count; ++i) {
    if (!(in >> v[i])) throw ParseError(path, 0, "truncated value block");
  }
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  auto out = detail::open_output(path);
  out << "ontoloss-checkpoint v1\n";
  out << "seed " << ck.seed << '\n';
  out << "split_seed " << ck.split_seed << '\n';
  out << "epoch " << ck.epoch << '\n';
  out << "val_micro_f1 " << detail::format_double(ck.val_micro_f1) << '\n';
  out << "diverged " << (ck.diverged ? 1 : 0) << '\n';
  out << "split_ratios " << detail::format_double(ck.split_ratios[0]) << ' '
      << detail::format_double(ck.split_ratios[1]) << ' '
      << detail::format_double(ck.split_ratios[2]) << '\n';
  out << "opt " << detail::format_double(ck.optimizer.learning_rate) << ' '
      << detail::format_double(ck.optimizer.beta1) << ' '
      << detail::format_double(ck.optimizer.beta2) << ' '
      << detail::format_double(ck.optimizer.epsilon) << ' '
      << ck.optimizer.step_count << '\n';
  out << "data_path " << ck.data_path << '\n';
  out << "dims " << ck.model.dims.size();
  for (size_t d : ck.model.dims) out << ' ' << d;
  out << '\n';
  for (size_t l = 0; l < ck.model.num_layers(); ++l) {
    write_values(out, ck.model.weights[l].values);
    write_values(out, ck.model.biases[l]);
    write_values(out, ck.optimizer.m_weights[l].values);
    write_values(out, ck.optimizer.u_weights[l].values);
    write_values(out, ck.optimizer.m_biases[l]);
    write_values(out, ck.optimizer.u_biases[l]);
  }
  if (!out) throw IoError("write failed on " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty checkpoint");
  detail::strip_trailing_cr(line);
  if (line != "ontoloss-checkpoint v1") {
    throw ParseError(path, 1, "unsupported checkpoint header '" + line + "'");
  }

  Checkpoint ck;
  std::string key;
  auto expect_key = [&](const char* want) {
    if (!(in >> key) || key != want) {
      throw ParseError(path, 0, std::string("expected '") + want + "' field");
    }
  };

  expect_key("seed");
  in >> ck.seed;
  expect_key("split_seed");
  in >> ck.split_seed;
  expect_key("epoch");
  in >> ck.epoch;
  expect_key("val_micro_f1");
  in >> ck.val_micro_f1;
  expect_key("diverged");
  int diverged = 0;
  in >> diverged;
  ck.diverged = diverged != 0;
  expect_key("split_ratios");
  in >> ck.split_ratios[0] >> ck.split_ratios[1] >> ck.split_ratios[2];
  expect_key("opt");
  in >> ck.optimizer.learning_rate >> ck.optimizer.beta1 >> ck.optimizer.beta2 >>
      ck.optimizer.epsilon >> ck.optimizer.step_count;
  if (!in) throw ParseError(path, 0, "malformed checkpoint scalars");

  expect_key("data_path");
  std::getline(in, line);  // rest of the data_path line (may be empty)
  detail::strip_trailing_cr(line);
  if (!line.empty() && line.front() == ' ') line.erase(0, 1);
  ck.data_path = line;

  expect_key("dims");
  size_t ndims = 0;
  in >> ndims;
  if (!in || ndims < 2 || ndims > 64) throw ParseError(path, 0, "bad dims header");
  ck.model.dims.resize(ndims);
  for (auto& d : ck.model.dims) {
    if (!(in >> d) || d == 0) throw ParseError(path, 0, "bad layer dim");
  }

  for (size_t l = 0; l + 1 < ndims; ++l) {
    const size_t rows = ck.model.dims[l + 1];
    const size_t cols = ck.model.dims[l];
    Matrix w(rows, cols);
    w.values = read_values(in, rows * cols, path);
    ck.model.weights.push_back(std::move(w));
    ck.model.biases.push_back(read_values(in, rows, path));
    Matrix mw(rows, cols), uw(rows, cols);
    mw.values = read_values(in, rows * cols, path);
    uw.values = read_values(in, rows * cols, path);
    ck.optimizer.m_weights.push_back(std::move(mw));
    ck.optimizer.u_weights.push_back(std::move(uw));
    ck.optimizer.m_biases.push_back(read_values(in, rows, path));
    ck.optimizer.u_biases.push_back(read_values(in, rows, path));
  }
  return ck;
}

}  // namespace ontoloss
