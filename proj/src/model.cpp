#include "ontoloss/model.hpp"

#include <algorithm>
#include <cmath>

#include "ontoloss/errors.hpp"

namespace ontoloss {

namespace {

// stable sigmoid, clamped strictly inside (0,1); in saturation the plain
// formula rounds to 1.0 in double precision, which the losses must never see
double sigmoid(double z) {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  return std::clamp(s, 1e-12, 1.0 - 1e-12);
}

// out = W x + b, W is (rows x cols) row-major
void affine(const Matrix& w, const std::vector<double>& b, std::span<const double> x,
            std::vector<double>& out) {
  out.resize(w.rows);
  for (size_t r = 0; r < w.rows; ++r) {
    const double* wr = w.values.data() + r * w.cols;
    double acc = b[r];
    for (size_t c = 0; c < w.cols; ++c) acc += wr[c] * x[c];
    out[r] = acc;
  }
}

}  // namespace

ModelState ModelState::init(std::vector<size_t> dims, RandomStream& rng) {
  if (dims.size() < 2) throw DomainError("model needs at least input and output dims");
  for (size_t d : dims) {
    if (d == 0) throw DomainError("zero layer width");
  }
  ModelState m;
  m.dims = std::move(dims);
  for (size_t l = 0; l + 1 < m.dims.size(); ++l) {
    const size_t fan_in = m.dims[l];
    const size_t fan_out = m.dims[l + 1];
    const bool output_layer = l + 2 == m.dims.size();
    // He scaling under the rectifier, plain 1/sqrt(fan_in) into the sigmoid
    const double scale = output_layer ? 1.0 / std::sqrt(static_cast<double>(fan_in))
                                      : std::sqrt(2.0 / static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    for (double& v : w.values) v = scale * rng.normal();
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(fan_out, 0.0);
  }
  return m;
}

std::span<const double> forward_cached(const ModelState& m, std::span<const double> x,
                                       ForwardCache& cache) {
  if (x.size() != m.input_dim()) throw DomainError("feature vector size mismatch");
  const size_t L = m.num_layers();
  cache.pre.resize(L);
  cache.act.resize(L);

  std::span<const double> cur = x;
  for (size_t l = 0; l < L; ++l) {
    affine(m.weights[l], m.biases[l], cur, cache.pre[l]);
    auto& act = cache.act[l];
    act.resize(cache.pre[l].size());
    if (l + 1 == L) {
      for (size_t i = 0; i < act.size(); ++i) act[i] = sigmoid(cache.pre[l][i]);
    } else {
      for (size_t i = 0; i < act.size(); ++i) act[i] = std::max(cache.pre[l][i], 0.0);
    }
    cur = act;
  }
  return cache.act.back();
}

std::vector<double> predict(const ModelState& m, std::span<const double> x) {
  ForwardCache cache;
  auto out = forward_cached(m, x, cache);
  return {out.begin(), out.end()};
}

Matrix predict_all(const ModelState& m, const Dataset& data) {
  if (data.feature_dim() != m.input_dim()) {
    throw DomainError("dataset feature_dim does not match the model input");
  }
  Matrix out(data.size(), m.output_dim());
  ForwardCache cache;
  for (size_t r = 0; r < data.size(); ++r) {
    auto y = forward_cached(m, data.features.row(r), cache);
    std::copy(y.begin(), y.end(), out.row(r).begin());
  }
  return out;
}

Gradients::Gradients(const ModelState& m) {
  for (size_t l = 0; l < m.num_layers(); ++l) {
    weights.emplace_back(m.weights[l].rows, m.weights[l].cols);
    biases.emplace_back(m.biases[l].size(), 0.0);
  }
}

void Gradients::zero() {
  for (auto& w : weights) std::fill(w.values.begin(), w.values.end(), 0.0);
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

void Gradients::scale(double s) {
  for (auto& w : weights) {
    for (double& v : w.values) v *= s;
  }
  for (auto& b : biases) {
    for (double& v : b) v *= s;
  }
}

void backward(const ModelState& m, const ForwardCache& cache,
              std::span<const double> x, std::span<const double> d_yhat,
              Gradients& grads) {
  const size_t L = m.num_layers();
  if (d_yhat.size() != m.output_dim()) throw DomainError("output gradient size mismatch");

  // delta = dL/d(pre-activation) of the current layer, built from the top
  std::vector<double> delta(d_yhat.size());
  const auto& yhat = cache.act[L - 1];
  for (size_t i = 0; i < delta.size(); ++i) {
    delta[i] = d_yhat[i] * yhat[i] * (1.0 - yhat[i]);  // sigmoid'
  }

  for (size_t l = L; l-- > 0;) {
    const std::span<const double> input = l == 0 ? x : std::span<const double>(cache.act[l - 1]);
    auto& gw = grads.weights[l];
    auto& gb = grads.biases[l];
    for (size_t r = 0; r < gw.rows; ++r) {
      const double d = delta[r];
      gb[r] += d;
      double* row = gw.values.data() + r * gw.cols;
      for (size_t c = 0; c < gw.cols; ++c) row[c] += d * input[c];
    }
    if (l == 0) break;

    // push delta through W and the rectifier below
    std::vector<double> next(m.weights[l].cols, 0.0);
    for (size_t r = 0; r < m.weights[l].rows; ++r) {
      const double d = delta[r];
      const double* row = m.weights[l].values.data() + r * m.weights[l].cols;
      for (size_t c = 0; c < next.size(); ++c) next[c] += d * row[c];
    }
    for (size_t c = 0; c < next.size(); ++c) {
      if (cache.pre[l - 1][c] <= 0.0) next[c] = 0.0;
    }
    delta = std::move(next);
  }
}

LossBreakdown sample_gradients(const ModelState& m, const LossEvaluator& eval,
                               std::span<const double> x, const LabelVector& y,
                               ForwardCache& cache, std::vector<double>& yhat_grad,
                               Gradients& grads) {
  const auto yhat = forward_cached(m, x, cache);
  for (double v : yhat) {
    // finite but huge parameters can overflow the forward pass; flag it as
    // divergence before the loss evaluator rejects the NaN as a domain error
    if (!std::isfinite(v)) {
      throw DivergenceError("non-finite prediction in the forward pass", -1);
    }
  }
  yhat_grad.resize(yhat.size());
  const auto breakdown = eval.loss_and_grad(y, yhat, yhat_grad);
  backward(m, cache, x, yhat_grad, grads);
  return breakdown;
}

AdamaxState::AdamaxState(const ModelState& model, double lr) : learning_rate(lr) {
  for (size_t l = 0; l < model.num_layers(); ++l) {
    m_weights.emplace_back(model.weights[l].rows, model.weights[l].cols);
    u_weights.emplace_back(model.weights[l].rows, model.weights[l].cols);
    m_biases.emplace_back(model.biases[l].size(), 0.0);
    u_biases.emplace_back(model.biases[l].size(), 0.0);
  }
}

namespace {

void adamax_update(std::span<double> p, std::span<const double> g, std::span<double> m,
                   std::span<double> u, const AdamaxState& s, double bias_fix) {
  for (size_t i = 0; i < p.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    u[i] = std::max(s.beta2 * u[i], std::abs(g[i]));
    p[i] -= (s.learning_rate / bias_fix) * m[i] / (u[i] + s.epsilon);
  }
}

}  // namespace

void adamax_step(AdamaxState& opt, ModelState& model, const Gradients& grads) {
  if (opt.m_weights.size() != model.num_layers()) {
    throw DomainError("optimizer state does not match the model");
  }
  ++opt.step_count;
  const double bias_fix = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
  for (size_t l = 0; l < model.num_layers(); ++l) {
    adamax_update(model.weights[l].values, grads.weights[l].values,
                  opt.m_weights[l].values, opt.u_weights[l].values, opt, bias_fix);
    adamax_update(model.biases[l], grads.biases[l], opt.m_biases[l], opt.u_biases[l],
                  opt, bias_fix);
  }
}

}  // namespace ontoloss
