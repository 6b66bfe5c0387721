#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ontoloss/dataset.hpp"
#include "ontoloss/losses.hpp"
#include "ontoloss/rng.hpp"

namespace ontoloss {

// Fully-connected net: rectified hidden layers, sigmoid outputs. dims runs
// input, hidden..., output. Weight matrices are (out x in), row-major.
struct ModelState {
  std::vector<size_t> dims;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  size_t input_dim() const { return dims.front(); }
  size_t output_dim() const { return dims.back(); }
  size_t num_layers() const { return weights.size(); }

  // He-style init on hidden layers, smaller scale on the output layer,
  // zero biases; deterministic given the stream
  static ModelState init(std::vector<size_t> dims, RandomStream& rng);
};

// Output scores are clamped to [1e-12, 1 - 1e-12]: strictly inside (0,1) even
// where the sigmoid saturates to 1.0 in double precision.
std::vector<double> predict(const ModelState& m, std::span<const double> x);

// predictions for every dataset row, n x output_dim
Matrix predict_all(const ModelState& m, const Dataset& data);

// layer activations kept for backprop; reused across samples to avoid churn
struct ForwardCache {
  std::vector<std::vector<double>> pre;  // pre-activation per layer
  std::vector<std::vector<double>> act;  // post-activation per layer
};

std::span<const double> forward_cached(const ModelState& m, std::span<const double> x,
                                       ForwardCache& cache);

// parameter gradients, same shapes as the model
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  explicit Gradients(const ModelState& m);
  void zero();
  void scale(double s);
};

// Backprop of dL/dyhat through the net; accumulates into grads.
void backward(const ModelState& m, const ForwardCache& cache,
              std::span<const double> x, std::span<const double> d_yhat,
              Gradients& grads);

// Full per-sample pass: forward, combined loss, backprop. Accumulates
// parameter gradients and returns the loss breakdown.
LossBreakdown sample_gradients(const ModelState& m, const LossEvaluator& eval,
                               std::span<const double> x, const LabelVector& y,
                               ForwardCache& cache, std::vector<double>& yhat_grad,
                               Gradients& grads);

// Adamax: m <- b1*m + (1-b1)*g; u <- max(b2*u, |g|);
// p <- p - lr/(1-b1^t) * m/(u+eps). step_count is t after the update.
struct AdamaxState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t step_count = 0;
  std::vector<Matrix> m_weights, u_weights;
  std::vector<std::vector<double>> m_biases, u_biases;

  AdamaxState() = default;
  explicit AdamaxState(const ModelState& model, double lr = 1e-3);
};

void adamax_step(AdamaxState& opt, ModelState& model, const Gradients& grads);

}  // namespace ontoloss
