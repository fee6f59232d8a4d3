#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tddr/numerics/kernels.hpp"
#include "tddr/numerics/matrix.hpp"
#include "tddr/numerics/rng.hpp"

namespace tddr {

enum class OutputActivation { Identity, ScaledTanh };

// Feed-forward network: affine layers with ReLU between them and an
// optional bound * tanh(.) on the output.
//
// All parameters live in one flat buffer (layer by layer, weights (out x in)
// row-major then biases) so optimizers and target-network updates can treat a
// network as a single vector. Gradient buffers share that layout.
class Mlp {
 public:
  // Activations of every layer for one batched forward pass; [0] is the input.
  struct Cache {
    std::vector<Matrix> activations;
  };

  Mlp() = default;
  // Parameters start at zero; call init_fan_in() for a random start.
  explicit Mlp(std::vector<std::size_t> layer_dims,
               OutputActivation output = OutputActivation::Identity, double bound = 1.0);

  void init_fan_in(SeededRng& rng);

  std::size_t input_dim() const { return dims_.front(); }
  std::size_t output_dim() const { return dims_.back(); }
  std::size_t num_layers() const { return dims_.size() - 1; }
  std::size_t num_params() const { return params_.size(); }
  const std::vector<std::size_t>& layer_dims() const { return dims_; }
  OutputActivation output_activation() const { return output_; }
  double output_bound() const { return bound_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> weights(std::size_t layer);
  std::span<double> biases(std::size_t layer);
  LayerView layer(std::size_t l) const;

  Exec exec() const { return exec_; }
  void set_exec(Exec exec) { exec_ = exec; }

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, Cache& cache) const;
  Vec forward(std::span<const double> x) const;

  // Backpropagates output_grad (one row per sample) through the pass recorded
  // in cache. Parameter gradients summed over rows are added into grads when
  // it is non-empty. Returns the gradient with respect to the input.
  Matrix backward(const Cache& cache, const Matrix& output_grad, std::span<double> grads) const;

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.dims_ == b.dims_ && a.output_ == b.output_ && a.bound_ == b.bound_ &&
           a.params_ == b.params_;
  }

 private:
  std::size_t weight_offset(std::size_t l) const { return offsets_[l]; }
  std::size_t bias_offset(std::size_t l) const { return offsets_[l] + dims_[l] * dims_[l + 1]; }

  std::vector<std::size_t> dims_{1, 1};
  std::vector<std::size_t> offsets_{0};
  Vec params_ = Vec(2, 0.0);
  OutputActivation output_ = OutputActivation::Identity;
  double bound_ = 1.0;
  Exec exec_ = Exec::Parallel;
};

struct ForwardPass {
  Vec output;
  Mlp::Cache cache;
};

struct MlpGradients {
  Vec params;
  Vec input;
};

// Single-sample forms of Mlp::forward / Mlp::backward.
ForwardPass mlp_forward(const Mlp& net, std::span<const double> input);
MlpGradients mlp_backward(const Mlp& net, const Mlp::Cache& cache,
                          std::span<const double> output_grad);

}  // namespace tddr
