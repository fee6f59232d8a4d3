#include "tddr/numerics/mlp.hpp"

#include <cmath>
#include <string>

namespace tddr {

Mlp::Mlp(std::vector<std::size_t> layer_dims, OutputActivation output, double bound)
    : dims_(std::move(layer_dims)), output_(output), bound_(bound) {
  require_shape(dims_.size() >= 2, "Mlp: need at least an input and an output width");
  for (std::size_t d : dims_) require_shape(d >= 1, "Mlp: layer widths must be positive");
  if (output_ == OutputActivation::ScaledTanh && !(bound_ > 0.0))
    throw std::domain_error("Mlp: ScaledTanh bound must be positive");
  offsets_.clear();
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(total);
    total += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::init_fan_in(SeededRng& rng) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    for (double& w : weights(l)) w = rng.uniform(-limit, limit);
    for (double& b : biases(l)) b = rng.uniform(-limit, limit);
  }
}

std::span<double> Mlp::weights(std::size_t l) {
  return {params_.data() + weight_offset(l), dims_[l] * dims_[l + 1]};
}

std::span<double> Mlp::biases(std::size_t l) {
  return {params_.data() + bias_offset(l), dims_[l + 1]};
}

LayerView Mlp::layer(std::size_t l) const {
  return LayerView{dims_[l], dims_[l + 1],
                   {params_.data() + weight_offset(l), dims_[l] * dims_[l + 1]},
                   {params_.data() + bias_offset(l), dims_[l + 1]}};
}

Matrix Mlp::forward(const Matrix& x) const {
  Cache cache;
  return forward(x, cache);
}

Matrix Mlp::forward(const Matrix& x, Cache& cache) const {
  if (x.cols() != input_dim())
    throw ShapeError("Mlp::forward: input width " + std::to_string(x.cols()) + " != " +
                     std::to_string(input_dim()));
  cache.activations.resize(num_layers() + 1);
  cache.activations[0] = x;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    Matrix& y = cache.activations[l + 1];
    y.resize(x.rows(), dims_[l + 1]);
    kernels::affine_forward(cache.activations[l], layer(l), y, exec_);
    auto v = y.flat();
    if (l + 1 < num_layers()) {
      for (double& a : v) a = a > 0.0 ? a : 0.0;
    } else if (output_ == OutputActivation::ScaledTanh) {
      for (double& a : v) a = bound_ * std::tanh(a);
    }
  }
  return cache.activations.back();
}

Vec Mlp::forward(std::span<const double> x) const {
  Matrix out = forward(Matrix::from_row(x));
  return Vec(out.flat().begin(), out.flat().end());
}

Matrix Mlp::backward(const Cache& cache, const Matrix& output_grad, std::span<double> grads) const {
  const auto& acts = cache.activations;
  bool ok = acts.size() == num_layers() + 1;
  for (std::size_t l = 0; ok && l < acts.size(); ++l)
    ok = acts[l].cols() == dims_[l] && acts[l].rows() == acts[0].rows();
  if (!ok) throw ShapeError("Mlp::backward: cache does not belong to this network");
  require_shape(output_grad.rows() == acts[0].rows() && output_grad.cols() == output_dim(),
                "Mlp::backward: output gradient has wrong shape");
  require_shape(grads.empty() || grads.size() == num_params(),
                "Mlp::backward: gradient buffer has wrong size");

  Matrix g = output_grad;
  for (std::size_t li = num_layers(); li-- > 0;) {
    const Matrix& y = acts[li + 1];
    auto gv = g.flat();
    auto yv = y.flat();
    if (li + 1 < num_layers()) {
      for (std::size_t k = 0; k < gv.size(); ++k)
        if (!(yv[k] > 0.0)) gv[k] = 0.0;
    } else if (output_ == OutputActivation::ScaledTanh) {
      for (std::size_t k = 0; k < gv.size(); ++k) {
        const double t = yv[k] / bound_;
        gv[k] *= bound_ * (1.0 - t * t);
      }
    }
    if (!grads.empty()) {
      kernels::accumulate_param_grad(g, acts[li], grads.subspan(weight_offset(li), dims_[li] * dims_[li + 1]),
                                     grads.subspan(bias_offset(li), dims_[li + 1]), exec_);
    }
    Matrix dx(g.rows(), dims_[li]);
    kernels::input_grad(g, layer(li), dx, exec_);
    g = std::move(dx);
  }
  return g;
}

ForwardPass mlp_forward(const Mlp& net, std::span<const double> input) {
  ForwardPass pass;
  Matrix out = net.forward(Matrix::from_row(input), pass.cache);
  pass.output.assign(out.flat().begin(), out.flat().end());
  return pass;
}

MlpGradients mlp_backward(const Mlp& net, const Mlp::Cache& cache,
                          std::span<const double> output_grad) {
  MlpGradients out;
  out.params.assign(net.num_params(), 0.0);
  Matrix dx = net.backward(cache, Matrix::from_row(output_grad), out.params);
  out.input.assign(dx.flat().begin(), dx.flat().end());
  return out;
}

}  // namespace tddr
