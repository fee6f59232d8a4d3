#pragma once

#include <cstddef>
#include <span>

#include "tddr/numerics/matrix.hpp"

namespace tddr {

enum class Exec { Serial, Parallel };

// Read-only view of one affine layer: weights are (out x in) row-major.
struct LayerView {
  std::size_t in = 0;
  std::size_t out = 0;
  std::span<const double> weights;
  std::span<const double> bias;
};

// Dense kernels behind every network evaluation.
//
// serial:: is the reference; parallel:: splits the same loops across OpenMP
// threads over independent outputs only, so both produce bit-identical
// results. Inner reductions use a fixed accumulation order.
namespace kernels {

double dot(const double* a, const double* b, std::size_t n);

namespace serial {
// y = x * W^T + b
void affine_forward(const Matrix& x, const LayerView& layer, Matrix& y);
// dx = dy * W
void input_grad(const Matrix& dy, const LayerView& layer, Matrix& dx);
// dW += dy^T * x, db += column sums of dy
void accumulate_param_grad(const Matrix& dy, const Matrix& x, std::span<double> dw,
                           std::span<double> db);
}  // namespace serial

namespace parallel {
void affine_forward(const Matrix& x, const LayerView& layer, Matrix& y);
void input_grad(const Matrix& dy, const LayerView& layer, Matrix& dx);
void accumulate_param_grad(const Matrix& dy, const Matrix& x, std::span<double> dw,
                           std::span<double> db);
}  // namespace parallel

// Dispatch. Parallel falls back to serial below a work threshold or when
// called from inside an active parallel region.
void affine_forward(const Matrix& x, const LayerView& layer, Matrix& y, Exec exec);
void input_grad(const Matrix& dy, const LayerView& layer, Matrix& dx, Exec exec);
void accumulate_param_grad(const Matrix& dy, const Matrix& x, std::span<double> dw,
                           std::span<double> db, Exec exec);

}  // namespace kernels
}  // namespace tddr
