#pragma once

#include <span>

#include "tddr/numerics/matrix.hpp"

namespace tddr {

// Below this mean absolute value the input passes through unchanged.
inline constexpr double kAvgL1NormEps = 1e-8;

// v / mean(|v_k|)
Vec avg_l1_norm(std::span<const double> v);

// Vector-Jacobian product of avg_l1_norm at x.
Vec avg_l1_norm_backward(std::span<const double> x, std::span<const double> grad_out);

// Row-wise versions for batches.
Matrix avg_l1_norm_rows(const Matrix& x);
Matrix avg_l1_norm_rows_backward(const Matrix& x, const Matrix& grad_out);

}  // namespace tddr
