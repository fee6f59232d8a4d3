#include "tddr/numerics/normalize.hpp"

#include <cmath>

namespace tddr {

namespace {

double mean_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s / static_cast<double>(v.size());
}

void normalize_into(std::span<const double> x, std::span<double> out) {
  const double m = mean_abs(x);
  if (m < kAvgL1NormEps) {
    std::copy(x.begin(), x.end(), out.begin());
    return;
  }
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] / m;
}

// d(x_k / m)/dx_j = delta_kj / m - x_k sign(x_j) / (n m^2)
void backward_into(std::span<const double> x, std::span<const double> g, std::span<double> out) {
  const double m = mean_abs(x);
  if (m < kAvgL1NormEps) {
    std::copy(g.begin(), g.end(), out.begin());
    return;
  }
  const double n = static_cast<double>(x.size());
  double gx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) gx += g[k] * x[k];
  const double coupling = gx / (n * m * m);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double sign = x[j] > 0.0 ? 1.0 : (x[j] < 0.0 ? -1.0 : 0.0);
    out[j] = g[j] / m - sign * coupling;
  }
}

}  // namespace

Vec avg_l1_norm(std::span<const double> v) {
  require_shape(!v.empty(), "avg_l1_norm: empty input");
  Vec out(v.size());
  normalize_into(v, out);
  return out;
}

Vec avg_l1_norm_backward(std::span<const double> x, std::span<const double> grad_out) {
  require_shape(!x.empty() && x.size() == grad_out.size(), "avg_l1_norm_backward: size mismatch");
  Vec out(x.size());
  backward_into(x, grad_out, out);
  return out;
}

Matrix avg_l1_norm_rows(const Matrix& x) {
  require_shape(x.cols() > 0, "avg_l1_norm_rows: empty rows");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) normalize_into(x.row(r), out.row(r));
  return out;
}

Matrix avg_l1_norm_rows_backward(const Matrix& x, const Matrix& grad_out) {
  require_shape(x.rows() == grad_out.rows() && x.cols() == grad_out.cols(),
                "avg_l1_norm_rows_backward: shape mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) backward_into(x.row(r), grad_out.row(r), out.row(r));
  return out;
}

}  // namespace tddr
