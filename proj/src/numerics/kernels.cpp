#include "tddr/numerics/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstring>

namespace tddr::kernels {

namespace {

// Below this many multiply-adds a kernel is not worth a parallel region.
constexpr std::size_t kParallelWork = 1 << 15;

void check_forward(const Matrix& x, const LayerView& layer, const Matrix& y) {
  require_shape(x.cols() == layer.in, "affine_forward: input width does not match layer");
  require_shape(y.rows() == x.rows() && y.cols() == layer.out,
                "affine_forward: output buffer has wrong shape");
}

void check_input_grad(const Matrix& dy, const LayerView& layer, const Matrix& dx) {
  require_shape(dy.cols() == layer.out, "input_grad: gradient width does not match layer");
  require_shape(dx.rows() == dy.rows() && dx.cols() == layer.in,
                "input_grad: output buffer has wrong shape");
}

void check_param_grad(const Matrix& dy, const Matrix& x, std::span<double> dw,
                      std::span<double> db) {
  require_shape(dy.rows() == x.rows(), "accumulate_param_grad: batch size mismatch");
  require_shape(dw.size() == dy.cols() * x.cols() && db.size() == dy.cols(),
                "accumulate_param_grad: gradient buffer has wrong shape");
}

// Four packed doubles. Lane arithmetic is plain IEEE mul/add, identical to the
// scalar tail loops.
using V4 = double __attribute__((vector_size(32)));

inline V4 load4(const double* p) {
  V4 v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store4(double* p, V4 v) { std::memcpy(p, &v, sizeof v); }

// C[i][j] += sum_k A[i][k] * B[k][j] for rows [row_begin, row_end) of C.
// Every element accumulates in increasing k, so any split over rows gives
// bit-identical results.
void gemm_acc_rows(std::size_t row_begin, std::size_t row_end, std::size_t n, std::size_t k_dim,
                   const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
                   std::size_t ldc) {
  constexpr std::size_t kRows = 4;
  constexpr std::size_t kCols = 8;
  std::size_t i = row_begin;
  for (; i + kRows <= row_end; i += kRows) {
    std::size_t j = 0;
    for (; j + kCols <= n; j += kCols) {
      V4 acc[kRows][2];
      for (std::size_t ii = 0; ii < kRows; ++ii) {
        acc[ii][0] = load4(c + (i + ii) * ldc + j);
        acc[ii][1] = load4(c + (i + ii) * ldc + j + 4);
      }
      for (std::size_t k = 0; k < k_dim; ++k) {
        const V4 b0 = load4(b + k * ldb + j);
        const V4 b1 = load4(b + k * ldb + j + 4);
        for (std::size_t ii = 0; ii < kRows; ++ii) {
          const double aik = a[(i + ii) * lda + k];
          acc[ii][0] += aik * b0;
          acc[ii][1] += aik * b1;
        }
      }
      for (std::size_t ii = 0; ii < kRows; ++ii) {
        store4(c + (i + ii) * ldc + j, acc[ii][0]);
        store4(c + (i + ii) * ldc + j + 4, acc[ii][1]);
      }
    }
    for (; j < n; ++j)
      for (std::size_t ii = 0; ii < kRows; ++ii) {
        double acc = c[(i + ii) * ldc + j];
        for (std::size_t k = 0; k < k_dim; ++k) acc += a[(i + ii) * lda + k] * b[k * ldb + j];
        c[(i + ii) * ldc + j] = acc;
      }
  }
  for (; i < row_end; ++i) {
    double* ci = c + i * ldc;
    for (std::size_t k = 0; k < k_dim; ++k) {
      const double aik = a[i * lda + k];
      const double* bk = b + k * ldb;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
}

// Row blocks handed to each thread; a multiple of the microkernel height.
constexpr std::size_t kRowChunk = 8;

void gemm_acc(bool parallel, std::size_t m, std::size_t n, std::size_t k_dim, const double* a,
              std::size_t lda, const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  if (!parallel) {
    gemm_acc_rows(0, m, n, k_dim, a, lda, b, ldb, c, ldc);
    return;
  }
  const auto chunks = static_cast<std::ptrdiff_t>((m + kRowChunk - 1) / kRowChunk);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ch = 0; ch < chunks; ++ch) {
    const std::size_t begin = static_cast<std::size_t>(ch) * kRowChunk;
    gemm_acc_rows(begin, std::min(m, begin + kRowChunk), n, k_dim, a, lda, b, ldb, c, ldc);
  }
}

Vec transpose(std::span<const double> src, std::size_t rows, std::size_t cols) {
  Vec t(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = src[r * cols + c];
  return t;
}

void affine_forward_impl(bool parallel, const Matrix& x, const LayerView& layer, Matrix& y) {
  check_forward(x, layer, y);
  for (std::size_t r = 0; r < y.rows(); ++r) std::copy(layer.bias.begin(), layer.bias.end(), y.row(r).begin());
  const Vec wt = transpose(layer.weights, layer.out, layer.in);
  gemm_acc(parallel, x.rows(), layer.out, layer.in, x.data(), layer.in, wt.data(), layer.out, y.data(),
           layer.out);
}

void input_grad_impl(bool parallel, const Matrix& dy, const LayerView& layer, Matrix& dx) {
  check_input_grad(dy, layer, dx);
  std::fill(dx.flat().begin(), dx.flat().end(), 0.0);
  gemm_acc(parallel, dy.rows(), layer.in, layer.out, dy.data(), layer.out, layer.weights.data(), layer.in,
           dx.data(), layer.in);
}

void param_grad_impl(bool parallel, const Matrix& dy, const Matrix& x, std::span<double> dw,
                     std::span<double> db) {
  check_param_grad(dy, x, dw, db);
  const Vec dyt = transpose(dy.flat(), dy.rows(), dy.cols());
  gemm_acc(parallel, dy.cols(), x.cols(), dy.rows(), dyt.data(), dy.rows(), x.data(), x.cols(), dw.data(),
           x.cols());
  for (std::size_t o = 0; o < dy.cols(); ++o) {
    double acc = db[o];
    for (std::size_t r = 0; r < dy.rows(); ++r) acc += dyt[o * dy.rows() + r];
    db[o] = acc;
  }
}

bool want_parallel(Exec exec, std::size_t work) {
  return exec == Exec::Parallel && work >= kParallelWork && !omp_in_parallel() &&
         omp_get_max_threads() > 1;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

namespace serial {

void affine_forward(const Matrix& x, const LayerView& layer, Matrix& y) {
  affine_forward_impl(false, x, layer, y);
}

void input_grad(const Matrix& dy, const LayerView& layer, Matrix& dx) {
  input_grad_impl(false, dy, layer, dx);
}

void accumulate_param_grad(const Matrix& dy, const Matrix& x, std::span<double> dw,
                           std::span<double> db) {
  param_grad_impl(false, dy, x, dw, db);
}

}  // namespace serial

namespace parallel {

void affine_forward(const Matrix& x, const LayerView& layer, Matrix& y) {
  affine_forward_impl(true, x, layer, y);
}

void input_grad(const Matrix& dy, const LayerView& layer, Matrix& dx) {
  input_grad_impl(true, dy, layer, dx);
}

void accumulate_param_grad(const Matrix& dy, const Matrix& x, std::span<double> dw,
                           std::span<double> db) {
  param_grad_impl(true, dy, x, dw, db);
}

}  // namespace parallel

void affine_forward(const Matrix& x, const LayerView& layer, Matrix& y, Exec exec) {
  if (want_parallel(exec, x.rows() * layer.in * layer.out))
    parallel::affine_forward(x, layer, y);
  else
    serial::affine_forward(x, layer, y);
}

void input_grad(const Matrix& dy, const LayerView& layer, Matrix& dx, Exec exec) {
  if (want_parallel(exec, dy.rows() * layer.in * layer.out))
    parallel::input_grad(dy, layer, dx);
  else
    serial::input_grad(dy, layer, dx);
}

void accumulate_param_grad(const Matrix& dy, const Matrix& x, std::span<double> dw,
                           std::span<double> db, Exec exec) {
  if (want_parallel(exec, dy.rows() * dy.cols() * x.cols()))
    parallel::accumulate_param_grad(dy, x, dw, db);
  else
    serial::accumulate_param_grad(dy, x, dw, db);
}

}  // namespace tddr::kernels
