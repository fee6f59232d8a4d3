#pragma once

// Straight-line network evaluation used as an independent check on Mlp.
// Reads the raw parameter buffer (per layer: W row-major out x in, then b).

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct NaivePass {
  std::vector<double> output;
  std::vector<std::vector<double>> pre_activations;  // hidden layers only
};

inline NaivePass naive_forward(const std::vector<std::size_t>& dims, const std::vector<double>& params,
                               bool scaled_tanh, double bound, const std::vector<double>& x) {
  NaivePass pass;
  std::vector<double> h = x;
  std::size_t off = 0;
  const std::size_t layers = dims.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = dims[l], out = dims[l + 1];
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = params[off + in * out + o];
      for (std::size_t k = 0; k < in; ++k) s += params[off + o * in + k] * h[k];
      z[o] = s;
    }
    off += in * out + out;
    if (l + 1 < layers) {
      pass.pre_activations.push_back(z);
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    } else if (scaled_tanh) {
      for (double& v : z) v = bound * std::tanh(v);
    }
    h = z;
  }
  pass.output = h;
  return pass;
}

}  // namespace oracle
