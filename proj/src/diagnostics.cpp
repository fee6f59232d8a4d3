#include "tddr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>

#include "tddr/env/tabular_mdp.hpp"
#include "tddr/numerics/kernels.hpp"
#include "tddr/numerics/mlp.hpp"
#include "tddr/representation.hpp"
#include "tddr/tabular.hpp"

namespace tddr {

namespace {

constexpr double kStep = 1e-5;
constexpr double kMinKinkMargin = 1e-3;

// Smallest |pre-activation| over hidden units (and outputs when asked) for a
// batch; central differences are unreliable closer than the step to a kink.
double kink_margin(const Mlp& net, const Matrix& x, bool include_output) {
  double margin = INFINITY;
  Matrix a = x;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Matrix z(a.rows(), net.layer_dims()[l + 1]);
    kernels::serial::affine_forward(a, net.layer(l), z);
    const bool hidden = l + 1 < net.num_layers();
    if (hidden || include_output)
      for (double v : z.flat()) margin = std::min(margin, std::abs(v));
    if (hidden)
      for (double& v : z.flat()) v = std::max(v, 0.0);
    a = std::move(z);
  }
  return margin;
}

Vec central_difference(const std::function<double()>& f, std::span<double> x) {
  Vec g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x[k];
    x[k] = saved + kStep;
    const double fp = f();
    x[k] = saved - kStep;
    const double fm = f();
    x[k] = saved;
    g[k] = (fp - fm) / (2.0 * kStep);
  }
  return g;
}

Matrix random_matrix(SeededRng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.flat()) v = rng.uniform(-2.0, 2.0);
  return m;
}

double mlp_case(SeededRng& rng) {
  const std::size_t in = 1 + rng.index(6), h1 = 2 + rng.index(15), h2 = 2 + rng.index(15), out = 1 + rng.index(3);
  const bool tanh_out = rng.uniform() < 0.5;
  Mlp net({in, h1, h2, out}, tanh_out ? OutputActivation::ScaledTanh : OutputActivation::Identity,
          tanh_out ? 2.0 : 1.0);
  net.init_fan_in(rng);
  Matrix x;
  do x = random_matrix(rng, 1, in);
  while (kink_margin(net, x, false) < kMinKinkMargin);
  Vec dy(out);
  for (double& v : dy) v = rng.uniform(-1.0, 1.0);

  auto pass = mlp_forward(net, x.row(0));
  auto grads = mlp_backward(net, pass.cache, dy);
  Vec input(x.row(0).begin(), x.row(0).end());
  auto loss = [&] {
    const Vec y = net.forward(std::span<const double>(input));
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) s += dy[k] * y[k];
    return s;
  };
  const Vec fd_p = central_difference(loss, net.params());
  const Vec fd_x = central_difference(loss, input);
  return std::max(max_relative_error(grads.params, fd_p), max_relative_error(grads.input, fd_x));
}

double encoder_case(SeededRng& rng) {
  const std::size_t sd = 1 + rng.index(4), ad = 1 + rng.index(3), ed = 2 + rng.index(6), hd = 4 + rng.index(8);
  const std::size_t batch = 2 + rng.index(6);
  EncoderPair p = EncoderPair::create(sd, ad, ed, hd, &rng);
  Matrix s, a, s2;
  while (true) {
    s = random_matrix(rng, batch, sd);
    a = random_matrix(rng, batch, ad);
    s2 = random_matrix(rng, batch, sd);
    const Matrix e_s = encode_states(p, s);
    Matrix sa(batch, ed + ad);
    for (std::size_t r = 0; r < batch; ++r)
      for (std::size_t c = 0; c < ed + ad; ++c) sa(r, c) = c < ed ? e_s(r, c) : a(r, c - ed);
    // The normalization has its own kink where an encoder output crosses zero.
    if (kink_margin(p.state_encoder, s, true) >= kMinKinkMargin &&
        kink_margin(p.state_action_encoder, sa, false) >= kMinKinkMargin)
      break;
  }
  const Matrix target = encode_states(p, s2);
  const EncoderLoss l = encoder_loss_and_grads(p, s, a, s2);
  auto loss = [&] {
    const Matrix e_sa = encode_state_actions(p, encode_states(p, s), a);
    double sum = 0.0;
    for (std::size_t k = 0; k < e_sa.flat().size(); ++k) {
      const double d = e_sa.flat()[k] - target.flat()[k];
      sum += d * d;
    }
    return sum / static_cast<double>(e_sa.flat().size());
  };
  const Vec fd_s = central_difference(loss, p.state_encoder.params());
  const Vec fd_sa = central_difference(loss, p.state_action_encoder.params());
  return std::max(max_relative_error(l.state_encoder_grads, fd_s),
                  max_relative_error(l.state_action_encoder_grads, fd_sa));
}

}  // namespace

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeError("max_relative_error: size mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double denom = std::max({std::abs(a[k]), std::abs(b[k]), kGradRelErrFloor});
    worst = std::max(worst, std::abs(a[k] - b[k]) / denom);
  }
  return worst;
}

GradcheckReport gradcheck(std::size_t n_cases, std::uint64_t seed) {
  SeededRng rng(seed);
  GradcheckReport rep;
  rep.n_cases = n_cases;
  for (std::size_t k = 0; k < n_cases; ++k) {
    rep.mlp_max_rel_error = std::max(rep.mlp_max_rel_error, mlp_case(rng));
    rep.encoder_max_rel_error = std::max(rep.encoder_max_rel_error, encoder_case(rng));
  }
  return rep;
}

std::vector<TabularCheckRow> tabular_check(std::size_t n_seeds, std::size_t n_steps) {
  std::vector<TabularCheckRow> rows;
  for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
    SeededRng mdp_rng(seed);
    const TabularMdp mdp = make_random_mdp(mdp_rng, 5, 3, 0.9);
    const QTable qstar = value_iteration(mdp, 1e-12);
    const double tol = 0.05 * (1.0 + qstar.max_abs());
    for (Algorithm alg : {Algorithm::TDDR, Algorithm::DADC, Algorithm::DASC, Algorithm::SASC})
      for (double u : {0.0, 0.5, 1.0}) {
        SeededRng rng(mix_seed(seed, 0x7ab));
        const QTable q = tabular_variant_train(mdp, alg, u, default_tabular_lr, n_steps, rng);
        rows.push_back({seed, alg, u, sup_distance(q, qstar), tol});
      }
  }
  return rows;
}

}  // namespace tddr
