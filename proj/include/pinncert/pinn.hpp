#pragma once

// Small physics-informed network for the 1D heat equation: tanh MLP on (t, x),
// exact input derivatives, L1 collocation loss with reverse-mode parameter
// gradients, Latin-hypercube collocation, Adam, and residual-trace extraction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pinncert/certifier.hpp"
#include "pinncert/csv.hpp"
#include "pinncert/error.hpp"
#include "pinncert/heat1d.hpp"

namespace pinncert::pinn {

// ---------------------------------------------------------------------------
// Hyper-dual numbers: value, two first-order directions and their mixed second order.

struct HyperDual {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d12 = 0.0;

  HyperDual() = default;
  HyperDual(double value) : v(value) {}  // NOLINT: constants promote implicitly
  HyperDual(double value, double a, double b, double ab) : v(value), d1(a), d2(b), d12(ab) {}
};

inline HyperDual operator+(HyperDual a, HyperDual b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12}; }
inline HyperDual operator-(HyperDual a, HyperDual b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12}; }
inline HyperDual operator-(HyperDual a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }
inline HyperDual operator*(HyperDual a, HyperDual b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + a.v * b.d2,
          a.d12 * b.v + a.d1 * b.d2 + a.d2 * b.d1 + a.v * b.d12};
}
inline HyperDual& operator+=(HyperDual& a, HyperDual b) { return a = a + b; }

/// f(a) for scalar f with derivatives f0, f1, f2 at a.v.
inline HyperDual chain(HyperDual a, double f0, double f1, double f2) {
  return {f0, f1 * a.d1, f1 * a.d2, f1 * a.d12 + f2 * a.d1 * a.d2};
}

inline HyperDual tanh(HyperDual a) {
  const double s = std::tanh(a.v);
  const double s1 = 1.0 - s * s;
  return chain(a, s, s1, -2.0 * s * s1);
}

inline double tanh(double a) { return std::tanh(a); }

// ---------------------------------------------------------------------------
// Model

class MlpModel {
 public:
  MlpModel() = default;

  /// Zero-initialized network with the given layer widths (input first, output last).
  explicit MlpModel(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2 || sizes_.front() != 2 || sizes_.back() != 1)
      throw Error(Errc::InvalidConfig, "layer sizes must start with 2 inputs and end with 1 output");
    for (auto s : sizes_)
      if (s == 0) throw Error(Errc::InvalidConfig, "layer width must be positive");
    offsets_.push_back(0);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l)
      offsets_.push_back(offsets_.back() + sizes_[l + 1] * (sizes_[l] + 1));
    params_.assign(offsets_.back(), 0.0);
  }

  /// Glorot-uniform weights, limit sqrt(6 / (fan_in + fan_out)); zero biases.
  static MlpModel glorot(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
    MlpModel m(std::move(layer_sizes));
    m.seed_ = seed;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < m.num_layers(); ++l) {
      const double fan_in = static_cast<double>(m.sizes_[l]), fan_out = static_cast<double>(m.sizes_[l + 1]);
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (std::size_t i = 0; i < m.sizes_[l + 1]; ++i)
        for (std::size_t j = 0; j < m.sizes_[l]; ++j) m.weight(l, i, j) = limit * (2.0 * unit(rng) - 1.0);
    }
    return m;
  }

  /// Default architecture: 2 -> 10 x 4 -> 1.
  static MlpModel default_architecture(std::uint64_t seed) { return glorot({2, 10, 10, 10, 10, 1}, seed); }

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t num_layers() const noexcept { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::vector<double>& params() noexcept { return params_; }
  const std::vector<double>& params() const noexcept { return params_; }
  std::size_t num_params() const noexcept { return params_.size(); }

  // layer l stores its weights row-major (out x in) followed by its biases
  std::size_t weight_index(std::size_t l, std::size_t i, std::size_t j) const { return offsets_[l] + i * sizes_[l] + j; }
  std::size_t bias_index(std::size_t l, std::size_t i) const {
    return offsets_[l] + sizes_[l + 1] * sizes_[l] + i;
  }
  std::size_t layer_offset(std::size_t l) const { return offsets_[l]; }
  double& weight(std::size_t l, std::size_t i, std::size_t j) { return params_[weight_index(l, i, j)]; }
  double weight(std::size_t l, std::size_t i, std::size_t j) const { return params_[weight_index(l, i, j)]; }
  double& bias(std::size_t l, std::size_t i) { return params_[bias_index(l, i)]; }
  double bias(std::size_t l, std::size_t i) const { return params_[bias_index(l, i)]; }

  template <class T>
  T forward(T t, T x) const {
    std::vector<T> a{t, x}, z;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      z.assign(sizes_[l + 1], T(0.0));
      for (std::size_t i = 0; i < sizes_[l + 1]; ++i) {
        T acc(bias(l, i));
        for (std::size_t j = 0; j < sizes_[l]; ++j) acc += T(weight(l, i, j)) * a[j];
        z[i] = l + 1 < num_layers() ? tanh(acc) : acc;
      }
      a.swap(z);
    }
    return a[0];
  }

  double operator()(double t, double x) const { return forward<double>(t, x); }

  void check_finite() const {
    for (double p : params_)
      if (!std::isfinite(p)) throw Error(Errc::NonFinite, "non-finite network parameter");
  }

  bool operator==(const MlpModel& o) const { return sizes_ == o.sizes_ && params_ == o.params_; }

 private:
  static double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
  std::uint64_t seed_ = 0;
};

struct Derivatives {
  double u = 0.0, u_t = 0.0, u_x = 0.0, u_xx = 0.0;
};

/// u and its t, x, xx derivatives by two hyper-dual passes.
inline Derivatives eval_with_derivatives(const MlpModel& m, double t, double x) {
  const HyperDual first = m.forward(HyperDual(t, 1.0, 0.0, 0.0), HyperDual(x, 0.0, 1.0, 0.0));
  const HyperDual second = m.forward(HyperDual(t), HyperDual(x, 1.0, 1.0, 0.0));
  return {first.v, first.d1, first.d2, second.d12};
}

// ---------------------------------------------------------------------------
// Collocation

struct Range {
  double lo = 0.0, hi = 1.0;
};

/// Latin hypercube: every dimension has exactly one point in each of its n strata.
inline std::vector<std::vector<double>> sample_lhs(std::size_t n, const std::vector<Range>& dims, std::uint64_t seed) {
  if (n == 0) throw Error(Errc::BadSize, "LHS needs at least one point");
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<std::vector<double>> pts(n, std::vector<double>(dims.size()));
  std::vector<std::size_t> perm(n);
  for (std::size_t d = 0; d < dims.size(); ++d) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
    const double w = (dims[d].hi - dims[d].lo) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = dims[d].lo + w * static_cast<double>(perm[i]);
      pts[i][d] = std::min(lo + w * unit(), dims[d].hi);
    }
  }
  return pts;
}

struct LossWeights {
  double a_evo = 0.5, a_init = 0.5, a_bc1 = 20.0, a_bc2 = 200.0;
  std::size_t N_evo = 5000, N_init = 200, N_bc = 100;

  double lambda_bc() const {
    if (!(a_bc1 > 0.0)) throw Error(Errc::InvalidConfig, "lambda_bc undefined for a_bc1 = 0");
    return a_bc2 / a_bc1;
  }
  void validate() const {
    for (double a : {a_evo, a_init, a_bc1, a_bc2})
      if (!(a >= 0.0) || !std::isfinite(a)) throw Error(Errc::InvalidConfig, "loss weights must be >= 0");
  }
};

struct CollocationBatch {
  std::vector<std::array<double, 2>> evo;  // (t, x)
  std::vector<double> init_x;
  std::vector<double> init_target;         // x0(x)
  std::vector<std::array<double, 2>> bc;   // (t, x_bc), x_bc in {0, 1}
  std::vector<double> bc_target;           // g(t) at the matching side
  std::vector<double> bc_rate_target;      // g'(t)
};

/// Boundary data and its time derivative (central difference; exact zero for constant data).
inline std::pair<std::array<double, 2>, std::array<double, 2>> boundary_with_rate(const heat1d::HeatProblem& p,
                                                                                   double t) {
  const auto g = p.boundary(t);
  const double h = 1e-6 * std::max(1.0, p.t_end);
  const auto gp = p.boundary(t + h), gm = p.boundary(t - h);
  return {{g.first, g.second}, {(gp.first - gm.first) / (2 * h), (gp.second - gm.second) / (2 * h)}};
}

/// Evolution points by 2D LHS over T x Omega, initial points by 1D LHS over Omega,
/// boundary points by 1D LHS over T alternating between x = 0 and x = 1.
inline CollocationBatch make_batch(const heat1d::HeatProblem& p, const LossWeights& w, std::uint64_t seed) {
  p.validate();
  CollocationBatch b;
  if (w.N_evo) {
    for (const auto& q : sample_lhs(w.N_evo, {{0.0, p.t_end}, {0.0, 1.0}}, seed)) b.evo.push_back({q[0], q[1]});
  }
  if (w.N_init) {
    for (const auto& q : sample_lhs(w.N_init, {{0.0, 1.0}}, seed + 1)) {
      b.init_x.push_back(q[0]);
      b.init_target.push_back(p.initial(q[0]));
    }
  }
  if (w.N_bc) {
    const auto ts = sample_lhs(w.N_bc, {{0.0, p.t_end}}, seed + 2);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::size_t side = i % 2;
      const auto [g, rate] = boundary_with_rate(p, ts[i][0]);
      b.bc.push_back({ts[i][0], static_cast<double>(side)});
      b.bc_target.push_back(g[side]);
      b.bc_rate_target.push_back(rate[side]);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Loss and gradient

struct LossValue {
  double total = 0.0, evo = 0.0, init = 0.0, bc1 = 0.0, bc2 = 0.0;
  std::vector<double> grad;
};

namespace detail {

// Truncated jet of a scalar along (t, x): value, d/dt, d/dx, d2/dx2.
struct Jet {
  double v = 0.0, t = 0.0, x = 0.0, xx = 0.0;
};

inline double sign(double r) { return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0); }

/// Per-point forward jet propagation with stored intermediates and the matching reverse sweep.
class JetTape {
 public:
  explicit JetTape(const MlpModel& m) : m_(m) {
    const auto& s = m.layer_sizes();
    for (std::size_t l = 0; l < s.size(); ++l) {
      off_.push_back(total_);
      total_ += s[l];
    }
    a_.resize(total_);
    z_.resize(total_);
    s1_.resize(total_);
    s2_.resize(total_);
    ga_.resize(total_);
  }

  Jet forward(double t, double x) {
    const auto& s = m_.layer_sizes();
    a_[0] = {t, 1.0, 0.0, 0.0};
    a_[1] = {x, 0.0, 1.0, 0.0};
    const std::size_t L = m_.num_layers();
    const double* p = m_.params().data();
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t in = s[l], out = s[l + 1];
      const Jet* a = &a_[off_[l]];
      const double* W = p + m_.layer_offset(l);
      const double* b = W + out * in;
      Jet* z = &z_[off_[l + 1]];
      Jet* an = &a_[off_[l + 1]];
      for (std::size_t i = 0; i < out; ++i) {
        Jet acc{b[i], 0.0, 0.0, 0.0};
        const double* wr = W + i * in;
        for (std::size_t j = 0; j < in; ++j) {
          acc.v += wr[j] * a[j].v;
          acc.t += wr[j] * a[j].t;
          acc.x += wr[j] * a[j].x;
          acc.xx += wr[j] * a[j].xx;
        }
        z[i] = acc;
        if (l + 1 < L) {
          const double sv = std::tanh(acc.v);
          const double d1 = 1.0 - sv * sv;
          const double d2 = -2.0 * sv * d1;
          s1_[off_[l + 1] + i] = d1;
          s2_[off_[l + 1] + i] = d2;
          an[i] = {sv, d1 * acc.t, d1 * acc.x, d1 * acc.xx + d2 * acc.x * acc.x};
        } else {
          an[i] = acc;
        }
      }
    }
    return a_[off_[L]];
  }

  /// Accumulates d(seed . output jet)/d(params) into grad; call right after forward().
  void backward(const Jet& seed, double* grad) {
    const auto& s = m_.layer_sizes();
    const std::size_t L = m_.num_layers();
    const double* p = m_.params().data();
    ga_[off_[L]] = seed;  // gradient w.r.t. the output pre-activation (identity output)
    for (std::size_t l = L; l-- > 0;) {
      const std::size_t in = s[l], out = s[l + 1];
      Jet* gz = &ga_[off_[l + 1]];
      const Jet* a = &a_[off_[l]];
      const double* W = p + m_.layer_offset(l);
      double* gW = grad + m_.layer_offset(l);
      double* gb = gW + out * in;
      for (std::size_t i = 0; i < out; ++i) {
        const Jet g = gz[i];
        double* gw = gW + i * in;
        for (std::size_t j = 0; j < in; ++j) gw[j] += g.v * a[j].v + g.t * a[j].t + g.x * a[j].x + g.xx * a[j].xx;
        gb[i] += g.v;
      }
      if (l == 0) break;
      // back through W to the previous activations, then through tanh to its pre-activations
      Jet* gprev = &ga_[off_[l]];
      const Jet* zp = &z_[off_[l]];
      for (std::size_t j = 0; j < in; ++j) {
        Jet ga;
        for (std::size_t i = 0; i < out; ++i) {
          const double w = W[i * in + j];
          ga.v += w * gz[i].v;
          ga.t += w * gz[i].t;
          ga.x += w * gz[i].x;
          ga.xx += w * gz[i].xx;
        }
        const double sv = a[j].v;
        const double d1 = s1_[off_[l] + j], d2 = s2_[off_[l] + j];
        const double d3 = -2.0 * d1 * d1 - 2.0 * sv * d2;
        const Jet& z = zp[j];
        gprev[j] = {ga.v * d1 + (ga.t * z.t + ga.x * z.x + ga.xx * z.xx) * d2 + ga.xx * z.x * z.x * d3, ga.t * d1,
                    ga.x * d1 + 2.0 * ga.xx * d2 * z.x, ga.xx * d1};
      }
    }
  }

 private:
  const MlpModel& m_;
  std::vector<std::size_t> off_;
  std::size_t total_ = 0;
  std::vector<Jet> a_, z_, ga_;
  std::vector<double> s1_, s2_;
};

}  // namespace detail

/// L1 sample-mean loss
///   a_evo/N_evo sum|u_t - alpha u_xx| + a_init/N_init sum|u(0,x) - x0|
///   + a_bc1/N_bc sum|u(t,x_bc) - g| + a_bc2/N_bc sum|u_t(t,x_bc) - g'|
/// with its parameter gradient (subgradient 0 at kinks).
inline LossValue loss(const MlpModel& m, const CollocationBatch& b, const LossWeights& w, double alpha,
                      bool with_gradient = true) {
  if (b.evo.empty() && b.init_x.empty() && b.bc.empty()) throw Error(Errc::EmptyBatch, "collocation batch is empty");
  LossValue out;
  if (with_gradient) out.grad.assign(m.num_params(), 0.0);
  detail::JetTape tape(m);
  double* g = with_gradient ? out.grad.data() : nullptr;

  if (!b.evo.empty()) {
    const double c = w.a_evo / static_cast<double>(b.evo.size());
    double sum = 0.0;
    for (const auto& q : b.evo) {
      const auto u = tape.forward(q[0], q[1]);
      const double r = u.t - alpha * u.xx;
      sum += std::abs(r);
      if (g) {
        const double s = c * detail::sign(r);
        if (s != 0.0) tape.backward({0.0, s, 0.0, -alpha * s}, g);
      }
    }
    out.evo = c * sum;
  }
  if (!b.init_x.empty()) {
    const double c = w.a_init / static_cast<double>(b.init_x.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < b.init_x.size(); ++i) {
      const double r = tape.forward(0.0, b.init_x[i]).v - b.init_target[i];
      sum += std::abs(r);
      if (g && r != 0.0) tape.backward({c * detail::sign(r), 0.0, 0.0, 0.0}, g);
    }
    out.init = c * sum;
  }
  if (!b.bc.empty()) {
    const double c1 = w.a_bc1 / static_cast<double>(b.bc.size());
    const double c2 = w.a_bc2 / static_cast<double>(b.bc.size());
    double sum1 = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < b.bc.size(); ++i) {
      const auto u = tape.forward(b.bc[i][0], b.bc[i][1]);
      const double r1 = u.v - b.bc_target[i], r2 = u.t - b.bc_rate_target[i];
      sum1 += std::abs(r1);
      sum2 += std::abs(r2);
      if (g && (r1 != 0.0 || r2 != 0.0))
        tape.backward({c1 * detail::sign(r1), c2 * detail::sign(r2), 0.0, 0.0}, g);
    }
    out.bc1 = c1 * sum1;
    out.bc2 = c2 * sum2;
  }
  out.total = out.evo + out.init + out.bc1 + out.bc2;
  return out;
}

// ---------------------------------------------------------------------------
// Optimizer and training

struct AdamConfig {
  double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n, AdamConfig cfg = {}) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) throw Error(Errc::ShapeMismatch, "Adam state size");
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
      params[i] -= cfg_.lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.eps);
    }
  }

  std::size_t steps() const noexcept { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

struct TrainConfig {
  std::size_t epochs = 10000;
  AdamConfig adam;
  std::uint64_t seed = 42;  // collocation sampling
};

struct LossRecord {
  std::size_t epoch = 0;
  double total = 0.0, evo = 0.0, init = 0.0, bc1 = 0.0, bc2 = 0.0;
};

struct TrainResult {
  MlpModel model;
  // row k holds the loss before update k; the last row is the loss of the returned model
  std::vector<LossRecord> history;
};

/// Full-batch Adam on a fixed Latin-hypercube collocation set.
inline TrainResult train(MlpModel m, const heat1d::HeatProblem& p, const LossWeights& w, const TrainConfig& cfg) {
  p.validate();
  w.validate();
  m.check_finite();
  const CollocationBatch batch = make_batch(p, w, cfg.seed);
  Adam opt(m.num_params(), cfg.adam);
  TrainResult r;
  r.history.reserve(cfg.epochs + 1);
  for (std::size_t e = 0;; ++e) {
    const bool last = e == cfg.epochs;
    LossValue lv = loss(m, batch, w, p.alpha, !last);
    if (!std::isfinite(lv.total)) throw Error(Errc::DivergedLoss, "loss became non-finite at epoch " + std::to_string(e));
    r.history.push_back({e, lv.total, lv.evo, lv.init, lv.bc1, lv.bc2});
    if (last) break;
    for (double gi : lv.grad)
      if (!std::isfinite(gi)) throw Error(Errc::DivergedLoss, "gradient became non-finite at epoch " + std::to_string(e));
    opt.step(m.params(), lv.grad);
  }
  r.model = std::move(m);
  return r;
}

inline void write_loss_csv(std::ostream& out, const std::vector<LossRecord>& history) {
  csv::write_header(out, "epoch,loss,loss_evo,loss_init,loss_bc1,loss_bc2");
  for (const auto& h : history)
    csv::write_row(out, {std::to_string(h.epoch), csv::real(h.total), csv::real(h.evo), csv::real(h.init),
                         csv::real(h.bc1), csv::real(h.bc2)});
}

// ---------------------------------------------------------------------------
// Residual trace

struct TraceGrid {
  std::size_t n_t = 201;  // time points on [0, t_end]
  std::size_t n_x = 201;  // interior points x_k = k / (n_x + 1)
  heat1d::UNorm u_norm = heat1d::UNorm::euclidean;
};

inline std::vector<double> trace_times(double t_end, std::size_t n_t) {
  if (n_t < 2) throw Error(Errc::BadSize, "trace needs at least two time points");
  std::vector<double> t(n_t);
  for (std::size_t i = 0; i < n_t; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(n_t - 1);
  t.back() = t_end;
  return t;
}

inline certifier::ResidualTrace extract_trace(const MlpModel& m, const heat1d::HeatProblem& p, const TraceGrid& g = {}) {
  p.validate();
  if (g.n_x == 0) throw Error(Errc::BadSize, "trace needs interior points");
  certifier::ResidualTrace tr;
  tr.times = trace_times(p.t_end, g.n_t);
  const double dx = heat1d::grid_spacing(g.n_x);
  auto znorm = [dx](double sum_sq) { return std::sqrt(dx * sum_sq); };
  detail::JetTape tape(m);

  for (double t : tr.times) {
    double sq = 0.0;
    for (std::size_t k = 1; k <= g.n_x; ++k) {
      const auto u = tape.forward(t, heat1d::grid_node(g.n_x, k));
      const double r = u.t - p.alpha * u.xx;
      sq += r * r;
    }
    tr.delta_Z.push_back(znorm(sq));
    const auto [gb, rate] = boundary_with_rate(p, t);
    const auto left = tape.forward(t, 0.0);
    const auto right = tape.forward(t, 1.0);
    tr.delta_b_U.push_back(heat1d::u_norm({left.v - gb[0], right.v - gb[1]}, g.u_norm));
    tr.delta_bdot_U.push_back(heat1d::u_norm({left.t - rate[0], right.t - rate[1]}, g.u_norm));
  }

  const auto [gb0, rate0] = boundary_with_rate(p, 0.0);
  const double db_left = m(0.0, 0.0) - gb0[0], db_right = m(0.0, 1.0) - gb0[1];
  const auto lift = heat1d::lift_D0({db_left, db_right});
  double sq0 = 0.0, sq_shift = 0.0;
  for (std::size_t k = 1; k <= g.n_x; ++k) {
    const double x = heat1d::grid_node(g.n_x, k);
    const double d0 = m(0.0, x) - p.initial(x);
    const double shifted = d0 - lift(x);
    sq0 += d0 * d0;
    sq_shift += shifted * shifted;
  }
  tr.delta0_Z = znorm(sq0);
  tr.delta0_shifted_Z = znorm(sq_shift);
  return tr;
}

/// ||u_model(t, .) - exact(t, .)||_{L2(0,1)} by composite 5-point Gauss-Legendre.
inline std::vector<double> reference_error(const MlpModel& m, const heat1d::SpaceTimeField& exact,
                                           const std::vector<double>& times, std::size_t panels = 200) {
  static const double node[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                 0.9061798459386640};
  static const double weight[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                   0.2369268850561891, 0.2369268850561891};
  std::vector<double> out;
  const double h = 1.0 / static_cast<double>(panels);
  for (double t : times) {
    double acc = 0.0;
    for (std::size_t q = 0; q < panels; ++q) {
      const double mid = (static_cast<double>(q) + 0.5) * h;
      for (int k = 0; k < 5; ++k) {
        const double x = mid + 0.5 * h * node[k];
        const double d = m(t, x) - exact(t, x);
        acc += weight[k] * d * d;
      }
    }
    out.push_back(std::sqrt(0.5 * h * acc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr const char* kCheckpointMagic = "pinncert-mlp";
inline constexpr int kCheckpointVersion = 1;

inline void write_checkpoint(std::ostream& out, const MlpModel& m) {
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n' << "layers";
  for (auto s : m.layer_sizes()) out << ' ' << s;
  out << '\n';
  const auto& s = m.layer_sizes();
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    for (std::size_t i = 0; i < s[l + 1]; ++i) {
      for (std::size_t j = 0; j < s[l]; ++j) out << (j ? " " : "") << csv::real(m.weight(l, i, j));
      out << '\n';
    }
    for (std::size_t i = 0; i < s[l + 1]; ++i) out << (i ? " " : "") << csv::real(m.bias(l, i));
    out << '\n';
  }
}

inline MlpModel read_checkpoint(std::istream& in, const std::string& source = "<checkpoint>") {
  auto fail = [&](const std::string& msg) { return Error(Errc::Parse, source + ": " + msg); };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic) throw fail("missing checkpoint header");
  if (version != kCheckpointVersion) throw fail("unsupported checkpoint version " + std::to_string(version));
  std::string word;
  if (!(in >> word) || word != "layers") throw fail("missing layers line");
  std::string rest;
  std::getline(in, rest);
  std::istringstream ls(rest);
  std::vector<std::size_t> sizes;
  for (std::size_t s; ls >> s;) sizes.push_back(s);
  MlpModel m(sizes);
  for (double& p : m.params()) {
    std::string tok;
    if (!(in >> tok)) throw fail("too few parameters");
    try {
      std::size_t used = 0;
      p = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw fail("bad parameter '" + tok + "'");
    }
  }
  std::string extra;
  if (in >> extra) throw fail("trailing data after parameters");
  m.check_finite();
  return m;
}

inline void save_checkpoint(const std::string& path, const MlpModel& m) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::Io, "cannot write " + path);
  write_checkpoint(f, m);
  if (!f) throw Error(Errc::Io, "write failed: " + path);
}

inline MlpModel load_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::Io, "cannot open " + path);
  return read_checkpoint(f, path);
}

}  // namespace pinncert::pinn
