#pragma once

// Dense linear algebra: storage types, symmetric eigensolver (cyclic Jacobi),
// spectral norms, matrix exponential (Pade 13 scaling and squaring),
// Moore-Penrose right inverse and a complex Schur decomposition.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pinncert/error.hpp"
#include "pinncert/settings.hpp"

namespace pinncert {

namespace detail {
inline void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw Error(Errc::NonFinite, std::string(what) + " contains NaN/Inf");
  }
}
}  // namespace detail

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {
    detail::require_finite(data_, "Vector");
  }
  explicit Vector(std::vector<double> data) : data_(std::move(data)) {
    detail::require_finite(data_, "Vector");
  }
  Vector(std::initializer_list<double> init) : data_(init) { detail::require_finite(data_, "Vector"); }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& std() const noexcept { return data_; }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  double norm2() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

 private:
  std::vector<double> data_;
};

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    detail::require_finite(data_, "DenseMatrix");
  }
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw Error(Errc::ShapeMismatch, "entry count != rows*cols");
    detail::require_finite(data_, "DenseMatrix");
  }
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(Errc::ShapeMismatch, "ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    detail::require_finite(data_, "DenseMatrix");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> values() const noexcept { return data_; }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

  double norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::ShapeMismatch, "matrix product inner dimension");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vector operator*(const DenseMatrix& a, const Vector& v) {
  if (a.cols() != v.size()) throw Error(Errc::ShapeMismatch, "matrix-vector dimension");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return Vector(std::move(out));
}

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(Errc::ShapeMismatch, "matrix sum");
  DenseMatrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(Errc::ShapeMismatch, "matrix difference");
  DenseMatrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

inline DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

/// Symmetric part (A + A^T) / 2.
inline DenseMatrix symmetric_part(const DenseMatrix& a) {
  if (!a.square()) throw Error(Errc::NonSquare, "symmetric_part");
  DenseMatrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

inline bool is_symmetric(const DenseMatrix& a, double rel_tol = default_settings().symmetry_tol) {
  if (!a.square()) return false;
  const double tol = rel_tol * a.max_abs();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

struct SymmetricEigen {
  Vector eigenvalues;        // ascending
  DenseMatrix eigenvectors;  // column j pairs with eigenvalues[j]
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
inline SymmetricEigen eig_symmetric(const DenseMatrix& a, const NumericSettings& cfg = default_settings()) {
  if (!a.square()) throw Error(Errc::NonSquare, "eig_symmetric needs a square matrix");
  if (!is_symmetric(a, cfg.symmetry_tol)) throw Error(Errc::NotSymmetric, "eig_symmetric input is not symmetric");
  const std::size_t n = a.rows();
  if (n == 0) return {Vector{}, DenseMatrix{}};

  // work on the exactly symmetrized copy
  DenseMatrix w = symmetric_part(a);
  DenseMatrix v = DenseMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += w(i, j) * w(i, j);
    return std::sqrt(2.0 * s);
  };
  const double scale = w.frobenius();
  const double stop = std::numeric_limits<double>::epsilon() * 1e-2 * scale;

  int sweep = 0;
  for (; sweep < cfg.jacobi_max_sweeps; ++sweep) {
    if (off_norm() <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double app = w(p, p);
        const double aqq = w(q, q);
        // negligible relative to both diagonal entries: zero it outright
        if (sweep > 3 && std::abs(apq) < 1e-18 * std::abs(app) && std::abs(apq) < 1e-18 * std::abs(aqq)) {
          w(p, q) = 0.0;
          w(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = w(k, p);
          const double akq = w(k, q);
          w(k, p) = c * akp - s * akq;
          w(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = w(p, k);
          const double aqk = w(q, k);
          w(p, k) = c * apk - s * aqk;
          w(q, k) = s * apk + c * aqk;
        }
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == cfg.jacobi_max_sweeps && off_norm() > stop)
    throw Error(Errc::NoConvergence, "Jacobi sweep cap reached");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return w(i, i) < w(j, j); });
  std::vector<double> lambda(n);
  DenseMatrix vs(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    lambda[j] = w(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) vs(k, j) = v(k, order[j]);
  }
  return {Vector(std::move(lambda)), std::move(vs)};
}

inline double max_eigenvalue_symmetric(const DenseMatrix& a, const NumericSettings& cfg = default_settings()) {
  const auto e = eig_symmetric(a, cfg);
  return e.eigenvalues[e.eigenvalues.size() - 1];
}

/// Largest singular value via the eigenvalues of the smaller Gram matrix.
inline double spectral_norm(const DenseMatrix& a, const NumericSettings& cfg = default_settings()) {
  if (a.empty()) throw Error(Errc::Empty, "spectral_norm of an empty matrix");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t k = std::min(m, n);
  DenseMatrix g(k, k);
  if (n <= m) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += a(r, i) * a(r, j);
        g(i, j) = s;
        g(j, i) = s;
      }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) s += a(i, c) * a(j, c);
        g(i, j) = s;
        g(j, i) = s;
      }
  }
  const double lmax = max_eigenvalue_symmetric(g, cfg);
  return std::sqrt(std::max(lmax, 0.0));
}

/// Power iteration on A^T A with a fixed start vector; cross-check only.
inline double spectral_norm_power(const DenseMatrix& a, int iterations = 500) {
  if (a.empty()) throw Error(Errc::Empty, "spectral_norm_power of an empty matrix");
  std::vector<double> x(a.cols());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 + 0.1 * static_cast<double>(i % 7);
  double sigma = 0.0;
  std::vector<double> y(a.rows());
  for (int it = 0; it < iterations; ++it) {
    double nx = 0.0;
    for (double v : x) nx += v * v;
    nx = std::sqrt(nx);
    if (nx == 0.0) return 0.0;
    for (double& v : x) v /= nx;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    double ny = 0.0;
    for (double v : y) ny += v * v;
    sigma = std::sqrt(ny);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * y[i];
      x[j] = s;
    }
  }
  return sigma;
}

/// Solves A X = B by LU with partial pivoting.
inline DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b) {
  if (!a.square()) throw Error(Errc::NonSquare, "lu_solve");
  if (a.rows() != b.rows()) throw Error(Errc::ShapeMismatch, "lu_solve right-hand side");
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) throw Error(Errc::RankDeficient, "singular system in lu_solve");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = b(kk, j);
      for (std::size_t c = kk + 1; c < n; ++c) s -= a(kk, c) * b(c, j);
      b(kk, j) = s / a(kk, kk);
    }
  }
  return b;
}

/// Matrix exponential by Pade(13) scaling and squaring (Higham 2005).
inline DenseMatrix expm(const DenseMatrix& a) {
  if (!a.square()) throw Error(Errc::NonSquare, "expm");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const double norm = a.norm1();
  int s = 0;
  if (norm > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  const DenseMatrix as = std::ldexp(1.0, -s) * a;
  const DenseMatrix id = DenseMatrix::identity(n);
  const DenseMatrix a2 = as * as;
  const DenseMatrix a4 = a2 * a2;
  const DenseMatrix a6 = a4 * a2;
  const DenseMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const DenseMatrix u = as * u_inner;
  const DenseMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  DenseMatrix r = lu_solve(v - u, v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

/// e^{A t} via the symmetric eigendecomposition: V diag(e^{lambda t}) V^T.
inline DenseMatrix expm_symmetric(const DenseMatrix& a, double t, const NumericSettings& cfg = default_settings()) {
  const auto e = eig_symmetric(a, cfg);
  const std::size_t n = a.rows();
  DenseMatrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = std::exp(e.eigenvalues[k] * t);
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = e.eigenvectors(i, k) * f;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * e.eigenvectors(j, k);
    }
  }
  return r;
}

/// e^{A t} v. Symmetric inputs go through the eigendecomposition, others through Pade.
inline Vector expm_action(const DenseMatrix& a, double t, const Vector& v,
                          const NumericSettings& cfg = default_settings()) {
  if (!a.square()) throw Error(Errc::NonSquare, "expm_action");
  if (a.cols() != v.size()) throw Error(Errc::ShapeMismatch, "expm_action vector length");
  if (t < 0.0) throw Error(Errc::BadSize, "expm_action requires t >= 0");
  if (is_symmetric(a, cfg.symmetry_tol)) {
    const auto e = eig_symmetric(a, cfg);
    const std::size_t n = a.rows();
    std::vector<double> coef(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += e.eigenvectors(i, k) * v[i];
      coef[k] = s * std::exp(e.eigenvalues[k] * t);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out[i] += e.eigenvectors(i, k) * coef[k];
    return Vector(std::move(out));
  }
  return expm(t * a) * v;
}

/// Householder QR of a tall matrix (m >= n): returns thin Q (m x n) and R (n x n).
inline std::pair<DenseMatrix, DenseMatrix> qr_thin(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw Error(Errc::ShapeMismatch, "qr_thin needs rows >= cols");
  DenseMatrix r = a;
  std::vector<std::vector<double>> reflectors;
  reflectors.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> h(m - k);
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) {
      h[i - k] = r(i, k);
      norm += h[i - k] * h[i - k];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    const double alpha = h[0] >= 0 ? -norm : norm;
    h[0] -= alpha;
    double hn = 0.0;
    for (double x : h) hn += x * x;
    if (hn == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += h[i - k] * r(i, j);
      const double f = 2.0 * dot / hn;
      for (std::size_t i = k; i < m; ++i) r(i, j) -= f * h[i - k];
    }
    for (double& x : h) x /= std::sqrt(hn);
    reflectors.push_back(std::move(h));
  }
  DenseMatrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    const auto& h = reflectors[kk];
    if (h.empty()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = kk; i < m; ++i) dot += h[i - kk] * q(i, j);
      for (std::size_t i = kk; i < m; ++i) q(i, j) -= 2.0 * dot * h[i - kk];
    }
  }
  DenseMatrix rr(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) rr(i, j) = r(i, j);
  return {std::move(q), std::move(rr)};
}

/// Moore-Penrose right inverse of a full-row-rank matrix: D^T (D D^T)^{-1},
/// evaluated as Q R^{-T} from the QR factorization of D^T.
inline DenseMatrix pinv_right(const DenseMatrix& d, const NumericSettings& cfg = default_settings()) {
  const std::size_t m = d.rows();
  const std::size_t n = d.cols();
  if (m == 0) return DenseMatrix(n, 0);
  if (m > n) throw Error(Errc::RankDeficient, "more rows than columns; no right inverse");
  DenseMatrix gram = d * d.transpose();
  const auto e = eig_symmetric(gram, cfg);
  const double smax = std::sqrt(std::max(e.eigenvalues[m - 1], 0.0));
  const double smin = std::sqrt(std::max(e.eigenvalues[0], 0.0));
  if (!(smax > 0.0) || smin <= cfg.rank_tol * smax)
    throw Error(Errc::RankDeficient, "smallest singular value below rank tolerance");

  auto [q, r] = qr_thin(d.transpose());  // D^T = Q R, so D = R^T Q^T
  // solve R^T Y = I for Y = R^{-T} (lower-triangular forward substitution)
  DenseMatrix y(m, m);
  for (std::size_t col = 0; col < m; ++col) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= r(k, i) * y(k, col);
      y(i, col) = s / r(i, i);
    }
  }
  return q * y;
}

inline DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) throw Error(Errc::ShapeMismatch, "vstack column counts differ");
  std::vector<double> data(top.values().begin(), top.values().end());
  data.insert(data.end(), bottom.values().begin(), bottom.values().end());
  return DenseMatrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

/// Block-diagonal repetition diag(A, A, ..., A) with `copies` blocks.
inline DenseMatrix block_repeat(const DenseMatrix& a, std::size_t copies) {
  DenseMatrix out(a.rows() * copies, a.cols() * copies);
  for (std::size_t c = 0; c < copies; ++c)
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) out(c * a.rows() + i, c * a.cols() + j) = a(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// Complex Schur decomposition A = Q T Q^H (Hessenberg reduction + shifted QR).

using cplx = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  explicit ComplexMatrix(const DenseMatrix& a) : ComplexMatrix(a.rows(), a.cols()) {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = a(i, j);
  }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  cplx operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  /// Real 2n x 2n embedding [[Re, -Im], [Im, Re]]; shares singular values (each doubled).
  DenseMatrix realify() const {
    DenseMatrix r(2 * rows_, 2 * cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        const cplx z = (*this)(i, j);
        r(i, j) = z.real();
        r(i, j + cols_) = -z.imag();
        r(i + rows_, j) = z.imag();
        r(i + rows_, j + cols_) = z.real();
      }
    return r;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

struct ComplexSchur {
  ComplexMatrix q;  // unitary
  ComplexMatrix t;  // upper triangular
};

inline ComplexSchur complex_schur(const DenseMatrix& a, const NumericSettings& cfg = default_settings()) {
  if (!a.square()) throw Error(Errc::NonSquare, "complex_schur");
  const std::size_t n = a.rows();
  ComplexMatrix h(a);
  ComplexMatrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;

  // Householder reduction to upper Hessenberg form (real input, real reflectors).
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::vector<double> v(n - k - 1);
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i - k - 1] = h(i, k).real();
      norm += v[i - k - 1] * v[i - k - 1];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = v[0] >= 0 ? -norm : norm;
    v[0] -= alpha;
    double vn = 0.0;
    for (double x : v) vn += x * x;
    if (vn == 0.0) continue;
    for (double& x : v) x /= std::sqrt(vn);
    for (std::size_t j = 0; j < n; ++j) {
      cplx dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i - k - 1] * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * dot * v[i - k - 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += h(i, j) * v[j - k - 1];
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= 2.0 * dot * v[j - k - 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += q(i, j) * v[j - k - 1];
      for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= 2.0 * dot * v[j - k - 1];
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }

  const double eps = std::numeric_limits<double>::epsilon();
  double hnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) hnorm = std::max(hnorm, std::abs(h(i, j)));

  std::vector<double> gc(n);
  std::vector<cplx> gs(n);
  std::size_t hi = n == 0 ? 0 : n - 1;
  int iter = 0;
  int total = 0;
  const int cap = cfg.schur_max_iter_per_eig * static_cast<int>(std::max<std::size_t>(n, 1));
  while (n > 0 && hi > 0) {
    // deflate from the bottom
    std::size_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (diag == 0.0) diag = hnorm;
      if (sub <= eps * diag) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      iter = 0;
      continue;
    }
    if (++total > cap) throw Error(Errc::SchurFailure, "QR iteration did not converge");
    ++iter;

    cplx mu;
    if (iter % 11 == 0) {
      // exceptional shift
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    } else {
      const cplx aa = h(hi - 1, hi - 1), bb = h(hi - 1, hi), cc = h(hi, hi - 1), dd = h(hi, hi);
      const cplx tr = aa + dd;
      const cplx det = aa * dd - bb * cc;
      const cplx disc = std::sqrt(tr * tr / 4.0 - det);
      const cplx l1 = tr / 2.0 + disc;
      const cplx l2 = tr / 2.0 - disc;
      mu = std::abs(l1 - dd) < std::abs(l2 - dd) ? l1 : l2;
    }

    for (std::size_t k = lo; k <= hi; ++k) h(k, k) -= mu;
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx x = h(k, k);
      const cplx y = h(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      double c;
      cplx s;
      if (r == 0.0) {
        c = 1.0;
        s = 0.0;
      } else if (std::abs(x) == 0.0) {
        c = 0.0;
        s = std::conj(y) / std::abs(y);
      } else {
        const cplx phase = x / std::abs(x);
        c = std::abs(x) / r;
        s = phase * std::conj(y) / r;
      }
      gc[k] = c;
      gs[k] = s;
      for (std::size_t j = k; j < n; ++j) {
        const cplx u = h(k, j), w = h(k + 1, j);
        h(k, j) = c * u + s * w;
        h(k + 1, j) = -std::conj(s) * u + c * w;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const double c = gc[k];
      const cplx s = gs[k];
      const std::size_t last = std::min(k + 2, hi);
      for (std::size_t i = 0; i <= last; ++i) {
        const cplx u = h(i, k), w = h(i, k + 1);
        h(i, k) = u * c + w * std::conj(s);
        h(i, k + 1) = -u * s + w * c;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const cplx u = q(i, k), w = q(i, k + 1);
        q(i, k) = u * c + w * std::conj(s);
        q(i, k + 1) = -u * s + w * c;
      }
    }
    for (std::size_t k = lo; k <= hi; ++k) h(k, k) += mu;
  }
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) h(i, j) = 0.0;
  return {std::move(q), std::move(h)};
}

// ---------------------------------------------------------------------------
// Matrix text format: "rows cols" header, then one row per line; '#' lines skipped.

inline DenseMatrix read_matrix(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      const auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '#') continue;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) {
    return Error(Errc::Parse, source + ":" + std::to_string(lineno) + ": " + msg);
  };
  if (!next_line(line)) throw fail("missing 'rows cols' header");
  std::size_t rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> rows >> cols) || (hs >> extra)) throw fail("expected 'rows cols'");
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!next_line(line)) throw fail("expected " + std::to_string(rows) + " rows, got " + std::to_string(i));
    std::istringstream rs(line);
    std::string tok;
    std::size_t count = 0;
    while (rs >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw fail("not a number: '" + tok + "'");
      }
      if (used != tok.size() || !std::isfinite(v)) throw fail("not a finite number: '" + tok + "'");
      data.push_back(v);
      ++count;
    }
    if (count != cols) throw fail("expected " + std::to_string(cols) + " entries, got " + std::to_string(count));
  }
  if (next_line(line)) throw fail("trailing data after matrix");
  return DenseMatrix(rows, cols, std::move(data));
}

inline DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return read_matrix(in, path);
}

inline void write_matrix(std::ostream& out, const DenseMatrix& a) {
  out << a.rows() << ' ' << a.cols() << '\n';
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out << ' ';
      os.str("");
      os << a(i, j);
      out << os.str();
    }
    out << '\n';
  }
}

}  // namespace pinncert
