#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscidamp {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrix : NumericError {
  using NumericError::NumericError;
};

struct NotSymmetric : NumericError {
  using NumericError::NumericError;
};

/// Dense real matrix, row-major. Sized for small control problems
/// (everything in this library is at most 10x10 or its Kronecker square).
class Mat {
 public:
  Mat() = default;

  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Mat(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw std::invalid_argument("Mat: ragged initializer");
      for (double v : row) data_.push_back(v);
    }
    check_finite();
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat diagonal(const std::vector<double>& d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Max absolute entry. All tolerances in this library scale against it.
  double norm_inf() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  void check_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) throw std::invalid_argument("Mat: non-finite entry");
  }

  friend Mat operator+(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "+");
    Mat r = a;
    for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] += b.data_[k];
    return r;
  }

  friend Mat operator-(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "-");
    Mat r = a;
    for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] -= b.data_[k];
    return r;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Mat: dimension mismatch in *");
    Mat r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend Mat operator*(double s, const Mat& a) {
    Mat r = a;
    for (double& v : r.data_) v *= s;
    return r;
  }

  friend Mat operator-(const Mat& a) { return -1.0 * a; }

 private:
  static void require_same_shape(const Mat& a, const Mat& b, const char* op) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw std::invalid_argument(std::string("Mat: dimension mismatch in ") + op);
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Mat mat_vec_to_col(const std::vector<double>& v) {
  Mat m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

namespace detail {

struct LuFactors {
  Mat lu;                    // combined L (unit lower) and U, in place
  std::vector<std::size_t> perm;
  double min_pivot = 0.0;    // smallest |pivot| seen
  double scale = 0.0;        // ∞-norm of the input
};

inline LuFactors lu_factor(const Mat& a) {
  if (!a.square()) throw std::invalid_argument("lu_factor: matrix not square");
  const std::size_t n = a.rows();
  LuFactors f{a, std::vector<std::size_t>(n), 0.0, a.norm_inf()};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  f.min_pivot = std::numeric_limits<double>::infinity();
  Mat& m = f.lu;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(f.perm[k], f.perm[p]);
    }
    const double pivot = m(k, k);
    f.min_pivot = std::min(f.min_pivot, std::abs(pivot));
    if (pivot == 0.0) continue;  // remaining column already eliminated
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = m(i, k) / pivot;
      m(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  if (n == 0) f.min_pivot = std::numeric_limits<double>::infinity();
  return f;
}

inline bool lu_singular(const LuFactors& f, double rel_tol) {
  return f.min_pivot <= rel_tol * f.scale;
}

inline Mat lu_apply_solve(const LuFactors& f, const Mat& rhs) {
  const std::size_t n = f.lu.rows();
  Mat x(n, rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    // forward substitution on the permuted rhs
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs(f.perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x(j, c);
      x(i, c) = s;
    }
    // back substitution
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * x(j, c);
      x(ii, c) = s / f.lu(ii, ii);
    }
  }
  return x;
}

}  // namespace detail

/// Solve a·X = rhs by partial-pivot LU. Throws SingularMatrix when a pivot
/// falls below 1e-12·‖a‖∞.
inline Mat lu_solve(const Mat& a, const Mat& rhs) {
  if (!a.square()) throw std::invalid_argument("lu_solve: matrix not square");
  if (rhs.rows() != a.rows()) throw std::invalid_argument("lu_solve: rhs row mismatch");
  auto f = detail::lu_factor(a);
  if (detail::lu_singular(f, 1e-12))
    throw SingularMatrix("lu_solve: pivot below 1e-12 * |a|_inf");
  return detail::lu_apply_solve(f, rhs);
}

inline Mat inverse(const Mat& a) { return lu_solve(a, Mat::identity(a.rows())); }

/// True iff partial-pivot LU hits a pivot below tol·‖a‖∞.
inline bool rank_deficient(const Mat& a, double tol = 1e-10) {
  if (!a.square()) throw std::invalid_argument("rank_deficient: matrix not square");
  if (tol <= 0.0) throw std::invalid_argument("rank_deficient: tol must be > 0");
  return detail::lu_singular(detail::lu_factor(a), tol);
}

/// Solve fᵀP + Pf = −q for symmetric P via Kronecker vectorization.
/// The system is n²×n², fine for n ≤ 10.
inline Mat lyapunov_solve(const Mat& f, const Mat& q) {
  if (!f.square() || !q.square() || f.rows() != q.rows())
    throw std::invalid_argument("lyapunov_solve: dimension mismatch");
  const std::size_t n = f.rows();
  // column-major vec: vec(P)[i + j*n] = P(i,j)
  // vec(FᵀP) = (I ⊗ Fᵀ) vec(P),  vec(PF) = (Fᵀ ⊗ I) vec(P)
  Mat k(n * n, n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = i + j * n;
      for (std::size_t l = 0; l < n; ++l) {
        k(row, l + j * n) += f(l, i);  // Fᵀ(i,l)
        k(row, i + l * n) += f(l, j);  // Fᵀ(j,l)
      }
    }
  Mat rhs(n * n, 1);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) rhs(i + j * n, 0) = -q(i, j);
  Mat v = lu_solve(k, rhs);
  Mat p(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) p(i, j) = v(i + j * n, 0);
  // symmetrize
  Mat pt = p.transpose();
  return 0.5 * (p + pt);
}

/// Unpivoted Cholesky success test. Input must be symmetric to 1e-9 absolute.
inline bool is_positive_definite(const Mat& p) {
  if (!p.square()) throw std::invalid_argument("is_positive_definite: matrix not square");
  const std::size_t n = p.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(p(i, j) - p(j, i)) > 1e-9)
        throw NotSymmetric("is_positive_definite: symmetry tolerance violated");
  Mat l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = p(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 1e-12) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

}  // namespace oscidamp
