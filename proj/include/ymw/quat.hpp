#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <vector>

#include "ymw/errors.hpp"

namespace ymw {

// q = w + x i + y j + z k. Pure-imaginary quaternions model su(2).
template <typename Scalar>
struct Quaternion {
  Scalar w{0}, x{0}, y{0}, z{0};

  constexpr Quaternion() = default;
  constexpr Quaternion(Scalar w_, Scalar x_, Scalar y_, Scalar z_) : w(w_), x(x_), y(y_), z(z_) {}
  explicit constexpr Quaternion(Scalar re) : w(re) {}

  // 1, i, j, k for mu = 0..3.
  static constexpr Quaternion basis(int mu) {
    return Quaternion(mu == 0 ? 1 : 0, mu == 1 ? 1 : 0, mu == 2 ? 1 : 0, mu == 3 ? 1 : 0);
  }
  static Quaternion pure(const Eigen::Matrix<Scalar, 3, 1>& v) { return {0, v(0), v(1), v(2)}; }
  static Quaternion from_vec4(const Eigen::Matrix<Scalar, 4, 1>& v) { return {v(0), v(1), v(2), v(3)}; }

  Scalar operator[](int i) const { return i == 0 ? w : i == 1 ? x : i == 2 ? y : z; }
  Scalar& operator[](int i) { return i == 0 ? w : i == 1 ? x : i == 2 ? y : z; }

  Scalar real() const { return w; }
  Quaternion imag() const { return {0, x, y, z}; }
  Eigen::Matrix<Scalar, 3, 1> vec() const { return {x, y, z}; }
  Eigen::Matrix<Scalar, 4, 1> vec4() const { return {w, x, y, z}; }

  Quaternion conj() const { return {w, -x, -y, -z}; }
  Scalar norm2() const { return w * w + x * x + y * y + z * z; }
  Scalar norm() const {
    using std::sqrt;
    return sqrt(norm2());
  }
  Quaternion inverse() const {
    const Scalar n = norm2();
    if (n == Scalar(0)) throw SingularMatrix("quaternion inverse of zero");
    return conj() / n;
  }

  Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  Quaternion& operator*=(Scalar s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }
  Quaternion& operator/=(Scalar s) {
    w /= s; x /= s; y /= s; z /= s;
    return *this;
  }
  Quaternion& operator*=(const Quaternion& o) { return *this = *this * o; }

  friend Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
  friend Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
  friend Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
  friend Quaternion operator*(Quaternion a, Scalar s) { return a *= s; }
  friend Quaternion operator*(Scalar s, Quaternion a) { return a *= s; }
  friend Quaternion operator/(Quaternion a, Scalar s) { return a /= s; }
  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend bool operator==(const Quaternion& a, const Quaternion& b) {
    return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
  }
  friend std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
  }
};

using Quat = Quaternion<double>;

template <typename Scalar>
Quaternion<Scalar> conj(const Quaternion<Scalar>& q) {
  return q.conj();
}

template <typename Scalar>
Quaternion<Scalar> commutator(const Quaternion<Scalar>& a, const Quaternion<Scalar>& b) {
  return a * b - b * a;
}

// Re(conj(a) b), the Euclidean dot product on R^4.
template <typename Scalar>
Scalar dot(const Quaternion<Scalar>& a, const Quaternion<Scalar>& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

// Trace of the 2x2 complex matrix representing a*b.
template <typename Scalar>
Scalar trace_product(const Quaternion<Scalar>& a, const Quaternion<Scalar>& b) {
  return 2 * (a * b).w;
}

// Ad-invariant inner product on su(2): <p,q> = -Tr(pq) = 2 Re(conj(p) q).
template <typename Scalar>
Scalar su2_inner(const Quaternion<Scalar>& a, const Quaternion<Scalar>& b) {
  return 2 * dot(a, b);
}

template <typename Scalar>
Quaternion<Scalar> unit_exp(const Quaternion<Scalar>& pure) {
  using std::cos;
  using std::sin;
  const Scalar th = pure.imag().norm();
  if (th == Scalar(0)) return Quaternion<Scalar>(1);
  return Quaternion<Scalar>(cos(th)) + pure.imag() * (sin(th) / th);
}

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

// Row-major matrix over H with noncommutative products.
template <typename Scalar>
class QuatMatrix {
 public:
  using Q = Quaternion<Scalar>;

  QuatMatrix() = default;
  QuatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QuatMatrix zero(std::size_t rows, std::size_t cols) { return QuatMatrix(rows, cols); }
  static QuatMatrix identity(std::size_t n) {
    QuatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Q(1);
    return m;
  }
  static QuatMatrix scalar(std::size_t n, const Q& q) {
    QuatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = q;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  Q& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Q& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  Q& operator[](std::size_t k) { return data_[k]; }
  const Q& operator[](std::size_t k) const { return data_[k]; }

  QuatMatrix adjoint() const {
    QuatMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j).conj();
    return r;
  }
  QuatMatrix transpose() const {
    QuatMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }
  // Entrywise imaginary part.
  QuatMatrix imag() const {
    QuatMatrix r(*this);
    for (auto& q : r.data_) q.w = 0;
    return r;
  }

  Scalar norm2() const {
    Scalar s = 0;
    for (const auto& q : data_) s += q.norm2();
    return s;
  }
  Scalar norm() const {
    using std::sqrt;
    return sqrt(norm2());
  }

  QuatMatrix& operator+=(const QuatMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  QuatMatrix& operator-=(const QuatMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  QuatMatrix& operator*=(Scalar s) {
    for (auto& q : data_) q *= s;
    return *this;
  }

  friend QuatMatrix operator+(QuatMatrix a, const QuatMatrix& b) { return a += b; }
  friend QuatMatrix operator-(QuatMatrix a, const QuatMatrix& b) { return a -= b; }
  friend QuatMatrix operator-(QuatMatrix a) { return a *= Scalar(-1); }
  friend QuatMatrix operator*(QuatMatrix a, Scalar s) { return a *= s; }
  friend QuatMatrix operator*(Scalar s, QuatMatrix a) { return a *= s; }
  friend QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b) {
    if (a.cols_ != b.rows_) throw DegenerateInput("quaternion matrix shape mismatch");
    QuatMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Q& aik = a(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  // Scalar quaternions act as q * I, so order is preserved.
  friend QuatMatrix operator*(const Q& q, QuatMatrix a) {
    for (auto& e : a.data_) e = q * e;
    return a;
  }
  friend QuatMatrix operator*(QuatMatrix a, const Q& q) {
    for (auto& e : a.data_) e = e * q;
    return a;
  }

 private:
  void check_same(const QuatMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DegenerateInput("quaternion matrix shape mismatch");
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Q> data_;
};

using QMatrix = QuatMatrix<double>;

// q = a + b j with a = w + x i, b = y + z i maps to [[a, b], [-conj(b), conj(a)]].
template <typename Scalar>
ComplexMatrix<Scalar> complex_embed(const QuatMatrix<Scalar>& m) {
  using C = std::complex<Scalar>;
  ComplexMatrix<Scalar> c(2 * m.rows(), 2 * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto& q = m(i, j);
      const C a(q.w, q.x), b(q.y, q.z);
      c(2 * i, 2 * j) = a;
      c(2 * i, 2 * j + 1) = b;
      c(2 * i + 1, 2 * j) = -std::conj(b);
      c(2 * i + 1, 2 * j + 1) = std::conj(a);
    }
  return c;
}

template <typename Scalar>
QuatMatrix<Scalar> complex_unembed(const ComplexMatrix<Scalar>& c) {
  if (c.rows() % 2 != 0 || c.cols() % 2 != 0) throw DegenerateInput("complex embedding must have even shape");
  QuatMatrix<Scalar> m(c.rows() / 2, c.cols() / 2);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto a = c(2 * i, 2 * j);
      const auto b = c(2 * i, 2 * j + 1);
      m(i, j) = {a.real(), a.imag(), b.real(), b.imag()};
    }
  return m;
}

template <typename Scalar>
Scalar smallest_singular_value(const QuatMatrix<Scalar>& m) {
  if (m.size() == 0) throw DegenerateInput("empty matrix");
  if (m.rows() == 1 && m.cols() == 1) return m(0, 0).norm();
  if (m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<ComplexMatrix<Scalar>> svd(complex_embed(m));
  return svd.singularValues().minCoeff();
}

namespace detail {
template <typename Scalar>
void require_regular(const QuatMatrix<Scalar>& m) {
  if (m.rows() != m.cols()) throw DegenerateInput("square matrix required");
  const Scalar smin = smallest_singular_value(m);
  Scalar scale = 0;
  for (std::size_t k = 0; k < m.size(); ++k) scale = std::max(scale, m[k].norm());
  if (!(smin > Scalar(1e-12) * std::max(scale, Scalar(1))))
    throw SingularMatrix("quaternion matrix is numerically singular");
}
}  // namespace detail

template <typename Scalar>
QuatMatrix<Scalar> inverse(const QuatMatrix<Scalar>& m) {
  detail::require_regular(m);
  if (m.rows() == 1) {
    QuatMatrix<Scalar> r(1, 1);
    r(0, 0) = m(0, 0).inverse();
    return r;
  }
  const ComplexMatrix<Scalar> c = complex_embed(m);
  return complex_unembed<Scalar>(c.partialPivLu().inverse());
}

// Solves M u = v for a square M.
template <typename Scalar>
QuatMatrix<Scalar> solve(const QuatMatrix<Scalar>& m, const QuatMatrix<Scalar>& v) {
  detail::require_regular(m);
  if (v.rows() != m.rows()) throw DegenerateInput("right-hand side shape mismatch");
  if (m.rows() == 1) return m(0, 0).inverse() * v;
  const ComplexMatrix<Scalar> c = complex_embed(m);
  const ComplexMatrix<Scalar> rhs = complex_embed(v);
  return complex_unembed<Scalar>(c.partialPivLu().solve(rhs));
}

}  // namespace ymw
