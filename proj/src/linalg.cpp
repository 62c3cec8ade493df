#include "rrag/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rrag/errors.hpp"

namespace rrag {

template <typename T>
PackedSymMatrix<T>::PackedSymMatrix(std::size_t n, std::vector<T> packed)
    : n_(n), entries_(std::move(packed)) {
  if (entries_.size() != n * (n + 1) / 2) {
    throw std::invalid_argument("packed symmetric storage has wrong length");
  }
}

template <typename T>
PackedSymMatrix<T> PackedSymMatrix<T>::from_upper(std::size_t n, std::span<const T> dense) {
  if (dense.size() != n * n) throw std::invalid_argument("dense matrix has wrong size");
  PackedSymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = dense[i * n + j];
  return m;
}

template <typename T>
PackedSymMatrix<T> PackedSymMatrix<T>::identity(std::size_t n) {
  PackedSymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
  return m;
}

template <typename T>
PackedSymMatrix<T> PackedSymMatrix<T>::diagonal(std::initializer_list<T> diag) {
  PackedSymMatrix m(diag.size());
  std::size_t i = 0;
  for (const T& v : diag) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

template <typename T>
std::vector<T> PackedSymMatrix<T>::dense() const {
  std::vector<T> out(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = (*this)(i, j);
  return out;
}

template class PackedSymMatrix<double>;
template class PackedSymMatrix<std::complex<double>>;

double frobenius_norm(const RealSymMatrix& a) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.n(); ++i) {
    sum += a(i, i) * a(i, i);
    for (std::size_t j = i + 1; j < a.n(); ++j) sum += 2.0 * a(i, j) * a(i, j);
  }
  return std::sqrt(sum);
}

double trace(const RealSymMatrix& a) noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < a.n(); ++i) t += a(i, i);
  return t;
}

Spectrum jacobi_eigen(const RealSymMatrix& a, double tol, int max_sweeps) {
  if (!(tol > 0.0)) throw std::invalid_argument("jacobi_eigen: tol must be positive");
  const std::size_t n = a.n();
  for (double v : a.packed()) {
    if (!std::isfinite(v)) throw std::invalid_argument("jacobi_eigen: non-finite entry");
  }
  std::vector<double> m = a.dense();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };

  const double threshold = tol * frobenius_norm(a);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * at(i, j) * at(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > threshold) {
    if (sweep++ >= max_sweeps) {
      throw NonConvergence("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) +
                           " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        // Symmetric Schur rotation annihilating (p, q).
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = at(q, p) = 0.0;
      }
    }
  }

  Spectrum out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = at(i, i);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

template <typename T>
T lu_det_inplace(std::span<T> a, std::size_t n) {
  T det{1};
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return T{0};
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      det = -det;
    }
    const T diag = a[col * n + col];
    det *= diag;
    for (std::size_t r = col + 1; r < n; ++r) {
      const T factor = a[r * n + col] / diag;
      if (factor == T{0}) continue;
      for (std::size_t k = col + 1; k < n; ++k) a[r * n + k] -= factor * a[col * n + k];
    }
  }
  return det;
}

template double lu_det_inplace<double>(std::span<double>, std::size_t);
template std::complex<double> lu_det_inplace<std::complex<double>>(std::span<std::complex<double>>,
                                                                   std::size_t);

double lu_det(const RealSymMatrix& a) {
  std::vector<double> m = a.dense();
  return lu_det_inplace<double>(m, a.n());
}

std::complex<double> lu_det(const ComplexSymMatrix& a) {
  std::vector<std::complex<double>> m = a.dense();
  return lu_det_inplace<std::complex<double>>(m, a.n());
}

Signature signature(const Spectrum& s, double zero_tol) {
  Signature sig;
  for (double v : s.eigenvalues) {
    if (v > zero_tol)
      ++sig.positive;
    else if (v < -zero_tol)
      ++sig.negative;
    else
      ++sig.zero;
  }
  return sig;
}

double default_zero_tol(const RealSymMatrix& a) noexcept { return 1e-9 * (1.0 + frobenius_norm(a)); }

std::vector<double> haar_orthogonal(std::size_t n, GaussianStream& stream) {
  std::vector<double> g(n * n);
  for (double& v : g) v = stream.next_normal();
  // Gram-Schmidt with one reorthogonalisation pass on the columns of g; the
  // column norms are R_ii, positive by construction.
  std::vector<double> q(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = g[i * n + j];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q[i * n + k] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q[i * n + k];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q[i * n + j] = v[i] / norm;
  }
  return q;
}

RealSymMatrix conjugate(const RealSymMatrix& a, std::span<const double> q) {
  const std::size_t n = a.n();
  const std::vector<double> ad = a.dense();
  std::vector<double> qa(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double qik = q[i * n + k];
      for (std::size_t j = 0; j < n; ++j) qa[i * n + j] += qik * ad[k * n + j];
    }
  RealSymMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += qa[i * n + k] * q[j * n + k];
      out(i, j) = s;
    }
  return out;
}

}  // namespace rrag
