#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "rrag/random.hpp"

namespace rrag {

/// Symmetric matrix stored as its packed upper triangle, row-major over i <= j.
/// Asymmetry is unrepresentable: (i, j) and (j, i) address the same slot.
template <typename T>
class PackedSymMatrix {
 public:
  using value_type = T;

  PackedSymMatrix() = default;
  explicit PackedSymMatrix(std::size_t n) : n_(n), entries_(n * (n + 1) / 2, T{}) {}
  PackedSymMatrix(std::size_t n, std::vector<T> packed);

  /// Takes the upper triangle of a row-major n x n dense matrix.
  static PackedSymMatrix from_upper(std::size_t n, std::span<const T> dense);
  static PackedSymMatrix identity(std::size_t n);
  static PackedSymMatrix diagonal(std::initializer_list<T> diag);

  std::size_t n() const noexcept { return n_; }
  std::span<const T> packed() const noexcept { return entries_; }
  std::span<T> packed() noexcept { return entries_; }

  T operator()(std::size_t i, std::size_t j) const noexcept { return entries_[index(i, j)]; }
  T& operator()(std::size_t i, std::size_t j) noexcept { return entries_[index(i, j)]; }

  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return i * n_ - (i * (i + 1)) / 2 + j;
  }

  /// Row-major dense copy.
  std::vector<T> dense() const;

 private:
  std::size_t n_ = 0;
  std::vector<T> entries_;
};

using RealSymMatrix = PackedSymMatrix<double>;
using ComplexSymMatrix = PackedSymMatrix<std::complex<double>>;

/// Eigenvalues in nondecreasing order.
struct Spectrum {
  std::vector<double> eigenvalues;
  std::size_t n() const noexcept { return eigenvalues.size(); }
};

struct Signature {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

double frobenius_norm(const RealSymMatrix& a) noexcept;
double trace(const RealSymMatrix& a) noexcept;

/// Cyclic Jacobi eigenvalue iteration. Stops once the off-diagonal Frobenius
/// norm is below tol * ||A||_F. Throws NonConvergence after max_sweeps.
Spectrum jacobi_eigen(const RealSymMatrix& a, double tol = 1e-12, int max_sweeps = 50);

/// Determinant by LU with partial pivoting.
double lu_det(const RealSymMatrix& a);
std::complex<double> lu_det(const ComplexSymMatrix& a);

/// Determinant of a row-major dense n x n matrix; the buffer is overwritten.
template <typename T>
T lu_det_inplace(std::span<T> a, std::size_t n);

/// Counts eigenvalues above zero_tol, below -zero_tol, and the remainder.
Signature signature(const Spectrum& s, double zero_tol);

/// 1e-9 * (1 + ||A||_F).
double default_zero_tol(const RealSymMatrix& a) noexcept;

/// Haar-distributed orthogonal matrix: QR of an i.i.d. standard Gaussian
/// matrix with R_ii > 0. Row-major.
std::vector<double> haar_orthogonal(std::size_t n, GaussianStream& stream);

/// Q A Q^T for row-major orthogonal Q.
RealSymMatrix conjugate(const RealSymMatrix& a, std::span<const double> q);

}  // namespace rrag
