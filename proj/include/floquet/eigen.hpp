#pragma once

// Small dense complex matrices and their eigenvalues.

#include <complex>
#include <cstddef>
#include <vector>

namespace floquet {

class ComplexMatrix {
 public:
  using value_type = std::complex<double>;

  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const { return n_; }
  value_type& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
  const value_type& operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }

  double frobenius_norm() const;

 private:
  std::size_t n_ = 0;
  std::vector<value_type> data_;
};

struct EigenOptions {
  int max_iterations_per_eigenvalue = 30;
};

/// Eigenvalues of a general complex matrix: Householder reduction to upper
/// Hessenberg form, then single-shift QR with Wilkinson shifts and
/// deflation. Order follows deflation (bottom-up). Throws NumericalError if
/// an eigenvalue does not converge within the iteration cap.
std::vector<std::complex<double>> eigenvalues(ComplexMatrix a, const EigenOptions& opts = {});

/// In-place reduction to upper Hessenberg form (similarity transform).
void reduce_to_hessenberg(ComplexMatrix& a);

}  // namespace floquet
