#include "pennyflip/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pennyflip {

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  Mat2 r;
  r.e[0] = a.e[0] * b.e[0] + a.e[1] * b.e[2];
  r.e[1] = a.e[0] * b.e[1] + a.e[1] * b.e[3];
  r.e[2] = a.e[2] * b.e[0] + a.e[3] * b.e[2];
  r.e[3] = a.e[2] * b.e[1] + a.e[3] * b.e[3];
  return r;
}

Mat2 conjugate_transpose(const Mat2& m) {
  return Mat2{{std::conj(m.e[0]), std::conj(m.e[2]),
               std::conj(m.e[1]), std::conj(m.e[3])}};
}

Complex trace(const Mat2& m) { return m.e[0] + m.e[3]; }

double max_abs_diff(const Mat2& a, const Mat2& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(a.e[i] - b.e[i]));
  return d;
}

bool approx_equal(const Mat2& a, const Mat2& b, double tol) {
  return max_abs_diff(a, b) <= tol;
}

Mat2 operator*(const Mat2& a, const Mat2& b) { return mat_mul(a, b); }

Mat2 operator+(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
  return r;
}

Mat2 operator*(double s, const Mat2& m) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.e[i] = s * m.e[i];
  return r;
}

Unitary2::Unitary2(const Mat2& m) : m_(m) {
  const Mat2 prod = mat_mul(m, conjugate_transpose(m));
  if (!approx_equal(prod, Mat2::identity(), kMatrixTol)) {
    throw std::invalid_argument("Unitary2: U U+ deviates from identity");
  }
}

DensityMatrix::DensityMatrix(const Mat2& m) : m_(m) {
  if (std::abs(m.e[1] - std::conj(m.e[2])) > kMatrixTol ||
      std::abs(m.e[0].imag()) > kMatrixTol || std::abs(m.e[3].imag()) > kMatrixTol) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  if (std::abs(trace(m) - Complex{1.0}) > kMatrixTol) {
    throw std::invalid_argument("DensityMatrix: trace is not 1");
  }
  // 2x2 Hermitian PSD test: nonnegative diagonal and determinant.
  const double d0 = m.e[0].real();
  const double d1 = m.e[3].real();
  const double det = d0 * d1 - std::norm(m.e[1]);
  if (d0 < -kMatrixTol || d1 < -kMatrixTol || det < -kMatrixTol) {
    throw std::invalid_argument("DensityMatrix: not positive semidefinite");
  }
}

DensityMatrix evolve_pure(const DensityMatrix& rho, const Unitary2& u) {
  return DensityMatrix(mat_mul(mat_mul(u.mat(), rho.mat()), conjugate_transpose(u.mat())));
}

DensityMatrix evolve_mixed(const DensityMatrix& rho,
                           std::span<const WeightedUnitary> branches) {
  if (branches.empty()) {
    throw std::invalid_argument("evolve_mixed: no branches");
  }
  double total = 0.0;
  Mat2 acc;
  for (const WeightedUnitary& b : branches) {
    if (b.prob < -kMatrixTol) {
      throw std::invalid_argument("evolve_mixed: negative branch probability");
    }
    total += b.prob;
    const Mat2 term =
        mat_mul(mat_mul(b.u.mat(), rho.mat()), conjugate_transpose(b.u.mat()));
    acc = acc + b.prob * term;
  }
  if (std::abs(total - 1.0) > kMatrixTol) {
    throw std::invalid_argument("evolve_mixed: branch probabilities do not sum to 1");
  }
  return DensityMatrix(acc);
}

MeasureProbs measure_probs(const DensityMatrix& rho) {
  return MeasureProbs{rho.mat().e[0].real(), rho.mat().e[3].real()};
}

}  // namespace pennyflip
