#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>

namespace pennyflip {

using Complex = std::complex<double>;

// Tolerance for matrix invariant checks (unitarity, hermiticity, trace).
inline constexpr double kMatrixTol = 1e-12;

// Row-major 2x2 complex matrix. Plain value type, 64 bytes, no allocation.
struct Mat2 {
  std::array<Complex, 4> e{};

  Complex& at(std::size_t r, std::size_t c) { return e[2 * r + c]; }
  const Complex& at(std::size_t r, std::size_t c) const { return e[2 * r + c]; }

  static Mat2 identity() { return Mat2{{Complex{1.0}, {}, {}, Complex{1.0}}}; }
};

Mat2 mat_mul(const Mat2& a, const Mat2& b);
Mat2 conjugate_transpose(const Mat2& m);
Complex trace(const Mat2& m);
double max_abs_diff(const Mat2& a, const Mat2& b);
bool approx_equal(const Mat2& a, const Mat2& b, double tol = kMatrixTol);

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator*(double s, const Mat2& m);

// 2x2 unitary. The constructor refuses matrices with U U+ != I beyond kMatrixTol.
class Unitary2 {
 public:
  explicit Unitary2(const Mat2& m);
  const Mat2& mat() const { return m_; }

 private:
  Mat2 m_;
};

// Qubit state. The constructor refuses matrices that are not Hermitian,
// unit-trace and positive semidefinite (each within kMatrixTol).
class DensityMatrix {
 public:
  explicit DensityMatrix(const Mat2& m);
  const Mat2& mat() const { return m_; }

 private:
  Mat2 m_;
};

// One branch of a probabilistic mixture of unitaries.
struct WeightedUnitary {
  double prob;
  Unitary2 u;
};

struct MeasureProbs {
  double p0;
  double p1;
};

// U rho U+.
DensityMatrix evolve_pure(const DensityMatrix& rho, const Unitary2& u);

// Sum_j p_j U_j rho U_j+. Branch probabilities must be nonnegative and sum to 1.
DensityMatrix evolve_mixed(const DensityMatrix& rho,
                           std::span<const WeightedUnitary> branches);

// Computational-basis outcome probabilities: the diagonal of rho.
MeasureProbs measure_probs(const DensityMatrix& rho);

}  // namespace pennyflip
