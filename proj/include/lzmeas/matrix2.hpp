#pragma once

#include <array>
#include <complex>

namespace lzmeas {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

// Dense 2x2 complex matrix. Indices are zero-based: (0,0) is the "11" entry.
class Mat2 {
 public:
  constexpr Mat2() = default;
  constexpr Mat2(cplx a00, cplx a01, cplx a10, cplx a11) : m_{a00, a01, a10, a11} {}

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 zero() { return {}; }
  static constexpr Mat2 diag(cplx a, cplx b) { return {a, 0.0, 0.0, b}; }

  constexpr cplx& operator()(int r, int c) { return m_[static_cast<std::size_t>(2 * r + c)]; }
  constexpr const cplx& operator()(int r, int c) const {
    return m_[static_cast<std::size_t>(2 * r + c)];
  }

  Mat2 adjoint() const;
  Mat2 transpose() const;
  cplx trace() const { return m_[0] + m_[3]; }
  cplx determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  // Largest absolute entry; used as the error norm throughout.
  double max_abs() const;

  Mat2& operator+=(const Mat2& o);
  Mat2& operator-=(const Mat2& o);
  Mat2& operator*=(cplx s);

  friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
  friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
  friend Mat2 operator-(Mat2 a) { return a *= -1.0; }
  friend Mat2 operator*(Mat2 a, cplx s) { return a *= s; }
  friend Mat2 operator*(cplx s, Mat2 a) { return a *= s; }
  friend Mat2 operator*(Mat2 a, double s) { return a *= s; }
  friend Mat2 operator*(double s, Mat2 a) { return a *= s; }
  friend Mat2 operator*(const Mat2& a, const Mat2& b);
  friend bool operator==(const Mat2&, const Mat2&) = default;

 private:
  std::array<cplx, 4> m_{};
};

namespace pauli {
inline constexpr Mat2 x{0.0, 1.0, 1.0, 0.0};
inline constexpr Mat2 y{0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0};
inline constexpr Mat2 z{1.0, 0.0, 0.0, -1.0};
}  // namespace pauli

// max |A - A^dagger|
double hermiticity_error(const Mat2& a);

Mat2 commutator(const Mat2& a, const Mat2& b);

// Measurement-induced dephasing -(lambda/2) [A, [A, rho]] for a Hermitian
// observable A. Linear in rho, so it accepts any matrix (not only states).
// Throws std::invalid_argument for lambda < 0 or non-Hermitian A.
Mat2 dephasing_term(const Mat2& observable, const Mat2& rho, double lambda);

// exp(-i H dt) for Hermitian H, evaluated in closed form.
Mat2 unitary_exponential(const Mat2& hamiltonian, double dt);

}  // namespace lzmeas
