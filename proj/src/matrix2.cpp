#include "lzmeas/matrix2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lzmeas {

Mat2 Mat2::adjoint() const {
  return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

Mat2 Mat2::transpose() const { return {m_[0], m_[2], m_[1], m_[3]}; }

double Mat2::max_abs() const {
  double out = 0.0;
  for (const auto& v : m_) out = std::max(out, std::abs(v));
  return out;
}

Mat2& Mat2::operator+=(const Mat2& o) {
  for (std::size_t i = 0; i < 4; ++i) m_[i] += o.m_[i];
  return *this;
}

Mat2& Mat2::operator-=(const Mat2& o) {
  for (std::size_t i = 0; i < 4; ++i) m_[i] -= o.m_[i];
  return *this;
}

Mat2& Mat2::operator*=(cplx s) {
  for (auto& v : m_) v *= s;
  return *this;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
          a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)};
}

double hermiticity_error(const Mat2& a) { return (a - a.adjoint()).max_abs(); }

Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

Mat2 dephasing_term(const Mat2& observable, const Mat2& rho, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("dephasing_term: measurement strength must be >= 0");
  if (hermiticity_error(observable) > 1e-12)
    throw std::invalid_argument("dephasing_term: observable is not Hermitian");
  if (lambda == 0.0) return Mat2::zero();
  return -0.5 * lambda * commutator(observable, commutator(observable, rho));
}

Mat2 unitary_exponential(const Mat2& h, double dt) {
  // H = h0 I + hx sx + hy sy + hz sz
  const double h0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const double hz = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const double hx = h(0, 1).real();
  const double hy = -h(0, 1).imag();
  const double norm = std::sqrt(hx * hx + hy * hy + hz * hz);
  const double angle = norm * dt;
  const double c = std::cos(angle);
  // sin(angle)/norm, continuous at norm -> 0
  const double s_over = norm > 1e-300 ? std::sin(angle) / norm : dt;
  const cplx phase = std::exp(cplx{0.0, -h0 * dt});
  const Mat2 n_sigma{hz, cplx{hx, -hy}, cplx{hx, hy}, -hz};
  return phase * (Mat2::identity() * c - kI * s_over * n_sigma);
}

}  // namespace lzmeas
