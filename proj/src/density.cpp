#include "lzmeas/density.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace lzmeas {

const char* to_string(Basis b) { return b == Basis::diabatic ? "diabatic" : "adiabatic"; }

DensityMatrix DensityMatrix::from_bloch(const BlochVector& r, Basis b) {
  return {Mat2{0.5 * (1.0 + r.w), cplx{0.5 * r.x, -0.5 * r.y}, cplx{0.5 * r.x, 0.5 * r.y},
               0.5 * (1.0 - r.w)},
          b};
}

BlochVector DensityMatrix::bloch() const {
  const cplx c = 0.5 * (m_(0, 1) + std::conj(m_(1, 0)));
  return {2.0 * c.real(), -2.0 * c.imag(), m_(0, 0).real() - m_(1, 1).real()};
}

void DensityMatrix::hermitize() {
  const cplx c = 0.5 * (m_(0, 1) + std::conj(m_(1, 0)));
  m_ = Mat2{m_(0, 0).real(), c, std::conj(c), m_(1, 1).real()};
}

double DensityMatrix::renormalize() {
  const double tr = m_.trace().real();
  m_ *= 1.0 / tr;
  return tr - 1.0;
}

void require_basis(const DensityMatrix& rho, Basis expected, const char* where) {
  if (rho.basis() != expected)
    throw BasisMismatch(fmt::format("{}: expected a {} state, got {}", where, to_string(expected),
                                    to_string(rho.basis())));
}

double min_eigenvalue(const Mat2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const cplx b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double half_gap = std::hypot(0.5 * (a - d), std::abs(b));
  return 0.5 * (a + d) - half_gap;
}

double purity(const DensityMatrix& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

DensityReport validate_density(const DensityMatrix& rho) {
  DensityReport rep;
  const Mat2& m = rho.matrix();
  rep.trace_error = std::abs(m.trace() - 1.0);
  rep.hermiticity_error = hermiticity_error(m);
  rep.min_eigenvalue = min_eigenvalue(m);
  rep.purity = purity(rho);
  if (!std::isfinite(rep.trace_error) || !std::isfinite(rep.min_eigenvalue)) {
    rep.violations.emplace_back("non-finite entries");
    return rep;
  }
  if (rep.trace_error > kTraceTol)
    rep.violations.push_back(fmt::format("trace error {:.3e} exceeds {:.0e}", rep.trace_error, kTraceTol));
  if (rep.hermiticity_error > kHermiticityTol)
    rep.violations.push_back(
        fmt::format("hermiticity error {:.3e} exceeds {:.0e}", rep.hermiticity_error, kHermiticityTol));
  if (rep.min_eigenvalue < -kPositivityTol)
    rep.violations.push_back(fmt::format("negative eigenvalue {:.3e}", rep.min_eigenvalue));
  return rep;
}

}  // namespace lzmeas
