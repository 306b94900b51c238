#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lzmeas/matrix2.hpp"

namespace lzmeas {

enum class Basis { diabatic, adiabatic };

const char* to_string(Basis b);

class BasisMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Tolerances for a propagated two-level state.
inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPositivityTol = 1e-8;

// Bloch coordinates: rho = (I + x sx + y sy + w sz) / 2.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
};

// A 2x2 density matrix together with the basis it is expressed in.
// Construction does not validate; use validate_density() on anything that
// came out of a propagation.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(const Mat2& m, Basis b) : m_(m), basis_(b) {}

  static DensityMatrix diag(double p1, double p2, Basis b) { return {Mat2::diag(p1, p2), b}; }
  static DensityMatrix maximally_mixed(Basis b) { return diag(0.5, 0.5, b); }
  static DensityMatrix from_bloch(const BlochVector& r, Basis b);

  const Mat2& matrix() const { return m_; }
  Basis basis() const { return basis_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

  double p1() const { return m_(0, 0).real(); }
  double p2() const { return m_(1, 1).real(); }
  cplx coherence() const { return m_(0, 1); }
  BlochVector bloch() const;

  // Replaces rho by (rho + rho^dagger) / 2.
  void hermitize();
  // Rescales to unit trace; returns the trace error that was removed.
  double renormalize();

 private:
  Mat2 m_ = Mat2::diag(1.0, 0.0);
  Basis basis_ = Basis::diabatic;
};

void require_basis(const DensityMatrix& rho, Basis expected, const char* where);

struct DensityReport {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double purity = 0.0;
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
};

DensityReport validate_density(const DensityMatrix& rho);

// Tr(rho^2)
double purity(const DensityMatrix& rho);

// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const Mat2& m);

}  // namespace lzmeas
