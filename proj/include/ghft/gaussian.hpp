#pragma once

// Fermionic Gaussian states in covariance-matrix form.
//
// Gamma_kl = (i/2) <[c_k, c_l]>, so <c_k c_l> = delta_kl - i Gamma_kl.
// With the Majorana conventions of majorana.hpp a single empty mode has
// Gamma_{j,j+M} = +1 and an occupied one Gamma_{j,j+M} = -1.
//
// The energy functional is E(Gamma) = sum_kl h3_kl Gamma_kl + offset with
// h3 = T + 3 tr2(U, Gamma), and its gradient dE/dGamma_kl is h6 = T + 6 tr2(U, Gamma)
// (unit constant: dE(Gamma + eps X)/deps = sum_kl h6_kl X_kl).

#include "ghft/majorana.hpp"
#include "ghft/types.hpp"

#include <iosfwd>
#include <string>

namespace ghft {

inline constexpr double kDefaultStateTol = 1e-8;

/// Real antisymmetric 2M x 2M matrix.  Construction rejects inputs that are
/// not antisymmetric to 1e-12 and stores the exact antisymmetric part.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const Matrix& gamma);

  /// All modes empty.
  static CovarianceMatrix vacuum(int modes);
  /// Gamma = 0.
  static CovarianceMatrix maximally_mixed(int modes);

  const Matrix& matrix() const { return gamma_; }
  int dim() const { return static_cast<int>(gamma_.rows()); }
  int modes() const { return dim() / 2; }
  double operator()(int k, int l) const { return gamma_(k, l); }

 private:
  Matrix gamma_;
};

struct StateCheck {
  bool physical;
  bool pure;
  double max_singular_value;
  double purity_violation;  ///< max |(Gamma^2 + 1)_kl|
};

/// Physical iff every singular value is <= 1 + tol, pure iff ||Gamma^2 + 1||_max <= tol.
StateCheck validate(const Matrix& gamma, double tol = kDefaultStateTol);
inline StateCheck validate(const CovarianceMatrix& g, double tol = kDefaultStateTol) {
  return validate(g.matrix(), tol);
}

/// <c_k c_l> = delta_kl - i Gamma_kl.
cplx two_point(const CovarianceMatrix& g, int k, int l);

/// sum_ab x_a y_b <c_a c_b> for Majorana coefficient vectors x, y.
cplx majorana_bilinear(const Matrix& gamma, const CVector& x, const CVector& y);

/// Coefficients of a_j (dagger = false) or a_j^dag in the Majorana basis.
CVector dirac_coefficients(int j, bool dagger, int modes);

/// <a_i^dag a_j>
cplx hopping_expectation(const Matrix& gamma, int i, int j);
/// <a_i^dag a_j^dag>
cplx pairing_expectation(const Matrix& gamma, int i, int j);

/// tr2(U, X)_kl = sum_mn U_klmn X_nm over the full antisymmetric tensor.
/// Bilinear in (U, X); the result is exactly antisymmetric.
Matrix tr2_contract(const std::vector<QuarticTerm>& u, const Matrix& x);

/// <H> by Wick's theorem, including the offset.  Throws for unphysical Gamma.
double energy(const MajoranaHamiltonian& h, const Matrix& gamma, double tol = kDefaultStateTol);
inline double energy(const MajoranaHamiltonian& h, const CovarianceMatrix& g) {
  return energy(h, g.matrix());
}

/// Same polynomial as energy() without the physicality check.
double wick_energy(const MajoranaHamiltonian& h, const Matrix& gamma);

/// T + factor * tr2(U, Gamma); factor 3 gives the energy kernel, 6 the gradient.
Matrix mean_field(const MajoranaHamiltonian& h, const Matrix& gamma, int factor);

/// Pure state minimising sum_kl h_kl Gamma_kl, i.e. the ground state of
/// i sum h_kl c_k c_l.  Zero modes of h (|eps| <= zero_tol * ||h||) are filled
/// with the completion closest to the vacuum, and one zero-mode block is
/// flipped if needed so that the state has even parity.
CovarianceMatrix quadratic_ground_state(const Matrix& h, double zero_tol = 1e-10);

/// Pfaffian of a real antisymmetric matrix (Parlett-Reid with pivoting).
double pfaffian(Matrix a);

/// Fermion parity (+1 even, -1 odd) of a pure state.
int parity(const Matrix& gamma);

// --- file I/O ---------------------------------------------------------------
//
// Text form:
//   # covariance-matrix dim=<n> format=csv
//   <n rows of n comma-separated values, 17 significant digits>
// Binary form:
//   # covariance-matrix dim=<n> format=binary endian=little\n
//   <n*n IEEE-754 float64, little endian, row major>

enum class MatrixFileFormat { Csv, Binary };

void write_matrix(std::ostream& os, const Matrix& m, MatrixFileFormat format);
Matrix read_matrix(std::istream& is);
void save_covariance(const std::string& path, const CovarianceMatrix& g, MatrixFileFormat format);
CovarianceMatrix load_covariance(const std::string& path);

}  // namespace ghft
