#pragma once

// Linearized equation of motion around a stationary Gamma0:
//
//   L(X) = [h6(Gamma0), X] + 6 [tr2(U, X), Gamma0]
//
// Eigenvalues lambda = r + i omega; at a variational minimum r = 0 and the
// omega are excitation frequencies in the units of the dGamma/dt = 4[h6, Gamma]
// convention (up to that factor 4).

#include "ghft/gaussian.hpp"

#include <json.hpp>

#include <functional>
#include <vector>

namespace ghft {

/// Coordinates X_kl (k < l) of n x n antisymmetric matrices, row-major over k.
class AntisymmetricBasis {
 public:
  explicit AntisymmetricBasis(int n);

  int n() const { return n_; }
  int size() const { return n_ * (n_ - 1) / 2; }
  int index(int k, int l) const;  ///< requires k < l
  std::pair<int, int> pair(int i) const { return pairs_[i]; }

  Vector vectorize(const Matrix& x) const;
  CVector vectorize(const CMatrix& x) const;
  Matrix unvectorize(const Vector& v) const;
  CMatrix unvectorize(const CVector& v) const;
  /// E_kl - E_lk for basis element i.
  Matrix element(int i) const;

 private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
};

Matrix apply_linearized(const MajoranaHamiltonian& h, const Matrix& gamma0, const Matrix& x);

struct LinearizedOperator {
  Matrix matrix;  ///< acts on AntisymmetricBasis coordinates
  AntisymmetricBasis basis;
};

inline constexpr int kDefaultDenseCap = 20000;

/// Column-by-column from an antisymmetric linear map on n x n matrices.
LinearizedOperator build_operator(int n, const std::function<Matrix(const Matrix&)>& map,
                                  int max_dim = kDefaultDenseCap);

/// Dense operator of apply_linearized.  Refuses D = M(2M-1) > max_dim.
LinearizedOperator build_dense(const MajoranaHamiltonian& h, const Matrix& gamma0, int max_dim = kDefaultDenseCap);

struct Multiplet {
  double omega = 0.0;
  int multiplicity = 0;
  double max_real_residual = 0.0;
  bool zero = false;
  /// Positive-frequency eigenvectors (Im lambda >= 0), unit Frobenius norm,
  /// largest-magnitude entry real-positive.
  std::vector<CMatrix> eigenvectors;
};

struct ExcitationSpectrum {
  std::vector<cplx> eigenvalues;  ///< all D eigenvalues, sorted by (|Im|, Im)
  std::vector<double> omegas;     ///< one omega per +- pair, ascending
  std::vector<Multiplet> multiplets;
  double max_real_residual = 0.0;  ///< max |Re lambda|
  double scale = 0.0;              ///< max |lambda|
  double zero_tol = 0.0;           ///< as applied
};

struct SpectrumOptions {
  double zero_tol = -1.0;         ///< <= 0: 1e-6 * max |lambda| (absolute floor 1e-12)
  double degeneracy_tol = 1e-6;   ///< relative to max(omega, zero_tol)
  bool eigenvectors = true;
  bool skew_solver = true;  ///< Hermitian solver of i A when A is skew-symmetric; false: always the general solver
};

ExcitationSpectrum spectrum(const LinearizedOperator& op, const SpectrumOptions& options = {});

/// max over eigenvalues of the distance to the nearest eigenvalue of -lambda
/// and conj(lambda).
double pairing_defect(const std::vector<cplx>& eigenvalues);

nlohmann::json to_json(const ExcitationSpectrum& s);

}  // namespace ghft
