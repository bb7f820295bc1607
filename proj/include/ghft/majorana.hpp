#pragma once

// Two-body fermionic Hamiltonians in Majorana form:
//
//   H = i sum_kl T_kl c_k c_l + sum_klmn U_klmn c_k c_l c_m c_n + offset
//
// with c_j = a_j^dag + a_j and c_{j+M} = -i (a_j^dag - a_j) for Dirac modes
// j = 0..M-1.  Both sums run over all ordered index tuples; T is real
// antisymmetric and U is real and antisymmetric under exchange of any two
// indices.  U is stored as one value per index orbit {k<l<m<n}, so a stored
// value v stands for the operator 24 v c_k c_l c_m c_n.

#include "ghft/types.hpp"

#include <array>
#include <map>
#include <vector>

namespace ghft {

/// Site x flavor bookkeeping for M Dirac modes and 2M Majoranas.
/// Dirac index j = site * flavors + flavor; Majoranas of mode j are (j, j + M).
/// For spin-1/2 models flavor 0 is spin up and flavor 1 spin down.
class ModeLayout {
 public:
  ModeLayout(int sites, int flavors_per_site);

  int sites() const { return sites_; }
  int flavors() const { return flavors_; }
  int modes() const { return sites_ * flavors_; }
  int majoranas() const { return 2 * modes(); }

  int dirac_index(int site, int flavor) const;
  int site_of(int dirac) const { return dirac / flavors_; }
  int flavor_of(int dirac) const { return dirac % flavors_; }
  /// The two Majorana indices (j, j + M) built from Dirac mode j.
  std::array<int, 2> majorana_pair(int dirac) const { return {dirac, dirac + modes()}; }

 private:
  int sites_;
  int flavors_;
};

struct HoppingTerm {
  int i;
  int j;
  double amplitude;  ///< contributes -amplitude (a_i^dag a_j + a_j^dag a_i)
};

struct NumberTerm {
  int i;
  double coefficient;  ///< coefficient * n_i
};

struct DensityTerm {
  int i;
  int j;
  double coefficient;  ///< coefficient * n_i n_j
};

/// Input language for compile_hamiltonian.  Mode indices are 0-based.
struct DiracTermList {
  std::vector<HoppingTerm> hopping;
  std::vector<NumberTerm> number;
  std::vector<DensityTerm> density;

  DiracTermList& operator+=(const DiracTermList& other);
};

struct QuarticTerm {
  std::array<int, 4> index;  ///< strictly increasing
  double value;
};

class MajoranaHamiltonian {
 public:
  explicit MajoranaHamiltonian(int modes);

  int modes() const { return modes_; }
  int dim() const { return 2 * modes_; }

  /// Dense T; antisymmetric by construction.
  const Matrix& quadratic() const { return t_; }
  /// Adds v to T_kl and -v to T_lk.
  void add_quadratic(int k, int l, double v);
  void set_quadratic(const Matrix& t);

  /// Canonical orbits, sorted by index tuple.
  const std::vector<QuarticTerm>& quartic() const { return u_; }
  /// Adds v to U_klmn (and by antisymmetry to every permutation).  Indices
  /// must be pairwise distinct; any order is accepted.
  void add_quartic(std::array<int, 4> idx, double v);
  /// Full-tensor read U_klmn, with the permutation sign applied.
  double quartic_at(int k, int l, int m, int n) const;

  double offset() const { return offset_; }
  void add_offset(double v) { offset_ += v; }

  MajoranaHamiltonian& operator+=(const MajoranaHamiltonian& other);

 private:
  int modes_;
  Matrix t_;
  std::vector<QuarticTerm> u_;
  double offset_ = 0.0;
};

MajoranaHamiltonian compile_hamiltonian(const ModeLayout& layout, const DiracTermList& terms);

/// Normal-ordered products of Majorana operators with complex coefficients.
/// Used to expand Dirac expressions; c_j^2 = 1 and anticommutation are
/// applied on multiplication.
class MajoranaPolynomial {
 public:
  using Word = std::vector<int>;  // strictly increasing indices

  MajoranaPolynomial() = default;
  static MajoranaPolynomial scalar(cplx v);
  static MajoranaPolynomial linear(const std::vector<std::pair<int, cplx>>& terms);

  MajoranaPolynomial operator*(const MajoranaPolynomial& rhs) const;
  MajoranaPolynomial& operator+=(const MajoranaPolynomial& rhs);
  MajoranaPolynomial& operator*=(cplx s);

  const std::map<Word, cplx>& terms() const { return terms_; }

 private:
  std::map<Word, cplx> terms_;
};

/// Majorana expansion of a_j (dagger = false) or a_j^dag, M = total modes.
MajoranaPolynomial dirac_operator(int j, bool dagger, int modes);

/// Reads a Hermitian polynomial of degree <= 4 into (T, U, offset).  Throws if
/// odd-degree, higher-degree or non-real coefficients exceed `tol`.
MajoranaHamiltonian to_hamiltonian(const MajoranaPolynomial& p, int modes, double tol = 1e-12);

/// Majorana form of the quadratic Dirac operator
///   sum_ij A_ij a_i^dag a_j + 1/2 sum_ij (B_ij a_i^dag a_j^dag + h.c.)
/// with A Hermitian and B antisymmetric (both n x n).  Returns T and the
/// constant offset in a MajoranaHamiltonian with no quartic part.
MajoranaHamiltonian quadratic_from_dirac(const CMatrix& a, const CMatrix& b);

}  // namespace ghft
