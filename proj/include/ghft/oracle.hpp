#pragma once

// Brute-force Fock-space representation for small systems (M <= 12).
//
// Occupation basis: bit j of the basis index is the occupation of Dirac mode
// j (mode 0 is the least significant bit).  Jordan-Wigner strings run over
// lower modes: a_j |s> = (-1)^{sum_{i<j} s_i} |s - e_j> when s_j = 1.

#include "ghft/majorana.hpp"
#include "ghft/types.hpp"

#include <vector>

namespace ghft::oracle {

inline constexpr int kMaxModes = 12;

/// Dense operator on the 2^M dimensional Fock space.
struct FockOperator {
  int modes;
  CMatrix matrix;
};

/// Action of a single Majorana c_k on a basis state: c_k |s> = phase |target>.
struct MajoranaAction {
  unsigned target;
  cplx phase;
};
MajoranaAction apply_majorana(int k, unsigned state, int modes);

/// Dense matrix of a single Majorana operator.
FockOperator majorana_matrix(int k, int modes);

/// Exact matrix of i sum T c c + sum U c c c c + offset.
FockOperator fock_matrix(const MajoranaHamiltonian& h);

/// Direct construction from Dirac terms, independent of compile_hamiltonian.
FockOperator fock_matrix(int modes, const DiracTermList& terms);

/// Dirac number operator n_j.
FockOperator number_operator(int j, int modes);

/// Ground vector of the parent Hamiltonian -Gamma/4 (unit single-particle
/// gaps).  Throws if the parent ground space is degenerate.
CVector gaussian_to_fock(const Matrix& gamma);

/// Gamma_kl = i <c_k c_l> (k != l) recomputed from an exact state.
Matrix covariance_from_state(const CVector& psi);

cplx exact_expectation(const FockOperator& op, const CVector& psi);

/// Eigenvalues of a Hermitian Fock operator, ascending.
Vector exact_spectrum(const FockOperator& op);

}  // namespace ghft::oracle
