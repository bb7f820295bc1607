#pragma once

// Cross-module property suite: oracle agreement, dynamics invariants and
// dense-vs-block equivalence on small lattices.

#include "ghft/hubbard.hpp"

#include <random>
#include <string>
#include <vector>

namespace ghft {

// --- random instances ----------------------------------------------------------

Matrix random_skew(int n, std::mt19937& rng, double scale = 1.0);
/// O Gamma_vac O^T with O = exp(A), A Gaussian skew.
Matrix random_pure(int modes, std::mt19937& rng);
/// Random number, hopping and density-density terms.
DiracTermList random_terms(int modes, std::mt19937& rng, int count = 8);
/// Random T, generic quartic orbits and offset.
MajoranaHamiltonian random_hamiltonian(int modes, std::mt19937& rng, int quartic = 10);

// --- properties ----------------------------------------------------------------

struct PropertyResult {
  std::string name;
  double value = 0.0;  ///< worst observed error
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  HubbardParams lattice;  ///< small lattice for the dense checks (<= 5 x 5)
  unsigned seed = 2024;
  int wick_instances = 50;
  int gradient_instances = 20;
  int max_modes = 8;
  int dynamics_steps = 10000;
  double dynamics_dt = 1e-3;
  double ground_tol = 1e-10;
  double wick_tol = 1e-9;        ///< relative
  double gradient_tol = 1e-6;    ///< relative
  double roundtrip_tol = 1e-10;  ///< absolute
  double anticommutator_tol = 1e-14;
  double purity_tol = 1e-10;
  double energy_drift_tol = 1e-8;  ///< relative
  double monotone_tol = 1e-12;     ///< absolute per accepted step
  double dense_tol = 1e-8;
  double u0_tol = 1e-10;
  double stability_tol = 1e-6;  ///< max |Re| relative to max |lambda|
  double pairing_tol = 1e-9;
  void validate() const;
};

PropertyResult check_wick_fock(const VerifyOptions& o);
PropertyResult check_gradient_identity(const VerifyOptions& o);
PropertyResult check_covariance_roundtrip(const VerifyOptions& o);
PropertyResult check_anticommutators(const VerifyOptions& o);
/// Real-time 2 x 2 Hubbard evolution: purity drift and relative energy drift.
std::vector<PropertyResult> check_real_time(const VerifyOptions& o);
/// Purity over dynamics_steps imaginary-time rotations.
PropertyResult check_imaginary_purity(const VerifyOptions& o);
PropertyResult check_imaginary_monotone(const VerifyOptions& o);
/// Block operators and spectra against the compressed dense operator.
std::vector<PropertyResult> check_dense_vs_block(const VerifyOptions& o);
/// u = 0: dense full spectrum against the block rebuild and the analytic dispersion.
std::vector<PropertyResult> check_free_spectrum(const VerifyOptions& o);
/// max |Re lambda| and +- pairing at the converged ground state.
std::vector<PropertyResult> check_stability(const VerifyOptions& o);

std::vector<PropertyResult> run_verify(const VerifyOptions& o);

}  // namespace ghft
