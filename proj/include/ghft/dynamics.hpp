#pragma once

// Gaussified dynamics of the covariance matrix.
//
// Real time:       dGamma/dt = 4 [h6(Gamma), Gamma]
// Imaginary time:  Gamma <- e^{A dtau} Gamma e^{-A dtau},  A = 2 [h6(Gamma), Gamma]
//
// Both are orthogonal conjugations, so antisymmetry and purity are kept up
// to roundoff.

#include "ghft/gaussian.hpp"

#include <json.hpp>

#include <functional>
#include <utility>
#include <vector>

namespace ghft {

/// e^{A} for antisymmetric A (an orthogonal matrix).
Matrix expm_skew(const Matrix& a);

/// O Gamma O^T with O = e^{A}, antisymmetrized.
Matrix rotate_covariance(const Matrix& gamma, const Matrix& a);

/// ||[h6(Gamma), Gamma]||_max
double stationarity_residual(const MajoranaHamiltonian& h, const Matrix& gamma);

struct RealTimeOptions {
  int max_corrections = 50;
  double correction_tol = 1e-15;  ///< on ||Gamma'_{n+1} - Gamma'_n||_max
};

/// One exponential implicit-midpoint step:
///   Gamma' = e^{A} Gamma e^{-A},  A = 4 dt h6((Gamma + Gamma') / 2)
/// solved by fixed-point iteration.  Throws for non-pure input or dt <= 0.
CovarianceMatrix real_time_step(const MajoranaHamiltonian& h, const CovarianceMatrix& gamma, double dt,
                                const RealTimeOptions& options = {});

/// `steps` consecutive real_time_step calls; purity is checked once on entry.
CovarianceMatrix real_time_evolve(const MajoranaHamiltonian& h, const CovarianceMatrix& gamma, double dt, long steps,
                                  const RealTimeOptions& options = {});

struct FlowReport {
  long iterations = 0;  ///< step attempts, accepted or not
  long rejected = 0;
  double final_energy = 0.0;
  std::vector<double> energy_history;  ///< initial energy, then one entry per accepted step
  double residual = 0.0;
  bool converged = false;
  double wall_time = 0.0;  ///< seconds
  double initial_dtau = 0.0;
  double final_dtau = 0.0;
};

nlohmann::json to_json(const FlowReport& r, bool with_history = true);

struct FlowSettings {
  double dtau = 0.0;  ///< <= 0: 0.05 / ||h6(Gamma_init)||_max
  double tol = 1e-8;
  long max_iter = 200000;
  double growth = 1.05;       ///< dtau factor after an accepted step
  double max_growth = 64.0;   ///< dtau never exceeds max_growth * initial dtau
  double energy_slack = 1e-13;  ///< a step is rejected if E rises by more than this
};

/// A flow over a list of covariance blocks.  `gradient` returns, per block,
/// the matrix h_b whose commutator with Gamma_b drives the flow; the problem
/// is a descent problem when sum_b h_b . dGamma_b is proportional to dE.
struct BlockFlowProblem {
  std::function<double(const std::vector<Matrix>&)> energy;
  std::function<std::vector<Matrix>(const std::vector<Matrix>&)> gradient;
};

struct BlockFlowResult {
  std::vector<Matrix> blocks;
  FlowReport report;
};

BlockFlowResult imaginary_time_flow(const BlockFlowProblem& problem, std::vector<Matrix> init,
                                    const FlowSettings& settings = {});

/// Full-space imaginary-time flow to the variational ground state.
/// Non-convergence is reported, never thrown.
std::pair<CovarianceMatrix, FlowReport> imaginary_time_ground_state(const MajoranaHamiltonian& h,
                                                                    const CovarianceMatrix& init,
                                                                    const FlowSettings& settings = {});

inline std::pair<CovarianceMatrix, FlowReport> imaginary_time_ground_state(const MajoranaHamiltonian& h,
                                                                           const CovarianceMatrix& init, double dtau,
                                                                           double tol, long max_iter) {
  FlowSettings s;
  s.dtau = dtau;
  s.tol = tol;
  s.max_iter = max_iter;
  return imaginary_time_ground_state(h, init, s);
}

}  // namespace ghft
