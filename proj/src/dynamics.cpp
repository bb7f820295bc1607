#include "ghft/dynamics.hpp"
#include "ghft/parallel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cmath>
#include <limits>

namespace ghft {

Matrix expm_skew(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("expm_skew: matrix is not square");
  if (a.size() == 0) return a;
  return a.exp();
}

Matrix rotate_covariance(const Matrix& gamma, const Matrix& a) {
  const Matrix o = expm_skew(a);
  return antisymmetrize(o * gamma * o.transpose());
}

double stationarity_residual(const MajoranaHamiltonian& h, const Matrix& gamma) {
  return max_abs(commutator(mean_field(h, gamma, 6), gamma));
}

namespace {

void require_pure(const Matrix& gamma, const char* who) {
  if (!validate(gamma).pure) throw Error(std::string(who) + ": covariance matrix is not pure");
}

Matrix midpoint_step(const MajoranaHamiltonian& h, const Matrix& g, double dt, const RealTimeOptions& opt) {
  Matrix next = rotate_covariance(g, 4.0 * dt * mean_field(h, g, 6));
  if (h.quartic().empty()) return next;
  for (int it = 0; it < opt.max_corrections; ++it) {
    const Matrix mid = 0.5 * (g + next);
    Matrix trial = rotate_covariance(g, 4.0 * dt * mean_field(h, mid, 6));
    const double change = max_abs(trial - next);
    next = std::move(trial);
    if (change <= opt.correction_tol) break;
  }
  return next;
}

}  // namespace

CovarianceMatrix real_time_step(const MajoranaHamiltonian& h, const CovarianceMatrix& gamma, double dt,
                                const RealTimeOptions& options) {
  if (!(dt > 0.0)) throw Error("real_time_step: dt must be positive");
  if (gamma.dim() != h.dim()) throw Error("real_time_step: dimension mismatch");
  require_pure(gamma.matrix(), "real_time_step");
  return CovarianceMatrix(midpoint_step(h, gamma.matrix(), dt, options));
}

CovarianceMatrix real_time_evolve(const MajoranaHamiltonian& h, const CovarianceMatrix& gamma, double dt, long steps,
                                  const RealTimeOptions& options) {
  if (!(dt > 0.0)) throw Error("real_time_evolve: dt must be positive");
  if (gamma.dim() != h.dim()) throw Error("real_time_evolve: dimension mismatch");
  require_pure(gamma.matrix(), "real_time_evolve");
  Matrix g = gamma.matrix();
  for (long s = 0; s < steps; ++s) g = midpoint_step(h, g, dt, options);
  return CovarianceMatrix(g);
}

nlohmann::json to_json(const FlowReport& r, bool with_history) {
  nlohmann::json j{{"iterations", r.iterations},
                   {"rejected", r.rejected},
                   {"final_energy", r.final_energy},
                   {"residual", r.residual},
                   {"converged", r.converged},
                   {"wall_time", r.wall_time},
                   {"initial_dtau", r.initial_dtau},
                   {"final_dtau", r.final_dtau}};
  if (with_history) j["energy_history"] = r.energy_history;
  return j;
}

namespace {

struct Residual {
  double max = 0.0;   // reported and used for convergence
  double norm = 0.0;  // Frobenius, used to judge steps below energy roundoff
};

Residual residual_of(const std::vector<Matrix>& blocks, const std::vector<Matrix>& grads) {
  Residual r;
  double sq = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Matrix c = commutator(grads[b], blocks[b]);
    r.max = std::max(r.max, max_abs(c));
    sq += c.squaredNorm();
  }
  r.norm = std::sqrt(sq);
  return r;
}

}  // namespace

BlockFlowResult imaginary_time_flow(const BlockFlowProblem& problem, std::vector<Matrix> init,
                                    const FlowSettings& settings) {
  if (!(settings.tol > 0.0)) throw Error("imaginary_time_flow: tol must be positive");
  if (settings.max_iter < 0) throw Error("imaginary_time_flow: max_iter must be non-negative");
  for (const auto& b : init)
    if (!validate(b).physical) throw Error("imaginary_time_flow: unphysical initial state");

  const auto start = std::chrono::steady_clock::now();
  BlockFlowResult out;
  FlowReport& rep = out.report;
  std::vector<Matrix> state = std::move(init);
  std::vector<Matrix> grads = problem.gradient(state);
  double e = problem.energy(state);
  rep.energy_history.push_back(e);

  double scale = 0.0;
  for (const auto& g : grads) scale = std::max(scale, max_abs(g));
  double dtau = settings.dtau > 0.0 ? settings.dtau : 0.05 / std::max(scale, 1e-300);
  const double dtau0 = dtau;
  rep.initial_dtau = dtau0;

  std::vector<Matrix> gens(state.size()), trial(state.size());
  Residual residual = residual_of(state, grads);
  while (residual.max >= settings.tol && rep.iterations < settings.max_iter && dtau > 1e-14 * dtau0) {
    ++rep.iterations;
    for (std::size_t b = 0; b < state.size(); ++b) gens[b] = 2.0 * commutator(grads[b], state[b]);
    parallel_for(state.size(), [&](std::size_t b) { trial[b] = rotate_covariance(state[b], dtau * gens[b]); });
    const double e_new = problem.energy(trial);
    bool accept = std::isfinite(e_new) && e_new <= e + settings.energy_slack;
    std::vector<Matrix> trial_grads;
    Residual trial_residual;
    if (accept) {
      trial_grads = problem.gradient(trial);
      trial_residual = residual_of(trial, trial_grads);
      // below roundoff the energy cannot see overshoot; fall back to the residual
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e));
      if (e - e_new <= noise && trial_residual.norm > residual.norm) accept = false;
    }
    if (!accept) {
      ++rep.rejected;
      dtau *= 0.5;
      continue;
    }
    state.swap(trial);
    grads.swap(trial_grads);
    e = e_new;
    residual = trial_residual;
    rep.energy_history.push_back(e);
    dtau = std::min(dtau * settings.growth, settings.max_growth * dtau0);
  }

  rep.final_energy = e;
  rep.residual = residual.max;
  rep.converged = residual.max < settings.tol;
  rep.final_dtau = dtau;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.blocks = std::move(state);
  return out;
}

std::pair<CovarianceMatrix, FlowReport> imaginary_time_ground_state(const MajoranaHamiltonian& h,
                                                                    const CovarianceMatrix& init,
                                                                    const FlowSettings& settings) {
  if (init.dim() != h.dim()) throw Error("imaginary_time_ground_state: dimension mismatch");
  require_pure(init.matrix(), "imaginary_time_ground_state");
  BlockFlowProblem problem{
      [&h](const std::vector<Matrix>& s) { return wick_energy(h, s[0]); },
      [&h](const std::vector<Matrix>& s) { return std::vector<Matrix>{mean_field(h, s[0], 6)}; }};
  auto result = imaginary_time_flow(problem, {init.matrix()}, settings);
  return {CovarianceMatrix(result.blocks[0]), std::move(result.report)};
}

}  // namespace ghft
