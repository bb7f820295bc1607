#include "ghft/verify.hpp"

#include "ghft/oracle.hpp"
#include "ghft/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ghft {

Matrix random_skew(int n, std::mt19937& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = nd(rng);
      a(j, i) = -a(i, j);
    }
  return a;
}

Matrix random_pure(int modes, std::mt19937& rng) {
  return rotate_covariance(CovarianceMatrix::vacuum(modes).matrix(), random_skew(2 * modes, rng));
}

DiracTermList random_terms(int modes, std::mt19937& rng, int count) {
  std::uniform_int_distribution<int> pick(0, modes - 1);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  DiracTermList terms;
  for (int c = 0; c < count; ++c) {
    int i = pick(rng), j = pick(rng);
    terms.number.push_back({i, val(rng)});
    if (modes > 1) {
      while (j == i) j = pick(rng);
      terms.hopping.push_back({i, j, val(rng)});
      int k = pick(rng), l = pick(rng);
      while (l == k) l = pick(rng);
      terms.density.push_back({k, l, val(rng)});
    }
  }
  return terms;
}

MajoranaHamiltonian random_hamiltonian(int modes, std::mt19937& rng, int quartic) {
  MajoranaHamiltonian h(modes);
  h.set_quadratic(random_skew(2 * modes, rng, 0.5));
  std::uniform_int_distribution<int> pick(0, 2 * modes - 1);
  std::normal_distribution<double> nd(0.0, 0.2);
  for (int c = 0; c < quartic && 2 * modes >= 4; ++c) {
    std::array<int, 4> idx{};
    for (;;) {
      for (auto& x : idx) x = pick(rng);
      auto s = idx;
      std::sort(s.begin(), s.end());
      if (std::adjacent_find(s.begin(), s.end()) == s.end()) break;
    }
    h.add_quartic(idx, nd(rng));
  }
  h.add_offset(nd(rng));
  return h;
}

void VerifyOptions::validate() const {
  lattice.validate();
  if (lattice.lx > 5 || lattice.ly > 5) throw Error("verify: lattice larger than 5 x 5");
  if (max_modes < 2 || max_modes > 10) throw Error("verify: max_modes must lie in [2, 10]");
  if (wick_instances < 1 || gradient_instances < 1 || dynamics_steps < 1) throw Error("verify: counts must be positive");
  for (double v : {dynamics_dt, ground_tol, wick_tol, gradient_tol, roundtrip_tol, anticommutator_tol, purity_tol,
                   energy_drift_tol, monotone_tol, dense_tol, u0_tol, stability_tol, pairing_tol})
    if (!(v > 0.0)) throw Error("verify: tolerances and dt must be positive");
}

namespace {

PropertyResult make(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, tol, value <= tol, std::move(detail)};
}

double purity_violation(const Matrix& g) { return max_abs(g * g + Matrix::Identity(g.rows(), g.cols())); }

HubbardParams dynamics_model(double u, double mu) {
  HubbardParams p;
  p.lx = p.ly = 2;
  p.u = u;
  p.mu = mu;
  return p;
}

struct Reference {
  TiModel model;
  GroundState gs;
  MajoranaHamiltonian h;
  Matrix gamma;
  Matrix w;
};

Reference reference(const HubbardParams& p, double tol) {
  TiModel m(p);
  GroundStateOptions go;
  go.flow.tol = tol;
  auto gs = ti_ground_state(m, go);
  if (!gs.report.converged) throw Error("verify: reference ground state did not converge");
  Matrix g = m.to_real_space(gs.blocks);
  Matrix w = m.momentum_transform();
  return {std::move(m), std::move(gs), build_hubbard(p), std::move(g), std::move(w)};
}

std::string lattice_label(const HubbardParams& p) {
  std::ostringstream s;
  s << p.lx << "x" << p.ly << " u=" << p.u << " mu=" << p.mu;
  return s.str();
}

}  // namespace

PropertyResult check_wick_fock(const VerifyOptions& o) {
  std::mt19937 rng(o.seed);
  double worst = 0.0;
  for (int i = 0; i < o.wick_instances; ++i) {
    const int m = 2 + i % (o.max_modes - 1);
    const MajoranaHamiltonian h = i % 2 ? random_hamiltonian(m, rng, 12)
                                        : compile_hamiltonian(ModeLayout(m, 1), random_terms(m, rng));
    const Matrix g = random_pure(m, rng);
    const double exact = oracle::exact_expectation(oracle::fock_matrix(h), oracle::gaussian_to_fock(g)).real();
    worst = std::max(worst, std::abs(wick_energy(h, g) - exact) / std::max(1.0, std::abs(exact)));
  }
  return make("wick_fock_energy", worst, o.wick_tol,
              std::to_string(o.wick_instances) + " instances, M <= " + std::to_string(o.max_modes));
}

PropertyResult check_gradient_identity(const VerifyOptions& o) {
  std::mt19937 rng(o.seed + 1);
  double worst = 0.0;
  for (int i = 0; i < o.gradient_instances; ++i) {
    const int m = 3 + i % 3;
    const auto h = random_hamiltonian(m, rng, 15);
    const Matrix g = random_pure(m, rng);
    const Matrix x = random_skew(2 * m, rng);
    const double eps = 1e-3;
    // the energy is quadratic in Gamma, so the central difference is exact up to rounding
    const double fd = (wick_energy(h, g + eps * x) - wick_energy(h, g - eps * x)) / (2.0 * eps);
    const double analytic = (mean_field(h, g, 6).array() * x.array()).sum();
    worst = std::max(worst, std::abs(fd - analytic) / std::max(1.0, std::abs(analytic)));
  }
  return make("gradient_identity", worst, o.gradient_tol, std::to_string(o.gradient_instances) + " instances");
}

PropertyResult check_covariance_roundtrip(const VerifyOptions& o) {
  std::mt19937 rng(o.seed + 2);
  double worst = 0.0;
  for (int m = 1; m <= std::min(o.max_modes, 6); ++m)
    for (int r = 0; r < 3; ++r) {
      const Matrix g = random_pure(m, rng);
      worst = std::max(worst, max_abs(oracle::covariance_from_state(oracle::gaussian_to_fock(g)) - g));
    }
  return make("covariance_fock_roundtrip", worst, o.roundtrip_tol);
}

PropertyResult check_anticommutators(const VerifyOptions& o) {
  const int m = std::min(o.max_modes, 4);
  std::vector<CMatrix> c;
  for (int k = 0; k < 2 * m; ++k) c.push_back(oracle::majorana_matrix(k, m).matrix);
  const CMatrix id = CMatrix::Identity(c[0].rows(), c[0].cols());
  double worst = 0.0;
  for (int k = 0; k < 2 * m; ++k)
    for (int l = 0; l < 2 * m; ++l) {
      const CMatrix r = c[k] * c[l] + c[l] * c[k] - (k == l ? 2.0 : 0.0) * id;
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  return make("majorana_anticommutators", worst, o.anticommutator_tol, "M = " + std::to_string(m));
}

std::vector<PropertyResult> check_real_time(const VerifyOptions& o) {
  std::mt19937 rng(o.seed + 3);
  const auto h = build_hubbard(dynamics_model(4.0, 1.0));
  CovarianceMatrix g(random_pure(8, rng));
  const double e0 = energy(h, g);
  double purity = 0.0, drift = 0.0;
  const long chunk = 500;
  for (long done = 0; done < o.dynamics_steps; done += chunk) {
    g = real_time_evolve(h, g, o.dynamics_dt, std::min<long>(chunk, o.dynamics_steps - done));
    purity = std::max(purity, purity_violation(g.matrix()));
    drift = std::max(drift, std::abs(wick_energy(h, g.matrix()) - e0) / std::max(1e-300, std::abs(e0)));
  }
  std::ostringstream d;
  d << "2x2 Hubbard, " << o.dynamics_steps << " steps of dt=" << o.dynamics_dt;
  return {make("real_time_purity_drift", purity, o.purity_tol, d.str()),
          make("real_time_energy_drift", drift, o.energy_drift_tol, d.str())};
}

PropertyResult check_imaginary_purity(const VerifyOptions& o) {
  std::mt19937 rng(o.seed + 4);
  const auto h = build_hubbard(dynamics_model(4.0, -0.5));
  Matrix g = random_pure(8, rng);
  double worst = 0.0;
  for (int s = 0; s < o.dynamics_steps; ++s) {
    g = rotate_covariance(g, 0.02 * commutator(mean_field(h, g, 6), g));
    if (s % 500 == 0) worst = std::max(worst, purity_violation(g));
  }
  worst = std::max(worst, purity_violation(g));
  return make("imaginary_time_purity_drift", worst, o.purity_tol,
              std::to_string(o.dynamics_steps) + " steps of dtau=0.01");
}

PropertyResult check_imaginary_monotone(const VerifyOptions& o) {
  std::mt19937 rng(o.seed + 5);
  const auto h = build_hubbard(dynamics_model(-3.0, 0.8));
  FlowSettings s;
  s.tol = o.ground_tol;
  const auto [g, rep] = imaginary_time_ground_state(h, CovarianceMatrix(random_pure(8, rng)), s);
  double worst = 0.0;
  for (std::size_t i = 1; i < rep.energy_history.size(); ++i)
    worst = std::max(worst, rep.energy_history[i] - rep.energy_history[i - 1]);
  auto r = make("imaginary_time_monotone", worst, o.monotone_tol,
                std::to_string(rep.energy_history.size() - 1) + " accepted steps");
  r.pass = r.pass && rep.converged;
  return r;
}

std::vector<PropertyResult> check_dense_vs_block(const VerifyOptions& o) {
  const auto ref = reference(o.lattice, o.ground_tol);
  const int nb = static_cast<int>(ref.model.blocks().size());
  std::vector<double> op_err(nb), spec_err(nb);
  parallel_for(nb, [&](std::size_t b) {
    const int bi = static_cast<int>(b);
    const auto block = momentum_block(ref.model, ref.gs.blocks, bi);
    const auto dense = compressed_dense_block(ref.model, ref.h, ref.gamma, ref.w, bi);
    op_err[b] = max_abs(block.matrix - dense.matrix);
    const auto a = spectrum(block).omegas, c = spectrum(dense).omegas;
    double e = a.size() == c.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < a.size() && i < c.size(); ++i) e = std::max(e, std::abs(a[i] - c[i]));
    spec_err[b] = e;
  });
  const std::string d = lattice_label(o.lattice) + ", " + std::to_string(nb) + " blocks";
  return {make("block_operator_vs_compressed_dense", *std::max_element(op_err.begin(), op_err.end()), o.dense_tol, d),
          make("block_spectrum_vs_compressed_dense", *std::max_element(spec_err.begin(), spec_err.end()), o.dense_tol,
               d)};
}

std::vector<PropertyResult> check_free_spectrum(const VerifyOptions& o) {
  HubbardParams p = o.lattice;
  p.u = 0.0;
  const auto ref = reference(p, o.ground_tol);
  const auto dense = spectrum(build_dense(ref.h, ref.gamma), {.eigenvectors = false});
  const auto rebuilt = commutator_spectrum(quasiparticle_energies(ref.model, ref.gs.blocks));
  double full = dense.omegas.size() == rebuilt.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < rebuilt.size() && i < dense.omegas.size(); ++i)
    full = std::max(full, std::abs(dense.omegas[i] - rebuilt[i]));

  // block spectra against |xi(k)| / 4 combinations
  const auto& grid = ref.model.grid();
  double analytic = 0.0;
  for (std::size_t b = 0; b < ref.model.blocks().size(); ++b) {
    const auto& blk = ref.model.blocks()[b];
    std::vector<double> e;
    for (int j = 0; j < blk.modes(); ++j) {
      const int k = blk.momentum(j);
      e.push_back(0.25 * std::abs(hopping_dispersion(p, grid.kx(k), grid.ky(k)) + p.number_coefficient()));
    }
    const auto expect = commutator_spectrum(e);
    const auto got = spectrum(momentum_block(ref.model, ref.gs.blocks, static_cast<int>(b)), {.eigenvectors = false}).omegas;
    if (got.size() != expect.size()) analytic = INFINITY;
    for (std::size_t i = 0; i < got.size() && i < expect.size(); ++i)
      analytic = std::max(analytic, std::abs(got[i] - expect[i]));
  }
  const std::string d = lattice_label(p);
  return {make("free_dense_vs_block_full_spectrum", full, o.u0_tol, d),
          make("free_block_vs_analytic_dispersion", analytic, o.u0_tol, d)};
}

std::vector<PropertyResult> check_stability(const VerifyOptions& o) {
  const auto ref = reference(o.lattice, o.ground_tol);
  DispersionOptions general;
  general.spectrum.skew_solver = false;
  const auto d = dispersion(ref.model, ref.gs.blocks, general);
  double pairing = 0.0;
  for (const auto& bs : d.blocks) pairing = std::max(pairing, bs.pairing_defect);
  const double rel = d.scale > 0.0 ? d.max_real_residual / d.scale : d.max_real_residual;
  const std::string label = lattice_label(o.lattice);
  return {make("linearization_real_parts", rel, o.stability_tol, label),
          make("linearization_pm_pairing", pairing, o.pairing_tol, label)};
}

std::vector<PropertyResult> run_verify(const VerifyOptions& o) {
  o.validate();
  std::vector<PropertyResult> out;
  auto add = [&](std::vector<PropertyResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  out.push_back(check_wick_fock(o));
  out.push_back(check_gradient_identity(o));
  out.push_back(check_covariance_roundtrip(o));
  out.push_back(check_anticommutators(o));
  add(check_real_time(o));
  out.push_back(check_imaginary_purity(o));
  out.push_back(check_imaginary_monotone(o));
  add(check_dense_vs_block(o));
  add(check_free_spectrum(o));
  add(check_stability(o));
  return out;
}

}  // namespace ghft
