#include "ghft/hubbard.hpp"
#include "ghft/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace ghft {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int wrap(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

void HubbardParams::validate() const {
  if (lx < 1 || ly < 1) throw Error("HubbardParams: Lx and Ly must be positive");
  if (!std::isfinite(t) || !std::isfinite(u) || !std::isfinite(mu)) throw Error("HubbardParams: non-finite parameter");
}

std::string to_string(MuSign s) { return s == MuSign::Subtract ? "subtract" : "add"; }

MuSign mu_sign_from_string(const std::string& s) {
  if (s == "subtract" || s == "-") return MuSign::Subtract;
  if (s == "add" || s == "+") return MuSign::Add;
  throw Error("unknown mu sign '" + s + "' (expected subtract or add)");
}

std::vector<Bond> lattice_bonds(int lx, int ly) {
  std::vector<Bond> bonds;
  for (int y = 0; y < ly; ++y)
    for (int x = 0; x < lx; ++x) {
      const int s = x + lx * y;
      if (lx > 1) bonds.push_back({s, wrap(x + 1, lx) + lx * y});
      if (ly > 1) bonds.push_back({s, x + lx * wrap(y + 1, ly)});
    }
  return bonds;
}

DiracTermList hubbard_terms(const HubbardParams& p) {
  p.validate();
  DiracTermList terms;
  for (const auto& b : lattice_bonds(p.lx, p.ly))
    for (int s = 0; s < 2; ++s) terms.hopping.push_back({2 * b.a + s, 2 * b.b + s, p.t});
  const double c = p.number_coefficient();
  for (int site = 0; site < p.sites(); ++site) {
    if (c != 0.0) {
      terms.number.push_back({2 * site, c});
      terms.number.push_back({2 * site + 1, c});
    }
    if (p.u != 0.0) terms.density.push_back({2 * site, 2 * site + 1, p.u});
  }
  return terms;
}

MajoranaHamiltonian build_hubbard(const HubbardParams& p) {
  return compile_hamiltonian(ModeLayout(p.sites(), 2), hubbard_terms(p));
}

MajoranaHamiltonian site_hamiltonian(const HubbardParams& p) {
  HubbardParams one = p;
  one.lx = one.ly = 1;
  return build_hubbard(one);
}

// ---------------------------------------------------------------------------

MomentumGrid::MomentumGrid(int lx, int ly) : lx_(lx), ly_(ly) {
  if (lx < 1 || ly < 1) throw Error("MomentumGrid: sizes must be positive");
}

int MomentumGrid::index(int nx, int ny) const { return wrap(nx, lx_) + lx_ * wrap(ny, ly_); }
double MomentumGrid::kx(int k) const { return kTwoPi * nx(k) / lx_; }
double MomentumGrid::ky(int k) const { return kTwoPi * ny(k) / ly_; }
int MomentumGrid::partner(int k) const { return index(-nx(k), -ny(k)); }

bool MomentumGrid::annihilated_by(int k, int m) const {
  return wrap(m * nx(k), lx_) == 0 && wrap(m * ny(k), ly_) == 0;
}

double hopping_dispersion(const HubbardParams& p, double kx, double ky) {
  double e = 0.0;
  if (p.lx > 1) e += -2.0 * p.t * std::cos(kx);
  if (p.ly > 1) e += -2.0 * p.t * std::cos(ky);
  return e;
}

std::vector<MomentumBlock> momentum_blocks(const MomentumGrid& grid) {
  std::vector<MomentumBlock> out;
  for (int k = 0; k < grid.size(); ++k) {
    const int q = grid.partner(k);
    if (q < k) continue;
    out.push_back({k, q, q == k});
  }
  return out;
}

// ---------------------------------------------------------------------------

TiModel::TiModel(const HubbardParams& p)
    : params_(p), grid_(p.lx, p.ly), blocks_(momentum_blocks(grid_)), site_(site_hamiltonian(p)) {
  params_.validate();
  int off = 0;
  for (const auto& b : blocks_) {
    const int n = b.modes();
    Matrix h = Matrix::Zero(2 * n, 2 * n);
    double offset = 0.0;
    Matrix q = Matrix::Zero(2 * n, 4);
    for (int j = 0; j < n; ++j) {
      const int k = b.momentum(j);
      const double eps = hopping_dispersion(p, grid_.kx(k), grid_.ky(k));
      h(j, j + n) = -eps / 4.0;
      h(j + n, j) = eps / 4.0;
      offset += eps / 2.0;
      q(j, b.spin(j)) = 1.0;
      q(j + n, b.spin(j) + 2) = 1.0;
    }
    hop_.push_back(std::move(h));
    hop_offset_.push_back(offset);
    q_.push_back(std::move(q));
    offsets_.push_back(off);
    off += 2 * n;
  }
}

Matrix TiModel::phase_rotation(int b, double theta) const {
  const auto& blk = blocks_[b];
  const int n = blk.modes();
  Matrix r = Matrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const double a = blk.charge(j) * theta;
    r(j, j) = std::cos(a);
    r(j, j + n) = -std::sin(a);
    r(j + n, j) = std::sin(a);
    r(j + n, j + n) = std::cos(a);
  }
  return r;
}

Matrix TiModel::lattice_average(int b, const std::function<Matrix(double)>& f, int degree) const {
  // f is a trig polynomial of degree <= `degree` in theta = k.r; its lattice
  // average keeps the Fourier components m with m k = 0 mod 2pi
  const int k = blocks_[b].k;
  const int samples = 2 * degree + 1;
  Matrix acc;
  for (int s = 0; s < samples; ++s) {
    const double theta = kTwoPi * s / samples;
    double w = 0.0;
    for (int m = -degree; m <= degree; ++m)
      if (grid_.annihilated_by(k, m)) w += std::cos(m * theta);
    w /= samples;
    if (std::abs(w) < 1e-15) continue;
    const Matrix v = f(theta);
    if (acc.size() == 0) acc = Matrix::Zero(v.rows(), v.cols());
    acc += w * v;
  }
  if (acc.size() == 0) acc = Matrix::Zero(f(0.0).rows(), f(0.0).cols());
  return acc;
}

Matrix TiModel::local_covariance(const std::vector<Matrix>& gamma) const {
  if (gamma.size() != blocks_.size()) throw Error("local_covariance: block count mismatch");
  Matrix loc = Matrix::Zero(4, 4);
  for (std::size_t b = 0; b < blocks_.size(); ++b) loc += q_[b].transpose() * gamma[b] * q_[b];
  return loc / sites();
}

double TiModel::energy(const std::vector<Matrix>& gamma) const {
  double kinetic = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    kinetic += (hop_[b].array() * gamma[b].array()).sum() + hop_offset_[b];
  return kinetic / sites() + wick_energy(site_, local_covariance(gamma));
}

std::vector<Matrix> TiModel::gradient(const std::vector<Matrix>& gamma) const {
  const Matrix h6 = mean_field(site_, local_covariance(gamma), 6);
  std::vector<Matrix> out(blocks_.size());
  parallel_for(blocks_.size(), [&](std::size_t b) {
    const int bi = static_cast<int>(b);
    const Matrix qhq = q_[b] * h6 * q_[b].transpose();
    out[b] = hop_[b] + lattice_average(
                           bi,
                           [&](double th) {
                             const Matrix r = phase_rotation(bi, th);
                             return Matrix(r * qhq * r.transpose());
                           },
                           2);
  });
  return out;
}

Matrix TiModel::momentum_transform() const {
  const int ns = sites();
  const int dim = 4 * ns;
  Matrix w = Matrix::Zero(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(ns));
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    const int n = blk.modes();
    for (int j = 0; j < n; ++j) {
      const int k = blk.momentum(j);
      for (int y = 0; y < params_.ly; ++y)
        for (int x = 0; x < params_.lx; ++x) {
          const int r = x + params_.lx * y;
          const double th = grid_.kx(k) * x + grid_.ky(k) * y;
          const int c = 2 * r + blk.spin(j), cp = c + 2 * ns;
          const int d = offsets_[b] + j, dp = offsets_[b] + j + n;
          w(d, c) = std::cos(th) * norm;
          w(d, cp) = -std::sin(th) * norm;
          w(dp, c) = std::sin(th) * norm;
          w(dp, cp) = std::cos(th) * norm;
        }
    }
  }
  return w;
}

Matrix TiModel::to_real_space(const std::vector<Matrix>& gamma) const {
  const int dim = 4 * sites();
  Matrix g = Matrix::Zero(dim, dim);
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    g.block(offsets_[b], offsets_[b], gamma[b].rows(), gamma[b].cols()) = gamma[b];
  const Matrix w = momentum_transform();
  return antisymmetrize(w.transpose() * g * w);
}

std::vector<Matrix> TiModel::from_real_space(const Matrix& gamma) const {
  const Matrix w = momentum_transform();
  if (gamma.rows() != w.rows()) throw Error("from_real_space: dimension mismatch");
  const Matrix g = w * gamma * w.transpose();
  std::vector<Matrix> out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const int d = blocks_[b].dim();
    out.push_back(antisymmetrize(g.block(offsets_[b], offsets_[b], d, d)));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Matrix> bcs_blocks(const TiModel& model, double pairing, double shift, double zeeman) {
  std::vector<Matrix> out;
  const auto& grid = model.grid();
  for (const auto& blk : model.blocks()) {
    const int n = blk.modes();
    CMatrix a = CMatrix::Zero(n, n), b = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      const int k = blk.momentum(j);
      const double eps = hopping_dispersion(model.params(), grid.kx(k), grid.ky(k));
      a(j, j) = eps - shift + (blk.spin(j) == 0 ? -zeeman : zeeman);
    }
    if (blk.self_paired) {
      b(0, 1) = pairing;
      b(1, 0) = -pairing;
    } else {
      // singlet: a+_k^ a+_-kv + a+_-k^ a+_kv
      b(0, 3) = pairing;
      b(3, 0) = -pairing;
      b(2, 1) = pairing;
      b(1, 2) = -pairing;
    }
    out.push_back(quadratic_ground_state(quadratic_from_dirac(a, b).quadratic()).matrix());
  }
  return out;
}

}  // namespace

std::vector<Matrix> seeded_start(const TiModel& model, double pairing, double zeeman) {
  return bcs_blocks(model, pairing, -model.params().number_coefficient(), zeeman);
}

GroundState ti_ground_state(const TiModel& model, const GroundStateOptions& options) {
  BlockFlowProblem problem{[&model](const std::vector<Matrix>& g) { return model.energy(g); },
                           [&model](const std::vector<Matrix>& g) { return model.gradient(g); }};
  std::vector<std::pair<std::string, double>> starts{{"paired", 0.0}};
  if (model.params().u > 0.0 && options.magnetic_start) starts.emplace_back("magnetic", options.magnetic_seed);

  GroundState best;
  bool have = false;
  for (const auto& [name, zeeman] : starts) {
    auto r = imaginary_time_flow(problem, seeded_start(model, options.pairing_seed, zeeman), options.flow);
    const bool better = !have || (r.report.converged && !best.report.converged) ||
                        (r.report.converged == best.report.converged &&
                         r.report.final_energy < best.report.final_energy - 1e-12);
    if (better) {
      best.blocks = std::move(r.blocks);
      best.report = std::move(r.report);
      best.start = name;
      have = true;
    }
  }
  return best;
}

Observables observables(const TiModel& model, const std::vector<Matrix>& gamma) {
  Observables o;
  double up = 0.0, down = 0.0, pair = 0.0;
  for (std::size_t b = 0; b < model.blocks().size(); ++b) {
    const auto& blk = model.blocks()[b];
    const int n = blk.modes();
    for (int j = 0; j < n; ++j) {
      const double occ = 0.5 - 0.5 * gamma[b](j, j + n);
      (blk.spin(j) == 0 ? up : down) += occ;
      for (int i = 0; i < n; ++i) pair += std::norm(pairing_expectation(gamma[b], i, j));
    }
  }
  const double ns = model.sites();
  const double particles = up + down;
  o.n = particles / (2.0 * ns);
  o.magnetization = (up - down) / (2.0 * ns);
  o.p = particles > 0.0 ? pair / particles : 0.0;
  o.energy = model.energy(gamma);
  return o;
}

double pairing_per_particle_real_space(const Matrix& gamma) {
  const int m = static_cast<int>(gamma.rows() / 2);
  double particles = 0.0, pair = 0.0;
  for (int i = 0; i < m; ++i) {
    particles += hopping_expectation(gamma, i, i).real();
    for (int j = 0; j < m; ++j) pair += std::norm(pairing_expectation(gamma, i, j));
  }
  return particles > 0.0 ? pair / particles : 0.0;
}

// ---------------------------------------------------------------------------

namespace {

struct BlockContext {
  Matrix h;      // block of h6(Gamma0)
  Matrix gamma;  // Gamma0 block
};

Matrix block_map(const TiModel& model, int b, const BlockContext& ctx, const Matrix& x) {
  Matrix out = commutator(ctx.h, x);
  const auto& u = model.site().quartic();
  if (!u.empty()) {
    const Matrix& q = model.local_map(b);
    const Matrix y = model.lattice_average(
                         b,
                         [&](double th) {
                           const Matrix r = model.phase_rotation(b, th);
                           const Matrix rq = r * q;
                           return Matrix(rq * tr2_contract(u, rq.transpose() * x * rq) * rq.transpose());
                         },
                         4) /
                     model.sites();
    out += 6.0 * commutator(y, ctx.gamma);
  }
  return antisymmetrize(out);
}

}  // namespace

namespace {

BlockContext context(const TiModel& model, const std::vector<Matrix>& gamma0, int b) {
  if (b < 0 || b >= static_cast<int>(model.blocks().size())) throw Error("momentum_block: block index out of range");
  if (gamma0.size() != model.blocks().size()) throw Error("momentum_block: block count mismatch");
  const Matrix h6 = mean_field(model.site(), model.local_covariance(gamma0), 6);
  const Matrix qhq = model.local_map(b) * h6 * model.local_map(b).transpose();
  Matrix h = model.hopping_block(b) + model.lattice_average(
                                          b,
                                          [&](double th) {
                                            const Matrix r = model.phase_rotation(b, th);
                                            return Matrix(r * qhq * r.transpose());
                                          },
                                          2);
  return {std::move(h), gamma0[b]};
}

}  // namespace

Matrix apply_block(const TiModel& model, const std::vector<Matrix>& gamma0, int b, const Matrix& x) {
  const BlockContext ctx = context(model, gamma0, b);
  if (x.rows() != ctx.gamma.rows() || x.cols() != ctx.gamma.cols()) throw Error("apply_block: dimension mismatch");
  return block_map(model, b, ctx, x);
}

LinearizedOperator momentum_block(const TiModel& model, const std::vector<Matrix>& gamma0, int b) {
  const BlockContext ctx = context(model, gamma0, b);
  return build_operator(static_cast<int>(ctx.gamma.rows()),
                        [&](const Matrix& x) { return block_map(model, b, ctx, x); });
}

LinearizedOperator compressed_dense_block(const TiModel& model, const MajoranaHamiltonian& h, const Matrix& gamma0,
                                          const Matrix& w, int b) {
  const int n = static_cast<int>(w.rows());
  const int d = model.blocks()[b].dim(), o = model.block_offset(b);
  return build_operator(d, [&](const Matrix& x) {
    Matrix big = Matrix::Zero(n, n);
    big.block(o, o, d, d) = x;
    const Matrix y = w * apply_linearized(h, gamma0, w.transpose() * big * w) * w.transpose();
    return Matrix(y.block(o, o, d, d));
  });
}

std::vector<double> quasiparticle_energies(const TiModel& model, const std::vector<Matrix>& gamma0) {
  const auto h = model.gradient(gamma0);
  std::vector<double> out;
  for (const auto& hb : h) {
    // h antisymmetric: eigenvalues of i h are +-E
    Eigen::SelfAdjointEigenSolver<CMatrix> es(cplx(0.0, 1.0) * hb.cast<cplx>(), Eigen::EigenvaluesOnly);
    const Vector ev = es.eigenvalues();
    for (Eigen::Index i = ev.size() / 2; i < ev.size(); ++i) out.push_back(std::max(0.0, ev(i)));
  }
  return out;
}

std::vector<double> commutator_spectrum(const std::vector<double>& e) {
  std::vector<double> out;
  const std::size_t m = e.size();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      out.push_back(e[a] + e[b]);
      out.push_back(std::abs(e[a] - e[b]));
    }
  for (std::size_t z = 0; z < m / 2; ++z) out.push_back(0.0);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

const char* channel_name(int c) {
  static const char* names[kChannelCount] = {"Delta_k0", "Delta_k", "Delta_S", "S_z", "S_T", "C", "S_T_2k"};
  if (c < 0 || c >= kChannelCount) throw Error("channel_name: index out of range");
  return names[c];
}

namespace {

// delta <o1 o2> for a CM perturbation X: <c_a c_b> = delta_ab - i Gamma_ab
cplx perturbation(const CMatrix& x, const CVector& lhs, const CVector& rhs) {
  return cplx(0.0, -1.0) * lhs.transpose() * x * rhs;
}

}  // namespace

std::array<double, kChannelCount> channel_components(const MomentumBlock& block, const CMatrix& x) {
  const int n = block.modes();
  if (x.rows() != 2 * n) throw Error("channel_components: dimension mismatch");
  auto op = [&](int j, bool dagger) { return dirac_coefficients(j, dagger, n); };
  auto bilinear = [&](int i, bool di, int j, bool dj) { return perturbation(x, op(i, di), op(j, dj)); };
  auto pair = [&](int i, int j) { return bilinear(i, true, j, true); };
  auto hop = [&](int i, int j) { return bilinear(i, true, j, false); };

  std::array<std::vector<cplx>, kChannelCount> parts;
  if (block.self_paired) {
    parts[kDelta0] = {pair(0, 1)};
    parts[kDeltaK] = {pair(0, 1)};
    parts[kDeltaS] = {};
    parts[kSz] = {hop(0, 0) - hop(1, 1)};
    parts[kST] = {hop(0, 1)};
    parts[kC] = {hop(0, 0) + hop(1, 1)};
    parts[kST2k] = {hop(0, 1)};
  } else {
    // modes: 0 = k^, 1 = kv, 2 = -k^, 3 = -kv
    parts[kDelta0] = {pair(0, 3), pair(2, 1)};
    parts[kDeltaK] = {pair(0, 1), pair(2, 3)};
    parts[kDeltaS] = {pair(0, 2)};
    parts[kSz] = {hop(0, 0) - hop(1, 1), hop(2, 2) - hop(3, 3)};
    parts[kST] = {hop(0, 1), hop(2, 3)};
    parts[kC] = {hop(0, 0) + hop(1, 1), hop(2, 2) + hop(3, 3)};
    parts[kST2k] = {hop(0, 3), hop(2, 1)};
  }
  std::array<double, kChannelCount> out{};
  for (int c = 0; c < kChannelCount; ++c) {
    double sq = 0.0;
    for (const auto& z : parts[c]) sq += std::norm(z);
    out[c] = std::sqrt(sq);
  }
  return out;
}

std::array<double, kChannelCount> channel_magnitudes(const MomentumBlock& block, const std::vector<CMatrix>& xs) {
  // Gram-Schmidt under the Frobenius inner product; each channel part is a
  // linear functional, so the summed squares are basis independent
  std::vector<CMatrix> basis;
  for (const auto& x : xs) {
    CMatrix v = x;
    for (const auto& e : basis) v -= (e.conjugate().cwiseProduct(v)).sum() * e;
    const double nrm = v.norm();
    if (nrm > 1e-10 * std::max(1.0, x.norm())) basis.push_back(v / nrm);
  }
  std::array<double, kChannelCount> out{};
  for (const auto& e : basis) {
    const auto c = channel_components(block, e);
    for (int i = 0; i < kChannelCount; ++i) out[i] += c[i] * c[i];
  }
  for (auto& v : out) v = std::sqrt(v);
  return out;
}

BlockSpectrum block_spectrum(const TiModel& model, const std::vector<Matrix>& gamma0, int b,
                             const DispersionOptions& options) {
  const auto op = momentum_block(model, gamma0, b);
  SpectrumOptions so = options.spectrum;
  if (so.zero_tol <= 0.0) so.zero_tol = options.zero_tol;
  const auto s = spectrum(op, so);
  const auto& blk = model.blocks()[b];
  BlockSpectrum out;
  out.block = b;
  out.k = blk.k;
  out.partner = blk.partner;
  out.max_real_residual = s.max_real_residual;
  out.pairing_defect = pairing_defect(s.eigenvalues);
  out.scale = s.scale;
  std::size_t next = 0;
  for (std::size_t m = 0; m < s.multiplets.size(); ++m) {
    const auto& mult = s.multiplets[m];
    const auto agg = channel_magnitudes(blk, mult.eigenvectors);
    for (int q = 0; q < mult.multiplicity; ++q) {
      BlockBranch br;
      br.omega = s.omegas[next++];
      br.real_residual = mult.max_real_residual;
      br.multiplet = static_cast<int>(m);
      br.channels = agg;
      out.branches.push_back(br);
    }
  }
  return out;
}

Dispersion dispersion(const TiModel& model, const std::vector<Matrix>& gamma0, const DispersionOptions& options) {
  Dispersion d;
  const auto& blocks = model.blocks();
  d.blocks.resize(blocks.size());
  parallel_for(blocks.size(), [&](std::size_t b) {
    d.blocks[b] = block_spectrum(model, gamma0, static_cast<int>(b), options);
  });
  for (const auto& bs : d.blocks) {
    d.max_real_residual = std::max(d.max_real_residual, bs.max_real_residual);
    d.scale = std::max(d.scale, bs.scale);
  }
  const double zero_tol = options.zero_tol;
  d.gap_threshold = std::max(5e-3 * std::abs(model.params().t), 10.0 * zero_tol);

  // branch statistics over the (k, -k) pair blocks
  for (const auto& bs : d.blocks)
    if (!blocks[bs.block].self_paired) {
      d.branch_count = static_cast<int>(bs.branches.size());
      break;
    }
  for (int j = 0; j < d.branch_count; ++j) {
    bool nonzero = false, weighted = false;
    for (const auto& bs : d.blocks) {
      if (blocks[bs.block].self_paired) continue;
      const auto& br = bs.branches[j];
      nonzero = nonzero || br.omega >= zero_tol;
      weighted = weighted || *std::max_element(br.channels.begin(), br.channels.end()) >= 1e-8;
    }
    if (nonzero && weighted) d.nontrivial.push_back(j);
  }
  d.gap = std::numeric_limits<double>::infinity();
  for (const auto& bs : d.blocks) {
    if (blocks[bs.block].self_paired) {
      for (const auto& br : bs.branches)
        if (br.omega >= zero_tol && *std::max_element(br.channels.begin(), br.channels.end()) >= 1e-8) {
          d.gap = std::min(d.gap, br.omega);
          break;
        }
    } else if (!d.nontrivial.empty()) {
      d.gap = std::min(d.gap, bs.branches[d.nontrivial.front()].omega);
    }
  }
  if (!std::isfinite(d.gap)) d.gap = 0.0;
  d.gapless = d.gap < d.gap_threshold;
  return d;
}

Classification classify(const Dispersion& d, const TiModel& model, const ClassificationOptions& options) {
  Classification c;
  std::vector<const BlockSpectrum*> pairs;
  for (const auto& bs : d.blocks)
    if (!model.blocks()[bs.block].self_paired) pairs.push_back(&bs);
  if (pairs.empty()) return c;
  for (int j : d.nontrivial) {
    BranchSummary s;
    s.branch = j;
    s.omega_min = std::numeric_limits<double>::infinity();
    s.omega_max = -s.omega_min;
    double sum = 0.0, sq = 0.0;
    for (const auto* bs : pairs) {
      const auto& br = bs->branches[j];
      s.omega_min = std::min(s.omega_min, br.omega);
      s.omega_max = std::max(s.omega_max, br.omega);
      sum += br.omega;
      sq += br.omega * br.omega;
      for (int q = 0; q < kChannelCount; ++q) s.channels[q] = std::max(s.channels[q], br.channels[q]);
    }
    const double n = static_cast<double>(pairs.size());
    s.omega_mean = sum / n;
    s.omega_std = std::sqrt(std::max(0.0, sq / n - s.omega_mean * s.omega_mean));
    s.flat = s.omega_std <= options.flat_tol * d.scale;
    const double top = *std::max_element(s.channels.begin(), s.channels.end());
    for (int q = 0; q < kChannelCount; ++q) s.present[q] = top > 0.0 && s.channels[q] >= options.presence * top;
    c.branches.push_back(s);
  }
  auto same = [&](int a, int b) {
    for (const auto* bs : pairs) {
      const double x = bs->branches[c.branches[a].branch].omega, y = bs->branches[c.branches[b].branch].omega;
      if (std::abs(x - y) > options.degeneracy_tol * std::max({std::abs(x), std::abs(y), d.gap_threshold}))
        return false;
    }
    return true;
  };
  for (int a = 0; a < static_cast<int>(c.branches.size());) {
    int b = a + 1;
    while (b < static_cast<int>(c.branches.size()) && same(b - 1, b)) ++b;
    if (b - a >= 2) {
      std::vector<int> g;
      for (int i = a; i < b; ++i) g.push_back(i);
      c.degenerate_groups.push_back(g);
    }
    a = b;
  }
  return c;
}

double branch_omega(const Dispersion& d, const TiModel& model, int k, int branch) {
  for (const auto& bs : d.blocks)
    if (bs.k == k || bs.partner == k) {
      if (branch < 0 || branch >= static_cast<int>(bs.branches.size())) throw Error("branch_omega: branch out of range");
      return bs.branches[branch].omega;
    }
  (void)model;
  throw Error("branch_omega: momentum not on the grid");
}

std::vector<int> k_path(const MomentumGrid& grid) {
  const int hx = grid.lx() / 2, hy = grid.ly() / 2;
  std::vector<int> path;
  auto push = [&](int nx, int ny) {
    const int k = grid.index(nx, ny);
    if (path.empty() || path.back() != k) path.push_back(k);
  };
  for (int x = 0; x <= hx; ++x) push(x, 0);
  for (int y = 1; y <= hy; ++y) push(hx, y);
  const int steps = std::max(hx, hy);
  for (int i = 1; i <= steps; ++i) {
    const double f = 1.0 - static_cast<double>(i) / steps;
    push(static_cast<int>(std::lround(hx * f)), static_cast<int>(std::lround(hy * f)));
  }
  return path;
}

BcsScanResult bcs_parameter_scan(const TiModel& model, const std::vector<double>& pairings,
                                 const std::vector<double>& shifts) {
  if (pairings.empty() || shifts.empty()) throw Error("bcs_parameter_scan: empty grid");
  BcsScanResult best;
  best.energy = std::numeric_limits<double>::infinity();
  for (double delta : pairings)
    for (double shift : shifts) {
      auto blocks = bcs_blocks(model, delta, shift, 0.0);
      const double e = model.energy(blocks);
      best.surface.push_back({delta, shift, e});
      if (e < best.energy) {
        best.energy = e;
        best.pairing = delta;
        best.shift = shift;
        best.blocks = std::move(blocks);
      }
    }
  return best;
}

}  // namespace ghft
