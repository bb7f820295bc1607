#pragma once

// 2D Hubbard model on an Lx x Ly torus:
//
//   H = -t sum_{<x,y>,s} (a+_xs a_ys + h.c.) + u sum_x n_x^ n_xv  -/+ mu sum_xs n_xs
//
// Bonds: one hopping term per site and lattice direction with L >= 2 (so an
// L = 2 direction carries the same pair twice), giving the dispersion
// eps(k) = -2t (cos kx + cos ky) for every L >= 2.
//
// Translation-invariant states are stored as one covariance block per
// momentum pair (k, -k): Dirac modes (k^, kv, -k^, -kv), Majoranas
// (d_0..d_3, d'_0..d'_3) with d = b+ + b, d' = -i(b+ - b) and
// b_ks = Ns^{-1/2} sum_r e^{-ik.r} a_rs.  Self-paired momenta (k = -k mod 2pi)
// carry the two modes (k^, kv) only.

#include "ghft/dynamics.hpp"
#include "ghft/excitation.hpp"

#include <array>
#include <string>
#include <vector>

namespace ghft {

/// Sign of the chemical-potential term: Subtract gives -mu sum n, Add gives +mu sum n.
enum class MuSign { Subtract, Add };

struct HubbardParams {
  double t = 1.0;
  double u = 0.0;
  double mu = 0.0;
  int lx = 31;
  int ly = 31;
  MuSign mu_sign = MuSign::Subtract;

  void validate() const;
  int sites() const { return lx * ly; }
  /// Coefficient of sum n in H.
  double number_coefficient() const { return mu_sign == MuSign::Subtract ? -mu : mu; }
};

std::string to_string(MuSign s);
MuSign mu_sign_from_string(const std::string& s);

struct Bond {
  int a;
  int b;
};

/// Site index x + lx * y.
std::vector<Bond> lattice_bonds(int lx, int ly);
DiracTermList hubbard_terms(const HubbardParams& p);
MajoranaHamiltonian build_hubbard(const HubbardParams& p);
/// u n^ nv + c (n^ + nv) on a single site (modes ^, v).
MajoranaHamiltonian site_hamiltonian(const HubbardParams& p);

class MomentumGrid {
 public:
  MomentumGrid(int lx, int ly);

  int lx() const { return lx_; }
  int ly() const { return ly_; }
  int size() const { return lx_ * ly_; }
  int index(int nx, int ny) const;
  int nx(int k) const { return k % lx_; }
  int ny(int k) const { return k / lx_; }
  double kx(int k) const;
  double ky(int k) const;
  int partner(int k) const;
  bool self_paired(int k) const { return partner(k) == k; }
  /// Does m k vanish modulo the reciprocal lattice?
  bool annihilated_by(int k, int m) const;

 private:
  int lx_;
  int ly_;
};

/// eps(k) = -2t sum over directions with L >= 2 of cos(k_d), without mu.
double hopping_dispersion(const HubbardParams& p, double kx, double ky);

struct MomentumBlock {
  int k;
  int partner;
  bool self_paired;
  int modes() const { return self_paired ? 2 : 4; }
  int dim() const { return 2 * modes(); }
  /// Phase charge of mode j under translations: +1 for k, -1 for -k.
  int charge(int j) const { return j < 2 ? 1 : -1; }
  int spin(int j) const { return j % 2; }
  int momentum(int j) const { return j < 2 ? k : partner; }
};

/// One block per pair, ordered by the smaller momentum index.
std::vector<MomentumBlock> momentum_blocks(const MomentumGrid& grid);

/// Translation-invariant state plus the data needed to evaluate it.
class TiModel {
 public:
  explicit TiModel(const HubbardParams& p);

  const HubbardParams& params() const { return params_; }
  const MomentumGrid& grid() const { return grid_; }
  const std::vector<MomentumBlock>& blocks() const { return blocks_; }
  int sites() const { return params_.sites(); }
  const MajoranaHamiltonian& site() const { return site_; }

  /// Kinetic part of block b in Majorana form and its offset.
  const Matrix& hopping_block(int b) const { return hop_[b]; }
  double hopping_offset(int b) const { return hop_offset_[b]; }
  /// 8x4 (or 4x4) map from local Majoranas (c^, cv, c'^, c'v) to block Majoranas at r = 0.
  const Matrix& local_map(int b) const { return q_[b]; }
  /// Rotation of each (d_j, d'_j) pair by charge(j) * theta.
  Matrix phase_rotation(int b, double theta) const;
  /// Lattice average over r of R(k.r) X R(k.r)^T (X built from trig polynomials of degree <= degree).
  Matrix lattice_average(int b, const std::function<Matrix(double)>& f, int degree) const;

  /// Site-local covariance (c^, cv, c'^, c'v) of a translation-invariant state.
  Matrix local_covariance(const std::vector<Matrix>& gamma) const;
  /// Energy per site.
  double energy(const std::vector<Matrix>& gamma) const;
  /// Per-block blocks of the full-space h6.
  std::vector<Matrix> gradient(const std::vector<Matrix>& gamma) const;

  /// Real-space Majoranas -> concatenated block Majoranas (orthogonal, 4Ns x 4Ns).
  Matrix momentum_transform() const;
  /// Offset of block b in the concatenated block ordering.
  int block_offset(int b) const { return offsets_[b]; }

  /// Full real-space covariance matrix.
  Matrix to_real_space(const std::vector<Matrix>& gamma) const;
  /// Blocks of a real-space covariance matrix (the cross-block part is discarded).
  std::vector<Matrix> from_real_space(const Matrix& gamma) const;

 private:
  HubbardParams params_;
  MomentumGrid grid_;
  std::vector<MomentumBlock> blocks_;
  MajoranaHamiltonian site_;
  std::vector<Matrix> hop_;
  std::vector<double> hop_offset_;
  std::vector<Matrix> q_;
  std::vector<int> offsets_;
};

struct GroundStateOptions {
  FlowSettings flow;
  double pairing_seed = 1e-2;   ///< singlet pairing field in the initial quadratic Hamiltonian
  double magnetic_seed = 1.0;   ///< Zeeman field of the second start for u > 0
  bool magnetic_start = true;   ///< u > 0: also try the magnetic start, keep the lower energy
};

struct GroundState {
  std::vector<Matrix> blocks;
  FlowReport report;
  std::string start;  ///< "paired" or "magnetic"
};

/// Initial blocks: ground state of eps(k) + c with a singlet pairing field and a Zeeman field.
std::vector<Matrix> seeded_start(const TiModel& model, double pairing, double zeeman);

GroundState ti_ground_state(const TiModel& model, const GroundStateOptions& options = {});

struct Observables {
  double n = 0.0;             ///< filling N / (2 Ns)
  double p = 0.0;             ///< pairing per particle
  double magnetization = 0.0; ///< (N^ - Nv) / (2 Ns)
  double energy = 0.0;        ///< per site
};

Observables observables(const TiModel& model, const std::vector<Matrix>& gamma);

/// Pairing per particle from a real-space CM, by the literal double sum.
double pairing_per_particle_real_space(const Matrix& gamma);

/// Compression of the linearized operator onto perturbations supported in block b.
LinearizedOperator momentum_block(const TiModel& model, const std::vector<Matrix>& gamma0, int b);

/// The block map X -> P_b L P_b (X), X a dim x dim antisymmetric block matrix.
Matrix apply_block(const TiModel& model, const std::vector<Matrix>& gamma0, int b, const Matrix& x);

/// P_b L P_b assembled from the full-space linearized map (reference for momentum_block).
/// gamma0 is the real-space covariance; w is momentum_transform().
LinearizedOperator compressed_dense_block(const TiModel& model, const MajoranaHamiltonian& h, const Matrix& gamma0,
                                          const Matrix& w, int b);

/// Quasiparticle energies E_a >= 0 of every block of h6(Gamma0), concatenated.
std::vector<double> quasiparticle_energies(const TiModel& model, const std::vector<Matrix>& gamma0);

/// Full-space spectrum (one omega per +- pair, ascending) of X -> [h6(Gamma0), X]
/// rebuilt from the block quasiparticle energies: E_a + E_b and |E_a - E_b| for
/// a < b, plus M/2 zeros.  Equals the dense spectrum when u = 0.
std::vector<double> commutator_spectrum(const std::vector<double>& energies);

// --- excitation classification --------------------------------------------

/// Channels per momentum pair:
///   Delta_k0 <a+_k^ a+_-kv>, Delta_k <a+_k^ a+_kv>, Delta_S <a+_k^ a+_-k^>,
///   S_z <n_k^ - n_kv>, S_T <a+_k^ a_kv>, C <n_k^ + n_kv>, S_T_2k <a+_k^ a_-kv>.
enum Channel { kDelta0 = 0, kDeltaK, kDeltaS, kSz, kST, kC, kST2k, kChannelCount };
const char* channel_name(int c);

/// |delta <O>| for every channel from one Majorana-block perturbation.
std::array<double, kChannelCount> channel_components(const MomentumBlock& block, const CMatrix& x);
/// Aggregate over an orthonormalised set spanning a degenerate eigenspace.
std::array<double, kChannelCount> channel_magnitudes(const MomentumBlock& block, const std::vector<CMatrix>& xs);

/// omega is an eigenvalue of the linearized operator; the real-time EOM frequency is 4 omega.
struct BlockBranch {
  double omega = 0.0;
  double real_residual = 0.0;
  int multiplet = 0;  ///< index of the multiplet within the block spectrum
  std::array<double, kChannelCount> channels{};
};

struct BlockSpectrum {
  int block = 0;
  int k = 0;
  int partner = 0;
  std::vector<BlockBranch> branches;  ///< ascending omega, one per +- pair
  double max_real_residual = 0.0;
  double pairing_defect = 0.0;
  double scale = 0.0;
};

struct DispersionOptions {
  SpectrumOptions spectrum;
  double zero_tol = 1e-6;  ///< absolute omega below which a branch counts as zero (in units of t)
};

BlockSpectrum block_spectrum(const TiModel& model, const std::vector<Matrix>& gamma0, int b,
                             const DispersionOptions& options = {});

struct Dispersion {
  std::vector<BlockSpectrum> blocks;  ///< one per momentum block
  int branch_count = 0;               ///< branches per pair block
  std::vector<int> nontrivial;        ///< branch indices (0-based) that are nontrivial
  double gap = 0.0;                   ///< min over k of the lowest nontrivial omega
  bool gapless = false;
  double gap_threshold = 0.0;
  double max_real_residual = 0.0;
  double scale = 0.0;
};

Dispersion dispersion(const TiModel& model, const std::vector<Matrix>& gamma0, const DispersionOptions& options = {});

/// omega of branch j at momentum k (k may be either member of a pair).
double branch_omega(const Dispersion& d, const TiModel& model, int k, int branch);

struct BranchSummary {
  int branch = 0;  ///< 0-based index into the per-block branch list
  double omega_min = 0.0;
  double omega_max = 0.0;
  double omega_mean = 0.0;
  double omega_std = 0.0;
  bool flat = false;
  std::array<double, kChannelCount> channels{};  ///< max over k
  std::array<bool, kChannelCount> present{};
};

struct ClassificationOptions {
  double flat_tol = 1e-6;        ///< std over k relative to the spectral scale
  double presence = 0.01;        ///< channel present above this fraction of the branch maximum
  double degeneracy_tol = 1e-6;  ///< relative, at every k
};

struct Classification {
  std::vector<BranchSummary> branches;  ///< nontrivial branches, ascending
  std::vector<std::vector<int>> degenerate_groups;  ///< positions in branches, size >= 2
};

/// Statistics over the (k, -k) pair blocks.
Classification classify(const Dispersion& d, const TiModel& model, const ClassificationOptions& options = {});

/// k-path (0,0) -> (pi,0) -> (pi,pi) -> (0,0) on grid points.
std::vector<int> k_path(const MomentumGrid& grid);

// --- optional cross-check ----------------------------------------------------

struct BcsScanResult {
  double pairing = 0.0;        ///< gap parameter of the best grid point
  double shift = 0.0;          ///< effective chemical-potential shift of the best grid point
  double energy = 0.0;         ///< per site
  std::vector<Matrix> blocks;
  std::vector<std::array<double, 3>> surface;  ///< (pairing, shift, energy)
};

/// Energy of the BCS family Gamma(Delta, m) = ground state of eps(k) - m with
/// singlet gap Delta, over the cartesian grid.
BcsScanResult bcs_parameter_scan(const TiModel& model, const std::vector<double>& pairings,
                                 const std::vector<double>& shifts);

}  // namespace ghft
