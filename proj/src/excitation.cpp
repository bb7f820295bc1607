#include "ghft/excitation.hpp"
#include "ghft/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

namespace ghft {

AntisymmetricBasis::AntisymmetricBasis(int n) : n_(n) {
  if (n < 0) throw Error("AntisymmetricBasis: negative dimension");
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) pairs_.emplace_back(k, l);
}

int AntisymmetricBasis::index(int k, int l) const {
  if (k < 0 || l >= n_ || k >= l) throw Error("AntisymmetricBasis: need 0 <= k < l < n");
  return k * (2 * n_ - k - 1) / 2 + (l - k - 1);
}

Vector AntisymmetricBasis::vectorize(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) throw Error("vectorize: dimension mismatch");
  Vector v(size());
  for (int i = 0; i < size(); ++i) v(i) = x(pairs_[i].first, pairs_[i].second);
  return v;
}

CVector AntisymmetricBasis::vectorize(const CMatrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) throw Error("vectorize: dimension mismatch");
  CVector v(size());
  for (int i = 0; i < size(); ++i) v(i) = x(pairs_[i].first, pairs_[i].second);
  return v;
}

Matrix AntisymmetricBasis::unvectorize(const Vector& v) const {
  if (v.size() != size()) throw Error("unvectorize: dimension mismatch");
  Matrix x = Matrix::Zero(n_, n_);
  for (int i = 0; i < size(); ++i) {
    x(pairs_[i].first, pairs_[i].second) = v(i);
    x(pairs_[i].second, pairs_[i].first) = -v(i);
  }
  return x;
}

CMatrix AntisymmetricBasis::unvectorize(const CVector& v) const {
  if (v.size() != size()) throw Error("unvectorize: dimension mismatch");
  CMatrix x = CMatrix::Zero(n_, n_);
  for (int i = 0; i < size(); ++i) {
    x(pairs_[i].first, pairs_[i].second) = v(i);
    x(pairs_[i].second, pairs_[i].first) = -v(i);
  }
  return x;
}

Matrix AntisymmetricBasis::element(int i) const {
  Matrix x = Matrix::Zero(n_, n_);
  x(pairs_[i].first, pairs_[i].second) = 1.0;
  x(pairs_[i].second, pairs_[i].first) = -1.0;
  return x;
}

Matrix apply_linearized(const MajoranaHamiltonian& h, const Matrix& gamma0, const Matrix& x) {
  if (gamma0.rows() != h.dim() || gamma0.cols() != h.dim() || x.rows() != h.dim() || x.cols() != h.dim())
    throw Error("apply_linearized: dimension mismatch");
  Matrix out = commutator(mean_field(h, gamma0, 6), x);
  if (!h.quartic().empty()) out += 6.0 * commutator(tr2_contract(h.quartic(), x), gamma0);
  return antisymmetrize(out);
}

LinearizedOperator build_operator(int n, const std::function<Matrix(const Matrix&)>& map, int max_dim) {
  AntisymmetricBasis basis(n);
  const int d = basis.size();
  if (d > max_dim)
    throw Error("build_operator: dimension " + std::to_string(d) + " exceeds the dense cap " + std::to_string(max_dim));
  Matrix m(d, d);
  parallel_for(static_cast<std::size_t>(d), [&](std::size_t i) {
    m.col(static_cast<Eigen::Index>(i)) = basis.vectorize(map(basis.element(static_cast<int>(i))));
  });
  return {std::move(m), std::move(basis)};
}

LinearizedOperator build_dense(const MajoranaHamiltonian& h, const Matrix& gamma0, int max_dim) {
  if (gamma0.rows() != h.dim()) throw Error("build_dense: dimension mismatch");
  const Matrix h6 = mean_field(h, gamma0, 6);
  return build_operator(
      h.dim(),
      [&](const Matrix& x) {
        Matrix out = commutator(h6, x);
        if (!h.quartic().empty()) out += 6.0 * commutator(tr2_contract(h.quartic(), x), gamma0);
        return Matrix(antisymmetrize(out));
      },
      max_dim);
}

namespace {

void normalize(CMatrix& x) {
  const double nrm = x.norm();
  if (nrm == 0.0) return;
  x /= nrm;
  Eigen::Index r = 0, c = 0;
  x.cwiseAbs().maxCoeff(&r, &c);
  x *= std::abs(x(r, c)) / x(r, c);
}

struct Eigen_ {
  CVector values;
  CMatrix vectors;
};

// Real Schur iteration can stall on sparse, highly reducible blocks; retry on
// orthogonally conjugated copies, which share the spectrum.
// Skew-symmetric operators (quadratic Hamiltonians) go through the Hermitian
// solver of i A; the spectrum is paired as +-i w by construction.
bool skew_decompose(const Matrix& a, bool vectors, Eigen_& out) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0 || (a + a.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) return false;
  const CMatrix h = cplx(0.0, 0.5) * (a - a.transpose()).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const Eigen::Index d = a.rows();
  const Vector& mu = es.eigenvalues();  // ascending; A v = -i mu v
  out.values.resize(d);
  for (Eigen::Index j = 0; j < d / 2; ++j) {
    const double w = 0.5 * (mu(d - 1 - j) - mu(j));
    out.values(j) = cplx(0.0, w);
    out.values(d - 1 - j) = cplx(0.0, -w);
  }
  if (d % 2) out.values(d / 2) = 0.0;
  if (vectors) out.vectors = es.eigenvectors();
  return true;
}

bool eigen_decompose(const Matrix& a, bool vectors, bool skew, Eigen_& out) {
  if (skew && skew_decompose(a, vectors, out)) return true;
  Eigen::EigenSolver<Matrix> es(a, vectors);
  if (es.info() == Eigen::Success) {
    out.values = es.eigenvalues();
    if (vectors) out.vectors = es.eigenvectors();
    return true;
  }
  std::mt19937 rng(12345);
  std::normal_distribution<double> nd;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Matrix g(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
    es.compute(q.transpose() * a * q, vectors);
    if (es.info() != Eigen::Success) continue;
    out.values = es.eigenvalues();
    if (vectors) out.vectors = q.cast<cplx>() * es.eigenvectors();
    return true;
  }
  return false;
}

}  // namespace

ExcitationSpectrum spectrum(const LinearizedOperator& op, const SpectrumOptions& options) {
  const Eigen::Index d = op.matrix.rows();
  ExcitationSpectrum out;
  if (d == 0) return out;
  Eigen_ es;
  if (!eigen_decompose(op.matrix, options.eigenvectors, options.skew_solver, es)) {
    const std::string path = "ghft_failed_operator.csv";
    std::ofstream f(path);
    write_matrix(f, op.matrix, MatrixFileFormat::Csv);
    throw Error("spectrum: eigensolver failed; operator written to " + path);
  }
  const CVector& lam = es.values;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double wa = std::abs(lam(a).imag()), wb = std::abs(lam(b).imag());
    if (wa != wb) return wa < wb;
    return lam(a).imag() < lam(b).imag();
  });
  for (auto i : order) {
    out.eigenvalues.push_back(lam(i));
    out.max_real_residual = std::max(out.max_real_residual, std::abs(lam(i).real()));
    out.scale = std::max(out.scale, std::abs(lam(i)));
  }
  out.zero_tol = options.zero_tol > 0.0 ? options.zero_tol : std::max(1e-12, 1e-6 * out.scale);

  // one branch per +- pair: complex eigenvalues of a real matrix come in exact
  // conjugate pairs, so take the Im > 0 member; real ones are split in half
  struct Branch {
    double omega;
    Eigen::Index index;
  };
  std::vector<Branch> branches;
  int real_seen = 0;
  for (auto i : order) {
    if (lam(i).imag() > 0.0) {
      branches.push_back({lam(i).imag(), i});
    } else if (lam(i).imag() == 0.0 && real_seen++ % 2 == 0) {
      branches.push_back({0.0, i});
    }
  }
  std::stable_sort(branches.begin(), branches.end(), [](const Branch& a, const Branch& b) { return a.omega < b.omega; });
  for (const auto& br : branches) out.omegas.push_back(br.omega);

  for (std::size_t i = 0; i < branches.size();) {
    Multiplet m;
    const double ref = branches[i].omega;
    std::size_t j = i;
    while (j < branches.size() &&
           branches[j].omega - ref <= options.degeneracy_tol * std::max(ref, out.zero_tol))
      ++j;
    m.omega = 0.0;
    for (std::size_t q = i; q < j; ++q) {
      m.omega += branches[q].omega;
      m.max_real_residual = std::max(m.max_real_residual, std::abs(lam(branches[q].index).real()));
      if (options.eigenvectors) {
        CMatrix x = op.basis.unvectorize(CVector(es.vectors.col(branches[q].index)));
        normalize(x);
        m.eigenvectors.push_back(std::move(x));
      }
    }
    m.multiplicity = static_cast<int>(j - i);
    m.omega /= m.multiplicity;
    m.zero = m.omega < out.zero_tol;
    out.multiplets.push_back(std::move(m));
    i = j;
  }
  return out;
}

double pairing_defect(const std::vector<cplx>& eigenvalues) {
  auto nearest = [&](cplx z) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : eigenvalues) best = std::min(best, std::abs(w - z));
    return best;
  };
  double worst = 0.0;
  for (const auto& z : eigenvalues) worst = std::max({worst, nearest(-z), nearest(std::conj(z))});
  return worst;
}

nlohmann::json to_json(const ExcitationSpectrum& s) {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : s.multiplets)
    ms.push_back({{"omega", m.omega}, {"multiplicity", m.multiplicity}, {"real_residual", m.max_real_residual},
                  {"zero", m.zero}});
  return {{"multiplets", ms},
          {"max_real_residual", s.max_real_residual},
          {"scale", s.scale},
          {"zero_tol", s.zero_tol}};
}

}  // namespace ghft
