#include "ghft/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace ghft {

CovarianceMatrix::CovarianceMatrix(const Matrix& gamma) {
  if (gamma.rows() != gamma.cols()) throw Error("CovarianceMatrix: matrix is not square");
  if (gamma.rows() % 2 != 0) throw Error("CovarianceMatrix: odd dimension");
  if (max_abs(gamma + gamma.transpose()) > 1e-12) throw Error("CovarianceMatrix: matrix is not antisymmetric");
  gamma_ = antisymmetrize(gamma);
}

CovarianceMatrix CovarianceMatrix::vacuum(int modes) {
  Matrix g = Matrix::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j) {
    g(j, j + modes) = 1.0;
    g(j + modes, j) = -1.0;
  }
  return CovarianceMatrix(g);
}

CovarianceMatrix CovarianceMatrix::maximally_mixed(int modes) {
  return CovarianceMatrix(Matrix::Zero(2 * modes, 2 * modes));
}

StateCheck validate(const Matrix& gamma, double tol) {
  if (gamma.rows() != gamma.cols()) throw Error("validate: matrix is not square");
  if (gamma.rows() % 2 != 0) throw Error("validate: odd dimension");
  if (max_abs(gamma + gamma.transpose()) > 1e-12) throw Error("validate: matrix is not antisymmetric");
  StateCheck out{};
  if (gamma.size() > 0) {
    Eigen::JacobiSVD<Matrix> svd(gamma);
    out.max_singular_value = svd.singularValues()(0);
  }
  const Matrix sq = gamma * gamma + Matrix::Identity(gamma.rows(), gamma.cols());
  out.purity_violation = max_abs(sq);
  out.physical = out.max_singular_value <= 1.0 + tol;
  out.pure = out.purity_violation <= tol;
  return out;
}

cplx two_point(const CovarianceMatrix& g, int k, int l) {
  if (k < 0 || l < 0 || k >= g.dim() || l >= g.dim()) throw Error("two_point: index out of range");
  return (k == l ? cplx(1.0) : cplx(0.0)) - cplx(0.0, 1.0) * g(k, l);
}

cplx majorana_bilinear(const Matrix& gamma, const CVector& x, const CVector& y) {
  // sum x_a y_b (delta_ab - i Gamma_ab)
  const cplx diag = x.transpose() * y;
  const cplx off = x.transpose() * (gamma.cast<cplx>() * y);
  return diag - cplx(0.0, 1.0) * off;
}

CVector dirac_coefficients(int j, bool dagger, int modes) {
  CVector v = CVector::Zero(2 * modes);
  v(j) = 0.5;
  v(j + modes) = dagger ? cplx(0.0, 0.5) : cplx(0.0, -0.5);
  return v;
}

cplx hopping_expectation(const Matrix& gamma, int i, int j) {
  const int m = static_cast<int>(gamma.rows()) / 2;
  return majorana_bilinear(gamma, dirac_coefficients(i, true, m), dirac_coefficients(j, false, m));
}

cplx pairing_expectation(const Matrix& gamma, int i, int j) {
  const int m = static_cast<int>(gamma.rows()) / 2;
  return majorana_bilinear(gamma, dirac_coefficients(i, true, m), dirac_coefficients(j, true, m));
}

Matrix tr2_contract(const std::vector<QuarticTerm>& u, const Matrix& x) {
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  // For an orbit a<b<c<d with value v, tr2_pq = -2 U_pqrs X_rs where (r, s)
  // is the complementary pair; the signs below are the permutation parities
  // of (p, q, r, s) relative to (a, b, c, d).
  for (const auto& t : u) {
    const auto [a, b, c, d] = t.index;
    if (d >= x.rows()) throw Error("tr2_contract: dimension mismatch");
    const double v = -2.0 * t.value;
    y(a, b) += v * x(c, d);
    y(a, c) -= v * x(b, d);
    y(a, d) += v * x(b, c);
    y(b, c) += v * x(a, d);
    y(b, d) -= v * x(a, c);
    y(c, d) += v * x(a, b);
  }
  return y - y.transpose();
}

double wick_energy(const MajoranaHamiltonian& h, const Matrix& gamma) {
  if (gamma.rows() != h.dim() || gamma.cols() != h.dim()) throw Error("energy: dimension mismatch");
  double e = h.offset() + (h.quadratic().array() * gamma.array()).sum();
  for (const auto& t : h.quartic()) {
    const auto [a, b, c, d] = t.index;
    const double pf = gamma(a, b) * gamma(c, d) - gamma(a, c) * gamma(b, d) + gamma(a, d) * gamma(b, c);
    e -= 24.0 * t.value * pf;
  }
  return e;
}

double energy(const MajoranaHamiltonian& h, const Matrix& gamma, double tol) {
  if (gamma.rows() != h.dim() || gamma.cols() != h.dim()) throw Error("energy: dimension mismatch");
  if (!validate(gamma, tol).physical) throw Error("energy: covariance matrix is not physical");
  return wick_energy(h, gamma);
}

Matrix mean_field(const MajoranaHamiltonian& h, const Matrix& gamma, int factor) {
  if (gamma.rows() != h.dim() || gamma.cols() != h.dim()) throw Error("mean_field: dimension mismatch");
  if (h.quartic().empty()) return h.quadratic();
  return h.quadratic() + static_cast<double>(factor) * tr2_contract(h.quartic(), gamma);
}

double pfaffian(Matrix a) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw Error("pfaffian: matrix is not square");
  if (n % 2 != 0) return 0.0;
  double pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp = 0;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == 0.0) return 0.0;
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index r = n - k - 2;
      const Vector tau = a.row(k).tail(r).transpose() / a(k, k + 1);
      const Vector col = a.col(k + 1).tail(r);
      a.bottomRightCorner(r, r) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

int parity(const Matrix& gamma) {
  const Eigen::Index m = gamma.rows() / 2;
  const double vac_sign = ((m * (m - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  return pfaffian(gamma) * vac_sign >= 0.0 ? 1 : -1;
}

namespace {

// Orthonormal real basis of the span of the real and imaginary parts of z.
Matrix real_span(const CMatrix& z, Eigen::Index rank) {
  Matrix stacked(z.rows(), 2 * z.cols());
  stacked << z.real(), z.imag();
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(rank);
}

// i * sign(i h) on the non-zero spectrum; returns the zero-space eigenvectors.
Matrix sign_part(const Matrix& h, double zero_tol, CMatrix& zero_space) {
  const Eigen::Index n = h.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(cplx(0.0, 1.0) * h.cast<cplx>());
  const Vector& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  const double cut = zero_tol * std::max(scale, 1e-300);
  CMatrix acc = CMatrix::Zero(n, n);
  std::vector<Eigen::Index> zeros;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (scale == 0.0 || std::abs(ev(j)) <= cut) {
      zeros.push_back(j);
      continue;
    }
    const double s = ev(j) > 0.0 ? 1.0 : -1.0;
    acc += s * es.eigenvectors().col(j) * es.eigenvectors().col(j).adjoint();
  }
  zero_space.resize(n, static_cast<Eigen::Index>(zeros.size()));
  for (std::size_t z = 0; z < zeros.size(); ++z) zero_space.col(z) = es.eigenvectors().col(zeros[z]);
  return (cplx(0.0, 1.0) * acc).real();
}

}  // namespace

CovarianceMatrix quadratic_ground_state(const Matrix& h, double zero_tol) {
  if (h.rows() != h.cols() || h.rows() % 2 != 0) throw Error("quadratic_ground_state: bad dimension");
  if (max_abs(h + h.transpose()) > 1e-12 * (1.0 + max_abs(h)))
    throw Error("quadratic_ground_state: matrix is not antisymmetric");
  const Eigen::Index n = h.rows();
  const int modes = static_cast<int>(n / 2);

  CMatrix zero_space;
  Matrix gamma = sign_part(antisymmetrize(h), zero_tol, zero_space);
  const Eigen::Index nz = zero_space.cols();
  if (nz > 0) {
    // Fill the zero space with the state closest to the vacuum: ground state
    // of the vacuum parent Hamiltonian -Gamma_vac/4 projected onto it.
    const Matrix basis = real_span(zero_space, nz);
    const Matrix tie = basis.transpose() * (-0.25 * CovarianceMatrix::vacuum(modes).matrix()) * basis;
    CMatrix tie_zero;
    Matrix sub = sign_part(antisymmetrize(tie), 1e-10, tie_zero);
    if (tie_zero.cols() > 0) {
      const Matrix rest = real_span(tie_zero, tie_zero.cols());
      for (Eigen::Index p = 0; p + 1 < rest.cols(); p += 2)
        sub += rest.col(p) * rest.col(p + 1).transpose() - rest.col(p + 1) * rest.col(p).transpose();
    }
    gamma += basis * sub * basis.transpose();
    if (parity(gamma) < 0) {
      // reflect along one zero-space direction: flips parity, leaves the
      // gapped part untouched
      const Vector r = basis.col(0);
      const Matrix refl = Matrix::Identity(n, n) - 2.0 * r * r.transpose();
      gamma = refl * gamma * refl;
    }
  }
  return CovarianceMatrix(antisymmetrize(gamma));
}

// ---------------------------------------------------------------------------

void write_matrix(std::ostream& os, const Matrix& m, MatrixFileFormat format) {
  if (m.rows() != m.cols()) throw Error("write_matrix: matrix is not square");
  const Eigen::Index n = m.rows();
  if (format == MatrixFileFormat::Csv) {
    os << "# covariance-matrix dim=" << n << " format=csv\n";
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) os << (j ? "," : "") << m(i, j);
      os << '\n';
    }
    return;
  }
  os << "# covariance-matrix dim=" << n << " format=binary endian=little\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = m(i, j);
      unsigned char bytes[8];
      std::memcpy(bytes, &v, 8);
      if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
      os.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
}

Matrix read_matrix(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error("read_matrix: missing header");
  if (header.rfind("# covariance-matrix", 0) != 0) throw Error("read_matrix: bad header: " + header);
  long n = -1;
  std::string format;
  std::istringstream hs(header.substr(19));
  std::string field;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq);
    const std::string val = field.substr(eq + 1);
    if (key == "dim") n = std::stol(val);
    if (key == "format") format = val;
    if (key == "endian" && val != "little") throw Error("read_matrix: unsupported endianness " + val);
  }
  if (n < 0) throw Error("read_matrix: header lacks dim");
  Matrix m(n, n);
  if (format == "csv") {
    std::string line;
    for (long i = 0; i < n; ++i) {
      if (!std::getline(is, line)) throw Error("read_matrix: truncated csv data");
      std::istringstream ls(line);
      std::string cell;
      for (long j = 0; j < n; ++j) {
        if (!std::getline(ls, cell, ',')) throw Error("read_matrix: short csv row " + std::to_string(i));
        m(i, j) = std::stod(cell);
      }
    }
  } else if (format == "binary") {
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        unsigned char bytes[8];
        if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw Error("read_matrix: truncated binary data");
        if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
        double v;
        std::memcpy(&v, bytes, 8);
        m(i, j) = v;
      }
  } else {
    throw Error("read_matrix: unknown format '" + format + "'");
  }
  return m;
}

void save_covariance(const std::string& path, const CovarianceMatrix& g, MatrixFileFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("save_covariance: cannot open " + path);
  write_matrix(os, g.matrix(), format);
}

CovarianceMatrix load_covariance(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("load_covariance: cannot open " + path);
  return CovarianceMatrix(read_matrix(is));
}

}  // namespace ghft
