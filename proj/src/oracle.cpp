#include "ghft/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>

namespace ghft::oracle {

namespace {

void check_modes(int modes) {
  if (modes < 1 || modes > kMaxModes) throw Error("oracle: mode count must be in 1.." + std::to_string(kMaxModes));
}

double jw_sign(unsigned state, int j) {
  const unsigned below = state & ((1u << j) - 1u);
  return (std::popcount(below) % 2 == 0) ? 1.0 : -1.0;
}

// Applies a word of Majoranas (rightmost first) to a basis state.
MajoranaAction apply_word(const int* idx, int len, unsigned state, int modes) {
  cplx phase(1.0);
  for (int p = len - 1; p >= 0; --p) {
    const MajoranaAction a = apply_majorana(idx[p], state, modes);
    state = a.target;
    phase *= a.phase;
  }
  return {state, phase};
}

}  // namespace

MajoranaAction apply_majorana(int k, unsigned state, int modes) {
  const int j = k % modes;
  const bool occupied = (state >> j) & 1u;
  const unsigned target = state ^ (1u << j);
  const double s = jw_sign(state, j);
  if (k < modes) return {target, cplx(s)};  // c_j = a_j + a_j^dag
  // c_{j+M} = -i (a^dag - a): -i on creation, +i on annihilation
  return {target, occupied ? cplx(0.0, s) : cplx(0.0, -s)};
}

FockOperator majorana_matrix(int k, int modes) {
  check_modes(modes);
  const unsigned dim = 1u << modes;
  FockOperator op{modes, CMatrix::Zero(dim, dim)};
  for (unsigned s = 0; s < dim; ++s) {
    const MajoranaAction a = apply_majorana(k, s, modes);
    op.matrix(a.target, s) += a.phase;
  }
  return op;
}

FockOperator fock_matrix(const MajoranaHamiltonian& h) {
  const int m = h.modes();
  check_modes(m);
  const unsigned dim = 1u << m;
  FockOperator op{m, CMatrix::Zero(dim, dim)};
  const Matrix& t = h.quadratic();
  for (unsigned s = 0; s < dim; ++s) {
    op.matrix(s, s) += h.offset();
    for (int k = 0; k < h.dim(); ++k)
      for (int l = 0; l < h.dim(); ++l) {
        if (k == l || t(k, l) == 0.0) continue;
        const int idx[2] = {k, l};
        const MajoranaAction a = apply_word(idx, 2, s, m);
        op.matrix(a.target, s) += cplx(0.0, t(k, l)) * a.phase;
      }
    for (const auto& q : h.quartic()) {
      const MajoranaAction a = apply_word(q.index.data(), 4, s, m);
      op.matrix(a.target, s) += 24.0 * q.value * a.phase;
    }
  }
  return op;
}

namespace {

// Dirac operators as dense matrices, built straight from the occupation basis.
CMatrix annihilator(int j, int modes) {
  const unsigned dim = 1u << modes;
  CMatrix a = CMatrix::Zero(dim, dim);
  for (unsigned s = 0; s < dim; ++s)
    if ((s >> j) & 1u) a(s ^ (1u << j), s) = jw_sign(s, j);
  return a;
}

}  // namespace

FockOperator number_operator(int j, int modes) {
  check_modes(modes);
  const CMatrix a = annihilator(j, modes);
  return {modes, a.adjoint() * a};
}

FockOperator fock_matrix(int modes, const DiracTermList& terms) {
  check_modes(modes);
  const unsigned dim = 1u << modes;
  std::vector<CMatrix> a;
  for (int j = 0; j < modes; ++j) a.push_back(annihilator(j, modes));
  CMatrix h = CMatrix::Zero(dim, dim);
  for (const auto& t : terms.hopping)
    h -= t.amplitude * (a[t.i].adjoint() * a[t.j] + a[t.j].adjoint() * a[t.i]);
  for (const auto& t : terms.number) h += t.coefficient * a[t.i].adjoint() * a[t.i];
  for (const auto& t : terms.density)
    h += t.coefficient * (a[t.i].adjoint() * a[t.i]) * (a[t.j].adjoint() * a[t.j]);
  return {modes, h};
}

CVector gaussian_to_fock(const Matrix& gamma) {
  const int m = static_cast<int>(gamma.rows() / 2);
  check_modes(m);
  MajoranaHamiltonian parent(m);
  parent.set_quadratic(-0.25 * gamma);
  const FockOperator op = fock_matrix(parent);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op.matrix);
  const Vector& ev = es.eigenvalues();
  if (ev.size() > 1 && ev(1) - ev(0) < 0.5) throw Error("gaussian_to_fock: degenerate parent ground space");
  CVector psi = es.eigenvectors().col(0);
  Eigen::Index imax = 0;
  psi.cwiseAbs().maxCoeff(&imax);
  psi *= std::abs(psi(imax)) / psi(imax);
  return psi;
}

Matrix covariance_from_state(const CVector& psi) {
  const int m = std::countr_zero(static_cast<unsigned>(psi.size()));
  check_modes(m);
  const unsigned dim = 1u << m;
  Matrix g = Matrix::Zero(2 * m, 2 * m);
  for (int k = 0; k < 2 * m; ++k)
    for (int l = k + 1; l < 2 * m; ++l) {
      cplx acc(0.0);
      const int idx[2] = {k, l};
      for (unsigned s = 0; s < dim; ++s) {
        const MajoranaAction a = apply_word(idx, 2, s, m);
        acc += std::conj(psi(a.target)) * a.phase * psi(s);
      }
      const double v = (cplx(0.0, 1.0) * acc).real();
      g(k, l) = v;
      g(l, k) = -v;
    }
  return g;
}

cplx exact_expectation(const FockOperator& op, const CVector& psi) {
  if (op.matrix.rows() != psi.size()) throw Error("exact_expectation: dimension mismatch");
  return psi.dot(op.matrix * psi);
}

Vector exact_spectrum(const FockOperator& op) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace ghft::oracle
