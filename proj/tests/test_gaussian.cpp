#include "doctest.h"

#include "ghft/gaussian.hpp"
#include "ghft/oracle.hpp"
#include "test_support.hpp"

#include <sstream>

using namespace ghft;

namespace {

Matrix block2(double v) {
  Matrix g(2, 2);
  g << 0.0, v, -v, 0.0;
  return g;
}

MajoranaHamiltonian single_site_hubbard(double u, double mu) {
  DiracTermList terms;
  terms.density.push_back({0, 1, u});
  terms.number.push_back({0, -mu});
  terms.number.push_back({1, -mu});
  return compile_hamiltonian(ModeLayout(1, 2), terms);
}

// Central differences with Richardson extrapolation.
template <typename F>
double derivative(F&& f, double h) {
  const double d1 = (f(h) - f(-h)) / (2 * h);
  const double d2 = (f(h / 2) - f(-h / 2)) / h;
  return (4 * d2 - d1) / 3;
}

}  // namespace

TEST_CASE("validate classifies mixed, pure and unphysical matrices") {
  auto mixed = validate(Matrix::Zero(2, 2));
  CHECK(mixed.physical);
  CHECK_FALSE(mixed.pure);
  auto occupied = validate(block2(-1.0));
  CHECK(occupied.physical);
  CHECK(occupied.pure);
  auto bad = validate(block2(-2.0));
  CHECK_FALSE(bad.physical);
  CHECK(bad.max_singular_value == doctest::Approx(2.0));
  CHECK_THROWS_AS(validate(Matrix::Zero(3, 3)), Error);
  Matrix nonskew = block2(1.0);
  nonskew(0, 1) += 1e-6;
  CHECK_THROWS_AS(validate(nonskew), Error);
  CHECK_THROWS_AS(CovarianceMatrix{nonskew}, Error);
}

TEST_CASE("two-point functions follow <c_k c_l> = delta - i Gamma") {
  const CovarianceMatrix occupied(block2(-1.0));
  const CovarianceMatrix empty(block2(1.0));
  const auto mixed = CovarianceMatrix::maximally_mixed(2);
  CHECK(std::abs(hopping_expectation(occupied.matrix(), 0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(hopping_expectation(empty.matrix(), 0, 0)) < 1e-15);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) CHECK(two_point(mixed, k, l) == cplx(k == l ? 1.0 : 0.0));
  // against the exact occupied state |1>
  const CVector psi = oracle::gaussian_to_fock(occupied.matrix());
  const auto n = oracle::number_operator(0, 1);
  CHECK(std::abs(oracle::exact_expectation(n, psi) - 1.0) < 1e-12);
  CHECK_THROWS_AS(two_point(occupied, 0, 2), Error);
}

TEST_CASE("Dirac accessors agree with the Fock oracle on random states") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const int m = 3;
    const Matrix g = ghft::testing::random_pure(m, rng);
    const CVector psi = oracle::gaussian_to_fock(g);
    std::vector<CMatrix> a;
    for (int j = 0; j < m; ++j) {
      // a_j = (c_j - i c_{j+M}) / 2
      a.push_back(0.5 * (oracle::majorana_matrix(j, m).matrix - cplx(0, 1) * oracle::majorana_matrix(j + m, m).matrix));
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const cplx hop = psi.dot(a[i].adjoint() * a[j] * psi);
        const cplx pair = psi.dot(a[i].adjoint() * a[j].adjoint() * psi);
        CHECK(std::abs(hopping_expectation(g, i, j) - hop) < 1e-10);
        CHECK(std::abs(pairing_expectation(g, i, j) - pair) < 1e-10);
      }
  }
}

TEST_CASE("tr2 contraction: zero cases, bilinearity and antisymmetry") {
  std::mt19937 rng(11);
  const auto h = ghft::testing::random_hamiltonian(3, rng);
  const Matrix x = ghft::testing::random_skew(6, rng);
  const Matrix y = ghft::testing::random_skew(6, rng);
  CHECK(max_abs(tr2_contract({}, x)) == 0.0);
  CHECK(max_abs(tr2_contract(h.quartic(), Matrix::Zero(6, 6))) == 0.0);
  const Matrix lhs = tr2_contract(h.quartic(), 0.3 * x - 1.7 * y);
  const Matrix rhs = 0.3 * tr2_contract(h.quartic(), x) - 1.7 * tr2_contract(h.quartic(), y);
  CHECK(max_abs(lhs - rhs) < 1e-13);
  CHECK(max_abs(lhs + lhs.transpose()) == 0.0);
}

TEST_CASE("tr2 contraction matches the full-tensor definition") {
  std::mt19937 rng(12);
  const auto h = ghft::testing::random_hamiltonian(3, rng);
  const Matrix x = ghft::testing::random_skew(6, rng);
  const Matrix got = tr2_contract(h.quartic(), x);
  for (int k = 0; k < 6; ++k)
    for (int l = 0; l < 6; ++l) {
      double ref = 0.0;
      for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n) ref += h.quartic_at(k, l, m, n) * x(n, m);
      CHECK(got(k, l) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("energy examples on the single-site Hubbard model") {
  const double u = 4.0, mu = 1.0;
  const auto h = single_site_hubbard(u, mu);
  const Matrix vacuum = CovarianceMatrix::vacuum(2).matrix();
  const Matrix doubly = -vacuum;
  CHECK(energy(h, vacuum) == doctest::Approx(0.0).scale(1.0));
  CHECK(energy(h, doubly) == doctest::Approx(u - 2 * mu));
  const auto fock = oracle::fock_matrix(h);
  CHECK(std::abs(oracle::exact_expectation(fock, oracle::gaussian_to_fock(doubly)) - (u - 2 * mu)) < 1e-12);

  MajoranaHamiltonian free(2);
  Matrix t = Matrix::Random(4, 4);
  free.set_quadratic(t - t.transpose());
  free.add_offset(0.25);
  CHECK(energy(free, Matrix::Zero(4, 4)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(energy(free, 2.0 * vacuum), Error);
}

TEST_CASE("property: Wick energy equals the exact Fock expectation") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + trial % 5;
    const auto h = ghft::testing::random_hamiltonian(m, rng, 12);
    const Matrix g = ghft::testing::random_pure(m, rng);
    const double wick = energy(h, g);
    const cplx exact = oracle::exact_expectation(oracle::fock_matrix(h), oracle::gaussian_to_fock(g));
    CHECK(std::abs(exact.imag()) < 1e-10);
    CHECK(std::abs(wick - exact.real()) <= 1e-9 * (1.0 + std::abs(wick)));
  }
}

TEST_CASE("property: h6 is the energy gradient with unit constant") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3;
    const auto h = ghft::testing::random_hamiltonian(m, rng, 15);
    const Matrix g = ghft::testing::random_pure(m, rng);
    const Matrix x = ghft::testing::random_skew(2 * m, rng);
    // energy() validates physicality; evaluate the polynomial directly off the state manifold
    auto e = [&](double eps) {
      const Matrix ge = g + eps * x;
      double v = h.offset() + (h.quadratic().array() * ge.array()).sum();
      for (const auto& q : h.quartic()) {
        const auto [a, b, c, d] = q.index;
        v -= 24.0 * q.value * (ge(a, b) * ge(c, d) - ge(a, c) * ge(b, d) + ge(a, d) * ge(b, c));
      }
      return v;
    };
    const double fd = derivative(e, 1e-4);
    const double fd5 = derivative(e, 1e-5);
    const double analytic = (mean_field(h, g, 6).array() * x.array()).sum();
    CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
    CHECK(std::abs(fd5 - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
    // energy = sum h3 Gamma + offset
    CHECK((mean_field(h, g, 3).array() * g.array()).sum() + h.offset() == doctest::Approx(energy(h, g)));
  }
}

TEST_CASE("mean_field examples") {
  std::mt19937 rng(5);
  const auto h = ghft::testing::random_hamiltonian(3, rng);
  const Matrix g = ghft::testing::random_pure(3, rng);
  MajoranaHamiltonian free(3);
  free.set_quadratic(h.quadratic());
  CHECK(max_abs(mean_field(free, g, 6) - h.quadratic()) == 0.0);
  CHECK(max_abs(mean_field(h, Matrix::Zero(6, 6), 3) - h.quadratic()) == 0.0);
  const Matrix d6 = mean_field(h, g, 6) - h.quadratic();
  const Matrix d3 = mean_field(h, g, 3) - h.quadratic();
  CHECK(max_abs(d6 - 2.0 * d3) < 1e-14);
  const Matrix h6 = mean_field(h, g, 6);
  CHECK(max_abs(h6 + h6.transpose()) == 0.0);
}

TEST_CASE("quadratic ground states") {
  const double mu = 0.8;
  // +mu n favours the empty mode; T_01 = -mu/4
  CHECK(max_abs(quadratic_ground_state(block2(-mu / 4)).matrix() - block2(1.0)) < 1e-12);
  CHECK(max_abs(quadratic_ground_state(block2(mu / 4)).matrix() - block2(-1.0)) < 1e-12);
  const auto zero = quadratic_ground_state(Matrix::Zero(6, 6));
  CHECK(max_abs(zero.matrix() - CovarianceMatrix::vacuum(3).matrix()) < 1e-12);

  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + trial % 4;
    const Matrix h = ghft::testing::random_skew(2 * m, rng);
    const Matrix g = quadratic_ground_state(h).matrix();
    CHECK(validate(g).pure);
    CHECK(max_abs(commutator(h, g)) < 1e-10);
    // matches the exact ground energy
    MajoranaHamiltonian mh(m);
    mh.set_quadratic(h);
    const Vector spec = oracle::exact_spectrum(oracle::fock_matrix(mh));
    CHECK(energy(mh, g) == doctest::Approx(spec(0)).epsilon(1e-10));
  }
}

TEST_CASE("zero modes are filled deterministically with even parity") {
  // one gapped mode (occupied) plus one zero mode: the zero mode must be
  // filled so that the total parity is even, i.e. occupied as well
  Matrix h = Matrix::Zero(4, 4);
  h(0, 2) = 0.5;
  h(2, 0) = -0.5;
  const Matrix g = quadratic_ground_state(h).matrix();
  CHECK(validate(g).pure);
  CHECK(parity(g) == 1);
  CHECK(g(0, 2) == doctest::Approx(-1.0));
  CHECK(g(1, 3) == doctest::Approx(-1.0));
}

TEST_CASE("pfaffian and parity") {
  Matrix a(4, 4);
  a << 0, 1, 2, 3, -1, 0, 4, 5, -2, -4, 0, 6, -3, -5, -6, 0;
  CHECK(pfaffian(a) == doctest::Approx(1 * 6 - 2 * 5 + 3 * 4));
  CHECK(parity(CovarianceMatrix::vacuum(5).matrix()) == 1);
  Matrix one = CovarianceMatrix::vacuum(3).matrix();
  one(1, 4) = -1.0;
  one(4, 1) = 1.0;
  CHECK(parity(one) == -1);
}

TEST_CASE("covariance files round-trip in both formats") {
  std::mt19937 rng(3);
  const Matrix g = ghft::testing::random_pure(3, rng);
  for (auto fmt : {MatrixFileFormat::Csv, MatrixFileFormat::Binary}) {
    std::stringstream ss;
    write_matrix(ss, g, fmt);
    const Matrix back = read_matrix(ss);
    CHECK(max_abs(back - g) == 0.0);
  }
  std::stringstream bad("# something else\n");
  CHECK_THROWS_AS(read_matrix(bad), Error);
}

TEST_CASE("Fock oracle: Majorana anticommutators are exact") {
  const int m = 4;
  std::vector<CMatrix> c;
  for (int k = 0; k < 2 * m; ++k) c.push_back(oracle::majorana_matrix(k, m).matrix);
  const CMatrix id = CMatrix::Identity(1 << m, 1 << m);
  for (int k = 0; k < 2 * m; ++k)
    for (int l = 0; l < 2 * m; ++l) {
      const CMatrix ac = c[k] * c[l] + c[l] * c[k];
      CHECK(max_abs(ac - (k == l ? 2.0 : 0.0) * id) == 0.0);
    }
}

TEST_CASE("Fock oracle examples and covariance round-trip") {
  CHECK(max_abs(oracle::fock_matrix(MajoranaHamiltonian(2)).matrix) == 0.0);
  DiracTermList hop;
  hop.hopping.push_back({0, 1, 1.5});
  const Vector spec = oracle::exact_spectrum(oracle::fock_matrix(2, hop));
  CHECK(spec(0) == doctest::Approx(-1.5));
  CHECK(spec(1) == doctest::Approx(0.0).scale(1.0));
  CHECK(spec(2) == doctest::Approx(0.0).scale(1.0));
  CHECK(spec(3) == doctest::Approx(1.5));

  const CVector vac = oracle::gaussian_to_fock(CovarianceMatrix::vacuum(3).matrix());
  CHECK(std::abs(std::abs(vac(0)) - 1.0) < 1e-12);
  const CVector one = oracle::gaussian_to_fock(block2(-1.0));
  CHECK(std::abs(std::abs(one(1)) - 1.0) < 1e-12);

  std::mt19937 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix g = ghft::testing::random_pure(4, rng);
    CHECK(max_abs(oracle::covariance_from_state(oracle::gaussian_to_fock(g)) - g) < 1e-10);
  }
  oracle::FockOperator id{2, CMatrix::Identity(4, 4)};
  CHECK(std::abs(oracle::exact_expectation(id, oracle::gaussian_to_fock(CovarianceMatrix::vacuum(2).matrix())) - 1.0) < 1e-12);
}
