#include "doctest.h"

#include "ghft/dynamics.hpp"
#include "ghft/oracle.hpp"
#include "test_support.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace ghft;
using ghft::testing::random_pure;
using ghft::testing::random_skew;
using ghft::testing::small_hubbard;

namespace {

double purity_violation(const Matrix& g) {
  return max_abs(g * g + Matrix::Identity(g.rows(), g.cols()));
}

}  // namespace

TEST_CASE("expm_skew gives orthogonal rotations") {
  std::mt19937 rng(1);
  const Matrix a = random_skew(8, rng);
  const Matrix o = expm_skew(a);
  CHECK(max_abs(o * o.transpose() - Matrix::Identity(8, 8)) < 1e-13);
  CHECK(o.determinant() == doctest::Approx(1.0));
  CHECK(max_abs(expm_skew(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("real-time step: free evolution matches the closed form") {
  std::mt19937 rng(2);
  MajoranaHamiltonian h(3);
  h.set_quadratic(random_skew(6, rng, 0.5));
  const CovarianceMatrix g0(random_pure(3, rng));
  const CovarianceMatrix g = real_time_evolve(h, g0, 1e-3, 1000);
  const Matrix o = (4.0 * h.quadratic()).exp();
  const Matrix exact = o * g0.matrix() * o.transpose();
  CHECK(max_abs(g.matrix() - exact) < 1e-5);
  CHECK(max_abs(real_time_step(h, g0, 1e-3).matrix() - real_time_evolve(h, g0, 1e-3, 1).matrix()) == 0.0);
}

TEST_CASE("real-time step leaves stationary states fixed") {
  std::mt19937 rng(3);
  MajoranaHamiltonian h(3);
  h.set_quadratic(random_skew(6, rng));
  const auto g0 = quadratic_ground_state(h.quadratic());
  CHECK(max_abs(real_time_step(h, g0, 1e-2).matrix() - g0.matrix()) < 1e-13);

  const auto hub = small_hubbard(2, 1, 1.0, 2.0, 0.5);
  const auto [gs, rep] = imaginary_time_ground_state(hub, CovarianceMatrix(random_pure(4, rng)), 0.0, 1e-11, 200000);
  REQUIRE(rep.converged);
  CHECK(max_abs(real_time_step(hub, gs, 1e-2).matrix() - gs.matrix()) < 1e-10);
}

TEST_CASE("real-time step rejects bad input") {
  MajoranaHamiltonian h(2);
  CHECK_THROWS_AS(real_time_step(h, CovarianceMatrix::maximally_mixed(2), 1e-3), Error);
  CHECK_THROWS_AS(real_time_step(h, CovarianceMatrix::vacuum(2), 0.0), Error);
  CHECK_THROWS_AS(real_time_step(h, CovarianceMatrix::vacuum(3), 1e-3), Error);
}

TEST_CASE("real-time Hubbard dynamics conserves energy and purity") {
  std::mt19937 rng(4);
  const auto h = small_hubbard(2, 2, 1.0, 4.0, 1.0);
  CovarianceMatrix g(random_pure(8, rng));
  const double e0 = energy(h, g);
  double worst_step = 0.0;
  for (int s = 0; s < 100; ++s) {
    const CovarianceMatrix next = real_time_step(h, g, 1e-3);
    worst_step = std::max(worst_step, std::abs(energy(h, next) - energy(h, g)));
    g = next;
  }
  CHECK(worst_step <= 1e-10);
  g = real_time_evolve(h, g, 1e-3, 9900);
  CHECK(std::abs(energy(h, g) - e0) <= 1e-8 * std::abs(e0));
  CHECK(purity_violation(g.matrix()) <= 1e-10);
}

TEST_CASE("imaginary time: two-site hopping reaches -t from |10>") {
  const double t = 0.7;
  DiracTermList terms;
  terms.hopping.push_back({0, 1, t});
  const auto h = compile_hamiltonian(ModeLayout(2, 1), terms);
  Matrix g = CovarianceMatrix::vacuum(2).matrix();
  g(0, 2) = -1.0;
  g(2, 0) = 1.0;
  const auto [gs, rep] = imaginary_time_ground_state(h, CovarianceMatrix(g), FlowSettings{});
  CHECK(rep.converged);
  CHECK(rep.final_energy == doctest::Approx(-t).epsilon(1e-8));
  CHECK(std::abs(energy(h, gs) + t) < 1e-8);
  CHECK(stationarity_residual(h, gs.matrix()) < 1e-8);
}

TEST_CASE("imaginary time: single-site Hubbard reaches the brute-force minimum") {
  const double u = 4.0, mu = 1.0;
  const auto h = small_hubbard(1, 1, 0.0, u, mu);
  const Vector exact = oracle::exact_spectrum(oracle::fock_matrix(h));
  // even sector: vacuum (0) and the doubly occupied state (u - 2 mu); odd: -mu
  std::mt19937 rng(5);
  const auto [even, rep_even] = imaginary_time_ground_state(h, CovarianceMatrix(random_pure(2, rng)), FlowSettings{});
  CHECK(rep_even.converged);
  CHECK(std::abs(rep_even.final_energy - std::min(0.0, u - 2 * mu)) < 1e-8);

  Matrix odd = random_pure(2, rng);
  odd.row(0) *= -1.0;
  odd.col(0) *= -1.0;  // reflection flips parity
  REQUIRE(parity(odd) == -1);
  const auto [gs, rep_odd] = imaginary_time_ground_state(h, CovarianceMatrix(odd), FlowSettings{});
  CHECK(rep_odd.converged);
  CHECK(std::abs(rep_odd.final_energy - exact(0)) < 1e-8);
  CHECK(exact(0) == doctest::Approx(-mu));
}

TEST_CASE("imaginary time: fixed point input exits immediately") {
  std::mt19937 rng(6);
  MajoranaHamiltonian h(3);
  h.set_quadratic(random_skew(6, rng));
  const auto g0 = quadratic_ground_state(h.quadratic());
  const auto [g, rep] = imaginary_time_ground_state(h, g0, FlowSettings{});
  CHECK(rep.iterations <= 1);
  CHECK(rep.converged);
  CHECK(rep.final_energy == doctest::Approx(energy(h, g0)));
  CHECK(max_abs(g.matrix() - g0.matrix()) < 1e-12);
}

TEST_CASE("imaginary time: non-convergence is reported, not thrown") {
  std::mt19937 rng(7);
  const auto h = small_hubbard(2, 1, 1.0, 3.0, 0.3);
  FlowSettings s;
  s.max_iter = 3;
  s.tol = 1e-14;
  const auto [g, rep] = imaginary_time_ground_state(h, CovarianceMatrix(random_pure(4, rng)), s);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 3);
  CHECK(rep.residual >= s.tol);
  CHECK_THROWS_AS(imaginary_time_ground_state(h, CovarianceMatrix::maximally_mixed(4), s), Error);
}

TEST_CASE("imaginary time: monotone energy and stationarity at exit") {
  std::mt19937 rng(8);
  const auto h = small_hubbard(2, 2, 1.0, -3.0, 0.8);
  FlowSettings c;
  c.tol = 1e-10;
  const auto [g, rep] = imaginary_time_ground_state(h, CovarianceMatrix(random_pure(8, rng)), c);
  CHECK(rep.converged);
  CHECK(stationarity_residual(h, g.matrix()) < 1e-10);
  const auto& hist = rep.energy_history;
  REQUIRE(hist.size() > 10);
  double worst = 0.0;
  for (std::size_t i = 1; i < hist.size(); ++i) worst = std::max(worst, hist[i] - hist[i - 1]);
  CHECK(worst <= 1e-12);
  const auto j = to_json(rep);
  CHECK(j["converged"].get<bool>());
  CHECK(j["energy_history"].size() == hist.size());
  CHECK(j["iterations"].get<long>() == rep.iterations);
}

TEST_CASE("imaginary-time steps keep purity over 1e4 steps") {
  std::mt19937 rng(9);
  const auto h = small_hubbard(2, 2, 1.0, 4.0, -0.5);
  Matrix g = random_pure(8, rng);
  double prev = energy(h, g), worst = 0.0;
  for (int s = 0; s < 10000; ++s) {
    g = rotate_covariance(g, 0.01 * 2.0 * commutator(mean_field(h, g, 6), g));
    const double e = wick_energy(h, g);
    worst = std::max(worst, e - prev);
    prev = e;
  }
  CHECK(purity_violation(g) <= 1e-10);
  CHECK(worst <= 1e-12);
}
