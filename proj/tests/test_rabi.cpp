#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/lanczos.hpp"
#include "cqed/quantizer.hpp"
#include "cqed/rabi.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace cqed;
using cplx = std::complex<double>;

namespace {

SparseHermitian random_sparse_hermitian(Gen& g, int n, double density) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, g.uniform(-5, 5));
    for (int j = i + 1; j < n; ++j)
      if (g.uniform(0, 1) < density) {
        const cplx v(g.uniform(-1, 1), g.uniform(-1, 1));
        t.emplace_back(i, j, v);
        t.emplace_back(j, i, std::conj(v));
      }
  }
  SparseHermitian H(n, n);
  H.setFromTriplets(t.begin(), t.end());
  return H;
}

Eigen::VectorXd dense_eigenvalues(const SparseHermitian& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(H)};
  return es.eigenvalues();
}

RabiCoefficients random_coefficients(Gen& g, int M, int Nq) {
  RabiCoefficients c;
  c.mode_freq_hz.resize(M);
  for (int m = 0; m < M; ++m) c.mode_freq_hz[m] = g.uniform(3e9, 9e9);
  c.transmon_levels_hz.resize(Nq);
  c.transmon_levels_hz[0] = 0;
  for (int i = 1; i < Nq; ++i) c.transmon_levels_hz[i] = c.transmon_levels_hz[i - 1] + g.uniform(4e9, 6e9);
  for (int m = 0; m < M; ++m) {
    Eigen::MatrixXcd x(Nq, Nq);
    for (int i = 0; i < Nq; ++i)
      for (int j = i; j < Nq; ++j) {
        x(i, j) = cplx(g.uniform(-5e7, 5e7), i == j ? 0.0 : g.uniform(-5e7, 5e7));
        x(j, i) = std::conj(x(i, j));
      }
    c.g_hz.push_back(x);
  }
  c.G_hz = Eigen::MatrixXd::Zero(M, M);
  for (int m = 0; m < M; ++m)
    for (int k = m + 1; k < M; ++k) c.G_hz(m, k) = c.G_hz(k, m) = g.uniform(-2e7, 2e7);
  return c;
}

// Typical device: quarter-wave fundamental, single junction.
ReducedCircuit device() {
  const double w0 = constants::two_pi * 4.6e9, Z = 50.0;
  ReducedCircuit rc;
  rc.C_a = 55e-15;
  rc.C_c = 10e-15;
  rc.C_r = constants::pi / (4 * w0 * Z);
  rc.L_0 = 4 * Z / (constants::pi * w0);
  rc.E_J_max_over_h = 18e9;
  return rc;
}

}  // namespace

TEST_CASE("uncoupled spectrum is the sum of bare energies") {
  RabiCoefficients c;
  c.mode_freq_hz = Eigen::Vector2d(5e9, 7.3e9);
  c.transmon_levels_hz = Eigen::Vector3d(0, 6.1e9, 11.9e9);
  c.g_hz = {Eigen::MatrixXcd::Zero(3, 3), Eigen::MatrixXcd::Zero(3, 3)};
  c.G_hz = Eigen::Matrix2d::Zero();
  TruncationSpec t;
  t.N_q = 3;
  t.photon_caps = {3, 2};
  const auto H = assemble(c, t);
  std::vector<double> want;
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 2; ++b) want.push_back(c.transmon_levels_hz[i] + a * 5e9 + b * 7.3e9);
  std::sort(want.begin(), want.end());
  const auto m = diagonalize(H, 18, t.dims());
  for (int k = 0; k < 18; ++k) CHECK(std::abs(m.eigenvalues_hz[k] - want[k]) < 1e-3);
}

TEST_CASE("resonant single excitation splits by 2g") {
  const double f = 5e9, g = 10e6;
  RabiCoefficients c;
  c.mode_freq_hz = Eigen::VectorXd::Constant(1, f);
  c.transmon_levels_hz = Eigen::Vector2d(0, f);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(2, 2);
  x(0, 1) = x(1, 0) = g;
  c.g_hz = {x};
  c.G_hz = Eigen::MatrixXd::Zero(1, 1);
  TruncationSpec t;
  t.N_q = 2;
  t.photon_caps = {6};
  const auto m = diagonalize(assemble(c, t), 4, t.dims());
  CHECK(std::abs((m.eigenvalues_hz[2] - m.eigenvalues_hz[1]) / (2 * g) - 1) < 0.01);
}

TEST_CASE("assembled operator is exactly Hermitian") {
  Gen g(41);
  for (int trial = 0; trial < 10; ++trial) {
    const int M = g.integer(1, 3);
    const RabiCoefficients c = random_coefficients(g, M, 4);
    TruncationSpec t;
    t.N_q = 4;
    for (int m = 0; m < M; ++m) t.photon_caps.push_back(g.integer(1, 4));
    const SparseHermitian H = assemble(c, t);
    const SparseHermitian D = H - SparseHermitian(H.adjoint());
    double worst = 0;
    for (int k = 0; k < D.outerSize(); ++k)
      for (SparseHermitian::InnerIterator it(D, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    CHECK(worst == 0.0);
  }
}

TEST_CASE("dimension mismatches are reported") {
  Gen g(43);
  const RabiCoefficients c = random_coefficients(g, 2, 3);
  TruncationSpec t;
  t.N_q = 3;
  t.photon_caps = {3};
  CHECK_THROWS_AS(assemble(c, t), DimensionMismatch);
  t.photon_caps = {3, 3};
  t.N_q = 4;
  CHECK_THROWS_AS(assemble(c, t), DimensionMismatch);
}

TEST_CASE("truncation validation") {
  TruncationSpec t;
  t.N_q = 1;
  t.photon_caps = {3};
  CHECK_THROWS(t.validate());
  t.N_q = 3;
  t.photon_caps = {0};
  CHECK_THROWS(t.validate());
  t.photon_caps = {1000, 1000, 1000};
  CHECK_THROWS(t.validate());
}

TEST_CASE("diagonal operator eigenvalues are sorted diagonal entries") {
  Gen g(47);
  const int n = 40;
  SparseHermitian H(n, n);
  std::vector<double> d;
  for (int i = 0; i < n; ++i) {
    d.push_back(g.uniform(-3, 3));
    H.insert(i, i) = d.back();
  }
  std::sort(d.begin(), d.end());
  const auto m = diagonalize(H, n - 1);
  for (int k = 0; k < n - 1; ++k) CHECK(std::abs(m.eigenvalues_hz[k] + m.ground_energy_hz - d[k]) < 1e-12);
  CHECK(m.eigenvalues_hz[0] == doctest::Approx(0.0));
}

TEST_CASE("iterative eigensolver matches dense at dimension 256") {
  Gen g(53);
  for (int trial = 0; trial < 5; ++trial) {
    const SparseHermitian H = random_sparse_hermitian(g, 256, 0.03);
    const Eigen::VectorXd ref = dense_eigenvalues(H);
    DiagonalizeOptions opt;
    opt.force_iterative = true;
    const auto m = diagonalize(H, 12, opt);
    for (int k = 0; k < 12; ++k) CHECK(std::abs(m.eigenvalues_hz[k] + m.ground_energy_hz - ref[k]) < 1e-9);
    const auto dense = diagonalize(H, 12);
    for (int k = 0; k < 12; ++k) CHECK(std::abs(dense.eigenvalues_hz[k] + dense.ground_energy_hz - ref[k]) < 1e-9);
  }
}

TEST_CASE("eigenvectors are orthonormal") {
  Gen g(59);
  const SparseHermitian H = random_sparse_hermitian(g, 200, 0.05);
  DiagonalizeOptions opt;
  opt.force_iterative = true;
  const auto m = diagonalize(H, 10, opt);
  const Eigen::MatrixXcd gram = m.eigenvectors.adjoint() * m.eigenvectors;
  CHECK((gram - Eigen::MatrixXcd::Identity(10, 10)).norm() < 1e-9);
  const auto d = diagonalize(H, 10);
  CHECK((d.eigenvectors.adjoint() * d.eigenvectors - Eigen::MatrixXcd::Identity(10, 10)).norm() < 1e-9);
}

TEST_CASE("spectrum is invariant under permutation of the modes") {
  Gen g(61);
  for (int trial = 0; trial < 5; ++trial) {
    const int M = 3;
    const RabiCoefficients c = random_coefficients(g, M, 3);
    std::vector<int> perm{2, 0, 1};
    RabiCoefficients p = c;
    TruncationSpec t, tp;
    t.N_q = tp.N_q = 3;
    t.photon_caps = {3, 2, 4};
    for (int m = 0; m < M; ++m) {
      p.mode_freq_hz[m] = c.mode_freq_hz[perm[m]];
      p.g_hz[m] = c.g_hz[perm[m]];
      tp.photon_caps.push_back(t.photon_caps[perm[m]]);
      for (int k = 0; k < M; ++k) p.G_hz(m, k) = c.G_hz(perm[m], perm[k]);
    }
    const auto a = diagonalize(assemble(c, t), 20, t.dims());
    const auto b = diagonalize(assemble(p, tp), 20, tp.dims());
    for (int k = 0; k < 20; ++k)
      CHECK(std::abs(a.eigenvalues_hz[k] - b.eigenvalues_hz[k]) <= 1e-10 * std::max(1.0, std::abs(a.eigenvalues_hz[k])));
  }
}

TEST_CASE("labels flatten and unflatten") {
  const std::vector<int> dims{4, 3, 2};
  for (std::size_t i = 0; i < 24; ++i) CHECK(flatten(unflatten(i, dims), dims) == i);
  CHECK(unflatten(0, dims).to_string() == "|0,0,0>");
  CHECK(unflatten(23, dims).n == std::vector<int>{3, 2, 1});
  CHECK_THROWS(flatten(BasisLabel{{4, 0, 0}}, dims));
}

TEST_CASE("weak coupling recovers the direct sum of spectra") {
  ReducedCircuit rc = device();
  rc.C_c = 1e-22;
  const QuantizedSystem q = quantize(rc, 2);
  const CpbSpectrum cpb = cpb_diagonalize(q.E_C_over_h, rc.E_J_max_over_h, 0, 0, 0, 20, 4);
  TruncationSpec t;
  t.N_q = 4;
  t.photon_caps = {3, 2};
  const auto m = diagonalize(assemble(q, cpb, t), 10, t.dims());
  const double f0 = q.omega_m[0] / constants::two_pi, f1 = q.omega_m[1] / constants::two_pi;
  const double q1 = cpb.energies_hz[1] - cpb.energies_hz[0];
  CHECK(std::abs(m.transition_hz(BasisLabel{{0, 1, 0}}) - f0) < 1.0);
  CHECK(std::abs(m.transition_hz(BasisLabel{{0, 0, 1}}) - f1) < 1.0);
  CHECK(std::abs(m.transition_hz(BasisLabel{{1, 0, 0}}) - q1) < 1.0);
}

TEST_CASE("default tracked levels converge for a generous truncation") {
  const ReducedCircuit rc = device();
  const QuantizedSystem q = quantize(rc, 2);
  const CpbParams cp{q.E_C_over_h, rc.E_J_max_over_h, 0, 0, 0, 20};
  TruncationSpec t;
  t.N_q = 6;
  t.photon_caps = {6, 4};
  t.linewidth_hz = 2e6;
  const ConvergenceReport r = check_convergence(q, cp, t);
  CHECK(r.pass);
  CHECK(r.max_shift_hz < t.linewidth_hz / 10);
  CHECK(r.threshold_hz == doctest::Approx(t.linewidth_hz / 10));
}

TEST_CASE("uncoupled system converges exactly") {
  ReducedCircuit rc = device();
  rc.C_c = 1e-30;
  const QuantizedSystem q = quantize(rc, 1);
  TruncationSpec t;
  t.N_q = 3;
  t.photon_caps = {3};
  t.linewidth_hz = 1e6;
  const ConvergenceReport r = check_convergence(q, {q.E_C_over_h, rc.E_J_max_over_h, 0, 0, 0, 20}, t);
  CHECK(r.pass);
  CHECK(r.max_shift_hz < 1e-3);
}

TEST_CASE("two transmon levels are not enough at strong coupling") {
  ReducedCircuit rc = device();
  rc.C_c = 40e-15;
  const QuantizedSystem q = quantize(rc, 1);
  TruncationSpec t;
  t.N_q = 2;
  t.photon_caps = {5};
  t.linewidth_hz = 1e6;
  const ConvergenceReport r = check_convergence(q, {q.E_C_over_h, rc.E_J_max_over_h, 0, 0, 0, 20}, t);
  CHECK_FALSE(r.pass);
  REQUIRE(!r.varied.empty());
  CHECK(r.varied[0] == "N_q");
  CHECK(r.shift_hz[0] > t.linewidth_hz / 10);
}

TEST_CASE("four-mode truncation agrees with one more transmon level") {
  // Strongly coupled four-mode device at the truncation [6,4,3,3]; the dressed
  // fundamental moves by less than 1.2 MHz when N_q goes from 5 to 6.
  ReducedCircuit rc = device();
  rc.C_a = 5.13e-15;
  rc.C_c = 40.3e-15;
  rc.E_J_max_over_h = 36.3e9;
  const QuantizedSystem q = quantize(rc, 4);
  auto dressed = [&](int Nq) {
    const CpbSpectrum cpb = cpb_diagonalize(q.E_C_over_h, rc.E_J_max_over_h, 0.0, 0.3, 0.0, 20, Nq);
    TruncationSpec t;
    t.N_q = Nq;
    t.photon_caps = {6, 4, 3, 3};
    return diagonalize(assemble(q, cpb, t), 6, t.dims()).transition_hz(BasisLabel{{0, 1, 0, 0, 0}});
  };
  CHECK(std::abs(dressed(5) - dressed(6)) < 1.2e6);
}

TEST_CASE("harmonic two-mode variant is real symmetric") {
  const Eigen::MatrixXd H = harmonic_two_mode_hamiltonian(5e9, 250e6, 6e9, 50e6, 6, 5);
  CHECK(H.rows() == 30);
  CHECK((H - H.transpose()).norm() == 0.0);
}

TEST_CASE("Gershgorin bound lies below the spectrum") {
  Gen g(67);
  const SparseHermitian H = random_sparse_hermitian(g, 100, 0.1);
  CHECK(gershgorin_lower_bound(H) <= dense_eigenvalues(H)[0] + 1e-12);
}
