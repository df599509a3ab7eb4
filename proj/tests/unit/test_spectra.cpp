#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <random>

#include "circlaw/linearization.hpp"
#include "circlaw/spectra.hpp"

using namespace circlaw;

namespace {

std::shared_ptr<const BlockLinearization> wrap(Eigen::MatrixXd W, int n, int m) {
  return std::make_shared<const BlockLinearization>(BlockLinearization::from_matrix(std::move(W), n, m));
}

std::shared_ptr<const BlockLinearization> random_lin(int n, int m, std::uint64_t seed) {
  EnsembleSpec s;
  s.n = n;
  s.m = m;
  s.base_seed = seed;
  return std::make_shared<const BlockLinearization>(BlockLinearization::build(ProductModel::sample(s, 0)));
}

Eigen::MatrixXcd random_hermitian(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("singular values of small matrices") {
  SUBCASE("diagonal") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -4.0;
    const auto sp = singular_spectrum(shift(wrap(d, 2, 1), 0.0));
    REQUIRE(sp.size() == 2);
    CHECK(sp.values[0] == doctest::Approx(4.0));
    CHECK(sp.values[1] == doctest::Approx(3.0));
  }
  SUBCASE("against JacobiSVD") {
    auto W = random_lin(4, 1, 3);
    const auto S = shift(W, Complex(0.3, -0.2), 0.05, Complex(0.0, 0.5));
    Eigen::JacobiSVD<Eigen::MatrixXcd> ref(S.dense());
    for (auto solver : {SpectrumSolver::svd, SpectrumSolver::hermitian}) {
      const auto sp = singular_spectrum(S, WeightMode::none, solver);
      for (int k = 0; k < 4; ++k) CHECK(std::abs(sp.values[k] - ref.singularValues()[k]) <= 1e-12);
    }
  }
  SUBCASE("zero matrix") {
    const auto sp = singular_spectrum(shift(wrap(Eigen::MatrixXd::Zero(3, 3), 3, 1), 0.0));
    CHECK(sp.values.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("esd_cdf") {
  const auto one = SingularSpectrum::from_values({1.0}, 1, 1);
  CHECK(esd_cdf(one, 0.0) == 0.5);
  CHECK(esd_cdf(one, 1.0) == 1.0);
  CHECK(esd_cdf(one, -1.0) == 0.5);
  CHECK(esd_cdf_left(one, 1.0) == 0.5);
  CHECK(esd_cdf(one, -1.5) == 0.0);
  const auto two = SingularSpectrum::from_values({2.0, 1.0}, 2, 1);
  CHECK(esd_cdf(two, 1.5) == 0.75);
  CHECK(esd_cdf(two, -1.5) == 0.25);
}

TEST_CASE("empirical_stieltjes") {
  const auto one = SingularSpectrum::from_values({1.0}, 1, 1);
  CHECK(std::abs(empirical_stieltjes(one, Complex(0.0, 1.0)) - Complex(0.0, 0.5)) <= 1e-15);
  const auto sp = SingularSpectrum::from_values({0.3, 1.7, 2.2, 0.9}, 4, 1);
  // symmetric spectrum: purely imaginary on the imaginary axis
  const Complex iv = empirical_stieltjes(sp, Complex(0.0, 0.4));
  CHECK(std::abs(iv.real()) <= 1e-16);
  CHECK(iv.imag() > 0.0);
  const Complex far(3e5, 1e6);
  CHECK(std::abs(empirical_stieltjes(sp, far) * far + 1.0) <= 1e-10);
  CHECK_THROWS(empirical_stieltjes(sp, Complex(1.0, 0.0)));
}

TEST_CASE("partial traces against an explicit resolvent") {
  SUBCASE("m = 1 average is the Stieltjes transform") {
    const auto S = shift(random_lin(6, 1, 5), 0.4);
    const auto sp = singular_spectrum(S, WeightMode::blocks);
    const Complex w(0.1, 0.2);
    const auto tr = partial_traces(sp, w);
    CHECK(std::abs((tr[0] + tr[1]) / 2.0 - empirical_stieltjes(sp, w)) <= 1e-12);
  }
  SUBCASE("n = 4, m = 2") {
    const auto S = shift(random_lin(4, 2, 7), Complex(0.2, 0.1));
    const Complex w(0.3, 0.5);
    const Eigen::MatrixXcd V = hermitize(S).V;
    const Eigen::MatrixXcd R = (V - w * Eigen::MatrixXcd::Identity(16, 16)).inverse();
    for (auto solver : {SpectrumSolver::svd, SpectrumSolver::hermitian}) {
      const auto sp = singular_spectrum(S, WeightMode::blocks, solver);
      for (int a = 1; a <= 4; ++a) {
        Complex ref = 0.0;
        for (int j = 0; j < 4; ++j) ref += R((a - 1) * 4 + j, (a - 1) * 4 + j);
        CHECK(std::abs(partial_trace(sp, a, w) - ref / 4.0) <= 1e-12);
      }
    }
  }
  SUBCASE("diagonal W") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 0.5;
    d(1, 1) = 2.0;
    const auto sp = singular_spectrum(shift(wrap(d, 2, 1), 0.0), WeightMode::blocks);
    const Complex w(0.0, 1.0);
    const Complex ref = (w / (0.25 - w * w) + w / (4.0 - w * w)) / 2.0;
    CHECK(std::abs(partial_trace(sp, 1, w) - ref) <= 1e-14);
    CHECK(std::abs(partial_trace(sp, 2, w) - ref) <= 1e-14);
  }
  SUBCASE("bad index and missing weights") {
    const auto sp = SingularSpectrum::from_values({1.0}, 1, 1);
    CHECK_THROWS_AS(partial_trace(sp, 1, Complex(0, 1)), std::logic_error);
    const auto sw = singular_spectrum(shift(random_lin(2, 1, 1), 0.0), WeightMode::blocks);
    CHECK_THROWS_AS(partial_trace(sw, 3, Complex(0, 1)), std::invalid_argument);
  }
}

TEST_CASE("block weights sum to one per eigenvector and n per block") {
  const auto sp = singular_spectrum(shift(random_lin(5, 3, 11), 0.7), WeightMode::blocks);
  for (Eigen::Index k = 0; k < sp.size(); ++k) {
    CHECK(sp.w_plus.col(k).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sp.w_minus.col(k).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int a = 0; a < 6; ++a) {
    CHECK((sp.w_plus.row(a).sum() + sp.w_minus.row(a).sum()) == doctest::Approx(5.0).epsilon(1e-12));
  }
}

TEST_CASE("product_eigenvalues") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << 1.0, -2.0, 0.5;
  auto ev = product_eigenvalues(d).eigenvalues;
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  CHECK(std::abs(ev[0] - Complex(-2.0)) <= 1e-14);
  CHECK(std::abs(ev[2] - Complex(1.0)) <= 1e-14);

  // companion matrix of x^2 + 1
  Eigen::MatrixXd c(2, 2);
  c << 0.0, -1.0, 1.0, 0.0;
  const auto cs = product_eigenvalues(c);
  CHECK(cs.count_in_disk(Complex(0.0, 1.0), 1e-12) == 1);
  CHECK(cs.count_in_disk(Complex(0.0, -1.0), 1e-12) == 1);
  CHECK(cs.count_in_rect(-0.1, 0.1, 0.5, 1.5) == 1);
  CHECK_THROWS_AS(product_eigenvalues(Eigen::MatrixXd(2, 3)), std::invalid_argument);
}

TEST_CASE("extreme value monitor") {
  const auto sp = SingularSpectrum::from_values({5.0, 1.0, 1e-10}, 3, 1);
  auto ev = extreme_value_monitor(sp, 10.0, 1e-8);
  CHECK(ev.s_max == 5.0);
  CHECK(ev.s_min == 1e-10);
  // omega_event: both extremes inside [threshold, K]
  CHECK_FALSE(ev.omega_event);
  CHECK(extreme_value_monitor(SingularSpectrum::from_values({5.0, 1.0}, 2, 1), 10.0, 1e-8).omega_event);
  CHECK_FALSE(extreme_value_monitor(SingularSpectrum::from_values({11.0, 1.0}, 2, 1), 10.0, 1e-8).omega_event);
}

TEST_CASE("operator norm of W(z) stays bounded") {
  // s_max(W - z) <= |z| + ||W||, and ||W|| concentrates near 2 for m = 1
  int over = 0;
  for (int t = 0; t < 50; ++t) {
    EnsembleSpec s;
    s.n = 256;
    s.base_seed = 1234;
    auto W = std::make_shared<const BlockLinearization>(BlockLinearization::build(ProductModel::sample(s, t)));
    const auto sp = singular_spectrum(shift(W, 0.5));
    over += sp.values[0] > 0.5 + 2.3;
  }
  CHECK(over == 0);
}

TEST_CASE("resolvent diagnostics") {
  SUBCASE("1x1 zero") {
    const Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(1, 1);
    const Complex w(0.0, 2.0);
    CHECK(std::abs(resolvent(V, w)(0, 0) - 1.0 / (-w)) <= 1e-15);
    const auto rc = resolvent_row_check(V, w, 0);
    CHECK(rc.lhs == doctest::Approx(rc.rhs));
    CHECK(rc.holds);
  }
  SUBCASE("random 16x16") {
    const auto V = random_hermitian(16, 21);
    for (Eigen::Index j = 0; j < 16; ++j) {
      const auto rc = resolvent_row_check(V, Complex(0.2, 0.05), j);
      CHECK(rc.lhs == doctest::Approx(rc.rhs).epsilon(1e-9));
    }
    const auto ic = resolvent_identity_check(V, Complex(0.1, 0.3), Complex(-0.4, 0.02));
    CHECK(ic.holds);
    CHECK(descent_property_check(V, 0.3, 0.1, 2.0, 4));
  }
  SUBCASE("descent on a diagonal V") {
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(2, 2);
    V(0, 0) = 1.0;
    V(1, 1) = -1.0;
    // at u on an eigenvalue |R_jj| = 1/v, so the bound is attained with equality
    CHECK(descent_property_check(V, 1.0, 0.5, 2.0, 0));
    CHECK(descent_property_check(V, 0.0, 1e-3, 10.0, 1));
    CHECK_THROWS_AS(descent_property_check(V, 0.0, 0.1, 0.5, 0), std::invalid_argument);
  }
}
