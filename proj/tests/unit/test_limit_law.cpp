#include <doctest.h>

#include <unsupported/Eigen/Polynomials>

#include <cmath>
#include <numbers>
#include <random>

#include "circlaw/limit_law.hpp"

using namespace circlaw;

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// endpoints from the quartic discriminant in y = x^2, solved independently
double edge_formula(double az, int sign) {
  const double a = std::sqrt(1.0 + 8.0 * az * az);
  const double b = 3.0 + sign * a;
  return std::sqrt(b * b * b / (8.0 * (sign * a + 1.0)));
}

// density via a generic polynomial root finder
double density_oracle(Complex z, double x, double eta = 1e-10) {
  const Complex w(x, eta);
  Eigen::Matrix<Complex, 4, 1> coeff;
  coeff << w, w * w - std::norm(z) + 1.0, 2.0 * w, 1.0;
  Eigen::PolynomialSolver<Complex, 3> ps(coeff);
  double best = 0.0;
  for (int k = 0; k < 3; ++k) best = std::max(best, ps.roots()[k].imag());
  return best / kPi;
}

double semicircle(double x) { return std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * kPi) : 0.0; }

}  // namespace

TEST_CASE("density_p and radial_cdf") {
  CHECK(density_p(1, 0.3) == doctest::Approx(1.0 / kPi));
  CHECK(density_p(1, 1.5) == 0.0);
  CHECK(density_p(2, Complex(0.5, 0.0)) == doctest::Approx(1.0 / (kPi * 2.0 * 0.5)));
  CHECK(density_p(3, 2.0) == 0.0);
  for (int m : {1, 2, 3, 5}) {
    CHECK(radial_cdf(m, 1.0) == doctest::Approx(1.0));
    CHECK(radial_cdf(m, 0.0) == 0.0);
    // mass of the disk of radius 0.6 by integrating the density
    // r = t^m removes the singularity at the origin
    const double mass = simpson(
        [&](double t) {
          const double r = std::pow(t, m);
          return t == 0.0 ? 0.0 : 2.0 * kPi * r * density_p(m, r) * m * std::pow(t, m - 1);
        },
        0.0, std::pow(0.6, 1.0 / m));
    CHECK(mass == doctest::Approx(radial_cdf(m, 0.6)).epsilon(1e-10));
  }
  CHECK(radial_cdf(2, 0.25) == doctest::Approx(0.25));
  CHECK_THROWS_AS(density_p(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(radial_cdf(2, 1.5), std::invalid_argument);
}

TEST_CASE("support endpoints") {
  const auto l0 = support_endpoints(0.0);
  CHECK(l0.lambda_plus == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(l0.regime == Regime::inside);
  CHECK_FALSE(l0.lambda_minus.has_value());

  const auto l2 = support_endpoints(2.0);
  REQUIRE(l2.lambda_minus.has_value());
  CHECK(l2.lambda_plus == doctest::Approx(edge_formula(2.0, +1)).epsilon(1e-14));
  CHECK(*l2.lambda_minus == doctest::Approx(edge_formula(2.0, -1)).epsilon(1e-14));
  CHECK(std::abs(l2.lambda_plus - 3.5205) <= 5e-4);
  CHECK(*l2.lambda_minus == doctest::Approx(0.73802).epsilon(1e-5));
  CHECK(l2.alpha == doctest::Approx(std::sqrt(33.0)));

  CHECK(support_endpoints(Complex(0.0, 0.5)).lambda_plus == doctest::Approx(2.20183).epsilon(1e-5));
  CHECK(*support_endpoints(1.001).lambda_minus < 0.05);
  CHECK_THROWS_AS(support_endpoints(Complex(0.6, 0.8)), std::invalid_argument);
  CHECK_NOTHROW(support_endpoints(1.0, true));

  // endpoints are where the density switches on and off
  for (double az : {0.3, 1.4, 2.0}) {
    const auto law = support_endpoints(az);
    CHECK(density_oracle(az, law.lambda_plus * (1.0 + 1e-3)) < 1e-6);
    CHECK(density_oracle(az, law.lambda_plus * (1.0 - 1e-3)) > 1e-3);
    if (law.lambda_minus) {
      CHECK(density_oracle(az, *law.lambda_minus * (1.0 - 1e-3)) < 1e-6);
      CHECK(density_oracle(az, *law.lambda_minus * (1.0 + 1e-3)) > 1e-3);
    }
  }
}

TEST_CASE("gamma_edge") {
  CHECK(gamma_edge(0.0, 0.0) == doctest::Approx(2.0));
  CHECK(gamma_edge(0.0, -1.5) == doctest::Approx(0.5));
  const auto l2 = support_endpoints(2.0);
  const double mid = 0.5 * (l2.lambda_plus + *l2.lambda_minus);
  CHECK(gamma_edge(l2, mid) == doctest::Approx(0.5 * (l2.lambda_plus - *l2.lambda_minus)));
  CHECK(gamma_edge(l2, *l2.lambda_minus + 0.1) == doctest::Approx(0.1));
}

TEST_CASE("solve_s") {
  SUBCASE("semicircle at z = 0") {
    const auto e = solve_s(0.0, Complex(0.0, 2.0));
    CHECK(std::abs(e.s - Complex(0.0, std::sqrt(2.0) - 1.0)) <= 1e-14);
    for (Complex w : {Complex(0.5, 0.1), Complex(-3.0, 0.01), Complex(1.9, 1e-6)}) {
      const Complex ref = (-w + std::sqrt(w - 2.0) * std::sqrt(w + 2.0)) / 2.0;
      CHECK(std::abs(solve_s(0.0, w).s - ref) <= 1e-10);
    }
  }
  SUBCASE("residual and sign on random points") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
      const Complex z = std::polar(3.0 * U(rng), 2.0 * kPi * U(rng));
      const Complex w(8.0 * U(rng) - 4.0, std::pow(10.0, -6.0 + 7.0 * U(rng)));
      const auto e = solve_s(z, w);
      const double scale = 1.0 + std::pow(std::abs(e.s), 3) + std::abs(w) * std::abs(w) * std::abs(e.s);
      bad += !(cubic_residual(z, w, e.s) <= 1e-10 * scale && e.s.imag() > 0.0);
    }
    CHECK(bad == 0);
  }
  SUBCASE("asymptotics") {
    const Complex w(0.0, 1e6);
    CHECK(std::abs(solve_s(0.7, w).s * w + 1.0) <= 1e-10);
  }
  SUBCASE("continuity along a horizontal line") {
    for (double az : {0.5, 0.99, 1.01, 2.0}) {
      Complex prev = solve_s(az, Complex(-5.0, 1e-3)).s;
      double jump = 0.0;
      for (int i = 1; i <= 4000; ++i) {
        const Complex s = solve_s(az, Complex(-5.0 + 10.0 * i / 4000, 1e-3)).s;
        jump = std::max(jump, std::abs(s - prev));
        CHECK(s.imag() > 0.0);
        prev = s;
      }
      CHECK(jump < 0.5);
    }
  }
  SUBCASE("cubic_roots are roots") {
    const auto r = cubic_roots(Complex(0.4, 1.1), Complex(0.3, 0.2));
    for (const auto& s : r) CHECK(cubic_residual(Complex(0.4, 1.1), Complex(0.3, 0.2), s) <= 1e-12);
  }
}

TEST_CASE("limiting density") {
  CHECK(limiting_density_g(0.0, 0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-8));
  CHECK(limiting_density_g(0.0, 3.0) <= 1e-4);
  for (double x : {0.1, 0.7, 1.3, 1.95}) {
    CHECK(limiting_density_g(0.0, x) == doctest::Approx(semicircle(x)).epsilon(1e-6));
  }
  for (Complex z : {Complex(0.5, 0.0), Complex(0.0, 0.9), Complex(1.3, 0.4), Complex(2.0, 0.0)}) {
    const auto law = support_endpoints(z);
    for (int k = 1; k < 20; ++k) {
      const double x = law.lambda_plus * k / 20.0;
      CHECK(limiting_density_g(z, x) == doctest::Approx(density_oracle(z, x)).epsilon(1e-6));
      CHECK(limiting_density_g(z, -x) == doctest::Approx(limiting_density_g(z, x)).epsilon(1e-10));
    }
    // square-root vanishing at the upper edge
    const double d = 1e-5;
    const double ratio = limiting_density_g(z, law.lambda_plus - d) / limiting_density_g(z, law.lambda_plus - 4 * d);
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.01));
  }
}

TEST_CASE("limiting CDF") {
  SUBCASE("semicircle value") {
    const double ref = 0.5 + (std::sqrt(3.0) / 2.0 + kPi / 3.0) / (2.0 * kPi);
    CHECK(ref == doctest::Approx(0.80450).epsilon(1e-5));
    CHECK(limiting_cdf_G(0.0, 1.0) == doctest::Approx(ref).epsilon(1e-8));
    CHECK(LimitingCdf(0.0)(1.0) == doctest::Approx(ref).epsilon(1e-8));
  }
  for (Complex z : {Complex(0.0, 0.0), Complex(0.5, 0.0), Complex(1.0, 0.0), Complex(2.0, 0.0), Complex(0.3, -1.7)}) {
    const LimitingCdf G(z);
    CHECK(G.half_mass() == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(G(0.0) == doctest::Approx(0.5));
    CHECK(G(G.law().lambda_plus + 1.0) == doctest::Approx(1.0));
    CHECK(G(-G.law().lambda_plus - 1.0) == doctest::Approx(0.0));
    const double x = 0.6 * G.law().lambda_plus;
    CHECK(G(x) + G(-x) == doctest::Approx(1.0).epsilon(1e-10));
    // batch evaluation agrees with pointwise
    std::vector<double> xs;
    for (int k = -10; k <= 10; ++k) xs.push_back(0.1 * k * G.law().lambda_plus);
    const auto batch = G.evaluate_sorted(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(batch[i] == doctest::Approx(G(xs[i])).epsilon(1e-8));
    for (double p : {0.05, 0.3, 0.5, 0.77, 0.99}) CHECK(G(G.quantile(p)) == doctest::Approx(p).epsilon(1e-8));
    // independent Simpson integral of the oracle density
    if (G.law().regime == Regime::outside) {
      const double lo = *G.law().lambda_minus;
      const double mass = simpson([&](double t) { return density_oracle(z, t); }, lo, x);
      CHECK(G(x) == doctest::Approx(0.5 + mass).epsilon(1e-4));
    } else if (std::abs(z) < 1.0) {
      const double mass = simpson([&](double t) { return density_oracle(z, t); }, 0.0, x);
      CHECK(G(x) == doctest::Approx(0.5 + mass).epsilon(1e-6));
    }
  }
}

TEST_CASE("log potential of the limit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Complex z = std::polar(2.5 * U(rng), 2.0 * kPi * U(rng));
    if (std::abs(std::abs(z) - 1.0) < 1e-3) z *= 1.01;
    CHECK(log_potential_limit(z) == doctest::Approx(log_potential_closed_form(z)).epsilon(1e-6));
  }
  CHECK(log_potential_closed_form(0.0) == 0.5);
  CHECK(log_potential_closed_form(0.5) == doctest::Approx(0.375));
  CHECK(log_potential_closed_form(2.0) == doctest::Approx(-std::log(2.0)));
  CHECK(std::abs(log_potential_limit(1.0)) <= 1e-6);
}

TEST_CASE("local law scales") {
  const double l = std::log(1024.0);
  CHECK(local_law_v0(1024, 4.0) == doctest::Approx(4.0 * l * l / 1024.0));
  CHECK(local_law_v0(1024, 4.0) == doctest::Approx(0.1877).epsilon(1e-3));
  const double v0 = 0.01;
  CHECK(std::pow(default_epsilon(v0), 1.5) == doctest::Approx(2.0 * v0 * (std::sqrt(2.0) + 1.0)));
}

TEST_CASE("domain grid") {
  SUBCASE("inside") {
    const auto g = build_domain_grid(0.0, 4096, GridParams{});
    const double v0 = 4.0 * std::pow(std::log(4096.0), 2) / 4096.0;
    CHECK(g.v0 == doctest::Approx(v0));
    const double hi = 2.0 - 0.5 * g.epsilon;
    REQUIRE(g.u_nodes.size() == 9);
    CHECK(g.u_nodes.front() == doctest::Approx(-hi));
    CHECK(g.u_nodes.back() == doctest::Approx(hi));
    for (const auto& node : g.nodes()) CHECK(g.contains(node.u, node.v));
    for (const auto& vs : g.v_nodes) {
      CHECK(std::is_sorted(vs.begin(), vs.end()));
      CHECK(vs.back() == doctest::Approx(2.0));
    }
    CHECK_FALSE(g.contains(0.0, 3.0));
    CHECK_FALSE(g.contains(2.1, 1.0));
    CHECK_FALSE(g.contains(0.0, 0.5 * v0));
  }
  SUBCASE("outside keeps both signs and avoids the gap") {
    const auto g = build_domain_grid(2.0, 4096, GridParams{});
    const auto law = support_endpoints(2.0);
    bool neg = false, pos = false;
    for (double u : g.u_nodes) {
      neg |= u < 0.0;
      pos |= u > 0.0;
      CHECK(std::abs(u) >= *law.lambda_minus + 0.5 * g.epsilon - 1e-12);
      CHECK(std::abs(u) <= law.lambda_plus - 0.5 * g.epsilon + 1e-12);
    }
    CHECK((neg && pos));
    for (const auto& node : g.nodes()) CHECK(g.contains(node.u, node.v));
  }
  SUBCASE("explicit nodes") {
    GridParams p;
    p.u_values = {0.0};
    p.v_count = 30;
    const auto g = build_domain_grid(0.5, 1024, p);
    CHECK(g.size() == 30);
    p.v_min = 1e-6;
    CHECK_THROWS_AS(build_domain_grid(0.5, 1024, p), std::invalid_argument);
  }
  SUBCASE("small n drops generated nodes with an empty v range") {
    GridParams p;
    p.epsilon = 0.3;
    const auto g = build_domain_grid(2.0, 48, p);
    CHECK(g.u_nodes.size() < 8);
    CHECK(g.u_nodes.size() == g.v_nodes.size());
    for (const auto& vs : g.v_nodes) CHECK_FALSE(vs.empty());
    p.u_values = {support_endpoints(2.0).lambda_plus - 0.16};
    CHECK_THROWS_AS(build_domain_grid(2.0, 48, p), std::invalid_argument);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_domain_grid(0.0, 1, GridParams{}), std::invalid_argument);
    GridParams p;
    p.epsilon = 5.0;
    CHECK_THROWS_AS(build_domain_grid(0.0, 1024, p), std::invalid_argument);
  }
}

TEST_CASE("descent schedule") {
  const auto s = descent_schedule(0.25, 2.0, 2.0);
  REQUIRE(s.size() == 4);
  CHECK(s.back() == 2.0);
  CHECK(descent_schedule(2.0, 2.0, 2.0).size() == 1);
  CHECK(descent_schedule(0.3, 2.0, 2.0).back() == doctest::Approx(2.4));
  CHECK_THROWS_AS(descent_schedule(0.0, 2.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(descent_schedule(0.1, 1.0, 2.0), std::invalid_argument);
}
