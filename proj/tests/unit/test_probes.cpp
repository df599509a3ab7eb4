#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "circlaw/probes.hpp"

using namespace circlaw;

namespace {

// (E|N(0,1)|^p)^{1/p} for even p: ((p-1)!!)^{1/p}
double gaussian_norm(int p) {
  double df = 1.0;
  for (int k = p - 1; k > 1; k -= 2) df *= k;
  return std::pow(df, 1.0 / p);
}

}  // namespace

TEST_CASE("envelopes") {
  CHECK(linear_envelope({3.0, 4.0}, 1.0, 4.0) == doctest::Approx(2.0 * 5.0 + 4.0 * 4.0));
  CHECK(linear_envelope({1.0}, 16.0, 4.0) == doctest::Approx(2.0 + 4.0 * 2.0));
  Eigen::MatrixXd A(2, 2);
  A << 100.0, 1.0, 2.0, -50.0;
  // the diagonal is ignored
  CHECK(quadratic_envelope(A, 1.0, 2.0) == doctest::Approx(2.0 * std::sqrt(5.0) + 4.0 * 2.0));
  CHECK(quadratic_second_moment(A) == doctest::Approx(9.0));
  const Eigen::MatrixXd S = Eigen::MatrixXd::Constant(5, 5, 0.2);
  CHECK(quadratic_second_moment(S) == doctest::Approx(2.0 * 4.0 / 5.0));
}

TEST_CASE("single coordinate") {
  ProbeSpec s;
  s.law = EntryLaw::rademacher();
  s.n = 4;
  s.a = {1.0, 0.0, 0.0, 0.0};
  s.trials = 500;
  s.p_list = {2.0, 4.0, 8.0};
  for (const auto& row : moment_inequality_probe(s)) {
    CHECK(row.moment == doctest::Approx(1.0));
    CHECK(row.envelope == doctest::Approx(std::sqrt(row.p) + row.p));
    CHECK(row.ratio == doctest::Approx(1.0 / (std::sqrt(row.p) + row.p)));
    CHECK(row.warnings.empty());
    CHECK_FALSE(row.exact_second.has_value());
  }
}

TEST_CASE("Rademacher linear forms look Gaussian") {
  ProbeSpec s;
  s.law = EntryLaw::rademacher();
  s.n = 10000;
  s.trials = 40000;
  s.seed = 12;
  const auto rows = moment_inequality_probe(s);
  REQUIRE(rows.size() == 3);
  double lo = 1e300, hi = 0.0;
  for (const auto& row : rows) {
    CHECK(row.moment == doctest::Approx(gaussian_norm(static_cast<int>(row.p))).epsilon(0.06));
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  CHECK(hi / lo <= 3.0);
  // same seed, same numbers
  CHECK(moment_inequality_probe(s)[2].moment == rows[2].moment);
}

TEST_CASE("generic law path agrees with the popcount path in distribution") {
  ProbeSpec s;
  s.law = EntryLaw::rademacher();
  s.n = 500;
  s.trials = 20000;
  s.p_list = {2.0, 4.0};
  s.a.assign(500, 1.0 / std::sqrt(500.0));
  s.a[0] *= 1.0 + 1e-12;  // defeats the equal-weight shortcut
  const auto slow = moment_inequality_probe(s);
  s.a.clear();
  const auto fast = moment_inequality_probe(s);
  for (int i = 0; i < 2; ++i) CHECK(slow[i].moment == doctest::Approx(fast[i].moment).epsilon(0.03));
}

TEST_CASE("quadratic form second moment") {
  for (auto law : {EntryLaw::gaussian(), EntryLaw::rademacher(), EntryLaw::uniform()}) {
    ProbeSpec s;
    s.kind = ProbeKind::quadratic_form;
    s.law = law;
    s.n = 200;
    s.trials = 20000;
    s.p_list = {2.0};
    s.seed = 4;
    const auto rows = moment_inequality_probe(s);
    REQUIRE(rows[0].exact_second.has_value());
    CHECK(*rows[0].exact_second == doctest::Approx(std::sqrt(2.0 * 199.0 / 200.0)));
    CHECK(rows[0].moment == doctest::Approx(*rows[0].exact_second).epsilon(0.05));
  }
  SUBCASE("explicit matrix") {
    ProbeSpec s;
    s.kind = ProbeKind::quadratic_form;
    s.law = EntryLaw::gaussian();
    s.n = 3;
    s.trials = 40000;
    s.p_list = {2.0};
    s.A = Eigen::MatrixXd::Zero(3, 3);
    s.A(0, 1) = 1.0;
    s.A(1, 0) = 2.0;
    s.A(2, 2) = 7.0;
    const auto rows = moment_inequality_probe(s);
    CHECK(*rows[0].exact_second == doctest::Approx(3.0));
    CHECK(rows[0].moment == doctest::Approx(3.0).epsilon(0.05));
  }
}

TEST_CASE("probe warnings and errors") {
  ProbeSpec s;
  s.law = EntryLaw::gaussian();
  s.n = 10;
  s.trials = 100;
  s.p_list = {8.0, 16.0};
  const auto rows = moment_inequality_probe(s);
  CHECK(rows[0].warnings.empty());
  CHECK_FALSE(rows[1].warnings.empty());
  s.p_list = {1.5};
  CHECK_THROWS_AS(moment_inequality_probe(s), std::invalid_argument);
  s.p_list = {2.0};
  s.n = 1;
  CHECK_THROWS_AS(moment_inequality_probe(s), std::invalid_argument);
  s.n = 10;
  s.a = {1.0};
  CHECK_THROWS_AS(moment_inequality_probe(s), std::invalid_argument);
  CHECK(parse_probe_kind(to_string(ProbeKind::quadratic_form)) == ProbeKind::quadratic_form);
  CHECK_THROWS_AS(parse_probe_kind("cubic"), std::invalid_argument);
}
