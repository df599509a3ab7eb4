#include "circlaw/ensembles.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "circlaw/quadrature.hpp"

namespace circlaw {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

double gaussian_truncated_second_moment(double t) {
  if (t <= 0.0) return 0.0;
  const double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  return std::erf(t / std::numbers::sqrt2) - 2.0 * t * phi;
}

double gaussian_abs_moment(double q) {
  return std::pow(2.0, q / 2.0) * std::tgamma((q + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

double t_scale(double nu) { return std::sqrt((nu - 2.0) / nu); }

}  // namespace

EntryLaw EntryLaw::heavy_tail(double tail_exponent) {
  EntryLaw l{LawKind::heavy_tail, tail_exponent, 1.0};
  l.validate();
  return l;
}

EntryLaw EntryLaw::heavy_tail_with_delta(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("heavy_tail: delta must be positive");
  return heavy_tail(4.0 + 2.0 * delta);
}

EntryLaw EntryLaw::sparse_bernoulli(double p) {
  EntryLaw l{LawKind::sparse_bernoulli, 0.0, p};
  l.validate();
  return l;
}

void EntryLaw::validate() const {
  if (kind == LawKind::heavy_tail && !(tail_exponent > 4.0)) {
    throw std::invalid_argument("heavy_tail: tail_exponent must exceed 4");
  }
  if (kind == LawKind::sparse_bernoulli && !(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("sparse_bernoulli: p must lie in (0, 1]");
  }
}

std::string to_string(LawKind k) {
  switch (k) {
    case LawKind::gaussian: return "gaussian";
    case LawKind::rademacher: return "rademacher";
    case LawKind::uniform: return "uniform";
    case LawKind::heavy_tail: return "heavy_tail";
    case LawKind::sparse_bernoulli: return "sparse_bernoulli";
  }
  return "unknown";
}

LawKind parse_law_kind(const std::string& s) {
  for (auto k : {LawKind::gaussian, LawKind::rademacher, LawKind::uniform, LawKind::heavy_tail,
                 LawKind::sparse_bernoulli}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown entry law '" + s + "'");
}

std::string EntryLaw::name() const {
  switch (kind) {
    case LawKind::heavy_tail: return "heavy_tail(nu=" + std::to_string(tail_exponent) + ")";
    case LawKind::sparse_bernoulli: return "sparse_bernoulli(p=" + std::to_string(p) + ")";
    default: return to_string(kind);
  }
}

double EntryLaw::abs_moment(double q) const {
  switch (kind) {
    case LawKind::gaussian: return gaussian_abs_moment(q);
    case LawKind::rademacher: return 1.0;
    case LawKind::uniform: return std::pow(3.0, q / 2.0) / (q + 1.0);
    case LawKind::heavy_tail: {
      const double nu = tail_exponent;
      if (q >= nu) return std::numeric_limits<double>::infinity();
      const double raw = std::pow(nu, q / 2.0) * std::tgamma((q + 1.0) / 2.0) *
                         std::tgamma((nu - q) / 2.0) /
                         (std::sqrt(std::numbers::pi) * std::tgamma(nu / 2.0));
      return std::pow(t_scale(nu), q) * raw;
    }
    case LawKind::sparse_bernoulli: return std::pow(p, 1.0 - q / 2.0) * gaussian_abs_moment(q);
  }
  return 0.0;
}

double EntryLaw::truncated_second_moment(double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind) {
    case LawKind::gaussian: return gaussian_truncated_second_moment(t);
    case LawKind::rademacher: return t >= 1.0 ? 1.0 : 0.0;
    case LawKind::uniform: return t >= kSqrt3 ? 1.0 : t * t * t / (3.0 * kSqrt3);
    case LawKind::sparse_bernoulli: return gaussian_truncated_second_moment(t * std::sqrt(p));
    case LawKind::heavy_tail: {
      const double c = t_scale(tail_exponent);
      const boost::math::students_t_distribution<double> dist(tail_exponent);
      const double a = t / c;
      // mass beyond a is small for the thresholds we meet, so integrate the tail
      auto tail = [&](double x) { return x * x * boost::math::pdf(dist, x); };
      const double outside = quad::gauss_kronrod(tail, a, std::numeric_limits<double>::infinity(),
                                                 1e-13, 15, 1e-6)
                                 .value;
      return std::max(0.0, 1.0 - 2.0 * c * c * outside);
    }
  }
  return 0.0;
}

double EntryLaw::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case LawKind::gaussian: return std::normal_distribution<double>()(rng);
    case LawKind::rademacher: return (rng() & 1u) ? 1.0 : -1.0;
    case LawKind::uniform: return std::uniform_real_distribution<double>(-kSqrt3, kSqrt3)(rng);
    case LawKind::heavy_tail:
      return t_scale(tail_exponent) * std::student_t_distribution<double>(tail_exponent)(rng);
    case LawKind::sparse_bernoulli: {
      const double g = std::normal_distribution<double>()(rng);
      const bool keep = std::uniform_real_distribution<double>()(rng) < p;
      return keep ? g / std::sqrt(p) : 0.0;
    }
  }
  return 0.0;
}

double TruncationPolicy::threshold(int n) const {
  return D * std::pow(static_cast<double>(n), 0.5 - phi);
}

void EnsembleSpec::validate() const {
  if (n < 2) throw std::invalid_argument("ensemble: n must be at least 2");
  if (m < 1) throw std::invalid_argument("ensemble: m must be at least 1");
  law.validate();
  if (truncation.enabled) {
    if (!(truncation.D > 0.0)) throw std::invalid_argument("truncation: D must be positive");
    if (!(truncation.phi > 0.0 && truncation.phi < 0.5)) {
      throw std::invalid_argument("truncation: phi must lie in (0, 1/2)");
    }
  }
}

TruncatedLaw truncated_law(const EntryLaw& law, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("truncation threshold must be positive");
  auto ratio = [&](double t) {
    const double v = law.truncated_second_moment(t);
    return v > 0.0 ? t / std::sqrt(v) : std::numeric_limits<double>::infinity();
  };
  // t / sigma(t) >= t, so the root sits at or below T.
  if (ratio(T) <= T) return {T, std::sqrt(law.truncated_second_moment(T))};
  double hi = T;
  double lo = T;
  while (true) {
    lo *= 0.9;
    if (lo < 1e-6 * T) {
      throw std::invalid_argument("truncation threshold " + std::to_string(T) +
                                  " is unattainable for law " + law.name());
    }
    if (ratio(lo) <= T) break;
    hi = lo;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) <= T ? lo : hi) = mid;
  }
  return {lo, std::sqrt(law.truncated_second_moment(lo))};
}

std::mt19937_64 factor_rng(std::uint64_t base_seed, int q, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd sample_factor(const EnsembleSpec& spec, int q, std::uint64_t trial) {
  spec.validate();
  if (q < 1 || q > spec.m) {
    throw std::invalid_argument("sample_factor: q must lie in 1.." + std::to_string(spec.m));
  }
  auto rng = factor_rng(spec.base_seed, q, trial);
  const int n = spec.n;
  Eigen::MatrixXd x(n, n);
  if (spec.law.kind == LawKind::rademacher) {
    std::uint64_t bits = 0;
    int left = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (left == 0) {
        bits = rng();
        left = 64;
      }
      x.data()[i] = (bits & 1u) ? 1.0 : -1.0;
      bits >>= 1;
      --left;
    }
  } else {
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = spec.law.sample(rng);
  }
  if (spec.truncation.enabled) {
    const auto tl = truncated_law(spec.law, spec.truncation.threshold(n));
    x = x.unaryExpr([&](double v) { return std::abs(v) <= tl.cutoff ? v / tl.scale : 0.0; });
  }
  return x;
}

std::vector<std::string> spec_warnings(const EnsembleSpec& spec) {
  std::vector<std::string> out;
  if (spec.law.kind == LawKind::sparse_bernoulli) {
    const double floor = std::log(static_cast<double>(spec.n)) / spec.n;
    if (spec.law.p < floor) {
      out.push_back("sparse_bernoulli: p=" + std::to_string(spec.law.p) +
                    " is below log(n)/n=" + std::to_string(floor));
    }
  }
  return out;
}

MomentAudit moment_audit(std::span<const double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("moment_audit: empty input");
  if (!(p >= 2.0)) throw std::invalid_argument("moment_audit: p must be at least 2");
  const double k = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= k;
  double var = 0.0, mom = 0.0;
  for (double x : samples) {
    var += (x - mean) * (x - mean);
    mom += std::pow(std::abs(x), p);
  }
  return {mean, var / k, mom / k};
}

double derive_phi(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("derive_phi: delta must be positive");
  return delta / (2.0 * (4.0 + delta));
}

}  // namespace circlaw
