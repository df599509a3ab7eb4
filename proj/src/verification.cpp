#include "circlaw/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "circlaw/quadrature.hpp"

namespace circlaw {

namespace {

constexpr double kPi = std::numbers::pi;

// Angle of the circle |zeta - c| = rho (|c| = d) that lies inside the unit disk.
double arc_inside_unit_disk(double d, double rho) {
  if (rho == 0.0) return d <= 1.0 ? 2.0 * kPi : 0.0;
  if (rho <= 1.0 - d) return 2.0 * kPi;
  if (rho >= 1.0 + d || rho <= d - 1.0) return 0.0;
  const double c = std::clamp((d * d + rho * rho - 1.0) / (2.0 * d * rho), -1.0, 1.0);
  return 2.0 * std::acos(c);
}

double polar_about(Complex c, double radius, const std::function<double(Complex, double)>& f) {
  return quad::polar(
             [&](double rho, double th) { return f(c + std::polar(rho, th), rho); }, radius, 1e-10)
      .value;
}

// -(1/2pi) int Delta f(z) U(z) dA with U(z) = -log|z - w0|. Delta f is radial
// about the centre and the circle mean of log|z - w0| is log max(rho, d).
double point_mass_rhs(const PlacedProfile& f, Complex w0) {
  const double d = std::abs(w0 - f.center);
  auto g = [&](double rho) { return f.laplacian(f.center + rho) * rho * std::log(std::max(rho, d)); };
  if (d >= f.radius) return 0.0;
  double val = quad::gauss_kronrod(g, d, f.radius, 1e-12).value;
  if (d > 0.0) val += quad::gauss_kronrod(g, 0.0, d, 1e-12).value;
  return val;
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("empirical distribution: no atoms");
  std::sort(atoms_.begin(), atoms_.end());
}

EmpiricalDistribution EmpiricalDistribution::symmetrized(const SingularSpectrum& sp) {
  std::vector<double> a;
  a.reserve(2 * sp.size());
  for (Eigen::Index j = 0; j < sp.size(); ++j) {
    a.push_back(sp.values[j]);
    a.push_back(-sp.values[j]);
  }
  return EmpiricalDistribution(std::move(a));
}

double EmpiricalDistribution::cdf(double x) const {
  return static_cast<double>(std::upper_bound(atoms_.begin(), atoms_.end(), x) - atoms_.begin()) /
         static_cast<double>(atoms_.size());
}

double EmpiricalDistribution::cdf_left(double x) const {
  return static_cast<double>(std::lower_bound(atoms_.begin(), atoms_.end(), x) - atoms_.begin()) /
         static_cast<double>(atoms_.size());
}

Complex EmpiricalDistribution::stieltjes(Complex w) const {
  Complex acc = 0.0;
  for (double a : atoms_) acc += 1.0 / (a - w);
  return acc / static_cast<double>(atoms_.size());
}

LambdaRecord lambda_at(const SingularSpectrum& sp, Complex w) {
  LambdaRecord rec;
  rec.u = w.real();
  rec.v = w.imag();
  rec.w = w;
  rec.m_n = empirical_stieltjes(sp, w);
  rec.s = solve_s(sp.z, w).s;
  rec.lambda_abs = std::abs(rec.m_n - rec.s);
  const double l = std::log(static_cast<double>(sp.n));
  rec.normalized = sp.n * rec.v * rec.lambda_abs / (l * l);
  if (sp.has_weights()) {
    for (const Complex& t : partial_traces(sp, w)) {
      rec.block_lambdas.push_back(t - rec.s);
      rec.block_max = std::max(rec.block_max, std::abs(t - rec.s));
    }
  }
  return rec;
}

std::vector<LambdaRecord> lambda_sweep(const SingularSpectrum& sp, const LocalLawGrid& grid,
                                       const SweepOptions& opts) {
  if (sp.z != grid.z) throw std::invalid_argument("lambda_sweep: spectrum and grid differ in z");
  std::vector<LambdaRecord> out;
  out.reserve(grid.size());
  for (const auto& node : grid.nodes()) {
    LambdaRecord rec = lambda_at(sp, {node.u, node.v});
    rec.indicator = true;
    for (double vk : descent_schedule(node.v, grid.s_factor, grid.V)) {
      const LambdaRecord step = vk == node.v ? rec : lambda_at(sp, {node.u, vk});
      const double size = step.block_lambdas.empty() ? step.lambda_abs : step.block_max;
      if (!(size <= opts.tau * step.s.imag())) {
        rec.indicator = false;
        break;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

SelfConsistency selfconsistency_from_traces(const std::vector<Complex>& traces, int m, Complex z,
                                            Complex w) {
  if (static_cast<int>(traces.size()) != 2 * m) {
    throw std::invalid_argument("selfconsistency: expected 2m partial traces");
  }
  SelfConsistency sc;
  const double z2 = std::norm(z);
  for (int a = 1; a <= m; ++a) {
    const int next = a % m + 1;             // [a+1]
    const int prev = (a + m - 2) % m + 1;   // [a-1]
    const Complex denom = w + traces[prev - 1];
    if (std::abs(denom) < 1e-12) {
      sc.degenerate = true;
      sc.T.push_back(Complex(std::numeric_limits<double>::quiet_NaN(), 0.0));
      continue;
    }
    sc.T.push_back(1.0 + traces[a - 1] * (w + traces[next + m - 1] - z2 / denom));
  }
  return sc;
}

SelfConsistency selfconsistency_residual(const SingularSpectrum& sp, Complex z, Complex w) {
  return selfconsistency_from_traces(partial_traces(sp, w), sp.m, z, w);
}

double kolmogorov_distance(const EmpiricalDistribution& F, const LimitingCdf& G) {
  std::vector<double> xs = F.atoms();
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const std::vector<double> g = G.evaluate_sorted(xs);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max({d, std::abs(g[i] - F.cdf(xs[i])), std::abs(g[i] - F.cdf_left(xs[i]))});
  }
  return d;
}

double kolmogorov_distance(const SingularSpectrum& sp, const LimitingCdf& G) {
  return kolmogorov_distance(EmpiricalDistribution::symmetrized(sp), G);
}

SingularSpectrum quantile_spectrum(const LimitingCdf& G, int n, int m) {
  const int N = n * m;
  std::vector<double> v(N);
  for (int k = 1; k <= N; ++k) v[k - 1] = G.quantile(0.5 + (k - 0.5) / (2.0 * N));
  return SingularSpectrum::from_values(std::move(v), n, m, G.law().z);
}

InverseCdfTable::InverseCdfTable(const LimitingCdf& G, int nodes) {
  if (nodes < 2) throw std::invalid_argument("InverseCdfTable: need at least two nodes");
  const auto [lo, hi] = G.law().positive_band();
  for (int i = 0; i < nodes; ++i) {
    const double t = static_cast<double>(i) / (nodes - 1);
    x_.push_back(lo + (hi - lo) * 0.5 * (1.0 - std::cos(kPi * t)));
  }
  p_ = G.evaluate_sorted(x_);
}

double InverseCdfTable::operator()(double p) const {
  if (p < 0.5) return -(*this)(1.0 - p);
  if (p <= p_.front()) return x_.front();
  if (p >= p_.back()) return x_.back();
  const auto it = std::upper_bound(p_.begin(), p_.end(), p);
  const std::size_t i = static_cast<std::size_t>(it - p_.begin());
  const double t = (p - p_[i - 1]) / (p_[i] - p_[i - 1]);
  return x_[i - 1] + t * (x_[i] - x_[i - 1]);
}

DistanceReport smoothing_bound(const EmpiricalDistribution& F, const LimitingCdf& G, double v,
                               double epsilon, double V, const SmoothingOptions& opts) {
  if (!(v > 0.0) || !(epsilon > 0.0) || !(V > v)) {
    throw std::invalid_argument("smoothing_bound: need 0 < v < V and epsilon > 0");
  }
  if (2.0 * v * kSmoothingA > std::pow(epsilon, 1.5)) {
    throw std::invalid_argument("smoothing_bound: precondition 2 v a <= eps^{3/2} violated");
  }
  const auto& law = G.law();
  const auto [blo, bhi] = law.positive_band();
  const double lo = law.regime == Regime::inside ? 0.0 : blo + 0.5 * epsilon;
  const double hi = bhi - 0.5 * epsilon;
  if (hi < lo) throw std::invalid_argument("smoothing_bound: epsilon exceeds half the band width");

  const Complex z = law.z;
  auto diff = [&](Complex w) { return std::abs(F.stieltjes(w) - solve_s(z, w).s); };

  DistanceReport rep;
  rep.C1 = opts.C1;
  rep.C2 = opts.C2;
  rep.v = v;
  rep.epsilon = epsilon;
  rep.V = V;
  rep.delta_star = kolmogorov_distance(F, G);
  const double inf = std::numeric_limits<double>::infinity();
  rep.horizontal_term =
      2.0 * quad::gauss_kronrod([&](double u) { return diff({u, V}); }, -inf, inf, 1e-9, 15, 1e-4)
                .value;

  // x grid over J'_eps, both signs
  std::vector<double> xs;
  const int k = std::max(2, opts.sup_points);
  for (int i = 0; i < k; ++i) {
    const double x = lo + (hi - lo) * i / (k - 1);
    xs.push_back(x);
    if (x > 0.0) xs.push_back(-x);
  }
  double sup = 0.0;
  for (double x : xs) {
    const double vp = v / std::sqrt(gamma_edge(law, x));
    if (vp >= V) continue;
    auto f = [&](double t) {
      const double y = std::exp(t);
      return diff({x, y}) * y;
    };
    sup = std::max(sup, quad::gauss_kronrod(f, std::log(vp), std::log(V), 1e-9, 15, 1e-4).value);
  }
  rep.vertical_term = 2.0 * sup;
  rep.c1_term = opts.C1 * v;
  rep.c2_term = opts.C2 * std::pow(epsilon, 1.5);
  return rep;
}

double integrate_against_limit(const PlacedProfile& f, int m) {
  const double d = std::abs(f.center);
  if (m == 1) {
    auto g = [&](double rho) {
      return f.amplitude * f.profile.value(rho / f.radius) * arc_inside_unit_disk(d, rho) * rho;
    };
    // split at the kinks of the arc length
    std::vector<double> br{0.0};
    for (double b : {1.0 - d, 1.0 + d, d - 1.0}) {
      if (b > 0.0 && b < f.radius) br.push_back(b);
    }
    br.push_back(f.radius);
    std::sort(br.begin(), br.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      acc += quad::gauss_kronrod(g, br[i], br[i + 1], 1e-12).value;
    }
    return acc / kPi;
  }
  return polar_about(f.center, f.radius, [&](Complex z, double) {
    const double p = density_p(m, z);
    return std::isfinite(p) ? f.value(z) * p : 0.0;
  });
}

LinearStatistic smoothed_statistic(const ComplexSpectrum& eigs, const SmoothedTestFunction& tf,
                                   int m, const LinearStatisticOptions& opts) {
  const PlacedProfile f = tf.placed();
  LinearStatistic out;
  out.near_edge = std::abs(std::abs(tf.z0) - 1.0) < opts.tau;
  if (eigs.eigenvalues.empty()) throw std::invalid_argument("smoothed_statistic: no eigenvalues");
  double acc = 0.0;
  for (const Complex& l : eigs.eigenvalues) acc += f.value(l);
  out.empirical = acc / static_cast<double>(eigs.eigenvalues.size());
  out.limit = tf.profile.kind == ProfileKind::zero ? 0.0 : integrate_against_limit(f, m);
  out.lhs = std::abs(out.empirical - out.limit);
  const double n = tf.n;
  out.bound = opts.constant * tf.profile.laplacian_l1() * std::pow(std::log(n), opts.log_power) /
              std::pow(n, 1.0 - 2.0 * tf.a);
  out.ratio = out.bound > 0.0 ? out.lhs / out.bound : 0.0;
  return out;
}

double log_potential_empirical(const SingularSpectrum& sp) {
  if (sp.size() == 0) throw std::invalid_argument("log_potential_empirical: empty spectrum");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < sp.size(); ++j) {
    if (!(sp.values[j] > 0.0)) {
      throw NumericalError("log_potential_empirical: zero singular value");
    }
    acc += std::log(sp.values[j]);
  }
  return -acc / static_cast<double>(sp.size());
}

GreenCheck green_identity_check(const PlacedProfile& f, const GreenMeasure& nu) {
  GreenCheck g;
  switch (nu.kind) {
    case MeasureKind::disk_law:
      g.lhs = integrate_against_limit(f, 1);
      g.rhs = -polar_about(f.center, f.radius, [&](Complex z, double) {
                return f.laplacian(z) * log_potential_closed_form(z);
              }) /
              (2.0 * kPi);
      break;
    case MeasureKind::point_mass:
      g.lhs = f.value(nu.point);
      g.rhs = point_mass_rhs(f, nu.point);
      break;
    case MeasureKind::empirical: {
      if (nu.atoms.empty()) throw std::invalid_argument("green_identity_check: no atoms");
      // atoms away from the support see a harmonic kernel and contribute zero to both sides
      for (const Complex& a : nu.atoms) {
        if (std::abs(a - f.center) >= f.radius) continue;
        g.lhs += f.value(a);
        g.rhs += point_mass_rhs(f, a);
      }
      g.lhs /= static_cast<double>(nu.atoms.size());
      g.rhs /= static_cast<double>(nu.atoms.size());
      break;
    }
  }
  g.abs_err = std::abs(g.lhs - g.rhs);
  return g;
}

Regression scaling_regression(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("scaling_regression: need at least 3 points");
  std::vector<double> lx, ly;
  for (auto [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("scaling_regression: non-positive value");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("scaling_regression: x values are all equal");
  Regression r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  const double ssres = syy - r.slope * sxy;
  r.r2 = syy > 0.0 ? 1.0 - std::max(0.0, ssres) / syy : 1.0;
  return r;
}

namespace {

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: bad input");
  const auto rx = ranks(x), ry = ranks(y);
  const double k = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / k;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / k;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace circlaw
