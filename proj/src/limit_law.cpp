#include "circlaw/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "circlaw/quadrature.hpp"

namespace circlaw {

namespace {

constexpr double kPi = std::numbers::pi;

Complex poly(Complex z2, Complex w, Complex s) {
  return ((s + 2.0 * w) * s + (w * w - z2 + 1.0)) * s + w;
}

Complex dpoly(Complex z2, Complex w, Complex s) {
  return (3.0 * s + 4.0 * w) * s + (w * w - z2 + 1.0);
}

void require_upper(Complex w) {
  if (!(w.imag() > 0.0)) throw std::invalid_argument("solve_s: Im w must be positive");
}

// Index of the single root with Im > 0 when the sign pattern is unambiguous.
int clean_upper_root(const std::array<Complex, 3>& r) {
  int idx = -1;
  for (int k = 0; k < 3; ++k) {
    const double margin = 1e-13 * (1.0 + std::abs(r[k]));
    if (std::abs(r[k].imag()) <= margin) return -1;
    if (r[k].imag() > 0.0) {
      if (idx >= 0) return -1;
      idx = k;
    }
  }
  return idx;
}

int closest(const std::array<Complex, 3>& r, Complex target) {
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(r[k] - target) < std::abs(r[best] - target)) best = k;
  }
  return best;
}

}  // namespace

std::pair<double, double> LimitLawAtZ::positive_band() const {
  return {regime == Regime::inside ? 0.0 : *lambda_minus, lambda_plus};
}

bool LimitLawAtZ::in_support(double x) const {
  const auto [lo, hi] = positive_band();
  const double a = std::abs(x);
  return a >= lo && a <= hi;
}

LimitLawAtZ support_endpoints(Complex z, bool allow_edge) {
  const double az = std::abs(z);
  if (az == 1.0 && !allow_edge) throw std::invalid_argument("support_endpoints: |z| = 1 is excluded");
  LimitLawAtZ law;
  law.z = z;
  law.alpha = std::sqrt(1.0 + 8.0 * az * az);
  const double a = law.alpha;
  law.lambda_plus = std::sqrt(std::pow(a + 3.0, 3) / (8.0 * (a + 1.0)));
  law.tau_margin = std::abs(az - 1.0);
  if (az > 1.0) {
    law.regime = Regime::outside;
    law.lambda_minus = std::sqrt(std::pow(a - 3.0, 3) / (8.0 * (a - 1.0)));
  }
  return law;
}

double gamma_edge(const LimitLawAtZ& law, double u) {
  const double a = std::abs(u);
  const double top = std::abs(a - law.lambda_plus);
  if (law.regime == Regime::inside) return top;
  return std::min(top, std::abs(a - *law.lambda_minus));
}

double gamma_edge(Complex z, double u) { return gamma_edge(support_endpoints(z), u); }

double density_p(int m, Complex z) {
  if (m < 1) throw std::invalid_argument("density_p: m must be at least 1");
  const double r = std::abs(z);
  if (r > 1.0) return 0.0;
  if (m == 1) return 1.0 / kPi;
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(r, 2.0 / m - 2.0) / (kPi * m);
}

double radial_cdf(int m, double rad) {
  if (m < 1) throw std::invalid_argument("radial_cdf: m must be at least 1");
  if (rad < 0.0 || rad > 1.0) throw std::invalid_argument("radial_cdf: radius outside [0, 1]");
  return std::pow(rad, 2.0 / m);
}

std::array<Complex, 3> cubic_roots(Complex z, Complex w) {
  const Complex z2 = std::norm(z);
  const Complex a = 2.0 * w;
  const Complex b = w * w - z2 + 1.0;
  const Complex c = w;
  // s = t - a/3 gives t^3 + p t + q = 0
  const Complex p = b - a * a / 3.0;
  const Complex q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const Complex disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  Complex u3 = -q / 2.0 + disc;
  const Complex alt = -q / 2.0 - disc;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;
  const Complex omega(-0.5, std::sqrt(3.0) / 2.0);
  std::array<Complex, 3> r;
  Complex u = std::pow(u3, 1.0 / 3.0);
  for (int k = 0; k < 3; ++k) {
    const Complex t = (std::abs(u) == 0.0) ? Complex(0.0) : u - p / (3.0 * u);
    r[k] = t - a / 3.0;
    u *= omega;
  }
  for (auto& s : r) {
    for (int it = 0; it < 4; ++it) {
      const Complex d = dpoly(z2, w, s);
      if (std::abs(d) == 0.0) break;
      const Complex step = poly(z2, w, s) / d;
      s -= step;
      if (std::abs(step) <= 1e-17 * (1.0 + std::abs(s))) break;
    }
  }
  return r;
}

double cubic_residual(Complex z, Complex w, Complex s) {
  const Complex ws = w + s;
  return std::abs(s * (ws * ws - std::norm(z)) + ws);
}

StieltjesEvaluation solve_s(Complex z, Complex w) {
  require_upper(w);
  auto roots = cubic_roots(z, w);
  int k = clean_upper_root(roots);
  Complex s;
  if (k >= 0) {
    s = roots[k];
  } else {
    // continuation from a point where the choice is clear
    double lift = 1.0;
    std::array<Complex, 3> start;
    int ks = -1;
    for (int tries = 0; tries < 8 && ks < 0; ++tries, lift *= 4.0) {
      start = cubic_roots(z, w + Complex(0.0, lift));
      ks = clean_upper_root(start);
    }
    if (ks < 0) {
      ks = closest(start, -1.0 / (w + Complex(0.0, lift)));
      lift /= 4.0;
    } else {
      lift /= 4.0;
    }
    s = start[ks];
    const double ratio = 0.85;
    for (double d = lift * ratio; d > 1e-15 * (1.0 + w.imag()); d *= ratio) {
      const auto step = cubic_roots(z, w + Complex(0.0, d));
      s = step[closest(step, s)];
    }
    s = roots[closest(roots, s)];
  }
  if (!(s.imag() > 0.0)) {
    throw NumericalError("solve_s: selected root has non-positive imaginary part at w=(" +
                         std::to_string(w.real()) + "," + std::to_string(w.imag()) + ")");
  }
  return {w, s, cubic_residual(z, w, s)};
}

double limiting_density_g(Complex z, double x, double eta) {
  return solve_s(z, {x, eta}).s.imag() / kPi;
}

namespace {
constexpr int kCdfCells = 256;
}

LimitingCdf::LimitingCdf(Complex z, double eta) : law_(support_endpoints(z, true)), eta_(eta) {
  const auto [lo, hi] = law_.positive_band();
  nodes_.resize(kCdfCells + 1);
  for (int i = 0; i <= kCdfCells; ++i) {
    nodes_[i] = lo + (hi - lo) * 0.5 * (1.0 - std::cos(kPi * i / kCdfCells));
  }
  nodes_.front() = lo;
  nodes_.back() = hi;
  cum_.assign(nodes_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    cum_[i + 1] = cum_[i] + cell_integral(i, nodes_[i], nodes_[i + 1]);
  }
}

double LimitingCdf::density(double x) const {
  if (!law_.in_support(x)) return 0.0;
  return limiting_density_g(law_.z, x, eta_);
}

double LimitingCdf::cell_integral(std::size_t cell, double a, double b) const {
  if (b <= a) return 0.0;
  auto f = [this](double x) { return density(x); };
  // edge singularities only sit in the first and last cells
  if (cell == 0 || cell + 2 == nodes_.size()) return quad::tanh_sinh(f, a, b, 1e-11, 1e-7).value;
  return quad::gauss_kronrod(f, a, b, 1e-11, 8, 1e-7).value;
}

double LimitingCdf::mass_below(double x) const {
  if (x <= nodes_.front()) return 0.0;
  if (x >= nodes_.back()) return cum_.back();
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), x) - nodes_.begin()) - 1;
  if (x == nodes_[i]) return cum_[i];
  if (i + 2 == nodes_.size()) return cum_.back() - cell_integral(i, x, nodes_.back());
  return cum_[i] + cell_integral(i, nodes_[i], x);
}

double LimitingCdf::operator()(double x) const {
  const double half = mass_below(std::abs(x));
  return std::clamp(x >= 0.0 ? 0.5 + half : 0.5 - half, 0.0, 1.0);
}

std::vector<double> LimitingCdf::evaluate_sorted(const std::vector<double>& xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((*this)(x));
  return out;
}

double LimitingCdf::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0, 1]");
  if (p < 0.5) return -quantile(1.0 - p);
  const double target = p - 0.5;
  if (target <= 0.0) return nodes_.front();
  if (target >= cum_.back()) return nodes_.back();
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), target) - cum_.begin()) - 1;
  // safeguarded Newton inside the bracketing cell
  double a = nodes_[i], b = nodes_[i + 1];
  double x = a + (b - a) * (target - cum_[i]) / (cum_[i + 1] - cum_[i]);
  for (int it = 0; it < 60; ++it) {
    const double f = mass_below(x) - target;
    if (f > 0.0) b = x; else a = x;
    if (std::abs(f) < 1e-15 || b - a < 1e-14 * nodes_.back()) break;
    const double g = density(x);
    double nx = g > 0.0 ? x - f / g : 0.5 * (a + b);
    if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
    x = nx;
  }
  return x;
}

double limiting_cdf_G(Complex z, double x) { return LimitingCdf(z)(x); }

double log_potential_limit(Complex z) {
  const LimitingCdf cdf(z);
  const auto [lo, hi] = cdf.law().positive_band();
  auto f = [&](double x) { return x > 0.0 ? std::log(x) * cdf.density(x) : 0.0; };
  return -2.0 * quad::tanh_sinh(f, lo, hi, 1e-11).value;
}

double log_potential_closed_form(Complex z) {
  const double r = std::abs(z);
  return r <= 1.0 ? 0.5 * (1.0 - r * r) : -std::log(r);
}

double local_law_v0(int n, double A0) {
  const double l = std::log(static_cast<double>(n));
  return A0 * l * l / n;
}

double default_epsilon(double v0) { return std::pow(2.0 * v0 * kSmoothingA, 2.0 / 3.0); }

std::vector<GridNode> LocalLawGrid::nodes() const {
  std::vector<GridNode> out;
  for (std::size_t i = 0; i < u_nodes.size(); ++i) {
    for (double v : v_nodes[i]) out.push_back({u_nodes[i], v});
  }
  return out;
}

std::size_t LocalLawGrid::size() const {
  std::size_t k = 0;
  for (const auto& vs : v_nodes) k += vs.size();
  return k;
}

bool LocalLawGrid::contains(double u, double v) const {
  const auto law = support_endpoints(z);
  if (!law.in_support(u)) return false;
  const double g = gamma_edge(law, u);
  const double tol = 1e-12;
  if (g < 0.5 * epsilon * (1.0 - tol)) return false;
  return v >= v0 / std::sqrt(g) * (1.0 - tol) && v <= V * (1.0 + tol);
}

LocalLawGrid build_domain_grid(Complex z, int n, const GridParams& params) {
  if (n < 2) throw std::invalid_argument("build_domain_grid: n must be at least 2");
  if (!(params.s_factor > 1.0)) throw std::invalid_argument("build_domain_grid: s_factor must exceed 1");
  LocalLawGrid g;
  g.z = z;
  g.n = n;
  g.A0 = params.A0;
  g.V = params.V;
  g.s_factor = params.s_factor;
  g.v0 = local_law_v0(n, params.A0);
  g.epsilon = params.epsilon.value_or(default_epsilon(g.v0));
  if (g.V < g.v0) throw std::invalid_argument("build_domain_grid: V is below v0");
  const auto law = support_endpoints(z);
  const auto [blo, bhi] = law.positive_band();
  const double lo = law.regime == Regime::inside ? 0.0 : blo + 0.5 * g.epsilon;
  const double hi = bhi - 0.5 * g.epsilon;
  if (hi < lo) throw std::invalid_argument("build_domain_grid: epsilon leaves J_{eps/2} empty");

  if (!params.u_values.empty()) {
    g.u_nodes = params.u_values;
  } else if (params.u_count == 1) {
    g.u_nodes = {law.regime == Regime::inside ? 0.0 : 0.5 * (lo + hi)};
  } else if (law.regime == Regime::inside) {
    for (int i = 0; i < params.u_count; ++i) {
      g.u_nodes.push_back(-hi + 2.0 * hi * i / (params.u_count - 1));
    }
  } else {
    const int per = std::max(1, params.u_count / 2);
    for (int i = 0; i < per; ++i) {
      const double t = per == 1 ? 0.5 : static_cast<double>(i) / (per - 1);
      g.u_nodes.push_back(lo + (hi - lo) * t);
    }
    const std::vector<double> positive = g.u_nodes;
    for (double u : positive) g.u_nodes.push_back(-u);
    std::sort(g.u_nodes.begin(), g.u_nodes.end());
  }

  const bool explicit_u = !params.u_values.empty();
  std::vector<double> kept;
  for (double u : g.u_nodes) {
    if (!law.in_support(u) || gamma_edge(law, u) < 0.5 * g.epsilon * (1.0 - 1e-12)) {
      throw std::invalid_argument("build_domain_grid: u=" + std::to_string(u) +
                                  " lies outside J_{eps/2}");
    }
    double vlo = g.v0 / std::sqrt(gamma_edge(law, u));
    if (params.v_min) {
      if (*params.v_min < vlo * (1.0 - 1e-12)) {
        throw std::invalid_argument("build_domain_grid: v_min lies below v0/sqrt(gamma(u))");
      }
      vlo = *params.v_min;
    }
    if (vlo > g.V) {
      // generated nodes near an edge may fall outside D(z) for small n
      if (!explicit_u) continue;
      throw std::invalid_argument("build_domain_grid: empty v range at u=" + std::to_string(u));
    }
    int count = params.v_count;
    if (count <= 0) {
      count = 1 + static_cast<int>(std::ceil(params.nodes_per_decade * std::log10(g.V / vlo)));
    }
    std::vector<double> vs;
    if (count == 1 || vlo == g.V) {
      vs.push_back(g.V);
    } else {
      for (int k = 0; k < count; ++k) {
        vs.push_back(vlo * std::pow(g.V / vlo, static_cast<double>(k) / (count - 1)));
      }
      vs.back() = g.V;
      vs.front() = vlo;
    }
    g.v_nodes.push_back(std::move(vs));
    kept.push_back(u);
  }
  if (kept.empty()) throw std::invalid_argument("build_domain_grid: D(z) has no nodes at this n");
  g.u_nodes = std::move(kept);
  return g;
}

std::vector<double> descent_schedule(double v, double s_factor, double V) {
  if (!(v > 0.0)) throw std::invalid_argument("descent_schedule: v must be positive");
  if (!(s_factor > 1.0)) throw std::invalid_argument("descent_schedule: s_factor must exceed 1");
  std::vector<double> out{v};
  const double target = V * (1.0 - 1e-12);
  while (out.back() < target) out.push_back(out.back() * s_factor);
  return out;
}

}  // namespace circlaw
