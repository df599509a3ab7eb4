#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "circlaw/types.hpp"

namespace circlaw {

enum class Regime { inside, outside };

struct LimitLawAtZ {
  Complex z{0.0, 0.0};
  double alpha = 1.0;
  double lambda_plus = 2.0;
  std::optional<double> lambda_minus;
  Regime regime = Regime::inside;
  double tau_margin = 1.0;

  /// Positive part of the support: [0, l+] inside, [l-, l+] outside.
  std::pair<double, double> positive_band() const;
  bool in_support(double x) const;
};

/// |z| = 1 is rejected unless `allow_edge`, in which case the support is
/// [-l+, l+] with lambda_minus left empty.
LimitLawAtZ support_endpoints(Complex z, bool allow_edge = false);

/// Distance from u to the nearest support edge.
double gamma_edge(const LimitLawAtZ& law, double u);
double gamma_edge(Complex z, double u);

/// Density of the limiting eigenvalue law of the m-fold product.
double density_p(int m, Complex z);
/// Mass of that law inside the disk of radius rad.
double radial_cdf(int m, double rad);

struct StieltjesEvaluation {
  Complex w{0.0, 0.0};
  Complex s{0.0, 0.0};
  double residual = 0.0;
};

/// All roots of s^3 + 2w s^2 + (w^2 - |z|^2 + 1) s + w, Newton-polished.
std::array<Complex, 3> cubic_roots(Complex z, Complex w);
/// |s((w+s)^2 - |z|^2) + (w+s)|.
double cubic_residual(Complex z, Complex w, Complex s);

/// The root with Im s > 0, followed by continuation from Im w + 1 when
/// more than one candidate is numerically admissible.
StieltjesEvaluation solve_s(Complex z, Complex w);

inline constexpr double kInversionOffset = 1e-9;

double limiting_density_g(Complex z, double x, double eta = kInversionOffset);
/// Stand-alone evaluation of G(z, x) by adaptive quadrature.
double limiting_cdf_G(Complex z, double x);

/// G(z, .) with the per-band mass precomputed; batch and inverse queries.
class LimitingCdf {
 public:
  explicit LimitingCdf(Complex z, double eta = kInversionOffset);

  const LimitLawAtZ& law() const { return law_; }
  double density(double x) const;
  double operator()(double x) const;
  /// Ascending `xs` -> G at each point.
  std::vector<double> evaluate_sorted(const std::vector<double>& xs) const;
  double quantile(double p) const;
  /// Total mass of g on the positive band (1/2 in exact arithmetic).
  double half_mass() const { return cum_.back(); }

 private:
  /// int_lo^x g for x in the positive band.
  double mass_below(double x) const;
  double cell_integral(std::size_t cell, double a, double b) const;

  LimitLawAtZ law_;
  double eta_;
  std::vector<double> nodes_;  // cosine-spaced over the positive band
  std::vector<double> cum_;    // int_lo^{nodes_[i]} g
};

/// -int log|x| dG(z, x) by quadrature.
double log_potential_limit(Complex z);
/// Potential of the uniform law on the unit disk: (1-|z|^2)/2 or -log|z|.
double log_potential_closed_form(Complex z);

double local_law_v0(int n, double A0);
double default_epsilon(double v0);

struct GridParams {
  double A0 = 4.0;
  double V = 2.0;
  double s_factor = 2.0;
  std::optional<double> epsilon;
  int nodes_per_decade = 10;
  int u_count = 9;
  std::vector<double> u_values;  // overrides u_count when non-empty
  int v_count = 0;               // overrides nodes_per_decade when > 0
  std::optional<double> v_min;   // raises the lower end of every v range

  bool operator==(const GridParams&) const = default;
};

struct GridNode {
  double u = 0.0;
  double v = 0.0;
};

struct LocalLawGrid {
  Complex z{0.0, 0.0};
  int n = 0;
  double A0 = 4.0;
  double V = 2.0;
  double epsilon = 0.0;
  double s_factor = 2.0;
  double v0 = 0.0;
  std::vector<double> u_nodes;
  std::vector<std::vector<double>> v_nodes;  // ascending, per u node

  std::vector<GridNode> nodes() const;
  std::size_t size() const;
  /// Membership in D(z): u in J_{eps/2}, v0/sqrt(gamma(u)) <= v <= V.
  bool contains(double u, double v) const;
};

LocalLawGrid build_domain_grid(Complex z, int n, const GridParams& params);

/// {v s^k : k = 0..K_v}, K_v = min{l : v s^l >= V}.
std::vector<double> descent_schedule(double v, double s_factor, double V);

}  // namespace circlaw
