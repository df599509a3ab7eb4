#pragma once

#include <optional>
#include <vector>

#include "circlaw/limit_law.hpp"
#include "circlaw/spectra.hpp"
#include "circlaw/test_functions.hpp"
#include "circlaw/types.hpp"

namespace circlaw {

/// Finite atomic probability measure on the real line with equal weights.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> atoms);
  /// The symmetrized atoms {+-s_j}.
  static EmpiricalDistribution symmetrized(const SingularSpectrum& sp);

  const std::vector<double>& atoms() const { return atoms_; }
  double cdf(double x) const;
  double cdf_left(double x) const;
  Complex stieltjes(Complex w) const;

 private:
  std::vector<double> atoms_;  // ascending
};

struct LambdaRecord {
  double u = 0.0;
  double v = 0.0;
  Complex w{0.0, 0.0};
  Complex m_n{0.0, 0.0};
  Complex s{0.0, 0.0};
  double lambda_abs = 0.0;
  double normalized = 0.0;           // n v |Lambda_n| / log^2 n
  std::vector<Complex> block_lambdas;  // m_n^{(alpha)} - s, empty without weights
  double block_max = 0.0;
  bool indicator = false;
};

struct SweepOptions {
  double tau = 0.5;
};

std::vector<LambdaRecord> lambda_sweep(const SingularSpectrum& sp, const LocalLawGrid& grid,
                                       const SweepOptions& opts = {});
LambdaRecord lambda_at(const SingularSpectrum& sp, Complex w);

struct SelfConsistency {
  std::vector<Complex> T;  // alpha = 1..m
  bool degenerate = false;
};

/// T^{(alpha)} = 1 + m^{(alpha)} (w + m^{([alpha+1]+m)} - |z|^2 / (w + m^{([alpha-1])})).
SelfConsistency selfconsistency_from_traces(const std::vector<Complex>& traces, int m, Complex z,
                                            Complex w);
SelfConsistency selfconsistency_residual(const SingularSpectrum& sp, Complex z, Complex w);

double kolmogorov_distance(const EmpiricalDistribution& F, const LimitingCdf& G);
double kolmogorov_distance(const SingularSpectrum& sp, const LimitingCdf& G);

/// 2N symmetrized atoms at the mid-quantiles of G; returned as N positive values.
SingularSpectrum quantile_spectrum(const LimitingCdf& G, int n, int m);

/// Piecewise-linear inverse of G on a dense table, for sampling.
class InverseCdfTable {
 public:
  InverseCdfTable(const LimitingCdf& G, int nodes);
  double operator()(double p) const;

 private:
  std::vector<double> x_;
  std::vector<double> p_;
};

struct SmoothingOptions {
  double C1 = 20.0;
  double C2 = 20.0;
  int sup_points = 101;
};

struct DistanceReport {
  double delta_star = 0.0;
  double horizontal_term = 0.0;  // 2 int |S_F - S_G|(u + iV) du
  double vertical_term = 0.0;    // 2 sup_x int_{v'}^V |S_F - S_G|(x + iy) dy
  double c1_term = 0.0;
  double c2_term = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double v = 0.0;
  double epsilon = 0.0;
  double V = 0.0;

  double rhs() const { return horizontal_term + vertical_term + c1_term + c2_term; }
  bool holds() const { return rhs() >= delta_star; }
};

DistanceReport smoothing_bound(const EmpiricalDistribution& F, const LimitingCdf& G, double v,
                               double epsilon, double V, const SmoothingOptions& opts = {});

struct LinearStatistic {
  double empirical = 0.0;  // (1/n) sum f(lambda_j)
  double limit = 0.0;      // int f dmu^(m)
  double lhs = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool near_edge = false;
};

struct LinearStatisticOptions {
  double log_power = 5.0;
  double constant = 1.0;
  double tau = 0.1;
};

/// int f dmu^(m) for the product limit law.
double integrate_against_limit(const PlacedProfile& f, int m);

LinearStatistic smoothed_statistic(const ComplexSpectrum& eigs, const SmoothedTestFunction& tf,
                                   int m, const LinearStatisticOptions& opts = {});

double log_potential_empirical(const SingularSpectrum& sp);

enum class MeasureKind { disk_law, point_mass, empirical };

struct GreenMeasure {
  MeasureKind kind = MeasureKind::disk_law;
  Complex point{0.0, 0.0};     // point_mass
  std::vector<Complex> atoms;  // empirical, equal weights
};

struct GreenCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
};

GreenCheck green_identity_check(const PlacedProfile& f, const GreenMeasure& nu);

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

Regression scaling_regression(const std::vector<std::pair<double, double>>& points);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> v);

}  // namespace circlaw
