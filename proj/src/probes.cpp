#include "circlaw/probes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace circlaw {

ProbeKind parse_probe_kind(const std::string& s) {
  if (s == "linear_rosenthal") return ProbeKind::linear_rosenthal;
  if (s == "quadratic_form") return ProbeKind::quadratic_form;
  throw std::invalid_argument("unknown probe kind '" + s + "'");
}

std::string to_string(ProbeKind k) {
  return k == ProbeKind::linear_rosenthal ? "linear_rosenthal" : "quadratic_form";
}

double linear_envelope(const std::vector<double>& a, double mu_p, double p) {
  double l2 = 0.0, mx = 0.0;
  for (double x : a) {
    l2 += x * x;
    mx = std::max(mx, std::abs(x));
  }
  return std::sqrt(p) * std::sqrt(l2) + p * std::pow(mu_p, 1.0 / p) * mx;
}

double quadratic_envelope(const Eigen::MatrixXd& A, double mu_p, double p) {
  Eigen::MatrixXd off = A;
  off.diagonal().setZero();
  return p * off.norm() + p * p * std::pow(mu_p, 2.0 / p) * off.cwiseAbs().maxCoeff();
}

double quadratic_second_moment(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd off = A;
  off.diagonal().setZero();
  return off.squaredNorm() + off.cwiseProduct(off.transpose()).sum();
}

std::vector<ProbeRow> moment_inequality_probe(const ProbeSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("probe: n must be at least 2");
  if (spec.trials < 2) throw std::invalid_argument("probe: need at least 2 trials");
  spec.law.validate();
  const int n = spec.n;
  const bool linear = spec.kind == ProbeKind::linear_rosenthal;

  std::vector<double> a = spec.a;
  const bool default_a = a.empty();
  if (linear) {
    if (default_a) a.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if (static_cast<int>(a.size()) != n) throw std::invalid_argument("probe: a must have size n");
  }
  const bool default_A = spec.A.size() == 0;
  Eigen::MatrixXd A;
  if (!linear) {
    A = default_A ? Eigen::MatrixXd::Constant(n, n, 1.0 / n) : spec.A;
    if (A.rows() != n || A.cols() != n) throw std::invalid_argument("probe: A must be n x n");
    A.diagonal().setZero();
  }

  // equal-weight Rademacher sums reduce to popcounts
  const bool popcount_path = linear && spec.law.kind == LawKind::rademacher &&
                             std::all_of(a.begin(), a.end(), [&](double x) { return x == a[0]; });

  auto rng = factor_rng(spec.seed, 0, 0);
  std::vector<double> draws(spec.trials);
  Eigen::VectorXd x(n);
  for (int t = 0; t < spec.trials; ++t) {
    if (popcount_path) {
      int ones = 0;
      int left = n;
      while (left > 0) {
        std::uint64_t word = rng();
        if (left < 64) word &= (std::uint64_t{1} << left) - 1;
        ones += std::popcount(word);
        left -= 64;
      }
      draws[t] = a[0] * (2.0 * ones - n);
      continue;
    }
    for (int j = 0; j < n; ++j) x[j] = spec.law.sample(rng);
    if (linear) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += a[j] * x[j];
      draws[t] = s;
    } else if (default_A) {
      const double sum = x.sum();
      draws[t] = (sum * sum - x.squaredNorm()) / n;
    } else {
      draws[t] = x.dot(A * x);
    }
  }

  std::vector<ProbeRow> out;
  for (double p : spec.p_list) {
    if (!(p >= 2.0)) throw std::invalid_argument("probe: p must be at least 2");
    ProbeRow row;
    row.p = p;
    if (p * std::log(p) > 30.0) {
      row.warnings.push_back("p=" + std::to_string(p) +
                             " is beyond the reliable Monte Carlo range (p log p > 30)");
    }
    double acc = 0.0;
    for (double d : draws) acc += std::pow(std::abs(d), p);
    row.moment = std::pow(acc / spec.trials, 1.0 / p);
    const double mu = spec.law.abs_moment(p);
    row.envelope = linear ? linear_envelope(a, mu, p) : quadratic_envelope(A, mu, p);
    row.ratio = row.moment / row.envelope;
    if (!linear && p == 2.0) {
      const double exact = default_A ? 2.0 * (n - 1.0) / n : quadratic_second_moment(A);
      row.exact_second = std::sqrt(exact);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace circlaw
