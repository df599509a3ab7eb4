#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circlaw/ensembles.hpp"

namespace circlaw {

enum class ProbeKind { linear_rosenthal, quadratic_form };

ProbeKind parse_probe_kind(const std::string& s);
std::string to_string(ProbeKind k);

struct ProbeSpec {
  ProbeKind kind = ProbeKind::linear_rosenthal;
  EntryLaw law;
  int n = 1000;
  std::vector<double> p_list{2.0, 4.0, 8.0};
  int trials = 10000;
  std::uint64_t seed = 0;
  /// Linear coefficients (size n); empty means a_j = n^{-1/2}.
  std::vector<double> a;
  /// Quadratic coefficients (n x n, diagonal ignored); empty means 1/n off the diagonal.
  Eigen::MatrixXd A;
};

struct ProbeRow {
  double p = 0.0;
  double moment = 0.0;    // (E|S|^p)^{1/p}, Monte Carlo
  double envelope = 0.0;
  double ratio = 0.0;
  std::optional<double> exact_second;  // quadratic form, p = 2: sqrt(E Q^2)
  std::vector<std::string> warnings;
};

/// sqrt(p) ||a||_2 + p mu_p^{1/p} max|a_j|.
double linear_envelope(const std::vector<double>& a, double mu_p, double p);
/// p ||A||_F + p^2 mu_p^{2/p} max|a_lk| (off-diagonal).
double quadratic_envelope(const Eigen::MatrixXd& A, double mu_p, double p);
/// E Q^2 = sum_{l != k} (a_lk^2 + a_lk a_kl) for unit-variance entries.
double quadratic_second_moment(const Eigen::MatrixXd& A);

std::vector<ProbeRow> moment_inequality_probe(const ProbeSpec& spec);

}  // namespace circlaw
