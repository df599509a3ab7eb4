#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace circlaw {

enum class LawKind { gaussian, rademacher, uniform, heavy_tail, sparse_bernoulli };

/// Symmetric entry law with mean 0 and variance 1.
struct EntryLaw {
  LawKind kind = LawKind::gaussian;
  double tail_exponent = 0.0;  // heavy_tail: Student-t degrees of freedom (> 4)
  double p = 1.0;              // sparse_bernoulli: keep probability

  static EntryLaw gaussian() { return {}; }
  static EntryLaw rademacher() { return {LawKind::rademacher}; }
  static EntryLaw uniform() { return {LawKind::uniform}; }
  static EntryLaw heavy_tail(double tail_exponent);
  /// Student-t with 4 + 2*delta degrees of freedom, so E|X|^(4+delta) < inf.
  static EntryLaw heavy_tail_with_delta(double delta);
  static EntryLaw sparse_bernoulli(double p);

  void validate() const;
  std::string name() const;

  /// E|X|^q of the untruncated standardized law (inf when it diverges).
  double abs_moment(double q) const;
  /// E[X^2 1{|X| <= t}].
  double truncated_second_moment(double t) const;

  double sample(std::mt19937_64& rng) const;

  bool operator==(const EntryLaw&) const = default;
};

LawKind parse_law_kind(const std::string& s);
std::string to_string(LawKind k);

struct TruncationPolicy {
  bool enabled = false;
  double D = 1.0;
  double phi = 0.25;
  double delta0 = 0.0;  // carried for completeness, not consumed

  double threshold(int n) const;

  bool operator==(const TruncationPolicy&) const = default;
};

struct EnsembleSpec {
  int n = 2;
  int m = 1;
  EntryLaw law;
  TruncationPolicy truncation;
  std::uint64_t base_seed = 0;

  void validate() const;

  bool operator==(const EnsembleSpec&) const = default;
};

/// Truncate-then-standardize map: x -> (|x| <= cutoff ? x : 0) / scale.
struct TruncatedLaw {
  double cutoff = 0.0;
  double scale = 1.0;
};

/// Largest cutoff t with t / sigma(t) = T, which keeps every emitted value
/// inside [-T, T] while restoring unit variance.
TruncatedLaw truncated_law(const EntryLaw& law, double T);

std::mt19937_64 factor_rng(std::uint64_t base_seed, int q, std::uint64_t trial);

/// n x n factor q (1-based) for a given trial.
Eigen::MatrixXd sample_factor(const EnsembleSpec& spec, int q, std::uint64_t trial);

/// Non-fatal diagnostics, e.g. sparsity below the log n / n regime.
std::vector<std::string> spec_warnings(const EnsembleSpec& spec);

struct MomentAudit {
  double mean = 0.0;
  double variance = 0.0;
  double abs_moment = 0.0;
};

MomentAudit moment_audit(std::span<const double> samples, double p);

double derive_phi(double delta);

}  // namespace circlaw
