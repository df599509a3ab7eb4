#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "circlaw/blas_runtime.hpp"
#include "circlaw/config.hpp"
#include "circlaw/csv.hpp"
#include "circlaw/harness.hpp"
#include "circlaw/invariants.hpp"
#include "circlaw/limit_law.hpp"
#include "circlaw/plot_data.hpp"

namespace {

enum Exit { kOk = 0, kChecksFailed = 1, kUsage = 2, kRuntime = 3 };

circlaw::Complex parse_z(const std::string& s) {
  const auto comma = s.find(',');
  std::size_t used = 0;
  if (comma == std::string::npos) {
    const double re = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad z '" + s + "'");
    return {re, 0.0};
  }
  const double re = std::stod(s.substr(0, comma));
  const double im = std::stod(s.substr(comma + 1));
  return {re, im};
}

int cmd_limit(const std::string& zs, int points, const std::optional<std::string>& out) {
  using namespace circlaw;
  const Complex z = parse_z(zs);
  const LimitLawAtZ law = support_endpoints(z);
  std::printf("z            = %.6g%+.6gi\n", z.real(), z.imag());
  std::printf("regime       = %s\n", law.regime == Regime::inside ? "inside" : "outside");
  std::printf("alpha        = %.6f\n", law.alpha);
  std::printf("lambda_plus  = %.4f\n", law.lambda_plus);
  if (law.lambda_minus) std::printf("lambda_minus = %.4f\n", *law.lambda_minus);
  std::printf("U quadrature = %.6f\n", log_potential_limit(z));
  std::printf("U disk law   = %.6f\n", log_potential_closed_form(z));
  if (out) {
    const LimitingCdf cdf(z);
    std::vector<double> xs;
    const double hi = 1.05 * law.lambda_plus;
    for (int i = 0; i < points; ++i) xs.push_back(-hi + 2.0 * hi * i / (points - 1));
    const auto G = cdf.evaluate_sorted(xs);
    CsvWriter w(*out, {"x", "g", "G"});
    for (int i = 0; i < points; ++i) {
      w << xs[i] << cdf.density(xs[i]) << G[i];
      w.end_row();
    }
    std::printf("curve        -> %s\n", out->c_str());
  }
  return kOk;
}

int cmd_check(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : circlaw::run_invariant_suite(seed)) {
    std::printf("%s  %s  (cases=%zu, worst=%.3g)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.cases, r.worst);
    ok = ok && r.pass;
  }
  return ok ? kOk : kChecksFailed;
}

int cmd_run(const std::string& path, const circlaw::RunOptions& opts) {
  const auto cfg = circlaw::load_config(path);
  const auto rep = circlaw::run(cfg, opts);
  for (const auto& c : rep.checks) {
    std::printf("%s  %s  value=%.6g threshold=%.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.value, c.threshold);
  }
  std::printf("tasks=%zu discarded=%zu wall=%.2fs out=%s\n", rep.tasks, rep.discarded,
              rep.wall_seconds, opts.out.value_or(cfg.output_dir).c_str());
  return rep.all_pass() ? kOk : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  circlaw::pin_blas_kernel(argv);

  CLI::App app{"Spectral simulation and verification for products of random matrices"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  app.add_option("--seed", seed, "Override the base seed");
  app.add_option("--workers", workers, "Worker threads (overrides CIRCLAW_WORKERS and config)");
  app.add_option("--out", out, "Output directory (run, plot-data) or curve file (limit)");
  app.set_version_flag("--version", std::string("circlaw ") + circlaw::version_string());

  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  std::string config_path;
  run->add_option("config", config_path, "Config file")->required();

  auto* limit = app.add_subcommand("limit", "Print limiting-law quantities at z");
  std::string z = "0";
  int points = 401;
  limit->add_option("--z", z, "z as 're' or 're,im'");
  limit->add_option("--points", points, "Curve points written with --out")->check(CLI::Range(2, 1000000));

  app.add_subcommand("check", "Run the exact-identity suite");

  auto* plot = app.add_subcommand("plot-data", "Emit plot-ready CSV from run outputs");
  std::string kind;
  std::vector<std::string> from;
  int bins = 60;
  plot->add_option("kind", kind, "scatter | density_compare | lambda_vs_v | distance_vs_n")->required();
  plot->add_option("--from", from, "Run output directory (repeatable)")->required();
  plot->add_option("--bins", bins, "Histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, {seed, workers, out, true});
    if (*limit) return cmd_limit(z, points, out);
    if (app.got_subcommand("check")) return cmd_check(seed.value_or(20240601));
    if (*plot) {
      circlaw::PlotRequest req;
      req.kind = circlaw::parse_plot_kind(kind);
      req.inputs = from;
      req.out_dir = out.value_or(".");
      req.bins = bins;
      std::printf("%s\n", circlaw::emit_plot_data(req).c_str());
      return kOk;
    }
  } catch (const circlaw::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
