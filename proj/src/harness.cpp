#include "circlaw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>

#include "circlaw/blas_runtime.hpp"
#include "circlaw/csv.hpp"
#include "circlaw/invariants.hpp"
#include "circlaw/linearization.hpp"
#include "circlaw/spectra.hpp"
#include "circlaw/verification.hpp"

namespace circlaw {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class R>
std::vector<std::optional<R>> parallel_map(std::size_t count, int workers,
                                           const std::function<R(std::size_t)>& task) {
  std::vector<std::optional<R>> out(count);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = task(i);
      } catch (const NumericalError&) {
        out[i].reset();  // discarded trial
      }
    }
  };
  const int k = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (k == 1) {
    body();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < k; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  return out;
}

double ks_uniform(std::vector<double> x, const std::function<double(double)>& F) {
  std::sort(x.begin(), x.end());
  const double k = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = std::clamp(F(x[i]), 0.0, 1.0);
    d = std::max({d, (i + 1) / k - f, f - i / k});
  }
  return d;
}

std::string zkey(Complex z) { return format_double(z.real()) + "," + format_double(z.imag()); }

struct Context {
  const ExperimentConfig& cfg;
  fs::path dir;
  bool write;
  std::vector<std::string> files;

  std::unique_ptr<CsvWriter> csv(const std::string& name, const std::vector<std::string>& header) {
    if (!write) return nullptr;
    files.push_back(name);
    return std::make_unique<CsvWriter>((dir / name).string(), header);
  }
};

void add_check(VerificationReport& rep, const ExperimentConfig& cfg, const std::string& name,
               double value) {
  auto it = cfg.checks.find(name);
  if (it == cfg.checks.end()) return;
  rep.checks.push_back({name, value, it->second, value <= it->second});
}

struct SpectrumRecord {
  std::size_t trial = 0;
  Complex z;
  SingularSpectrum sp;
};

void write_spectra(Context& ctx, const std::vector<const SpectrumRecord*>& recs) {
  auto values = ctx.csv("spectra.csv", {"trial", "z_re", "z_im", "r", "index", "s_value"});
  if (!values) return;
  std::unique_ptr<CsvWriter> weights;
  for (const auto* r : recs) {
    for (Eigen::Index k = 0; k < r->sp.size(); ++k) {
      *values << r->trial << r->z.real() << r->z.imag() << r->sp.r << static_cast<long long>(k + 1)
              << r->sp.values[k];
      values->end_row();
    }
    if (!r->sp.has_weights()) continue;
    if (!weights) {
      weights = ctx.csv("block_weights.csv",
                        {"trial", "z_re", "z_im", "index", "sign", "alpha", "weight"});
    }
    for (Eigen::Index k = 0; k < r->sp.size(); ++k) {
      for (int sign : {1, -1}) {
        const auto& w = sign > 0 ? r->sp.w_plus : r->sp.w_minus;
        for (Eigen::Index a = 0; a < w.rows(); ++a) {
          *weights << r->trial << r->z.real() << r->z.imag() << static_cast<long long>(k + 1) << sign
                   << static_cast<long long>(a + 1) << w(a, k);
          weights->end_row();
        }
      }
    }
  }
}

std::shared_ptr<const BlockLinearization> linearize(const ExperimentConfig& cfg, std::size_t trial) {
  return std::make_shared<const BlockLinearization>(
      BlockLinearization::build(ProductModel::sample(cfg.ensemble, trial)));
}

// per-task unit-disk draw for zeta, only when r > 0
Complex zeta_for(const ExperimentConfig& cfg, std::size_t trial, std::size_t zi) {
  if (cfg.r == 0.0) return 0.0;
  auto rng = factor_rng(cfg.ensemble.base_seed ^ 0x5a5a5a5aULL, static_cast<int>(1000 + zi), trial);
  return sample_unit_disk(rng);
}

void run_macro(const ExperimentConfig& cfg, int workers, Context& ctx, VerificationReport& rep) {
  struct Out {
    std::vector<Complex> eig;
    double ks_r, ks_a, inside;
  };
  const int m = cfg.ensemble.m;
  auto res = parallel_map<Out>(cfg.trials, workers, [&](std::size_t t) {
    const auto pm = ProductModel::sample(cfg.ensemble, t);
    Out o;
    o.eig = product_eigenvalues(product_matrix(pm)).eigenvalues;
    std::vector<double> rad, ang;
    std::size_t in = 0;
    for (const Complex& l : o.eig) {
      rad.push_back(std::abs(l));
      ang.push_back(std::arg(l));
      in += std::abs(l) <= 1.0;
    }
    o.ks_r = ks_uniform(rad, [m](double r) { return r >= 1.0 ? 1.0 : radial_cdf(m, r); });
    o.ks_a = ks_uniform(ang, [](double a) { return (a + std::numbers::pi) / (2.0 * std::numbers::pi); });
    o.inside = static_cast<double>(in) / o.eig.size();
    return o;
  });
  auto csv = ctx.csv("scatter.csv", {"trial", "index", "re", "im"});
  std::vector<double> kr, ka, inside;
  for (std::size_t t = 0; t < res.size(); ++t) {
    if (!res[t]) continue;
    kr.push_back(res[t]->ks_r);
    ka.push_back(res[t]->ks_a);
    inside.push_back(res[t]->inside);
    if (csv) {
      for (std::size_t i = 0; i < res[t]->eig.size(); ++i) {
        *csv << t << static_cast<long long>(i + 1) << res[t]->eig[i].real() << res[t]->eig[i].imag();
        csv->end_row();
      }
    }
  }
  rep.tasks = res.size();
  rep.discarded = res.size() - kr.size();
  if (kr.empty()) return;
  rep.statistics = {{"ks_radius_median", median(kr)},
                    {"ks_radius_max", *std::max_element(kr.begin(), kr.end())},
                    {"ks_angle_median", median(ka)},
                    {"inside_fraction_median", median(inside)},
                    {"ks_radius", kr},
                    {"ks_angle", ka}};
  add_check(rep, cfg, "ks_radius", median(kr));
  add_check(rep, cfg, "ks_angle", median(ka));
}

void run_local(const ExperimentConfig& cfg, int workers, Context& ctx, VerificationReport& rep) {
  std::vector<LocalLawGrid> grids;
  for (const Complex& z : cfg.z_points) grids.push_back(build_domain_grid(z, cfg.ensemble.n, cfg.grid));
  struct Out {
    SpectrumRecord spec;
    std::vector<LambdaRecord> lambdas;
    std::vector<SelfConsistency> residuals;
  };
  const std::size_t nz = cfg.z_points.size();
  SweepOptions sweep;
  sweep.tau = cfg.constants.tau;
  auto res = parallel_map<Out>(cfg.trials * nz, workers, [&](std::size_t i) {
    const std::size_t t = i / nz, zi = i % nz;
    const Complex z = cfg.z_points[zi];
    Out o;
    o.spec = {t, z, singular_spectrum(shift(linearize(cfg, t), z, cfg.r, zeta_for(cfg, t, zi)),
                                      WeightMode::blocks, cfg.solver)};
    // the law is compared at z itself; r only perturbs the diagonal
    o.spec.sp.z = z;
    o.lambdas = lambda_sweep(o.spec.sp, grids[zi], sweep);
    for (const auto& rec : o.lambdas) o.residuals.push_back(selfconsistency_residual(o.spec.sp, z, rec.w));
    return o;
  });
  auto lam = ctx.csv("lambda.csv", {"z_re", "z_im", "u", "v", "lambda_abs", "normalized", "block_max",
                                    "indicator_flag", "trial"});
  auto resid = ctx.csv("residuals.csv",
                       {"trial", "z_re", "z_im", "u", "v", "alpha", "T_re", "T_im", "T_abs"});
  json per_z = json::object();
  std::vector<double> all_norm, all_resid;
  std::vector<const SpectrumRecord*> spectra;
  std::size_t ok = 0;
  for (std::size_t zi = 0; zi < nz; ++zi) {
    std::vector<double> norm, lam_abs, resid_abs;
    std::size_t flags = 0, nodes = 0;
    for (std::size_t t = 0; t < static_cast<std::size_t>(cfg.trials); ++t) {
      const auto& o = res[t * nz + zi];
      if (!o) continue;
      ++ok;
      spectra.push_back(&o->spec);
      for (std::size_t k = 0; k < o->lambdas.size(); ++k) {
        const auto& r = o->lambdas[k];
        norm.push_back(r.normalized);
        lam_abs.push_back(r.lambda_abs);
        flags += r.indicator;
        ++nodes;
        if (lam) {
          *lam << o->spec.z.real() << o->spec.z.imag() << r.u << r.v << r.lambda_abs << r.normalized
               << r.block_max << static_cast<int>(r.indicator) << t;
          lam->end_row();
        }
        const auto& sc = o->residuals[k];
        for (std::size_t a = 0; a < sc.T.size(); ++a) {
          resid_abs.push_back(std::abs(sc.T[a]));
          if (resid) {
            *resid << t << o->spec.z.real() << o->spec.z.imag() << r.u << r.v
                   << static_cast<long long>(a + 1) << sc.T[a].real() << sc.T[a].imag()
                   << std::abs(sc.T[a]);
            resid->end_row();
          }
        }
      }
    }
    if (norm.empty()) continue;
    all_norm.insert(all_norm.end(), norm.begin(), norm.end());
    all_resid.insert(all_resid.end(), resid_abs.begin(), resid_abs.end());
    per_z[zkey(cfg.z_points[zi])] = {
        {"grid_size", grids[zi].size()},
        {"v0", grids[zi].v0},
        {"epsilon", grids[zi].epsilon},
        {"normalized_max", *std::max_element(norm.begin(), norm.end())},
        {"normalized_median", median(norm)},
        {"lambda_median", median(lam_abs)},
        {"residual_median", median(resid_abs)},
        {"indicator_fraction", static_cast<double>(flags) / nodes}};
  }
  if (cfg.write_spectra) write_spectra(ctx, spectra);
  rep.tasks = res.size();
  rep.discarded = res.size() - ok;
  rep.statistics = {{"per_z", per_z}, {"log_base", "natural"}};
  if (!all_norm.empty()) {
    rep.statistics["normalized_max"] = *std::max_element(all_norm.begin(), all_norm.end());
    rep.statistics["residual_median"] = median(all_resid);
    add_check(rep, cfg, "normalized_max", rep.statistics["normalized_max"].get<double>());
    add_check(rep, cfg, "residual_median", median(all_resid));
  }
}

void run_distance(const ExperimentConfig& cfg, int workers, Context& ctx, VerificationReport& rep) {
  std::vector<std::unique_ptr<LimitingCdf>> laws;
  std::vector<double> potentials;
  for (const Complex& z : cfg.z_points) {
    laws.push_back(std::make_unique<LimitingCdf>(z));
    potentials.push_back(log_potential_closed_form(z));
  }
  struct Out {
    SpectrumRecord spec;
    double delta, u_n;
    ExtremeValues ev;
  };
  const std::size_t nz = cfg.z_points.size();
  auto res = parallel_map<Out>(cfg.trials * nz, workers, [&](std::size_t i) {
    const std::size_t t = i / nz, zi = i % nz;
    const Complex z = cfg.z_points[zi];
    Out o;
    o.spec = {t, z,
              singular_spectrum(shift(linearize(cfg, t), z, cfg.r, zeta_for(cfg, t, zi)),
                                WeightMode::none, cfg.solver)};
    o.delta = kolmogorov_distance(o.spec.sp, *laws[zi]);
    o.ev = extreme_value_monitor(o.spec.sp, cfg.constants.K, cfg.constants.omega_threshold);
    o.u_n = o.ev.s_min > 0.0 ? log_potential_empirical(o.spec.sp)
                             : std::numeric_limits<double>::infinity();
    return o;
  });
  auto csv = ctx.csv("distances.csv", {"z_re", "z_im", "n", "trial", "delta_star", "log_potential",
                                       "log_potential_limit", "s_min", "s_max", "omega_event"});
  json per_z = json::object();
  double worst_delta = 0.0, worst_u = 0.0;
  std::vector<const SpectrumRecord*> spectra;
  std::size_t ok = 0;
  for (std::size_t zi = 0; zi < nz; ++zi) {
    std::vector<double> d, uerr;
    std::size_t fails = 0;
    for (std::size_t t = 0; t < static_cast<std::size_t>(cfg.trials); ++t) {
      const auto& o = res[t * nz + zi];
      if (!o) continue;
      ++ok;
      spectra.push_back(&o->spec);
      d.push_back(o->delta);
      uerr.push_back(std::abs(o->u_n - potentials[zi]));
      fails += !o->ev.omega_event;
      if (csv) {
        *csv << cfg.z_points[zi].real() << cfg.z_points[zi].imag() << cfg.ensemble.n << t << o->delta
             << o->u_n << potentials[zi] << o->ev.s_min << o->ev.s_max
             << static_cast<int>(o->ev.omega_event);
        csv->end_row();
      }
    }
    if (d.empty()) continue;
    worst_delta = std::max(worst_delta, median(d));
    worst_u = std::max(worst_u, median(uerr));
    per_z[zkey(cfg.z_points[zi])] = {{"delta_star_median", median(d)},
                                      {"log_potential_error_median", median(uerr)},
                                      {"omega_failure_fraction", static_cast<double>(fails) / d.size()},
                                      {"delta_star", d}};
  }
  if (cfg.write_spectra) write_spectra(ctx, spectra);
  rep.tasks = res.size();
  rep.discarded = res.size() - ok;
  rep.statistics = {{"per_z", per_z}, {"delta_star_worst_median", worst_delta},
                    {"log_potential_error_worst_median", worst_u}};
  add_check(rep, cfg, "delta_star", worst_delta);
  add_check(rep, cfg, "log_potential_error", worst_u);
}

void run_linear(const ExperimentConfig& cfg, int workers, Context& ctx, VerificationReport& rep) {
  LinearStatisticOptions lo;
  lo.constant = cfg.constants.c_qn;
  lo.log_power = cfg.constants.log_power;
  auto res = parallel_map<std::vector<LinearStatistic>>(cfg.trials, workers, [&](std::size_t t) {
    const auto eig = product_eigenvalues(product_matrix(ProductModel::sample(cfg.ensemble, t)));
    std::vector<LinearStatistic> out;
    for (const Complex& z0 : cfg.z_points) {
      SmoothedTestFunction tf{{cfg.linear_statistic.profile}, z0, cfg.linear_statistic.a, cfg.ensemble.n};
      out.push_back(smoothed_statistic(eig, tf, cfg.ensemble.m, lo));
    }
    return out;
  });
  auto csv = ctx.csv("linear_statistics.csv", {"trial", "z0_re", "z0_im", "n", "a", "empirical",
                                               "limit", "lhs", "bound", "ratio"});
  json per_z = json::object();
  double worst = 0.0;
  std::size_t ok = 0;
  for (std::size_t zi = 0; zi < cfg.z_points.size(); ++zi) {
    std::vector<double> lhs, ratio;
    bool near_edge = false;
    for (std::size_t t = 0; t < res.size(); ++t) {
      if (!res[t]) continue;
      const auto& s = (*res[t])[zi];
      lhs.push_back(s.lhs);
      ratio.push_back(s.ratio);
      near_edge = near_edge || s.near_edge;
      if (csv) {
        *csv << t << cfg.z_points[zi].real() << cfg.z_points[zi].imag() << cfg.ensemble.n
             << cfg.linear_statistic.a << s.empirical << s.limit << s.lhs << s.bound << s.ratio;
        csv->end_row();
      }
    }
    if (lhs.empty()) continue;
    worst = std::max(worst, median(ratio));
    per_z[zkey(cfg.z_points[zi])] = {{"lhs_median", median(lhs)},
                                      {"ratio_median", median(ratio)},
                                      {"near_unit_circle", near_edge}};
  }
  for (const auto& r : res) ok += r.has_value();
  rep.tasks = res.size();
  rep.discarded = res.size() - ok;
  rep.statistics = {{"per_z", per_z}, {"ratio_worst_median", worst},
                    {"laplacian_l1", Profile{cfg.linear_statistic.profile}.laplacian_l1()}};
  add_check(rep, cfg, "ratio", worst);
}

void run_invariants(const ExperimentConfig& cfg, Context& ctx, VerificationReport& rep) {
  const auto results = run_invariant_suite(cfg.ensemble.base_seed);
  auto csv = ctx.csv("invariants.csv", {"name", "pass", "cases", "worst"});
  json arr = json::array();
  for (const auto& r : results) {
    if (csv) {
      *csv << ("\"" + r.name + "\"") << static_cast<int>(r.pass) << r.cases << r.worst;
      csv->end_row();
    }
    arr.push_back({{"name", r.name}, {"pass", r.pass}, {"cases", r.cases}, {"worst", r.worst}});
    rep.checks.push_back({"invariant: " + r.name, r.worst, 1.0, r.pass});
  }
  rep.tasks = results.size();
  rep.statistics = {{"invariants", arr}};
}

void run_probes(const ExperimentConfig& cfg, Context& ctx, VerificationReport& rep) {
  ProbeSpec ps;
  ps.kind = cfg.probe.kind;
  ps.law = cfg.ensemble.law;
  ps.n = cfg.probe.n;
  ps.p_list = cfg.probe.p_list;
  ps.trials = cfg.probe.trials;
  ps.seed = cfg.ensemble.base_seed;
  const auto rows = moment_inequality_probe(ps);
  auto csv = ctx.csv("probes.csv", {"kind", "p", "moment", "envelope", "ratio", "exact_second"});
  json arr = json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, exact_err = 0.0;
  std::vector<std::string> warnings;
  for (const auto& r : rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    const double ex = r.exact_second.value_or(std::numeric_limits<double>::quiet_NaN());
    if (r.exact_second) exact_err = std::max(exact_err, std::abs(r.moment / ex - 1.0));
    if (csv) {
      *csv << to_string(ps.kind) << r.p << r.moment << r.envelope << r.ratio << ex;
      csv->end_row();
    }
    warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    arr.push_back({{"p", r.p}, {"moment", r.moment}, {"envelope", r.envelope}, {"ratio", r.ratio}});
  }
  rep.tasks = 1;
  rep.statistics = {{"rows", arr}, {"ratio_spread", hi / lo}, {"exact_second_error", exact_err},
                    {"warnings", warnings}};
  add_check(rep, cfg, "ratio_spread", hi / lo);
  add_check(rep, cfg, "exact_second_error", exact_err);
}

}  // namespace

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.pass; });
}

json VerificationReport::to_json() const {
  json cs = json::array();
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  return {{"version", version_string()},
          {"config", config},
          {"statistics", statistics},
          {"checks", cs},
          {"all_pass", all_pass()},
          {"tasks", tasks},
          {"discarded", discarded},
          {"workers", workers},
          {"wall_seconds", wall_seconds},
          {"files", files}};
}

int resolve_workers(const ExperimentConfig& cfg, std::optional<int> flag) {
  if (flag) return std::max(1, *flag);
  if (const char* env = std::getenv("CIRCLAW_WORKERS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ConfigError(std::string("CIRCLAW_WORKERS is not an integer: ") + env);
    }
  }
  return cfg.workers;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string version_string() { return std::string("v") + CIRCLAW_VERSION; }

VerificationReport run(ExperimentConfig cfg, const RunOptions& opts) {
  if (opts.seed) cfg.ensemble.base_seed = *opts.seed;
  if (opts.out) cfg.output_dir = *opts.out;
  const int workers = resolve_workers(cfg, opts.workers);
  cfg.validate();
  if (workers > 1) set_blas_threads(1);

  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.workers = workers;
  // worker count is an execution detail, not part of the experiment
  ExperimentConfig echo = cfg;
  echo.workers = 1;
  rep.config = config_to_json(echo);

  Context ctx{cfg, fs::path(cfg.output_dir), opts.write_files, {}};
  if (opts.write_files) fs::create_directories(ctx.dir);

  switch (cfg.kind) {
    case ExperimentKind::macro_law: run_macro(cfg, workers, ctx, rep); break;
    case ExperimentKind::local_law: run_local(cfg, workers, ctx, rep); break;
    case ExperimentKind::distance: run_distance(cfg, workers, ctx, rep); break;
    case ExperimentKind::linear_statistic: run_linear(cfg, workers, ctx, rep); break;
    case ExperimentKind::invariants: run_invariants(cfg, ctx, rep); break;
    case ExperimentKind::probes: run_probes(cfg, ctx, rep); break;
  }
  rep.statistics["seed_manifest"] = {{"base_seed", cfg.ensemble.base_seed}, {"trials", cfg.trials}};
  rep.statistics["warnings"] = spec_warnings(cfg.ensemble);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (opts.write_files) {
    ctx.files.push_back("report.json");
    rep.files = ctx.files;
    std::ofstream(ctx.dir / "report.json") << rep.to_json().dump(2) << '\n';
    std::ofstream man(ctx.dir / "manifest.txt");
    const std::string hash = config_hash(echo);
    for (const auto& f : ctx.files) {
      man << f << " config_hash=" << hash << " seed=" << cfg.ensemble.base_seed
          << " version=" << version_string() << '\n';
    }
    std::ofstream(ctx.dir / "config.json") << config_to_json(echo).dump(2) << '\n';
    if (!man) throw std::runtime_error("cannot write manifest in " + ctx.dir.string());
  }
  return rep;
}

}  // namespace circlaw
