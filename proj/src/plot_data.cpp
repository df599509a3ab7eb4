#include "circlaw/plot_data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <stdexcept>

#include "circlaw/csv.hpp"
#include "circlaw/limit_law.hpp"
#include "circlaw/verification.hpp"

namespace circlaw {

namespace fs = std::filesystem;

PlotKind parse_plot_kind(const std::string& s) {
  for (auto k : {PlotKind::scatter, PlotKind::density_compare, PlotKind::lambda_vs_v,
                 PlotKind::distance_vs_n}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown plot kind '" + s + "'");
}

std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::scatter: return "scatter";
    case PlotKind::density_compare: return "density_compare";
    case PlotKind::lambda_vs_v: return "lambda_vs_v";
    case PlotKind::distance_vs_n: return "distance_vs_n";
  }
  return "unknown";
}

namespace {

CsvTable input_table(const PlotRequest& req, std::size_t i, const std::string& name) {
  const fs::path p = fs::path(req.inputs.at(i)) / name;
  if (!fs::exists(p)) throw std::runtime_error("missing input " + p.string());
  return read_csv(p.string());
}

std::string scatter(const PlotRequest& req, const fs::path& out) {
  const CsvTable t = input_table(req, 0, "scatter.csv");
  CsvWriter w(out.string(), {"re", "im", "circle_re", "circle_im"});
  const std::size_t k = t.rows.size();
  for (std::size_t i = 0; i < k; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k);
    w << t.number(i, "re") << t.number(i, "im") << std::cos(th) << std::sin(th);
    w.end_row();
  }
  return out.string();
}

std::string density_compare(const PlotRequest& req, const fs::path& out) {
  const CsvTable t = input_table(req, 0, "spectra.csv");
  if (t.rows.empty()) throw std::runtime_error("spectra.csv has no rows");
  const Complex z(t.number(0, "z_re"), t.number(0, "z_im"));
  std::vector<double> atoms;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (Complex(t.number(i, "z_re"), t.number(i, "z_im")) != z) continue;
    const double s = t.number(i, "s_value");
    atoms.push_back(s);
    atoms.push_back(-s);
  }
  const LimitLawAtZ law = support_endpoints(z);
  const double hi = std::max(1.1 * law.lambda_plus, *std::max_element(atoms.begin(), atoms.end()) * 1.0001);
  const int bins = std::max(2, req.bins);
  const double h = 2.0 * hi / bins;
  std::vector<double> count(bins, 0.0);
  for (double a : atoms) {
    const int b = std::clamp(static_cast<int>((a + hi) / h), 0, bins - 1);
    count[b] += 1.0;
  }
  CsvWriter w(out.string(), {"x", "g_limit", "g_empirical_histogram"});
  for (int b = 0; b < bins; ++b) {
    const double x = -hi + (b + 0.5) * h;
    w << x << limiting_density_g(z, x) << count[b] / (atoms.size() * h);
    w.end_row();
  }
  return out.string();
}

std::string lambda_vs_v(const PlotRequest& req, const fs::path& out) {
  const CsvTable t = input_table(req, 0, "lambda.csv");
  std::map<double, std::vector<double>> lam, norm;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double v = t.number(i, "v");
    lam[v].push_back(t.number(i, "lambda_abs"));
    norm[v].push_back(t.number(i, "normalized"));
  }
  CsvWriter w(out.string(), {"v", "lambda_median", "lambda_max", "normalized_max", "count"});
  for (const auto& [v, xs] : lam) {
    w << v << median(xs) << *std::max_element(xs.begin(), xs.end())
      << *std::max_element(norm[v].begin(), norm[v].end()) << xs.size();
    w.end_row();
  }
  return out.string();
}

std::string distance_vs_n(const PlotRequest& req, const fs::path& out) {
  std::map<long long, std::vector<double>> by_n;
  for (std::size_t k = 0; k < req.inputs.size(); ++k) {
    const CsvTable t = input_table(req, k, "distances.csv");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      by_n[static_cast<long long>(t.number(i, "n"))].push_back(t.number(i, "delta_star"));
    }
  }
  CsvWriter w(out.string(), {"n", "delta_star_median", "delta_star_max", "count"});
  for (const auto& [n, xs] : by_n) {
    w << n << median(xs) << *std::max_element(xs.begin(), xs.end()) << xs.size();
    w.end_row();
  }
  return out.string();
}

}  // namespace

std::string emit_plot_data(const PlotRequest& req) {
  if (req.inputs.empty()) throw std::invalid_argument("plot-data: no input directory given");
  fs::create_directories(req.out_dir);
  const fs::path out = fs::path(req.out_dir) / ("plot_" + to_string(req.kind) + ".csv");
  switch (req.kind) {
    case PlotKind::scatter: return scatter(req, out);
    case PlotKind::density_compare: return density_compare(req, out);
    case PlotKind::lambda_vs_v: return lambda_vs_v(req, out);
    case PlotKind::distance_vs_n: return distance_vs_n(req, out);
  }
  return out.string();
}

}  // namespace circlaw
