#pragma once

#include <string>
#include <vector>

namespace circlaw {

enum class PlotKind { scatter, density_compare, lambda_vs_v, distance_vs_n };

PlotKind parse_plot_kind(const std::string& s);
std::string to_string(PlotKind k);

struct PlotRequest {
  PlotKind kind = PlotKind::scatter;
  /// Run output directories. distance_vs_n merges several; the others use the first.
  std::vector<std::string> inputs;
  std::string out_dir = ".";
  int bins = 60;
};

/// Writes one CSV and returns its path.
std::string emit_plot_data(const PlotRequest& req);

}  // namespace circlaw
