#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nagumo/model.hpp"

namespace nagumo::figures {

/// A plot-ready table: optional string label column, numeric columns, and
/// `# key = value` metadata lines written above the header row.
struct Table {
  std::string label_column;  ///< empty: no label column
  std::vector<std::string> columns;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;

  void add(std::vector<double> row, std::string label = {});
  void note(std::string key, double value);
  void note(std::string key, std::string value);
  /// `preamble` is copied verbatim (already `#`-prefixed); floats use %.17e.
  void write_csv(std::ostream& os, std::string_view preamble = {}) const;
};

/// Points of {ℰ^μ = level, 0 ≤ x ≤ 1} as rows (mu, level, component, x, y).
/// Each connected x-interval is one component, traced as the upper branch
/// left to right then the lower branch back, so bounded ovals close up.
void append_level_set(Table& table, const Model& model, double mu, double level, int resolution);
Table level_sets(const Model& model, double mu, const std::vector<double>& levels, int resolution = 801);

struct FigureParams {
  double g = 0.1;
  double a = 0.4;
  double n0 = 0.1;
  double n1 = 10.0;
  double pbar0 = 0.07;
  double p0 = 0.1;
  int resolution = 801;
};

/// Caption parameters of figure k in 1..5.
FigureParams figure_defaults(int k);

/// Data for figure k. Throws InvalidArgument for k outside 1..5 and passes
/// model errors through.
Table figure(int k, const FigureParams& fp);

}  // namespace nagumo::figures
