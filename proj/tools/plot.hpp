#pragma once

#include <string>
#include <vector>

#include "whitelasso/csv.hpp"

namespace whitelasso::cli {

struct ChartSpec {
  std::string metric = "mean_l2_scaled";  // mean_l2_scaled, mean_linf or sign_rate
  bool bands = true;                      // dashed ci_lo_l2 / ci_hi_l2 lines
};

// Columns the chart needs that `table` lacks, in a fixed order.
std::vector<std::string> missing_columns(const CsvTable& table, const ChartSpec& spec);

struct Figure {
  std::string name;  // file stem, e.g. "mean_l2_scaled_p128_rho0.9"
  std::string svg;
};

// One figure per (p, rho) panel plus one grid per p with a panel per rho.
// Series are estimators in first-appearance order, x is n. Output depends only
// on the table contents.
std::vector<Figure> render_charts(const CsvTable& table, const ChartSpec& spec);

}  // namespace whitelasso::cli
