#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "ellctl/experiments.hpp"

namespace ellctl {

/// k, y.., y_ref.., u.., abs_err, trace_P, log_det_P, rho, beta, mode, seed
void write_run_csv(std::ostream& out, const RunRecord& record);

/// One row per window: T, e_<mode>..., ratio1, ratio2, ratio3 (blank when a
/// mode is missing).
void write_report_csv(std::ostream& out, const MetricsReport& report);

/// mode, completed, aborted, exclusion_flag
void write_run_counts_csv(std::ostream& out, const MetricsReport& report);

/// k, J_<mode>[_<channel>]...
void write_cost_csv(std::ostream& out, const MetricsReport& report);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal static line chart.
void write_svg_plot(std::ostream& out, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series);

}  // namespace ellctl
