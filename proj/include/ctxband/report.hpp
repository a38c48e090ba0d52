#pragma once

// Report emission: JSON summaries, CSV tables and static SVG line charts.
// Output contains no timestamps or host data, so identical inputs give
// byte-identical files. Indices are written 1-based.

#include "ctxband/allocation.hpp"
#include "ctxband/harness.hpp"

#include "json.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ctxband {

nlohmann::json report_to_json(const RegretReport& report);
nlohmann::json budget_solution_to_json(const BudgetSolution& solution);

/// run,seed,regret,active_rounds,tau1,tau2
void write_per_run_csv(std::ostream& out, const RegretReport& report);

/// <x_name>,mean_regret,ci_halfwidth,runs
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points, const std::string& x_name);

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> ci; // optional half-widths, drawn as a band
};

void write_svg_line_chart(std::ostream& out, const LineChart& chart);

LineChart sweep_chart(std::span<const SweepPoint> points, const std::string& title, const std::string& x_label);

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

} // namespace ctxband
