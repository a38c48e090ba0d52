#include "ctxband/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace ctxband {

using nlohmann::json;

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

json report_to_json(const RegretReport& report) {
    json runs = json::array();
    for (std::size_t r = 0; r < report.records.size(); ++r) {
        const auto& rec = report.records[r];
        const auto& ep = rec.episode;
        std::vector<std::size_t> recs;
        for (auto a : ep.recommendations) recs.push_back(a + 1);
        json entry;
        entry["run"] = r + 1;
        entry["seed"] = ep.seed;
        entry["regret"] = rec.regret;
        entry["recommendations"] = recs;
        entry["context_counts"] = ep.context_counts;
        entry["active_rounds"] = ep.active_round_count;
        entry["tau1"] = ep.eetc_tau1 ? json(*ep.eetc_tau1) : json(nullptr);
        entry["tau2"] = ep.eetc_tau2 ? json(*ep.eetc_tau2) : json(nullptr);
        runs.push_back(std::move(entry));
    }
    json doc;
    doc["mean_regret"] = report.mean_regret;
    doc["ci_halfwidth"] = report.ci_halfwidth;
    doc["runs"] = report.runs;
    doc["per_run_regrets"] = report.per_run_regrets;
    doc["episodes"] = std::move(runs);
    doc["config"] = report.config_echo;
    return doc;
}

json budget_solution_to_json(const BudgetSolution& solution) {
    std::vector<std::size_t> binding;
    for (auto j : solution.binding_set) binding.push_back(j + 1);
    json doc;
    doc["alpha"] = solution.budget;
    doc["allocation"] = std::vector<double>(solution.allocation.proportions().begin(),
                                            solution.allocation.proportions().end());
    doc["threshold"] = solution.threshold;
    doc["objective_value"] = solution.objective_value;
    doc["binding_set"] = binding;
    return doc;
}

void write_per_run_csv(std::ostream& out, const RegretReport& report) {
    out << "run,seed,regret,active_rounds,tau1,tau2\n";
    for (std::size_t r = 0; r < report.records.size(); ++r) {
        const auto& rec = report.records[r];
        out << r + 1 << ',' << rec.episode.seed << ',' << format_number(rec.regret) << ','
            << rec.episode.active_round_count << ',';
        if (rec.episode.eetc_tau1) out << *rec.episode.eetc_tau1;
        out << ',';
        if (rec.episode.eetc_tau2) out << *rec.episode.eetc_tau2;
        out << '\n';
    }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points, const std::string& x_name) {
    out << x_name << ",mean_regret,ci_halfwidth,runs\n";
    for (const auto& pt : points)
        out << format_number(pt.x) << ',' << format_number(pt.report.mean_regret) << ','
            << format_number(pt.report.ci_halfwidth) << ',' << pt.report.runs << '\n';
}

LineChart sweep_chart(std::span<const SweepPoint> points, const std::string& title, const std::string& x_label) {
    LineChart chart{title, x_label, "simple regret", {}, {}, {}};
    for (const auto& pt : points) {
        chart.x.push_back(pt.x);
        chart.y.push_back(pt.report.mean_regret);
        chart.ci.push_back(pt.report.ci_halfwidth);
    }
    return chart;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

} // namespace

void write_svg_line_chart(std::ostream& out, const LineChart& chart) {
    constexpr double width = 640, height = 420;
    constexpr double left = 80, right = 20, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const bool has_ci = chart.ci.size() == chart.y.size();
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    if (!chart.x.empty()) {
        x_lo = *std::min_element(chart.x.begin(), chart.x.end());
        x_hi = *std::max_element(chart.x.begin(), chart.x.end());
        y_lo = INFINITY;
        y_hi = -INFINITY;
        for (std::size_t i = 0; i < chart.y.size(); ++i) {
            const double band = has_ci ? chart.ci[i] : 0.0;
            y_lo = std::min(y_lo, chart.y[i] - band);
            y_hi = std::max(y_hi, chart.y[i] + band);
        }
        y_lo = std::min(y_lo, 0.0);
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1;
    if (y_hi <= y_lo) y_hi = y_lo + 1;

    auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
        << escape_xml(chart.title) << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / 4.0;
        const double fy = y_lo + (y_hi - y_lo) * i / 4.0;
        out << "<text x=\"" << fixed(sx(fx), 1) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(fx) << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << fixed(sy(fy) + 4, 1)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fixed(fy, 4) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(chart.x_label)
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">" << escape_xml(chart.y_label)
        << "</text>\n";

    if (has_ci && !chart.x.empty()) {
        out << "<polygon fill=\"steelblue\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < chart.x.size(); ++i)
            out << fixed(sx(chart.x[i]), 2) << ',' << fixed(sy(chart.y[i] + chart.ci[i]), 2) << ' ';
        for (std::size_t i = chart.x.size(); i-- > 0;)
            out << fixed(sx(chart.x[i]), 2) << ',' << fixed(sy(chart.y[i] - chart.ci[i]), 2) << ' ';
        out << "\"/>\n";
    }
    if (!chart.x.empty()) {
        out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < chart.x.size(); ++i)
            out << fixed(sx(chart.x[i]), 2) << ',' << fixed(sy(chart.y[i]), 2) << ' ';
        out << "\"/>\n";
        for (std::size_t i = 0; i < chart.x.size(); ++i)
            out << "<circle cx=\"" << fixed(sx(chart.x[i]), 2) << "\" cy=\"" << fixed(sy(chart.y[i]), 2)
                << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace ctxband
