#include "fermiflux/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include <json.hpp>

namespace fermiflux {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const SystemSpec& sys, const Trajectory& traj) {
    const std::size_t n = traj.n_reservoirs;
    os << "t";
    for (std::size_t j = 1; j <= n; ++j)
        os << ",T_" << j << ",mu_" << j << ",x_" << j << ",J_" << j << ",P_" << j << ",Y_"
           << j;
    os << ",sigma,sum_N,sum_E";
    for (std::size_t a = 1; a <= n; ++a)
        for (std::size_t b = a + 1; b <= n; ++b) os << ",omega_tilde_" << a << "_" << b;
    os << "\n";
    for (const auto& p : traj.samples) {
        os << format_g17(p.time);
        for (std::size_t j = 0; j < n; ++j)
            os << ',' << format_g17(p.temperature[j]) << ',' << format_g17(p.chemical_potential[j])
               << ',' << format_g17(p.x[j]) << ',' << format_g17(p.flows.energy[j]) << ','
               << format_g17(p.flows.particle[j]) << ',' << format_g17(p.flows.heat[j]);
        os << ',' << format_g17(p.flows.sigma) << ',' << format_g17(p.total_n) << ','
           << format_g17(p.total_e);
        for (const double w : p.crossover) os << ',' << format_g17(w);
        os << "\n";
    }
}

void write_events_json(std::ostream& os, const Trajectory& traj) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : traj.events) {
        nlohmann::json item = {{"kind", to_string(e.kind)},
                               {"time", e.time},
                               {"reservoirs", {e.first + 1, e.second + 1}},
                               {"T", {e.temperature_first, e.temperature_second}},
                               {"mu", {e.mu_first, e.mu_second}}};
        if (std::isfinite(e.crossover)) item["omega_tilde"] = e.crossover;
        arr.push_back(item);
    }
    os << arr.dump(2) << "\n";
}

void write_summary_json(std::ostream& os, const RunSummary& s) {
    nlohmann::json j;
    j["scenario"] = s.scenario;
    j["flows_check"] = s.flows_check;
    if (s.flows_check) {
        j["heat_flow_sum"] = s.heat_flow_sum;
        j["clausius_sum"] = s.clausius_sum;
        j["sigma"] = s.sigma;
        j["wall_seconds"] = s.wall_seconds;
        os << j.dump(2) << "\n";
        return;
    }
    j["t_final"] = s.t_final;
    j["reached_equilibrium"] = s.reached_equilibrium;
    j["T_eq_solver"] = s.teq_solver;
    j["mu_eq_solver"] = s.mueq_solver;
    j["equilibrium_residual"] = s.equilibrium_residual;
    j["T_eq_trajectory"] = s.teq_trajectory;
    j["mu_eq_trajectory"] = s.mueq_trajectory;
    j["trajectory_vs_solver"] = s.trajectory_vs_solver;
    j["coldest_reservoir"] = s.coldest_reservoir;
    j["min_cold_ratio"] = s.min_cold_ratio;
    j["drift_N"] = s.drift_n;
    j["drift_E"] = s.drift_e;
    j["sigma_initial"] = s.sigma_initial;
    j["sigma_final"] = s.sigma_final;
    j["sigma_min"] = s.min_sigma;
    j["steps"] = s.n_steps;
    j["events"] = s.n_events;
    j["single_mode_flagged"] = s.single_mode_flagged;
    j["wall_seconds"] = s.wall_seconds;
    os << j.dump(2) << "\n";
}

namespace {

constexpr int kWidth = 860, kHeight = 540;
constexpr int kLeft = 72, kRight = 24, kTop = 24, kBottom = 48;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Axes {
    double x0, x1, y0, y1;

    double px(double x) const {
        return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
    }
    double py(double y) const {
        return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
    }
    bool inside_y(double y) const { return y >= y0 && y <= y1; }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    std::vector<double> ticks;
    const double span = hi - lo;
    if (!(span > 0.0)) return ticks;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(lo / step) * step; v <= hi + 0.5 * step; v += step)
        ticks.push_back(v);
    return ticks;
}

void svg_header(std::ostream& os) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void svg_axes(std::ostream& os, const Axes& ax, const std::string& xlabel,
              const std::string& ylabel) {
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
       << (kWidth - kLeft - kRight) << "\" height=\"" << (kHeight - kTop - kBottom)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    char buf[64];
    for (const double t : nice_ticks(ax.x0, ax.x1)) {
        const double x = ax.px(t);
        os << "<line x1=\"" << x << "\" y1=\"" << (kHeight - kBottom) << "\" x2=\"" << x
           << "\" y2=\"" << (kHeight - kBottom + 5) << "\" stroke=\"black\"/>\n";
        std::snprintf(buf, sizeof(buf), "%.3g", t);
        os << "<text x=\"" << x << "\" y=\"" << (kHeight - kBottom + 18)
           << "\" font-size=\"11\" text-anchor=\"middle\">" << buf << "</text>\n";
    }
    for (const double t : nice_ticks(ax.y0, ax.y1)) {
        const double y = ax.py(t);
        os << "<line x1=\"" << (kLeft - 5) << "\" y1=\"" << y << "\" x2=\"" << kLeft
           << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        std::snprintf(buf, sizeof(buf), "%.4g", t);
        os << "<text x=\"" << (kLeft - 8) << "\" y=\"" << (y + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    os << "<text x=\"" << (kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\""
       << (kHeight - 12) << "\" font-size=\"13\" text-anchor=\"middle\">" << xlabel
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << (kTop + (kHeight - kTop - kBottom) / 2)
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (kTop + (kHeight - kTop - kBottom) / 2) << ")\">" << ylabel << "</text>\n";
}

void svg_series(std::ostream& os, const Axes& ax, const std::vector<double>& ts,
                const std::vector<double>& ys, const char* color, const char* dash) {
    os << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (dash) os << " stroke-dasharray=\"" << dash << "\"";
    os << " d=\"";
    bool pen_down = false;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(ys[i]) || !ax.inside_y(ys[i])) {
            pen_down = false;
            continue;
        }
        os << (pen_down ? 'L' : 'M') << ax.px(ts[i]) << ' ' << ax.py(ys[i]) << ' ';
        pen_down = true;
    }
    os << "\"/>\n";
}

void svg_hline(std::ostream& os, const Axes& ax, double y, const char* color,
               const char* dash) {
    if (!ax.inside_y(y)) return;
    os << "<line x1=\"" << ax.px(ax.x0) << "\" y1=\"" << ax.py(y) << "\" x2=\""
       << ax.px(ax.x1) << "\" y2=\"" << ax.py(y) << "\" stroke=\"" << color
       << "\" stroke-dasharray=\"" << dash << "\"/>\n";
}

}  // namespace

void write_temperature_plot(std::ostream& os, const SystemSpec& /*sys*/,
                            const Trajectory& traj, double teq) {
    const std::size_t n = traj.n_reservoirs;
    std::vector<double> ts;
    for (const auto& p : traj.samples) ts.push_back(p.time);
    double lo = teq, hi = teq;
    for (const auto& p : traj.samples)
        for (const double v : p.temperature) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double pad = 0.06 * (hi - lo + 1e-12);
    Axes ax{0.0, std::max(traj.t_final, 1.0), lo - pad, hi + pad};

    svg_header(os);
    svg_axes(os, ax, "t  [1/T~]", "T / T~");
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> ys;
        for (const auto& p : traj.samples) ys.push_back(p.temperature[j]);
        svg_series(os, ax, ts, ys, kPalette[j % 8], nullptr);
        os << "<text x=\"" << (kWidth - kRight - 80) << "\" y=\"" << (kTop + 16 + 14 * j)
           << "\" font-size=\"12\" fill=\"" << kPalette[j % 8] << "\">T_" << (j + 1)
           << "</text>\n";
    }
    svg_hline(os, ax, teq, "#333333", "12,4,2,4");
    os << "</svg>\n";
}

void write_chemical_potential_plot(std::ostream& os, const SystemSpec& sys,
                                   const Trajectory& traj, double mueq) {
    const std::size_t n = traj.n_reservoirs;
    std::vector<double> ts;
    for (const auto& p : traj.samples) ts.push_back(p.time);
    double lo = mueq, hi = mueq;
    for (const auto& p : traj.samples)
        for (const double v : p.chemical_potential) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    for (const double w : sys.modes) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    const double pad = 0.08 * (hi - lo + 1e-12);
    Axes ax{0.0, std::max(traj.t_final, 1.0), lo - pad, hi + pad};

    svg_header(os);
    svg_axes(os, ax, "t  [1/T~]", "mu / T~");
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> ys;
        for (const auto& p : traj.samples) ys.push_back(p.chemical_potential[j]);
        svg_series(os, ax, ts, ys, kPalette[j % 8], nullptr);
        os << "<text x=\"" << (kWidth - kRight - 80) << "\" y=\"" << (kTop + 16 + 14 * j)
           << "\" font-size=\"12\" fill=\"" << kPalette[j % 8] << "\">mu_" << (j + 1)
           << "</text>\n";
    }
    // dotted crossover frequency per pair, dashed mode lines, dot-dashed asymptote
    std::size_t pair = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b, ++pair) {
            std::vector<double> ys;
            for (const auto& p : traj.samples) ys.push_back(p.crossover[pair]);
            svg_series(os, ax, ts, ys, "#555555", "2,4");
        }
    for (const double w : sys.modes) svg_hline(os, ax, w, "#777777", "8,6");
    svg_hline(os, ax, mueq, "#333333", "12,4,2,4");
    os << "</svg>\n";
}

}  // namespace fermiflux
