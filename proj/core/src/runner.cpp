#include "fermiflux/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fermiflux/equilibrium.hpp"

namespace fermiflux {

namespace {

double ascending_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

std::string sanitize_csv(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ';';
    return s;
}

}  // namespace

RunResult run_scenario_in_memory(const Scenario& sc) {
    const auto wall0 = std::chrono::steady_clock::now();
    RunResult out;
    RunSummary& s = out.summary;
    s.scenario = sc.name;

    if (sc.flows_check) {
        s.flows_check = true;
        const auto& fc = *sc.flows_check;
        s.heat_flow_sum = ascending_sum(fc.heat_flows);
        std::vector<double> terms(fc.heat_flows.size());
        for (std::size_t j = 0; j < terms.size(); ++j)
            terms[j] = fc.heat_flows[j] / fc.temperatures[j];
        s.clausius_sum = ascending_sum(terms);
        s.sigma = -s.clausius_sum;
        s.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        return out;
    }

    out.trajectory = integrate(sc.system, sc.reservoirs, sc.integration);
    const Trajectory& traj = out.trajectory;
    const EquilibriumPoint eq = solve_equilibrium(sc.reservoirs);

    s.t_final = traj.t_final;
    s.reached_equilibrium = traj.reached_equilibrium;
    s.teq_solver = eq.temperature;
    s.mueq_solver = eq.chemical_potential;
    s.equilibrium_residual = eq.residual;

    const TrajectoryPoint& last = traj.steps.back();
    double b_sum = 0.0, t_mean = 0.0, mu_mean = 0.0, mismatch = 0.0;
    for (std::size_t j = 0; j < traj.n_reservoirs; ++j) {
        const double b = sc.reservoirs[j].geometry.prefactor;
        b_sum += b;
        t_mean += b * last.temperature[j];
        mu_mean += b * last.chemical_potential[j];
        mismatch = std::max(
            {mismatch, std::abs(last.temperature[j] - eq.temperature) / eq.temperature,
             std::abs(last.chemical_potential[j] - eq.chemical_potential) /
                 std::abs(eq.chemical_potential)});
    }
    s.teq_trajectory = t_mean / b_sum;
    s.mueq_trajectory = mu_mean / b_sum;
    s.trajectory_vs_solver = mismatch;
    s.coldest_reservoir = traj.coldest + 1;
    s.min_cold_ratio = traj.min_cold_ratio;

    const TrajectoryPoint& first = traj.steps.front();
    s.drift_n = std::abs(last.total_n - first.total_n) / first.total_n;
    s.drift_e = std::abs(last.total_e - first.total_e) / first.total_e;
    s.sigma_initial = first.flows.sigma;
    s.sigma_final = last.flows.sigma;
    s.min_sigma = first.flows.sigma;
    for (const auto& p : traj.steps) s.min_sigma = std::min(s.min_sigma, p.flows.sigma);
    s.n_steps = traj.n_accepted;
    s.n_events = static_cast<int>(traj.events.size());
    s.single_mode_flagged = sc.single_mode_flagged;
    s.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return out;
}

RunSummary run_scenario(const Scenario& sc, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    RunResult res;
    try {
        res = run_scenario_in_memory(sc);
    } catch (const Error& e) {
        // flush a machine-readable record of the failure before propagating
        std::ofstream err(out_dir / "error.json");
        err << "{\n  \"scenario\": \"" << sc.name << "\",\n  \"error\": \""
            << sanitize_csv(e.what()) << "\",\n  \"exit_code\": " << e.exit_code() << "\n}\n";
        throw;
    }

    if (sc.flows_check) {
        if (sc.output.summary_json) {
            std::ofstream os(out_dir / "summary.json");
            write_summary_json(os, res.summary);
        }
        return res.summary;
    }
    if (sc.output.trajectory_csv) {
        std::ofstream os(out_dir / "trajectory.csv");
        if (!os) throw ValidationError("cannot write " + (out_dir / "trajectory.csv").string());
        write_trajectory_csv(os, sc.system, res.trajectory);
    }
    if (sc.output.events_json) {
        std::ofstream os(out_dir / "events.json");
        write_events_json(os, res.trajectory);
    }
    if (sc.output.summary_json) {
        std::ofstream os(out_dir / "summary.json");
        write_summary_json(os, res.summary);
    }
    if (sc.output.plots) {
        std::ofstream ot(out_dir / "plot_T.svg");
        write_temperature_plot(ot, sc.system, res.trajectory, res.summary.teq_solver);
        std::ofstream om(out_dir / "plot_mu.svg");
        write_chemical_potential_plot(om, sc.system, res.trajectory, res.summary.mueq_solver);
    }
    return res.summary;
}

std::size_t SweepGrid::n_points() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
}

SweepGrid load_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open grid file: " + path.string());
    SweepGrid grid;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line;
        {
            std::istringstream is(raw);
            std::ostringstream os;
            std::string tok;
            while (is >> tok) os << tok << ' ';
            line = os.str();
        }
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'path = v1 v2 ...'");
        SweepGrid::Axis axis;
        axis.path = line.substr(0, eq);
        while (!axis.path.empty() && axis.path.back() == ' ') axis.path.pop_back();
        std::istringstream vals(line.substr(eq + 1));
        std::string tok;
        while (vals >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                      ": bad number '" + tok + "'");
            axis.values.push_back(v);
        }
        if (axis.values.empty())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": axis has no values");
        grid.axes.push_back(std::move(axis));
    }
    if (grid.axes.empty()) throw ValidationError(path.string() + ": empty grid");
    return grid;
}

void apply_scalar(Scenario& sc, const std::string& path, double value) {
    const auto bad = [&path]() -> void {
        throw ValidationError("unknown sweep path '" + path + "'");
    };
    const auto indexed = [&](const std::string& prefix, std::size_t limit) -> std::size_t {
        // parses "<prefix>[k]."; returns 0-based k
        const std::string open = prefix + "[";
        if (path.compare(0, open.size(), open) != 0) bad();
        const auto close = path.find(']', open.size());
        if (close == std::string::npos) bad();
        const long k = std::strtol(path.substr(open.size(), close - open.size()).c_str(),
                                   nullptr, 10);
        if (k < 1 || static_cast<std::size_t>(k) > limit)
            throw ValidationError("sweep path '" + path + "': index out of range");
        return static_cast<std::size_t>(k - 1);
    };

    if (path.rfind("integration.", 0) == 0) {
        const std::string field = path.substr(12);
        if (field == "rtol")
            sc.integration.rtol = value;
        else if (field == "t_end")
            sc.integration.t_end = value;
        else if (field == "samples")
            sc.integration.n_samples = static_cast<int>(value);
        else if (field == "equilibrium_threshold")
            sc.integration.equilibrium_threshold = value;
        else
            bad();
        return;
    }
    if (path.rfind("system.modes[", 0) == 0) {
        sc.system.modes[indexed("system.modes", sc.system.modes.size())] = value;
        return;
    }
    if (path == "system.unit_scale") {
        sc.system.unit_scale = value;
        return;
    }
    if (path.rfind("reservoir[", 0) == 0) {
        const std::size_t j = indexed("reservoir", sc.reservoirs.size());
        const auto dot = path.find("].");
        const std::string field = path.substr(dot + 2);
        ReservoirState& r = sc.reservoirs[j];
        if (field == "temperature")
            r.temperature = value;
        else if (field == "chemical_potential")
            r.chemical_potential = value;
        else if (field == "alpha")
            r.geometry.alpha = value;
        else if (field == "prefactor")
            r.geometry.prefactor = value;
        else if (field == "gamma_amplitude")
            r.coupling.amplitude = value;
        else if (field == "gamma_exponent")
            r.coupling.exponent = value;
        else if (field == "x_min")
            r.x_min = value;
        else
            bad();
        return;
    }
    bad();
}

int sweep(const Scenario& base, const SweepGrid& grid, const std::filesystem::path& out_dir,
          int jobs) {
    std::filesystem::create_directories(out_dir);
    const std::size_t n_points = grid.n_points();
    if (n_points == 0) throw ValidationError("sweep grid has no points");

    struct Row {
        std::vector<double> values;
        bool ok = false;
        std::string error;
        RunSummary summary;
    };
    std::vector<Row> rows(n_points);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= n_points) return;
            Row& row = rows[idx];
            Scenario sc = base;
            std::size_t rem = idx;
            for (const auto& axis : grid.axes) {
                const double v = axis.values[rem % axis.values.size()];
                rem /= axis.values.size();
                row.values.push_back(v);
            }
            try {
                for (std::size_t a = 0; a < grid.axes.size(); ++a)
                    apply_scalar(sc, grid.axes[a].path, row.values[a]);
                char suffix[32];
                std::snprintf(suffix, sizeof(suffix), "point_%04zu", idx);
                sc.name += std::string("_") + suffix;
                sc.validate();
                row.summary = run_scenario(sc, out_dir / suffix);
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int n_workers = std::max(1, std::min<int>(jobs > 0 ? jobs : hw,
                                                    static_cast<int>(n_points)));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ofstream csv(out_dir / "sweep.csv");
    csv << "point";
    for (const auto& axis : grid.axes) csv << ',' << axis.path;
    csv << ",status,error,t_final,T_eq,mu_eq,min_cold_ratio,sigma_final,drift_N,drift_E,"
           "steps,events,wall_seconds\n";
    int failures = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const Row& row = rows[i];
        csv << i;
        for (const double v : row.values) csv << ',' << format_g17(v);
        if (row.ok) {
            const RunSummary& s = row.summary;
            csv << ",ok,," << format_g17(s.t_final) << ',' << format_g17(s.teq_solver) << ','
                << format_g17(s.mueq_solver) << ',' << format_g17(s.min_cold_ratio) << ','
                << format_g17(s.sigma_final) << ',' << format_g17(s.drift_n) << ','
                << format_g17(s.drift_e) << ',' << s.n_steps << ',' << s.n_events << ','
                << format_g17(s.wall_seconds) << "\n";
        } else {
            ++failures;
            csv << ",error," << sanitize_csv(row.error) << ",,,,,,,,,,\n";
        }
    }
    return failures;
}

}  // namespace fermiflux
