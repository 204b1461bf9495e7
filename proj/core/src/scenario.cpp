#include "fermiflux/scenario.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fermiflux/output.hpp"

namespace fermiflux {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << message;
    throw ValidationError(os.str());
}

double parse_double(const std::string& origin, int line, const std::string& key,
                    const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        fail(origin, line, "key '" + key + "': cannot parse number from '" + value + "'");
    return v;
}

std::vector<double> parse_list(const std::string& origin, int line, const std::string& key,
                               const std::string& value) {
    std::vector<double> out;
    std::istringstream is(value);
    std::string tok;
    while (is >> tok) out.push_back(parse_double(origin, line, key, tok));
    if (out.empty()) fail(origin, line, "key '" + key + "': empty list");
    return out;
}

bool parse_bool(const std::string& origin, int line, const std::string& key,
                const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    fail(origin, line, "key '" + key + "': expected true or false, got '" + value + "'");
}

long parse_long(const std::string& origin, int line, const std::string& key,
                const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        fail(origin, line, "key '" + key + "': cannot parse integer from '" + value + "'");
    return v;
}

struct ReservoirDraft {
    ReservoirState state;
    bool has_gamma_exponent = false;
    int line = 0;
};

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& origin) {
    Scenario sc;
    std::vector<ReservoirDraft> drafts;
    SlotArithmeticCheck slot;
    bool saw_system = false, saw_flows_check = false, saw_name = false;

    std::string section;          // current [section]
    int section_line = 0;
    ReservoirDraft* current = nullptr;

    std::istringstream stream{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(stream, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            section_line = lineno;
            current = nullptr;
            if (section == "system") {
                if (saw_system) fail(origin, lineno, "duplicate [system] section");
                saw_system = true;
            } else if (section == "reservoir") {
                drafts.emplace_back();
                drafts.back().line = lineno;
                current = &drafts.back();
            } else if (section == "flows_check") {
                if (saw_flows_check) fail(origin, lineno, "duplicate [flows_check] section");
                saw_flows_check = true;
            } else if (section != "integration" && section != "output") {
                fail(origin, lineno, "unknown section [" + section + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(origin, lineno, "empty key");
        if (value.empty()) fail(origin, lineno, "key '" + key + "': empty value");

        if (section.empty()) {
            if (key == "name") {
                sc.name = value;
                saw_name = true;
            } else {
                fail(origin, lineno, "unknown top-level key '" + key + "'");
            }
        } else if (section == "system") {
            if (key == "modes")
                sc.system.modes = parse_list(origin, lineno, key, value);
            else if (key == "unit_scale")
                sc.system.unit_scale = parse_double(origin, lineno, key, value);
            else
                fail(origin, lineno, "unknown key '" + key + "' in section [system]");
        } else if (section == "integration") {
            if (key == "rtol")
                sc.integration.rtol = parse_double(origin, lineno, key, value);
            else if (key == "t_end")
                sc.integration.t_end = parse_double(origin, lineno, key, value);
            else if (key == "samples")
                sc.integration.n_samples =
                    static_cast<int>(parse_long(origin, lineno, key, value));
            else if (key == "equilibrium_threshold")
                sc.integration.equilibrium_threshold = parse_double(origin, lineno, key, value);
            else if (key == "max_steps")
                sc.integration.max_steps = parse_long(origin, lineno, key, value);
            else
                fail(origin, lineno, "unknown key '" + key + "' in section [integration]");
        } else if (section == "output") {
            if (key == "trajectory_csv")
                sc.output.trajectory_csv = parse_bool(origin, lineno, key, value);
            else if (key == "events_json")
                sc.output.events_json = parse_bool(origin, lineno, key, value);
            else if (key == "summary_json")
                sc.output.summary_json = parse_bool(origin, lineno, key, value);
            else if (key == "plots")
                sc.output.plots = parse_bool(origin, lineno, key, value);
            else
                fail(origin, lineno, "unknown key '" + key + "' in section [output]");
        } else if (section == "reservoir") {
            ReservoirState& r = current->state;
            if (key == "temperature")
                r.temperature = parse_double(origin, lineno, key, value);
            else if (key == "chemical_potential")
                r.chemical_potential = parse_double(origin, lineno, key, value);
            else if (key == "alpha")
                r.geometry.alpha = parse_double(origin, lineno, key, value);
            else if (key == "prefactor")
                r.geometry.prefactor = parse_double(origin, lineno, key, value);
            else if (key == "gamma_amplitude")
                r.coupling.amplitude = parse_double(origin, lineno, key, value);
            else if (key == "gamma_exponent") {
                r.coupling.exponent = parse_double(origin, lineno, key, value);
                current->has_gamma_exponent = true;
            } else if (key == "x_min")
                r.x_min = parse_double(origin, lineno, key, value);
            else
                fail(origin, lineno, "unknown key '" + key + "' in section [reservoir]");
        } else if (section == "flows_check") {
            if (key == "heat_flows")
                slot.heat_flows = parse_list(origin, lineno, key, value);
            else if (key == "temperatures")
                slot.temperatures = parse_list(origin, lineno, key, value);
            else
                fail(origin, lineno, "unknown key '" + key + "' in section [flows_check]");
        }
    }

    if (!saw_name) fail(origin, 1, "missing top-level 'name' key");
    if (saw_flows_check) {
        if (saw_system || !drafts.empty())
            fail(origin, section_line,
                 "[flows_check] scenarios cannot also define [system] or [reservoir] sections");
        sc.flows_check = std::move(slot);
    } else {
        if (!saw_system) fail(origin, 1, "missing [system] section");
        for (std::size_t j = 0; j < drafts.size(); ++j) {
            if (!drafts[j].has_gamma_exponent)  // caption convention: exponent alpha - 1
                drafts[j].state.coupling.exponent = drafts[j].state.geometry.alpha - 1.0;
            sc.reservoirs.push_back(drafts[j].state);
        }
    }

    try {
        sc.validate();
    } catch (const Error& e) {
        // locate reservoir-level complaints for the diagnostics
        std::string msg = e.what();
        for (std::size_t j = 0; j < drafts.size(); ++j) {
            try {
                drafts[j].state.validate();
            } catch (const Error& re) {
                std::ostringstream os;
                os << origin << ":" << drafts[j].line << ": reservoir " << (j + 1) << ": "
                   << re.what();
                throw ValidationError(os.str());
            }
        }
        throw ValidationError(origin + ": " + msg);
    }
    return sc;
}

void Scenario::validate() {
    if (name.empty()) throw ValidationError("scenario name must not be empty");
    if (flows_check) {
        const auto& fc = *flows_check;
        if (fc.heat_flows.empty() || fc.heat_flows.size() != fc.temperatures.size())
            throw ValidationError(
                "flows_check: heat_flows and temperatures must be non-empty and equal length");
        for (double t : fc.temperatures)
            if (!(t > 0.0)) throw ValidationError("flows_check: temperatures must be positive");
        return;
    }
    system.validate();
    if (reservoirs.size() < 2)
        throw ValidationError("scenario needs at least two [reservoir] sections");
    for (auto& r : reservoirs) r.validate();
    integration.validate();
    single_mode_flagged = !system.has_two_distinct_modes();
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream os;
    os << "name = " << sc.name << "\n";
    if (sc.flows_check) {
        os << "\n[flows_check]\n";
        os << "heat_flows =";
        for (double v : sc.flows_check->heat_flows) os << ' ' << format_g17(v);
        os << "\ntemperatures =";
        for (double v : sc.flows_check->temperatures) os << ' ' << format_g17(v);
        os << "\n";
        return os.str();
    }
    os << "\n[system]\n";
    os << "modes =";
    for (double v : sc.system.modes) os << ' ' << format_g17(v);
    os << "\n";
    os << "unit_scale = " << format_g17(sc.system.unit_scale) << "\n";
    os << "\n[integration]\n";
    os << "rtol = " << format_g17(sc.integration.rtol) << "\n";
    os << "t_end = " << format_g17(sc.integration.t_end) << "\n";
    os << "samples = " << sc.integration.n_samples << "\n";
    os << "equilibrium_threshold = " << format_g17(sc.integration.equilibrium_threshold)
       << "\n";
    os << "max_steps = " << sc.integration.max_steps << "\n";
    os << "\n[output]\n";
    os << "trajectory_csv = " << (sc.output.trajectory_csv ? "true" : "false") << "\n";
    os << "events_json = " << (sc.output.events_json ? "true" : "false") << "\n";
    os << "summary_json = " << (sc.output.summary_json ? "true" : "false") << "\n";
    os << "plots = " << (sc.output.plots ? "true" : "false") << "\n";
    for (const auto& r : sc.reservoirs) {
        os << "\n[reservoir]\n";
        os << "temperature = " << format_g17(r.temperature) << "\n";
        os << "chemical_potential = " << format_g17(r.chemical_potential) << "\n";
        os << "alpha = " << format_g17(r.geometry.alpha) << "\n";
        os << "prefactor = " << format_g17(r.geometry.prefactor) << "\n";
        os << "gamma_amplitude = " << format_g17(r.coupling.amplitude) << "\n";
        os << "gamma_exponent = " << format_g17(r.coupling.exponent) << "\n";
        os << "x_min = " << format_g17(r.x_min) << "\n";
    }
    return os.str();
}

}  // namespace fermiflux
