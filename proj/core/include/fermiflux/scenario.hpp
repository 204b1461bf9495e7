#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fermiflux/dynamics.hpp"
#include "fermiflux/types.hpp"

namespace fermiflux {

struct OutputSelection {
    bool trajectory_csv = true;
    bool events_json = true;
    bool summary_json = true;
    bool plots = false;
};

/// Pure flows check: given heat flows and temperatures, verify the Clausius
/// arithmetic without integrating anything.
struct SlotArithmeticCheck {
    std::vector<double> heat_flows;
    std::vector<double> temperatures;
};

struct Scenario {
    std::string name;
    SystemSpec system;
    std::vector<ReservoirState> reservoirs;
    IntegrationOptions integration;
    OutputSelection output;
    std::optional<SlotArithmeticCheck> flows_check;
    bool single_mode_flagged = false;

    /// Validates every module precondition; sets single_mode_flagged.
    void validate();
};

/// Parse the key-value scenario format. `origin` names the source in
/// diagnostics (file path or "<string>"); errors carry origin:line.
Scenario parse_scenario(std::string_view text, const std::string& origin);

Scenario load_scenario(const std::filesystem::path& path);

/// Emit a scenario file that load_scenario parses back to an identical value
/// (floats at 17 significant digits).
std::string serialize_scenario(const Scenario& sc);

}  // namespace fermiflux
