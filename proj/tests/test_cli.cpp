#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kBin = FERMIFLUX_CLI_BIN;
const std::filesystem::path kScenarioDir = FERMIFLUX_SCENARIO_DIR;

int run_cmd(const std::string& args, std::string* output = nullptr) {
    const auto tmp = std::filesystem::temp_directory_path() / "fermiflux_cli_out.txt";
    const std::string cmd = kBin + " " + args + " > " + tmp.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(tmp);
        std::ostringstream os;
        os << in.rdbuf();
        *output = os.str();
    }
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("cli run: flows-check scenario succeeds and writes a summary") {
    const auto dir = std::filesystem::temp_directory_path() / "fermiflux_cli_slot";
    std::filesystem::remove_all(dir);
    std::string out;
    const int rc = run_cmd("run --scenario " + (kScenarioDir / "slot_example.scenario").string() +
                               " --out " + dir.string(),
                           &out);
    CHECK(rc == 0);
    CHECK(out.find("sigma") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "summary.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli equilibrium: prints the two numbers") {
    std::string out;
    const int rc = run_cmd(
        "equilibrium --scenario " + (kScenarioDir / "fig1.scenario").string(), &out);
    CHECK(rc == 0);
    CHECK(out.find("T_eq = 1.5434446373") != std::string::npos);
    CHECK(out.find("mu_eq = 18.4034053738") != std::string::npos);
}

TEST_CASE("cli: validation failures exit with code 2") {
    const auto bad = std::filesystem::temp_directory_path() / "fermiflux_bad.scenario";
    {
        std::ofstream f(bad);
        f << "name = bad\n[system]\nmodes = 21.1\n[reservoir]\ntemperature = -1\n"
             "chemical_potential = 16\n[reservoir]\ntemperature = 1\nchemical_potential = 16\n";
    }
    std::string out;
    const int rc = run_cmd("run --scenario " + bad.string() + " --out /tmp/fermiflux_bad_out",
                           &out);
    CHECK(rc == 2);
    CHECK(out.find("reservoir 1") != std::string::npos);
    std::filesystem::remove(bad);

    const int rc2 = run_cmd("run --scenario /nonexistent.scenario --out /tmp/x", &out);
    CHECK(rc2 == 2);
}

TEST_CASE("cli run: overrides apply and a fast dynamics run completes") {
    const auto scenario = std::filesystem::temp_directory_path() / "fermiflux_fast.scenario";
    {
        std::ofstream f(scenario);
        f << "name = fast\n[system]\nmodes = 21.1 21.5\n"
             "[integration]\nt_end = 1e9\nsamples = 50\n"
             "[reservoir]\ntemperature = 0.6\nchemical_potential = 20.8\n"
             "gamma_amplitude = 1e-2\n"
             "[reservoir]\ntemperature = 1.0\nchemical_potential = 16.0\n"
             "gamma_amplitude = 1e-2\n";
    }
    const auto dir = std::filesystem::temp_directory_path() / "fermiflux_cli_fast";
    std::filesystem::remove_all(dir);
    std::string out;
    const int rc = run_cmd("run --scenario " + scenario.string() + " --out " + dir.string() +
                               " --samples 20 --plots",
                           &out);
    CHECK(rc == 0);
    CHECK(std::filesystem::exists(dir / "trajectory.csv"));
    CHECK(std::filesystem::exists(dir / "plot_T.svg"));
    // 20 sample rows + header
    std::ifstream csv(dir / "trajectory.csv");
    int lines = 0;
    std::string line;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == 21);
    std::filesystem::remove_all(dir);
    std::filesystem::remove(scenario);
}

TEST_CASE("cli verify: small run passes and honors the seed variable") {
    std::string out;
    const int rc = run_cmd("verify --states 200", &out);
    CHECK(rc == 0);
    CHECK(out.find("seed 20260810") != std::string::npos);
    CHECK(out.find("[ok]") != std::string::npos);
    CHECK(out.find("[FAIL]") == std::string::npos);

    // FERMIFLUX_SEED is read from the environment
    const std::string cmd = "FERMIFLUX_SEED=42 " + kBin + " verify --states 50 > " +
                            (std::filesystem::temp_directory_path() / "fermiflux_cli_out.txt")
                                .string() +
                            " 2>&1";
    const int rc2 = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc2 == 0);
    std::ifstream in(std::filesystem::temp_directory_path() / "fermiflux_cli_out.txt");
    std::ostringstream os;
    os << in.rdbuf();
    CHECK(os.str().find("seed 42") != std::string::npos);
}
