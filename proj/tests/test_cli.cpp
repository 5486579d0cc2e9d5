#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

#ifndef GMCF_CLI_PATH
#define GMCF_CLI_PATH "gmcf"
#endif

int run_cli(const std::string& args, const fs::path& dir) {
    fs::create_directories(dir);
    const std::string cmd = std::string(GMCF_CLI_PATH) + " " + args + " --out " + dir.string() +
                            " > " + (dir / "stdout.txt").string() + " 2> " +
                            (dir / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const fs::path kRoot = fs::temp_directory_path() / "gmcf_cli_tests";

} // namespace

TEST_CASE("profile subcommand: outputs and exit codes") {
    const auto dir = kRoot / "profile_ok";
    CHECK(run_cli("profile --n 2 --alpha 1 --b -1 --c 1", dir) == 0);
    CHECK(fs::exists(dir / "profile.csv"));
    CHECK(fs::exists(dir / "profile.json"));
    CHECK(fs::exists(dir / "profile.plt"));
    const std::string js = slurp(dir / "profile.json");
    CHECK(js.find("\"r_inf\"") != std::string::npos);
    CHECK(js.find("schema_version") != std::string::npos);

    // rejected regime: negative curvature without odd alpha
    CHECK(run_cli("profile --n 2 --alpha 0.5 --b 5 --c 3", kRoot / "profile_bad") == 2);
}

TEST_CASE("speed subcommand: golden value and rejection message") {
    const auto dir = kRoot / "speed_ok";
    CHECK(run_cli("speed --n 2 --alpha 1 --b 0 --k 1", dir) == 0);
    const std::string out = slurp(dir / "stdout.txt");
    CHECK(out.find("1.675189068") != std::string::npos);

    const auto bad = kRoot / "speed_bad";
    CHECK(run_cli("speed --n 2 --alpha 1 --b -8 --k 1", bad) == 2);
    CHECK(slurp(bad / "stderr.txt").find("(-b)^(1/alpha)") != std::string::npos);
}

TEST_CASE("evolve subcommand: compatibility failure is exit 2") {
    const auto dir = kRoot / "evolve_ts";
    CHECK(run_cli("evolve --preset ts --n 2 --alpha 1 --b 3 --k 1 --grid 96 --t-final 0.2", dir) ==
          0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "convergence.json"));
    CHECK(fs::exists(dir / "estimates.json"));

    // incompatible endpoint slope in a u0 file
    const auto bad = kRoot / "evolve_bad";
    fs::create_directories(bad);
    {
        std::ofstream u0(bad / "u0.csv");
        u0 << "u\n";
        for (int i = 0; i <= 96; ++i) u0 << (static_cast<double>(i) / 96) << "\n";  // u = r
    }
    CHECK(run_cli("evolve --u0 " + (bad / "u0.csv").string() + " --n 2 --alpha 1 --b 3 --k 1",
                  bad) == 2);
}

TEST_CASE("sweep subcommand: monotone radius column, empty grid rejected") {
    const auto dir = kRoot / "sweep_c";
    CHECK(run_cli("sweep --var c --from 0.2 --to 4 --count 12 --b -1 --n 2 --alpha 1", dir) == 0);
    std::ifstream in(dir / "sweep.csv");
    std::string line;
    std::getline(in, line);  // header
    double prev = 1e300;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
        const double r_inf = std::stod(line.substr(c1 + 1 + (c2 - c1 - 1) + 1));
        CHECK(r_inf < prev);
        prev = r_inf;
        ++rows;
    }
    CHECK(rows == 12);

    CHECK(run_cli("sweep --var c --count 0", kRoot / "sweep_empty") == 2);
}

TEST_CASE("byte-identical outputs for identical config and seed") {
    // identical config means the same relative out dir; vary only the cwd
    const auto p1 = kRoot / "det1";
    const auto p2 = kRoot / "det2";
    fs::create_directories(p1);
    fs::create_directories(p2);
    auto run_in = [&](const fs::path& parent) {
        const std::string cmd = "cd " + parent.string() + " && " + GMCF_CLI_PATH +
                                " profile --n 3 --alpha 2 --b -0.5 --c 1.25 --seed 7 --out out"
                                " > stdout.txt 2> stderr.txt";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    CHECK(run_in(p1) == 0);
    CHECK(run_in(p2) == 0);
    CHECK(slurp(p1 / "out/profile.csv") == slurp(p2 / "out/profile.csv"));
    CHECK(slurp(p1 / "out/profile.json") == slurp(p2 / "out/profile.json"));
    CHECK(!slurp(p1 / "out/profile.csv").empty());
}

TEST_CASE("config file values with flag overrides") {
    const auto dir = kRoot / "cfg";
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "run.json");
        cfg << R"({"dim": 2, "alpha": 1.0, "b": -1.0, "k": 1.0})";
    }
    // flag --b overrides the file; file supplies the rest
    CHECK(run_cli("speed --config " + (dir / "run.json").string() + " --b 0", dir) == 0);
    const std::string js = slurp(dir / "speed.json");
    CHECK(js.find("\"b\": 0.0") != std::string::npos);
    CHECK(js.find("\"case\": \"a\"") != std::string::npos);
}
