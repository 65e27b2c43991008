#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string kCli = SRXBAR_CLI_PATH;
const fs::path kSourceDir = SRXBAR_SOURCE_DIR;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    const fs::path out_path = fs::temp_directory_path() / "srxbar_cli_stdout.txt";
    const fs::path err_path = fs::temp_directory_path() / "srxbar_cli_stderr.txt";
    const std::string cmd =
        kCli + " " + args + " >" + out_path.string() + " 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    fs::remove(out_path);
    fs::remove(err_path);
    return r;
}

fs::path write_small_config() {
    const fs::path path = fs::temp_directory_path() / "srxbar_cli_small.cfg";
    std::ofstream out(path);
    out << "[experiment]\nkind = rce\ntrials = 4\nseed = 5\n"
        << "[crossbar]\nrows = 3\ncols = 2\n"
        << "[device]\nr_on_ohm = 1e3\nr_off_ohm = 1e5\nplacement = log_conductance\n"
        << "[node]\nm_list = 1,2\nL_list = 2,3\n";
    return path;
}

}  // namespace

TEST_CASE("missing --config exits 2 with usage") {
    const RunResult r = run_cli("rce");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--config") != std::string::npos);
}

TEST_CASE("unknown subcommands and flags exit 2") {
    CHECK(run_cli("frobnicate --config x").exit_code == 2);
    CHECK(run_cli("rce --config x --bogus-flag").exit_code == 2);
}

TEST_CASE("a missing config file exits 2") {
    const RunResult r = run_cli("rce --config /nonexistent/nope.cfg");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
}

TEST_CASE("config syntax errors exit 2 and carry the line number") {
    const fs::path path = fs::temp_directory_path() / "srxbar_cli_broken.cfg";
    {
        std::ofstream out(path);
        out << "[experiment]\nkind = rce\nwibble = 3\n";
    }
    const RunResult r = run_cli("rce --config " + path.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find(":3:") != std::string::npos);
    fs::remove(path);
}

TEST_CASE("--out - streams the CSV to stdout") {
    const fs::path cfg = write_small_config();
    const RunResult r = run_cli("rce --config " + cfg.string() + " --out -");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("# srxbar", 0) == 0);
    CHECK(r.out.find("m,L,L_C,trial,column,rce_percent") != std::string::npos);

    const RunResult levels = run_cli("levels --config " + cfg.string() + " --out -");
    CHECK(levels.exit_code == 0);
    CHECK(levels.out.rfind("# srxbar", 0) == 0);
    CHECK(levels.out.find("m,L,L_C,effective_count") != std::string::npos);
    fs::remove(cfg);
}

TEST_CASE("help exits 0") {
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("reruns and thread counts leave the output bytes unchanged") {
    const fs::path cfg = write_small_config();
    const fs::path out1 = fs::temp_directory_path() / "srxbar_cli_a.csv";
    const fs::path out2 = fs::temp_directory_path() / "srxbar_cli_b.csv";

    CHECK(run_cli("rce --config " + cfg.string() + " --out " + out1.string() + " --quiet")
              .exit_code == 0);
    CHECK(run_cli("rce --config " + cfg.string() + " --out " + out2.string() +
                  " --threads 4 --quiet")
              .exit_code == 0);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(out1);
    const std::string b = slurp(out2);
    CHECK(!a.empty());
    CHECK(a == b);

    // seed override must change the data
    CHECK(run_cli("rce --config " + cfg.string() + " --out " + out2.string() +
                  " --seed 99 --quiet")
              .exit_code == 0);
    CHECK(slurp(out2) != a);

    fs::remove(cfg);
    fs::remove(out1);
    fs::remove(out2);
}

TEST_CASE("the bundled mapdump config emits the programming table") {
    const fs::path cfg = kSourceDir / "configs" / "mapdump.cfg";
    const RunResult r = run_cli("mapdump --config " + cfg.string() + " --out -");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("g_1,g_2,g_3,g_n,w_realized") != std::string::npos);
    CHECK(r.out.find("10,10,10,30,") != std::string::npos);
    CHECK(r.out.find("1000,1000,1000,3000,") != std::string::npos);
}
