#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args, const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path log = dir / "stdout.txt";
    const std::string cmd = std::string(LVPP_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int st = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lvpp_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Cli, RatesGeometric) {
    const fs::path d = scratch("rates");
    const CliRun r = run("rates --case geo:2 --k 10 --out " + d.string(), d);
    ASSERT_EQ(r.code, 0) << r.out;
    const auto pos = r.out.find("final ratio ");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_NEAR(std::stod(r.out.substr(pos + 12)), 0.5, 1e-3);
    EXPECT_TRUE(fs::exists(d / "rates_geo_2.csv"));
    fs::remove_all(d);
}

TEST(Cli, ObstacleFirstIncrementAndDeterminism) {
    const fs::path a = scratch("obs_a"), b = scratch("obs_b");
    const std::string args = "obstacle --problem biactive --levels 4 --schedule dexp:1.5,1.5 --out ";
    const CliRun ra = run(args + a.string(), a);
    const CliRun rb = run(args + b.string(), b);
    ASSERT_EQ(ra.code, 0) << ra.out;
    ASSERT_EQ(rb.code, 0) << rb.out;
    const std::string csv = slurp(a / "obstacle_biactive_L4.csv");
    ASSERT_FALSE(csv.empty());
    EXPECT_EQ(csv, slurp(b / "obstacle_biactive_L4.csv"));
    EXPECT_EQ(slurp(a / "obstacle_biactive_L4_errors.csv"), slurp(b / "obstacle_biactive_L4_errors.csv"));
    std::istringstream in(csv);
    std::string line;
    double inc = -1.0;
    while (std::getline(in, line)) {
        if (line.rfind("1,", 0) != 0) continue;
        std::istringstream fields(line);
        std::string k, alpha, h1;
        std::getline(fields, k, ',');
        std::getline(fields, alpha, ',');
        std::getline(fields, h1, ',');
        inc = std::stod(h1);
        break;
    }
    EXPECT_NEAR(inc, 2.10, 0.05 * 2.10);
    EXPECT_TRUE(fs::exists(a / "obstacle_biactive_L4.vtk"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, ExitCodes) {
    const fs::path d = scratch("codes");
    EXPECT_EQ(run("obstacle --problem nope --out " + d.string(), d).code, 1);
    EXPECT_EQ(run("obstacle --schedule bogus:1 --out " + d.string(), d).code, 1);
    EXPECT_EQ(run("no-such-command", d).code, 1);
    {
        std::ofstream cfg(d / "bad.toml");
        cfg << "problem = \"biactive\"\nbogus = 1\n";
    }
    EXPECT_EQ(run("obstacle --config " + (d / "bad.toml").string() + " --out " + d.string(), d).code, 1);
    // the regularized quasi-Newton stalls at very large steps on the strictly complementary problem
    EXPECT_EQ(run("obstacle --problem kkt --levels 2 --schedule dexp:1.5,1.5 --tol-exit 1e-12 --out " + d.string(), d)
                  .code,
              2);
    fs::remove_all(d);
}

TEST(Cli, TomlConfigAndOverride) {
    const fs::path d = scratch("toml");
    fs::create_directories(d);
    {
        std::ofstream cfg(d / "run.toml");
        cfg << "problem = \"biactive\"\nlevels = [2]\nschedule = \"fixed:1\"\ntol_exit = 1e-4\n";
    }
    const CliRun r = run("obstacle --config " + (d / "run.toml").string() + " --schedule geo:1,2 --out " + d.string(), d);
    ASSERT_EQ(r.code, 0) << r.out;
    const std::string csv = slurp(d / "obstacle_biactive_L2.csv");
    EXPECT_NE(csv.find("# schedule = geo:1,2"), std::string::npos) << csv.substr(0, 400);
    EXPECT_NE(csv.find("# tol_exit = 0.0001"), std::string::npos);
    fs::remove_all(d);
}
