#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct CliRun {
    int exit = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CliRun run(const std::string& args) {
    static int counter = 0;
    fs::path err = fs::temp_directory_path() / ("compass_cli_err_" + std::to_string(++counter));
    std::string cmd = std::string(COMPASS_CLI_PATH) + " " + args + " 2>" + err.string();
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    fs::remove(err);
    return r;
}

std::string fixture(const char* name) { return std::string(COMPASS_FIXTURES) + "/" + name; }

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("compass_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
}

}  // namespace

TEST(Cli, NegAbsAtOriginIsGuaranteedZero) {
    CliRun r = run("compass --expr '(neg (abs (var 0)))' --at 0,0");
    ASSERT_EQ(r.exit, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["subgradient"], Json({0.0, 0.0}));
    EXPECT_EQ(j["guarantee"], "Guaranteed");
    EXPECT_EQ(j["probes"].size(), 4u);
}

TEST(Cli, ThreeDimensionalWarns) {
    CliRun r = run("compass --expr-file " + fixture("example43_f.expr") + " --at 0,0,0");
    ASSERT_EQ(r.exit, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["guarantee"], "Unguaranteed");
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    CliRun quiet = run("--json compass --expr-file " + fixture("example43_f.expr") + " --at 0,0,0");
    EXPECT_EQ(quiet.err, "");
}

TEST(Cli, FiniteDifferenceNearGradient) {
    CliRun r = run("compass --expr '(norm (var 0) (var 1))' --at 3,4 --fd 1e-5");
    ASSERT_EQ(r.exit, 0) << r.err;
    auto g = Json::parse(r.out)["subgradient"].get<std::vector<double>>();
    EXPECT_NEAR(g[0], 0.6, 1e-8);
    EXPECT_NEAR(g[1], 0.8, 1e-8);
}

TEST(Cli, VerifyReportsSubgradientCheck) {
    CliRun r = run("compass --expr '(abs (var 0))' --at 0 --verify 200");
    ASSERT_EQ(r.exit, 0) << r.err;
    Json j = Json::parse(r.out);
    ASSERT_TRUE(j.contains("verification"));
    EXPECT_EQ(j["verification"]["pass"], true);
}

TEST(Cli, DemosPass) {
    for (const char* name : {"example41", "example42", "example43", "example44", "footnote1"}) {
        CliRun r = run(std::string("demo ") + name);
        EXPECT_EQ(r.exit, 0) << name << "\n" << r.out << r.err;
        EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos) << name;
    }
    CliRun j = run("--json demo example43");
    ASSERT_EQ(j.exit, 0);
    EXPECT_EQ(Json::parse(j.out)["certificate"]["midpoint"], Json({0.0, 0.0, 0.0}));
}

TEST(Cli, OdeExampleMatchesClosedForm) {
    CliRun r = run("ode --problem " + fixture("example46.json") + " --at 0,0");
    ASSERT_EQ(r.exit, 0) << r.err;
    auto g = Json::parse(r.out)["subgradient"].get<std::vector<double>>();
    EXPECT_NEAR(g[0], std::exp(1.0) + std::cosh(1.0) / 2, 1e-6);
    EXPECT_NEAR(g[1], (std::exp(1.0) - std::sinh(1.0)) / 2, 1e-6);
}

TEST(Cli, OdeSurfaceLiesAboveAffineMinorant) {
    fs::path out = scratch("surface");
    CliRun r = run("--out " + out.string() + " ode --problem " + fixture("example46.json") +
                " --surface -1:1:21 --trajectories");
    ASSERT_EQ(r.exit, 0) << r.err;
    std::istringstream in(slurp(out / "surface.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "p1,p2,phi,affine");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        double p1, p2, phi, affine;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &p1, &p2, &phi, &affine), 4) << line;
        EXPECT_GE(phi, affine - 1e-4) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 441u);
    for (const char* f : {"ode.json", "manifest.json", "traj_plus_e1.csv", "traj_minus_e1.csv", "traj_plus_e2.csv",
                          "traj_minus_e2.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    Json manifest = Json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["subcommand"], "ode");
    fs::remove_all(out);
}

TEST(Cli, HullMidpointOfTriangle) {
    CliRun r = run("hull --polytope " + fixture("tri.json") + " --midpoint");
    ASSERT_EQ(r.exit, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["midpoint"], Json({1.0, 1.0}));
    EXPECT_EQ(j["membership"]["member"], true);
    CliRun c = run("hull --polytope " + fixture("example43_c1.json") + " --midpoint");
    ASSERT_EQ(c.exit, 0) << c.err;
    EXPECT_EQ(Json::parse(c.out)["membership"]["member"], false);
}

TEST(Cli, DanskinOnCircle) {
    CliRun r = run("danskin --problem " + fixture("circle.json") + " --at 0,0");
    ASSERT_EQ(r.exit, 0) << r.err;
    Json j = Json::parse(r.out);
    auto g = j["subgradient"].get<std::vector<double>>();
    EXPECT_NEAR(g[0], 0.0, 1e-12);
    EXPECT_NEAR(g[1], 0.0, 1e-12);
    EXPECT_EQ(j["active_count"], 360);
}

TEST(Cli, OptimizePolyakOneStep) {
    fs::path out = scratch("optimize");
    CliRun r = run("--out " + out.string() + " optimize --expr '(norm (var 0) (var 1))' --from 3,4 --polyak 0");
    ASSERT_EQ(r.exit, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["iterations"], 1);
    EXPECT_EQ(j["best_value"], 0.0);
    std::string trace = slurp(out / "trace.csv");
    EXPECT_EQ(trace.substr(0, trace.find('\n')), "iter,x1,x2,f,g1,g2,step");
    fs::remove_all(out);
}

TEST(Cli, BenchmarkCsv) {
    CliRun r = run("optimize --benchmark 100");
    ASSERT_EQ(r.exit, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "function,rule,best_value,iterations");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 9u);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    for (std::string args : std::vector<std::string>{"ode --problem " + fixture("example46.json") + " --at 0.3,-0.2",
                             std::string("compass --expr '(abs (var 0))' --at 0.5 --verify 50 --seed 3"),
                             "danskin --problem " + fixture("box_bilinear.json") + " --at 0.5,-0.5",
                             std::string("--json demo example42")}) {
        CliRun a = run(args), b = run(args);
        EXPECT_EQ(a.exit, 0) << args << "\n" << a.err;
        EXPECT_EQ(a.out, b.out) << args;
    }
}

TEST(Cli, ExitCodes) {
    fs::path dir = scratch("errors");
    std::string malformed = write_file(dir / "bad.json", "{ \"dim\": 2, ");
    std::string blowup = write_file(dir / "blowup.json",
                                    R"j({"n_state": 1, "rhs_expr": ["(mul (var 0) (var 0))"],
                                         "init_expr": ["(add (const 1) (var 0))"], "cost_expr": "(var 2)",
                                         "t_final": 2})j");
    struct Case {
        std::string args;
        int code;
    };
    for (const Case& c : std::vector<Case>{
             {"compass --expr '(add (var 0)' --at 0", 2},
             {"compass --expr '(var 0)' --at 1,x", 2},
             {"compass --at 1", 2},
             {"frobnicate", 2},
             {"demo nope", 2},
             {"hull --polytope " + malformed, 2},
             {"hull --polytope " + (dir / "missing.json").string(), 2},
             {"optimize --expr '(var 0)' --from 1 --polyak 0 --constant 1", 2},
             {"compass --expr '(mul (const 1e300) (mul (var 0) (const 1e300)))' --at 1", 3},
             {"ode --problem " + blowup, 4},
         }) {
        CliRun r = run(c.args);
        EXPECT_EQ(r.exit, c.code) << c.args << "\n" << r.err;
        EXPECT_NE(r.err, "") << c.args;
    }
    fs::remove_all(dir);
}
