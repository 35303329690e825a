// Command-line front end for the compass library.
//
// Exit codes: 0 success, 2 input error, 3 evaluation error, 4 numerical failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compass/all.hpp"

namespace fs = std::filesystem;
using namespace compass;

namespace {

enum Exit { kOk = 0, kInput = 2, kEval = 3, kNumeric = 4 };

struct GlobalOptions {
    std::string out_dir;
    std::uint64_t seed = 0;
    bool json_only = false;
};

Vector parse_list(const std::string& text, const char* what) {
    Vector v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError(std::string("invalid number in ") + what + ": '" + item + "'");
        }
    }
    if (v.empty()) throw ArgumentError(std::string("empty list for ") + what);
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Run manifest plus an output directory that is only touched when --out is given.
class Output {
public:
    Output(const GlobalOptions& g, std::string subcommand) : g_(g) {
        manifest_ = {{"subcommand", std::move(subcommand)}, {"seed", g.seed}, {"inputs", Json::array()},
                     {"overrides", Json::object()}, {"outputs", Json::array()}};
        if (!g.out_dir.empty()) {
            std::error_code ec;
            fs::create_directories(g.out_dir, ec);
            if (ec || !fs::is_directory(g.out_dir))
                throw ArgumentError("output directory '" + g.out_dir + "' is not writable");
            manifest_["out"] = g.out_dir;
        }
    }

    bool enabled() const { return !g_.out_dir.empty(); }
    void input(const std::string& path) { manifest_["inputs"].push_back(path); }
    void override_value(const std::string& key, const Json& v) { manifest_["overrides"][key] = v; }

    void write(const std::string& name, const std::string& text, const std::string& dir = "") {
        std::string base = dir.empty() ? g_.out_dir : dir;
        std::string path = (fs::path(base) / name).string();
        write_text(path, text);
        manifest_["outputs"].push_back(name);
    }

    void finish() {
        if (enabled()) write_text((fs::path(g_.out_dir) / "manifest.json").string(), dump_json(manifest_) + "\n");
    }

    void print(const Json& j) { std::cout << dump_json(j) << "\n"; }

private:
    const GlobalOptions& g_;
    Json manifest_;
};

// --- compass ---------------------------------------------------------------

struct CompassArgs {
    std::string expr, expr_file, at, basis, verify_box = "2";
    std::optional<double> fd;
    std::size_t verify = 0;
};

int run_compass(const GlobalOptions& g, const CompassArgs& a) {
    Output out(g, "compass");
    if (a.expr.empty() == a.expr_file.empty()) throw ArgumentError("give exactly one of --expr or --expr-file");
    std::string text = a.expr;
    if (!a.expr_file.empty()) {
        text = read_file(a.expr_file);
        out.input(a.expr_file);
    }
    Expr e = parse_expr(text);
    Vector x = parse_list(a.at, "--at");
    const std::size_t n = x.size();
    if (n < 1 || n > 3) throw ArgumentError("compass supports dimension 1, 2 or 3");
    DirectionalOracle oracle = make_oracle(e, n);
    if (n >= 3 && !g.json_only)
        std::cerr << "warning: a compass difference in dimension " << n
                  << " is not guaranteed to be a generalized gradient element\n";

    Json result;
    if (a.fd) {
        out.override_value("fd", *a.fd);
        Vector s = finite_difference_compass([&](std::span<const double> y) { return eval_value(e, y); }, x, *a.fd);
        result = {{"method", "finite_difference"}, {"delta", *a.fd}, {"subgradient", s},
                  {"guarantee", to_string(guarantee_for_dim(n))}};
    } else if (!a.basis.empty()) {
        Vector b = parse_list(a.basis, "--basis");
        if (b.size() != 4 || n != 2) throw ArgumentError("--basis takes 4 numbers (row-major 2x2) and a 2-D point");
        out.override_value("basis", b);
        result = to_json(basis_compass_difference(oracle, x, Matrix2{{{b[0], b[1]}, {b[2], b[3]}}}));
    } else {
        result = to_json(compass_difference(oracle, x));
    }
    if (a.verify > 0) {
        const double r = parse_list(a.verify_box, "--verify-box")[0];
        Vector lo = x, hi = x;
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] -= r;
            hi[i] += r;
        }
        auto samples = verification_samples(x, lo, hi, a.verify, g.seed);
        Vector s = result["subgradient"].get<Vector>();
        SubgradientCheck c =
            verify_subgradient_inequality([&](std::span<const double> y) { return eval_value(e, y); }, x, s, samples);
        result["verification"] = {{"samples", samples.size()}, {"max_violation", c.max_violation},
                                  {"worst_sample", c.worst_sample}, {"slack", c.slack}, {"pass", c.pass},
                                  {"note", c.note}};
    }
    out.print(result);
    if (out.enabled()) out.write("compass.json", dump_json(result) + "\n");
    out.finish();
    return kOk;
}

// --- demo ------------------------------------------------------------------

int run_demo_cmd(const GlobalOptions& g, const std::string& name, const std::string& probes) {
    Output out(g, "demo");
    DemoReport r = [&] {
        if (name == "example42" && !probes.empty()) return demo_example42(parse_list(probes, "--probes"));
        return run_demo(name);
    }();
    Json checks = Json::array();
    for (const DemoCheck& c : r.checks) checks.push_back({{"claim", c.claim}, {"passed", c.passed}});
    Json doc = {{"name", r.name}, {"ok", r.ok()}, {"checks", checks}, {"certificate", r.certificate}};
    if (g.json_only) {
        out.print(doc);
    } else {
        std::cout << "demo " << r.name << "\n";
        for (const DemoCheck& c : r.checks) std::cout << (c.passed ? "  [PASS] " : "  [FAIL] ") << c.claim << "\n";
        std::cout << (r.ok() ? "all checks passed" : "some checks FAILED") << "\n";
    }
    if (out.enabled()) out.write("demo_" + r.name + ".json", dump_json(doc) + "\n");
    out.finish();
    return r.ok() ? kOk : kEval;
}

// --- hull ------------------------------------------------------------------

int run_hull(const GlobalOptions& g, const std::string& path, bool midpoint, std::size_t directions) {
    Output out(g, "hull");
    out.input(path);
    SupportOracle c = polytope_from_json(read_json_file(path));
    IntervalHull h = interval_hull(c);
    Json result = {{"description", c.description()}, {"lower", h.lower}, {"upper", h.upper}};
    if (midpoint) {
        MidpointElement m = midpoint_element(c);
        SetMembership s = membership_check(c, m.point, directions);
        bool exact = in_convex_hull(c.vertices(), m.point, 1e-12);
        result["midpoint"] = m.point;
        result["guarantee"] = to_string(m.guarantee);
        result["membership"] = {{"member", s.member && exact}, {"sampled", s.member}, {"exact", exact},
                                {"directions", s.directions}, {"max_violation", s.max_violation},
                                {"witness", s.witness}, {"note", s.note}};
    }
    out.print(result);
    if (out.enabled()) out.write("hull.json", dump_json(result) + "\n");
    out.finish();
    return kOk;
}

// --- ode -------------------------------------------------------------------

struct OdeArgs {
    std::string problem, at = "0,0", surface;
    double abstol = 1e-8, reltol = 1e-8;
    bool trajectories = false;
};

int run_ode(const GlobalOptions& g, const OdeArgs& a) {
    Output out(g, "ode");
    out.input(a.problem);
    OdeProblem problem = ode_problem_from_json(read_json_file(a.problem));
    Vector p = parse_list(a.at, "--at");
    require_dim(p, 2, "--at");
    IntegrationConfig cfg;
    cfg.abs_tol = a.abstol;
    cfg.rel_tol = a.reltol;
    cfg.validate();
    out.override_value("abstol", a.abstol);
    out.override_value("reltol", a.reltol);

    OdeSubgradient sg = ode_subgradient_with_trajectories(problem, p, cfg);
    Json result = to_json(sg.result);
    const double phi0 = ode_cost(problem, p, cfg);
    result["value"] = phi0;
    out.print(result);
    if (out.enabled()) {
        out.write("ode.json", dump_json(result) + "\n");
        if (a.trajectories) {
            const char* names[] = {"traj_plus_e1.csv", "traj_minus_e1.csv", "traj_plus_e2.csv", "traj_minus_e2.csv"};
            for (std::size_t k = 0; k < 4; ++k) out.write(names[k], trajectory_csv(sg.trajectories[k]));
        }
    }
    if (!a.surface.empty()) {
        // lo:hi:count, same grid on both parameter axes.
        std::string spec = a.surface;
        for (char& ch : spec)
            if (ch == ':') ch = ',';
        Vector gs = parse_list(spec, "--surface");
        if (gs.size() != 3 || gs[2] < 2 || gs[2] != std::floor(gs[2]) || !(gs[0] < gs[1]))
            throw ArgumentError("--surface expects lo:hi:count with lo < hi and count >= 2");
        const auto count = static_cast<std::size_t>(gs[2]);
        std::ostringstream csv;
        csv << "p1,p2,phi,affine\n";
        const Vector s = sg.result.subgradient;
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < count; ++j) {
                Vector q{gs[0] + (gs[1] - gs[0]) * static_cast<double>(i) / static_cast<double>(count - 1),
                         gs[0] + (gs[1] - gs[0]) * static_cast<double>(j) / static_cast<double>(count - 1)};
                double phi = ode_cost(problem, q, cfg);
                double affine = phi0 + s[0] * (q[0] - p[0]) + s[1] * (q[1] - p[1]);
                csv << format_g17(q[0]) << "," << format_g17(q[1]) << "," << format_g17(phi) << ","
                    << format_g17(affine) << "\n";
            }
        out.override_value("surface", a.surface);
        out.write("surface.csv", csv.str(), out.enabled() ? "" : ".");
    }
    out.finish();
    return kOk;
}

// --- danskin ---------------------------------------------------------------

int run_danskin(const GlobalOptions& g, const std::string& path, const std::string& at, std::optional<double> eps) {
    Output out(g, "danskin");
    out.input(path);
    OptimalValueProblem problem = optimal_value_problem_from_json(read_json_file(path));
    Vector x = parse_list(at, "--at");
    require_dim(x, 2, "--at");
    if (eps) out.override_value("eps", *eps);
    DanskinReport r = danskin_report(problem, x, eps);
    Json result = to_json(r.result);
    result["optimal_value"] = r.active.optimal_value;
    result["epsilon"] = r.active.epsilon;
    result["active_count"] = r.active.minimizers.size();
    result["wide"] = {{"epsilon", r.active_wide.epsilon}, {"active_count", r.active_wide.minimizers.size()},
                      {"subgradient", r.result_wide.subgradient}};
    result["stable"] = r.stable;
    out.print(result);
    if (out.enabled()) out.write("danskin.json", dump_json(result) + "\n");
    out.finish();
    return kOk;
}

// --- optimize --------------------------------------------------------------

struct OptimizeArgs {
    std::string expr, from;
    std::optional<double> polyak, constant, diminishing;
    std::size_t max_iters = 1000;
    double stop_tol = 1e-12;
    std::size_t benchmark = 0;
};

int run_optimize(const GlobalOptions& g, const OptimizeArgs& a) {
    Output out(g, "optimize");
    if (a.benchmark > 0) {
        std::vector<StepRule> rules;
        if (a.polyak) rules.push_back(PolyakStep{*a.polyak});
        if (a.constant) rules.push_back(ConstantStep{*a.constant});
        if (a.diminishing) rules.push_back(DiminishingStep{*a.diminishing});
        if (rules.empty()) rules = {PolyakStep{0.0}, DiminishingStep{1.0}, ConstantStep{0.1}};
        std::string csv = benchmark_csv(benchmark_suite(rules, a.benchmark));
        std::cout << csv;
        if (out.enabled()) out.write("benchmark.csv", csv);
        out.finish();
        return kOk;
    }
    int rules = (a.polyak ? 1 : 0) + (a.constant ? 1 : 0) + (a.diminishing ? 1 : 0);
    if (rules != 1) throw ArgumentError("give exactly one of --polyak, --constant, --diminishing");
    if (a.expr.empty() || a.from.empty()) throw ArgumentError("--expr and --from are required");
    StepRule rule = a.polyak ? StepRule{PolyakStep{*a.polyak}}
                             : a.constant ? StepRule{ConstantStep{*a.constant}} : StepRule{DiminishingStep{*a.diminishing}};
    Expr e = parse_expr(a.expr);
    Vector x0 = parse_list(a.from, "--from");
    require_dim(x0, 2, "--from");
    OptTrace t = subgradient_method(make_oracle(e, 2), x0, rule, a.max_iters, a.stop_tol);
    Json result = {{"rule", describe(rule)},
                   {"iterations", t.iterates.size() - 1},
                   {"final_point", t.iterates.back().x},
                   {"best_point", t.best_point},
                   {"best_value", t.best_value},
                   {"stop", to_string(t.stop)}};
    if (!t.note.empty()) result["note"] = t.note;
    out.print(result);
    if (out.enabled()) {
        out.write("optimize.json", dump_json(result) + "\n");
        out.write("trace.csv", trace_csv(t));
    }
    out.finish();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compass differences: generalized gradients of bivariate nonsmooth functions"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--out", g.out_dir, "Directory for result files, CSVs and the run manifest");
    app.add_option("--seed", g.seed, "Seed recorded in the manifest; offsets quasi-random verification samples");
    app.add_flag("--json", g.json_only, "Machine-readable output only");

    std::function<int()> action;

    CompassArgs ca;
    auto* c = app.add_subcommand("compass", "Compass difference of an expression at a point");
    c->add_option("--expr", ca.expr, "Expression in prefix syntax");
    c->add_option("--expr-file", ca.expr_file, "File containing an expression");
    c->add_option("--at", ca.at, "Point, comma separated")->required();
    c->add_option("--basis", ca.basis, "Row-major 2x2 basis v11,v12,v21,v22 (columns are probe directions)");
    c->add_option("--fd", ca.fd, "Use centered finite differences with this width");
    c->add_option("--verify", ca.verify, "Check the subgradient inequality on this many Halton samples");
    c->add_option("--verify-box", ca.verify_box, "Half-width of the verification box around the point");
    c->callback([&] { action = [&] { return run_compass(g, ca); }; });

    std::string demo_name, demo_probes;
    auto* d = app.add_subcommand("demo", "Run a counterexample reproduction");
    d->add_option("name", demo_name, "example41 | example42 | example43 | example44 | footnote1")->required();
    d->add_option("--probes", demo_probes, "example42 probe angles in degrees, comma separated");
    d->callback([&] { action = [&] { return run_demo_cmd(g, demo_name, demo_probes); }; });

    std::string hull_file;
    bool hull_mid = false;
    std::size_t hull_dirs = 360;
    auto* h = app.add_subcommand("hull", "Interval hull of a polytope from support probes");
    h->add_option("--polytope", hull_file, "Polytope JSON file")->required();
    h->add_flag("--midpoint", hull_mid, "Also report the hull midpoint and its membership");
    h->add_option("--directions", hull_dirs, "Sampled directions for the membership check");
    h->callback([&] { action = [&] { return run_hull(g, hull_file, hull_mid, hull_dirs); }; });

    OdeArgs oa;
    auto* o = app.add_subcommand("ode", "Subgradient of a nonsmooth ODE cost");
    o->add_option("--problem", oa.problem, "ODE problem JSON file")->required();
    o->add_option("--at", oa.at, "Parameter point p1,p2");
    o->add_option("--abstol", oa.abstol, "Absolute integration tolerance");
    o->add_option("--reltol", oa.reltol, "Relative integration tolerance");
    o->add_option("--surface", oa.surface, "Emit phi and its affine minorant on a grid lo:hi:count");
    o->add_flag("--trajectories", oa.trajectories, "Write the four sensitivity trajectories as CSV");
    o->callback([&] { action = [&] { return run_ode(g, oa); }; });

    std::string dk_file, dk_at = "0,0";
    std::optional<double> dk_eps;
    auto* k = app.add_subcommand("danskin", "Subgradient of an optimal-value function");
    k->add_option("--problem", dk_file, "Optimal-value problem JSON file")->required();
    k->add_option("--at", dk_at, "Point x1,x2");
    k->add_option("--eps", dk_eps, "Activation tolerance for the minimizer set");
    k->callback([&] { action = [&] { return run_danskin(g, dk_file, dk_at, dk_eps); }; });

    OptimizeArgs op;
    auto* m = app.add_subcommand("optimize", "Subgradient method driven by compass differences");
    m->add_option("--expr", op.expr, "Bivariate expression to minimize");
    m->add_option("--from", op.from, "Start point x1,x2");
    m->add_option("--polyak", op.polyak, "Polyak step with this optimal value");
    m->add_option("--constant", op.constant, "Constant step length");
    m->add_option("--diminishing", op.diminishing, "Step gamma0 / sqrt(k + 1)");
    m->add_option("--max-iters", op.max_iters, "Iteration budget");
    m->add_option("--stop-tol", op.stop_tol, "Stopping tolerance");
    m->add_option("--benchmark", op.benchmark, "Run the benchmark suite with this budget and print CSV");
    m->callback([&] { action = [&] { return run_optimize(g, op); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        return action();
    } catch (const IntegrationError& e) {
        std::cerr << "error: " << e.what() << " (t = " << e.time();
        if (!e.direction().empty()) std::cerr << ", direction " << to_string(e.direction());
        std::cerr << ")\n";
        return kNumeric;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEval;
    }
}
