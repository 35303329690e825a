#pragma once

// JSON schemas and CSV emitters. Numbers are always written with 17
// significant digits so repeated runs produce byte-identical output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "compass/compass.hpp"
#include "compass/danskin.hpp"
#include "compass/error.hpp"
#include "compass/expr.hpp"
#include "compass/geometry.hpp"
#include "compass/ode.hpp"
#include "compass/optimize.hpp"

namespace compass {

using Json = nlohmann::json;

inline std::string format_g17(double v) {
    char buf[40];
    if (v == 0.0) v = 0.0;
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void dump_into(const Json& j, std::string& out, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump_into(it.value(), out, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += indent < 0 ? "," : ", ";
                dump_into(j[i], out, -1, 0);
            }
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            double v = j.get<double>();
            out += std::isfinite(v) ? format_g17(v) : "null";
            return;
        }
        default: out += j.dump(); return;
    }
}

}  // namespace detail

/// Serializes with fixed 17-significant-digit floats. Arrays are kept on one line.
inline std::string dump_json(const Json& j, int indent = 2) {
    std::string out;
    detail::dump_into(j, out, indent, 0);
    return out;
}

inline Json to_json(const CompassResult& r) {
    Json probes = Json::array();
    for (const Probe& p : r.probes) probes.push_back({{"direction", p.direction}, {"value", p.value}});
    return {{"subgradient", r.subgradient}, {"probes", probes}, {"basis", r.basis},
            {"guarantee", to_string(r.guarantee)}};
}

inline CompassResult compass_result_from_json(const Json& j) {
    CompassResult r;
    r.subgradient = j.at("subgradient").get<Vector>();
    for (const Json& p : j.at("probes")) r.probes.push_back({p.at("direction").get<Vector>(), p.at("value").get<double>()});
    r.basis = j.at("basis").get<std::vector<Vector>>();
    r.guarantee = j.at("guarantee").get<std::string>() == "Guaranteed" ? Guarantee::Guaranteed : Guarantee::Unguaranteed;
    return r;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ArgumentError("malformed JSON in '" + path + "': " + e.what());
    }
}

namespace detail {

template <class F>
auto schema(const std::string& what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ArgumentError("invalid " + what + ": " + e.what());
    }
}

inline std::vector<Expr> parse_expr_list(const Json& j) {
    std::vector<Expr> out;
    for (const Json& s : j) out.push_back(parse_expr(s.get<std::string>()));
    return out;
}

}  // namespace detail

/// {"dim": n, "vertices": [[...], ...]}
inline SupportOracle polytope_from_json(const Json& j) {
    return detail::schema("polytope", [&] {
        std::size_t dim = j.at("dim").get<std::size_t>();
        auto verts = j.at("vertices").get<std::vector<Vector>>();
        for (const Vector& v : verts) require_dim(v, dim, "vertex");
        return polytope_support(std::move(verts));
    });
}

/// {"n_state", "rhs_expr": [...], "init_expr": [...], "cost_expr": "...", "t_final"}
inline OdeProblem ode_problem_from_json(const Json& j) {
    return detail::schema("ODE problem", [&] {
        std::size_t n = j.at("n_state").get<std::size_t>();
        auto rhs = detail::parse_expr_list(j.at("rhs_expr"));
        auto init = detail::parse_expr_list(j.at("init_expr"));
        if (rhs.size() != n || init.size() != n)
            throw ArgumentError("rhs_expr and init_expr must each have n_state entries");
        return make_ode_problem(rhs, init, parse_expr(j.at("cost_expr").get<std::string>()),
                                j.at("t_final").get<double>());
    });
}

/// {"m": m, "objective": "...", "gradient": ["...", "..."],
///  "feasible": {"cloud": [[...], ...]} | {"box": {"lower", "upper", "grid", "refine_steps"}}}
/// Expressions range over (x_1, x_2, y_1, ..., y_m). {"circle": k} is shorthand
/// for k equally spaced unit-circle points.
inline OptimalValueProblem optimal_value_problem_from_json(const Json& j) {
    return detail::schema("optimal-value problem", [&] {
        std::size_t m = j.at("m").get<std::size_t>();
        const Json& fs = j.at("feasible");
        FeasibleSet set;
        if (fs.contains("cloud")) {
            set = PointCloud{fs.at("cloud").get<std::vector<Vector>>()};
        } else if (fs.contains("circle")) {
            set = circle_cloud(fs.at("circle").get<std::size_t>());
        } else if (fs.contains("box")) {
            const Json& b = fs.at("box");
            Box box;
            box.lower = b.at("lower").get<Vector>();
            box.upper = b.at("upper").get<Vector>();
            box.grid = b.value("grid", box.grid);
            box.refine_steps = b.value("refine_steps", box.refine_steps);
            set = box;
        } else {
            throw ArgumentError("feasible set must be 'cloud', 'circle' or 'box'");
        }
        return make_optimal_value_problem(parse_expr(j.at("objective").get<std::string>()),
                                          detail::parse_expr_list(j.at("gradient")), m, std::move(set));
    });
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << text;
}

/// Columns t, x1..xn, y1..yn.
inline std::string trajectory_csv(const SensitivityTrajectory& tr) {
    std::ostringstream os;
    const std::size_t n = tr.states.empty() ? 0 : tr.states[0].size();
    os << "t";
    for (std::size_t i = 0; i < n; ++i) os << ",x" << i + 1;
    for (std::size_t i = 0; i < n; ++i) os << ",y" << i + 1;
    os << "\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        os << format_g17(tr.times[k]);
        for (double v : tr.states[k]) os << "," << format_g17(v);
        for (double v : tr.sensitivities[k]) os << "," << format_g17(v);
        os << "\n";
    }
    return os.str();
}

/// Columns iter, x1, x2, f, g1, g2, step.
inline std::string trace_csv(const OptTrace& t) {
    std::ostringstream os;
    os << "iter,x1,x2,f,g1,g2,step\n";
    for (std::size_t k = 0; k < t.iterates.size(); ++k) {
        const Iterate& it = t.iterates[k];
        os << k << "," << format_g17(it.x[0]) << "," << format_g17(it.x[1]) << "," << format_g17(it.f) << ","
           << format_g17(it.g[0]) << "," << format_g17(it.g[1]) << "," << format_g17(it.step) << "\n";
    }
    return os.str();
}

inline std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
    std::ostringstream os;
    os << "function,rule,best_value,iterations\n";
    for (const BenchmarkRow& r : rows)
        os << r.function << "," << r.rule << "," << format_g17(r.best_value) << "," << r.iterations << "\n";
    return os.str();
}

}  // namespace compass
