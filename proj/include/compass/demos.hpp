#pragma once

// Executable reproductions of the counterexamples that delimit where compass
// differences and interval-hull midpoints can be trusted. Each demo evaluates
// its claims and records them as named checks.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "compass/catalog.hpp"
#include "compass/compass.hpp"
#include "compass/expr.hpp"
#include "compass/geometry.hpp"
#include "compass/io.hpp"

namespace compass {

struct DemoCheck {
    std::string claim;
    bool passed = false;
};

struct DemoReport {
    std::string name;
    std::vector<DemoCheck> checks;
    Json certificate = Json::object();

    bool ok() const {
        for (const DemoCheck& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }

    void check(std::string claim, bool passed) { checks.push_back({std::move(claim), passed}); }
};

inline DemoReport demo_example41() {
    DemoReport r{"example41", {}};
    CatalogEntry f = neg_abs_x1();
    const Vector origin{0.0, 0.0};
    CompassResult c = compass_difference(f.oracle(), origin);
    r.check("compass difference of -|x1| at the origin is (0, 0)", c.subgradient == Vector{0.0, 0.0});
    GeneratorSet clarke = GeneratorSet::hull({{-1.0, 0.0}, {1.0, 0.0}});
    MembershipResult m = clarke_membership_check(c.subgradient, clarke, 1e-12);
    r.check("(0, 0) lies in the generalized gradient conv{(-1,0), (1,0)}", m.member);
    // The B-, lexicographic and Mordukhovich upper subdifferentials are the
    // two-point set itself, without its convex hull.
    const std::vector<Vector> b_sub{{-1.0, 0.0}, {1.0, 0.0}};
    bool in_b = false;
    for (const Vector& g : b_sub) in_b = in_b || g == c.subgradient;
    r.check("(0, 0) is not in the two-point set {(-1,0), (1,0)}", !in_b);
    r.certificate = {{"compass", to_json(c)}, {"clarke_generators", clarke.points}, {"b_subdifferential", b_sub},
                     {"in_clarke", m.member}, {"in_b_subdifferential", in_b}};
    return r;
}

/// Three probes at `angles_deg` of the unit ball (and of the norm's directional
/// derivative at 0) are consistent with three edge sets sharing no point.
inline DemoReport demo_example42(std::vector<double> angles_deg = {90.0, 210.0, 330.0}) {
    DemoReport r{"example42", {}};
    std::vector<Vector> probes;
    for (double a : angles_deg) {
        double rad = a * std::numbers::pi / 180.0;
        probes.push_back({std::cos(rad), std::sin(rad)});
    }
    SupportOracle ball = ball_support({0.0, 0.0}, 1.0);
    DirectionalOracle nrm = euclid_norm_2d().oracle();
    bool ball_ones = true, norm_ones = true;
    for (const Vector& p : probes) {
        ball_ones = ball_ones && std::abs(ball(p) - 1.0) <= 1e-12;
        norm_ones = norm_ones && std::abs(nrm.dir_deriv(Vector{0.0, 0.0}, p) - 1.0) <= 1e-12;
    }
    r.check("unit-ball support equals 1 at all three probes", ball_ones);
    r.check("norm directional derivative at 0 equals 1 at all three probes", norm_ones);
    AmbiguityCertificate cert = three_probe_ambiguity(probes[0], probes[1], probes[2]);
    r.check("all nine edge support values equal 1", cert.support_matches);
    r.check("the three edges have empty common intersection", cert.triple_intersection_empty);
    Json edges = Json::array();
    for (const auto& e : cert.edges) edges.push_back({e[0], e[1]});
    Json support = Json::array();
    for (const auto& row : cert.support) support.push_back(Json(std::vector<double>(row.begin(), row.end())));
    r.certificate = {{"probes", probes},
                     {"vertices", std::vector<Vector>(cert.vertices.begin(), cert.vertices.end())},
                     {"edges", edges},
                     {"edge_support", support},
                     {"support_matches", cert.support_matches},
                     {"triple_intersection_empty", cert.triple_intersection_empty}};
    return r;
}

inline DemoReport demo_example43() {
    DemoReport r{"example43", {}};
    const std::vector<Vector> c1_vertices{{1, 1, -1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, 1}};
    const std::vector<Vector> c2_vertices{{1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}, {-1, -1, -1}};
    SupportOracle c1 = polytope_support(c1_vertices), c2 = polytope_support(c2_vertices);
    IntervalHull h1 = interval_hull(c1), h2 = interval_hull(c2);
    const Vector box_lo{-1, -1, -1}, box_hi{1, 1, 1};
    r.check("C1 has interval hull [-1,1]^3", h1.lower == box_lo && h1.upper == box_hi);
    r.check("C2 has interval hull [-1,1]^3", h2.lower == box_lo && h2.upper == box_hi);
    MidpointElement m1 = midpoint_element(c1);
    r.check("common midpoint is the origin", m1.point == Vector{0, 0, 0} && midpoint_element(c2).point == m1.point);
    r.check("midpoint is flagged Unguaranteed in three dimensions", m1.guarantee == Guarantee::Unguaranteed);
    SetMembership s1 = membership_check(c1, m1.point), s2 = membership_check(c2, m1.point);
    bool e1 = in_convex_hull(c1_vertices, m1.point, 1e-12), e2 = in_convex_hull(c2_vertices, m1.point, 1e-12);
    r.check("origin is not in C1 (sampled separation and exact hull test)", !s1.member && !e1);
    r.check("origin is not in C2 (sampled separation and exact hull test)", !s2.member && !e2);
    const Vector e{1, 1, 1}, minus_e{-1, -1, -1};
    double sep_hi = -c1(minus_e), sep_lo = c2(e);
    r.check("e = (1,1,1) separates: sigma_C2(e) = -1 < 1 = -sigma_C1(-e)", sep_lo == -1.0 && sep_hi == 1.0);

    CatalogEntry f = example43_f(), phi = example43_phi();
    const Vector origin{0, 0, 0};
    bool all_one = true;
    for (std::size_t i = 0; i < 3; ++i)
        for (double s : {1.0, -1.0}) {
            Vector d = unit_vector(3, i, s);
            all_one = all_one && eval_dir_deriv(f.expr, origin, d) == 1.0 && eval_dir_deriv(phi.expr, origin, d) == 1.0;
        }
    r.check("f'(0; +/-e_i) = phi'(0; +/-e_i) = 1 for i = 1, 2, 3", all_one);
    CompassResult cf = compass_difference(f.oracle(), origin), cphi = compass_difference(phi.oracle(), origin);
    r.check("compass differences of f and phi at 0 are both 0",
            cf.subgradient == Vector{0, 0, 0} && cphi.subgradient == Vector{0, 0, 0});
    r.check("compass results are flagged Unguaranteed", cf.guarantee == Guarantee::Unguaranteed);
    double min_f = 1e300, max_phi = -1e300;
    for (const Vector& g : example43_f_pieces()) min_f = std::min(min_f, dot(e, g));
    for (const Vector& g : example43_phi_pieces()) max_phi = std::max(max_phi, dot(e, g));
    r.check("generator hulls of f and phi are disjoint (separated by e)", min_f > max_phi);
    MembershipResult mf = clarke_membership_check(cf.subgradient, GeneratorSet::hull(example43_f_pieces()), 1e-12);
    MembershipResult mp = clarke_membership_check(cphi.subgradient, GeneratorSet::hull(example43_phi_pieces()), 1e-12);
    r.check("compass difference 0 lies in neither generalized gradient", !mf.member && !mp.member);
    r.certificate = {{"hull_c1", {{"lower", h1.lower}, {"upper", h1.upper}}},
                     {"hull_c2", {{"lower", h2.lower}, {"upper", h2.upper}}},
                     {"midpoint", m1.point},
                     {"witness_c1", s1.witness},
                     {"witness_c2", s2.witness},
                     {"separation", {{"direction", e}, {"sigma_c2_e", sep_lo}, {"minus_sigma_c1_minus_e", sep_hi}}},
                     {"compass_f", to_json(cf)},
                     {"compass_phi", to_json(cphi)},
                     {"generators_f", example43_f_pieces()},
                     {"generators_phi", example43_phi_pieces()}};
    return r;
}

/// C = {-1 < x1, x2 < 1, x1 < x2} is not closed; its support function is that of
/// its closure, so the strict inequalities are encoded directly.
inline DemoReport demo_example44() {
    DemoReport r{"example44", {}};
    auto in_open_set = [](const Vector& x) { return -1.0 < x[0] && x[1] < 1.0 && x[0] < x[1]; };
    const std::vector<Vector> closure{{-1, -1}, {-1, 1}, {1, 1}};
    SupportOracle sigma = polytope_support(closure);
    MidpointElement m = midpoint_element(sigma);
    r.check("interval hull is [-1,1]^2", m.hull.lower == Vector{-1, -1} && m.hull.upper == Vector{1, 1});
    r.check("midpoint is (0, 0)", m.point == Vector{0, 0});
    r.check("(0, 0) belongs to the closure", point_in_polygon(closure, m.point));
    r.check("(0, 0) violates x1 < x2 and is excluded from the set", !in_open_set(m.point));
    r.certificate = {{"closure_vertices", closure}, {"hull", {{"lower", m.hull.lower}, {"upper", m.hull.upper}}},
                     {"midpoint", m.point}, {"in_closure", true}, {"in_set", in_open_set(m.point)}};
    return r;
}

/// max(0, min(x1, x2)) at 0: the directional derivative is not convex in d.
inline DemoReport demo_footnote1() {
    DemoReport r{"footnote1", {}};
    CatalogEntry f = max0_min();
    const Vector origin{0, 0};
    double a = eval_dir_deriv(f.expr, origin, Vector{1, 0});
    double b = eval_dir_deriv(f.expr, origin, Vector{0, 1});
    double ab = eval_dir_deriv(f.expr, origin, Vector{1, 1});
    r.check("f'(0; (1,1)) = 1 > f'(0; (1,0)) + f'(0; (0,1)) = 0, so f'(0; .) is not convex", ab == 1.0 && a + b == 0.0);
    CompassResult c = compass_difference(f.oracle(), origin);
    r.check("compass difference at 0 is (0, 0)", c.subgradient == Vector{0, 0});
    MembershipResult m = clarke_membership_check(c.subgradient, f.clarke_generators(origin), 1e-12);
    r.check("(0, 0) lies in conv{(0,0), (1,0), (0,1)}", m.member);
    r.certificate = {{"dir_deriv", {{"e1", a}, {"e2", b}, {"e1_plus_e2", ab}}}, {"compass", to_json(c)},
                     {"clarke_generators", f.clarke_generators(origin).points}};
    return r;
}

inline std::vector<std::string> demo_names() { return {"example41", "example42", "example43", "example44", "footnote1"}; }

inline DemoReport run_demo(const std::string& name) {
    if (name == "example41") return demo_example41();
    if (name == "example42") return demo_example42();
    if (name == "example43") return demo_example43();
    if (name == "example44") return demo_example44();
    if (name == "footnote1") return demo_footnote1();
    throw ArgumentError("unknown demo '" + name + "'");
}

}  // namespace compass
