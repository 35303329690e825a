#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "compass/all.hpp"

using namespace compass;

namespace {

std::string fixture(const char* name) { return std::string(COMPASS_FIXTURES) + "/" + name; }

}  // namespace

TEST(Json, SeventeenDigitFloats) {
    EXPECT_EQ(format_g17(0.1), "0.10000000000000001");
    EXPECT_EQ(format_g17(1.0), "1");
    Json j = {{"a", 0.1}, {"b", {1.5, -2.0}}, {"c", "text"}, {"d", 3}};
    EXPECT_EQ(dump_json(j, -1), R"j({"a":0.10000000000000001,"b":[1.5,-2],"c":"text","d":3})j");
    EXPECT_EQ(Json::parse(dump_json(j)).at("a").get<double>(), 0.1);
    EXPECT_EQ(dump_json(Json{{"x", NAN}}, -1), R"j({"x":null})j");
}

TEST(Json, RoundTripPreservesBits) {
    std::mt19937_64 rng(149);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(Json::parse(dump_json(Json(v))).get<double>(), v);
    }
}

TEST(Json, CompassResultSchema) {
    auto r = compass_difference(euclid_norm_2d().oracle(), Vector{3, 4});
    Json j = to_json(r);
    for (const char* key : {"subgradient", "probes", "basis", "guarantee"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["probes"].size(), 4u);
    EXPECT_TRUE(j["probes"][0].contains("direction"));
    EXPECT_TRUE(j["probes"][0].contains("value"));
    auto back = compass_result_from_json(Json::parse(dump_json(j)));
    EXPECT_EQ(back.subgradient, r.subgradient);
    EXPECT_EQ(back.basis, r.basis);
    EXPECT_EQ(back.guarantee, r.guarantee);
    EXPECT_EQ(assemble_subgradient(back.probes, back.basis), r.subgradient);
}

TEST(Loaders, Fixtures) {
    auto tri = polytope_from_json(read_json_file(fixture("tri.json")));
    EXPECT_EQ(tri.dim(), 2u);
    EXPECT_EQ(midpoint_element(tri).point, (Vector{1, 1}));
    auto c1 = polytope_from_json(read_json_file(fixture("example43_c1.json")));
    EXPECT_EQ(interval_hull(c1).lower, (Vector{-1, -1, -1}));

    auto ode = ode_problem_from_json(read_json_file(fixture("example46.json")));
    EXPECT_EQ(ode.n_state, 3u);
    auto ref = example46_problem();
    for (Vector x : {Vector{0.5, -1, 2}, Vector{0, 0, 1}})
        EXPECT_EQ(ode.rhs.dir_deriv(x, Vector{1, -1, 1}), ref.rhs.dir_deriv(x, Vector{1, -1, 1}));

    auto circle = optimal_value_problem_from_json(read_json_file(fixture("circle.json")));
    EXPECT_EQ(std::get<PointCloud>(circle.feasible).points.size(), 360u);
    auto box = optimal_value_problem_from_json(read_json_file(fixture("box_bilinear.json")));
    EXPECT_EQ(std::get<Box>(box.feasible).refine_steps, 40u);
}

TEST(Loaders, SchemaErrors) {
    const Json missing_vertices = Json::parse(R"j({"dim": 2})j");
    const Json wrong_dim = Json::parse(R"j({"dim": 2, "vertices": [[1, 2, 3]]})j");
    const Json short_init = Json::parse(
        R"j({"n_state": 1, "rhs_expr": ["(var 0)"], "init_expr": [], "cost_expr": "(var 2)", "t_final": 1})j");
    const Json bad_expr = Json::parse(
        R"j({"n_state": 1, "rhs_expr": ["(var 0"], "init_expr": ["(var 0)"], "cost_expr": "(var 2)", "t_final": 1})j");
    const Json bad_set = Json::parse(
        R"j({"m": 2, "objective": "(var 2)", "gradient": ["(var 2)", "(var 3)"], "feasible": {"ring": 3}})j");
    EXPECT_THROW(polytope_from_json(missing_vertices), ArgumentError);
    EXPECT_THROW(polytope_from_json(wrong_dim), ArgumentError);
    EXPECT_THROW(ode_problem_from_json(short_init), ArgumentError);
    EXPECT_THROW(ode_problem_from_json(bad_expr), ParseError);
    EXPECT_THROW(optimal_value_problem_from_json(bad_set), ArgumentError);
    EXPECT_THROW(read_json_file(fixture("does_not_exist.json")), ArgumentError);
    auto bad = std::filesystem::temp_directory_path() / "compass_bad.json";
    write_text(bad.string(), "{ not json");
    EXPECT_THROW(read_json_file(bad.string()), ArgumentError);
    std::filesystem::remove(bad);
}

TEST(Csv, Layouts) {
    auto tr = integrate_coupled(example46_problem(), Vector{0, 0}, Vector{1, 0}, IntegrationConfig{});
    std::istringstream in(trajectory_csv(tr));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "t,x1,x2,x3,y1,y2,y3");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, tr.times.size());

    auto t = subgradient_method(euclid_norm_2d().oracle(), Vector{3, 4}, PolyakStep{0.0}, 10, 0.0);
    std::string csv = trace_csv(t);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "iter,x1,x2,f,g1,g2,step");
    EXPECT_NE(csv.find("\n0,3,4,5,0.59999999999999998,0.80000000000000004,5\n"), std::string::npos);

    std::string bench = benchmark_csv({{"abs_sum", "polyak", 0.25, 7}});
    EXPECT_EQ(bench, "function,rule,best_value,iterations\nabs_sum,polyak,0.25,7\n");
}
