#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "compass/all.hpp"
#include "oracles.hpp"

using namespace compass;

namespace {

IntegrationConfig tight() { return IntegrationConfig{1e-10, 1e-10, 200000, 1e-14, 0.0}; }

// x' = A x, x0(p) = p, cost c . x(t_f).
OdeProblem linear_problem(double a, double b, double c, double d, Vector cost, double tf) {
    auto row = [](double u, double v) {
        return Expr::add({Expr::scale(u, Expr::var(0)), Expr::scale(v, Expr::var(1))});
    };
    Expr g = Expr::add({Expr::scale(cost[0], Expr::var(2)), Expr::scale(cost[1], Expr::var(3))});
    return make_ode_problem({row(a, b), row(c, d)}, {Expr::var(0), Expr::var(1)}, g, tf);
}

}  // namespace

TEST(Ode, Example46SensitivityEndpoints) {
    auto prob = example46_problem();
    auto tr = integrate_coupled(prob, Vector{0, 0}, Vector{1, 0}, tight());
    ASSERT_EQ(tr.times.front(), 0.0);
    ASSERT_EQ(tr.times.back(), 1.0);
    const Vector& y = tr.sensitivities.back();
    EXPECT_NEAR(y[0], 2 * M_E, 1e-5);
    EXPECT_NEAR(y[1], 0.0, 1e-5);
    EXPECT_NEAR(y[2], M_E, 1e-5);
    for (double x : tr.states.back()) EXPECT_EQ(x, 0.0);

    auto back = integrate_coupled(prob, Vector{0, 0}, Vector{-1, 0}, tight());
    EXPECT_NEAR(back.sensitivities.back()[0], -std::cosh(1.0), 1e-5);
}

TEST(Ode, Example46TrajectoryMatchesClosedForm) {
    auto tr = integrate_coupled(example46_problem(), Vector{0, 0}, Vector{1, 0}, tight());
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        double t = tr.times[k];
        EXPECT_NEAR(tr.sensitivities[k][0], (1 + t) * std::exp(t), 1e-7);
        EXPECT_NEAR(tr.sensitivities[k][2], std::exp(t), 1e-7);
    }
    for (std::size_t k = 1; k < tr.times.size(); ++k) EXPECT_GT(tr.times[k], tr.times[k - 1]);
    EXPECT_EQ(tr.states.size(), tr.times.size());
    EXPECT_EQ(tr.sensitivities.size(), tr.times.size());
    EXPECT_EQ(tr.direction, (Vector{1, 0}));
}

TEST(Ode, LinearSystemAgainstMatrixExponential) {
    const double a = -0.5, b = 1.2, c = -0.8, d = 0.3;
    auto prob = linear_problem(a, b, c, d, {1.0, -2.0}, 1.5);
    auto e = oracles::expm2({{{a, b}, {c, d}}}, 1.5);
    std::mt19937_64 rng(103);
    for (int k = 0; k < 6; ++k) {
        Vector p = oracles::random_point(rng, 2, -1, 1), dir = oracles::random_point(rng, 2, -1, 1);
        auto tr = integrate_coupled(prob, p, dir, tight());
        Vector y = tr.sensitivities.back(), x = tr.states.back();
        for (int i = 0; i < 2; ++i) {
            EXPECT_NEAR(y[i], e[i][0] * dir[0] + e[i][1] * dir[1], 1e-7);
            EXPECT_NEAR(x[i], e[i][0] * p[0] + e[i][1] * p[1], 1e-7);
        }
    }
    // Smooth cost: the compass difference is the classical gradient (e^{tA})^T c.
    auto s = ode_subgradient(prob, Vector{0.2, -0.4}, tight()).subgradient;
    EXPECT_NEAR(s[0], e[0][0] * 1.0 + e[1][0] * -2.0, 1e-7);
    EXPECT_NEAR(s[1], e[0][1] * 1.0 + e[1][1] * -2.0, 1e-7);
}

TEST(Ode, CostDirectionalDerivativeExamples) {
    auto prob = example46_problem();
    auto cfg = tight();
    auto psi = oracles::example46_psi();
    EXPECT_NEAR(ode_cost_dirderiv(prob, Vector{0, 0}, Vector{1, 0}, cfg), psi[0], 1e-5);
    EXPECT_NEAR(ode_cost_dirderiv(prob, Vector{0, 0}, Vector{-1, 0}, cfg), psi[1], 1e-5);
    EXPECT_NEAR(ode_cost_dirderiv(prob, Vector{0, 0}, Vector{0, 1}, cfg), psi[2], 1e-5);
    EXPECT_NEAR(ode_cost_dirderiv(prob, Vector{0, 0}, Vector{0, -1}, cfg), psi[3], 1e-5);
    EXPECT_EQ(ode_cost_dirderiv(prob, Vector{0, 0}, Vector{0, 0}, cfg), 0.0);
}

TEST(Ode, Example46Subgradient) {
    auto r = ode_subgradient(example46_problem(), Vector{0, 0}, IntegrationConfig{});
    auto cf = oracles::example46_closed_form();
    EXPECT_NEAR(r.subgradient[0], cf[0], 1e-6);
    EXPECT_NEAR(r.subgradient[1], cf[1], 1e-6);
    EXPECT_NEAR(r.subgradient[0], 3.490, 2e-3);
    EXPECT_NEAR(r.subgradient[1], 0.772, 2e-3);
    EXPECT_EQ(r.guarantee, Guarantee::Guaranteed);
    ASSERT_EQ(r.probes.size(), 4u);
    EXPECT_EQ(r.probes[1].direction, (Vector{-1, 0}));
    EXPECT_EQ(assemble_subgradient(r.probes, r.basis), r.subgradient);
}

TEST(Ode, LooseTolerancesStayNearReferenceValue) {
    // Loose tolerances still land near (3.490, 0.772).
    auto r = ode_subgradient(example46_problem(), Vector{0, 0}, IntegrationConfig{1e-6, 1e-3, 200000, 1e-14, 0.0});
    EXPECT_NEAR(r.subgradient[0], 3.490, 5e-3);
    EXPECT_NEAR(r.subgradient[1], 0.772, 5e-3);
}

TEST(Ode, PsiPositiveHomogeneity) {
    auto prob = example46_problem();
    IntegrationConfig cfg;
    std::mt19937_64 rng(107);
    for (int k = 0; k < 8; ++k) {
        Vector d = oracles::random_point(rng, 2, -1, 1);
        double a = ode_cost_dirderiv(prob, Vector{0, 0}, d, cfg);
        double b = ode_cost_dirderiv(prob, Vector{0, 0}, scaled(2.0, d), cfg);
        EXPECT_NEAR(b, 2 * a, 10 * (cfg.abs_tol + cfg.rel_tol * std::abs(b)) * 10) << to_string(d);
    }
}

TEST(Ode, NineBranchTableFidelity) {
    auto prob = example46_problem();
    std::mt19937_64 rng(109);
    std::uniform_int_distribution<int> pin(0, 2);
    for (int k = 0; k < 10000; ++k) {
        Vector x = oracles::random_point(rng, 3, -2, 2), y = oracles::random_point(rng, 3, -2, 2);
        if (pin(rng) == 0) x[0] = 0.0;
        if (pin(rng) == 0) x[1] = 0.0;
        Vector auto_rhs = prob.rhs.dir_deriv(x, y);
        Vector table = oracles::example46_case_table(x, y);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(auto_rhs[i], table[i], 1e-15 * (1 + std::abs(table[i])));
    }
}

TEST(Ode, ToleranceRefinementConverges) {
    auto prob = example46_problem();
    Vector prev;
    double prev_inc = INFINITY;
    double tol = 1e-5;
    for (int k = 0; k <= 4; ++k, tol /= 2) {
        Vector s = ode_subgradient(prob, Vector{0, 0}, IntegrationConfig{tol, tol, 200000, 1e-14, 0.0}).subgradient;
        if (!prev.empty()) {
            double inc = distance(s, prev);
            EXPECT_LT(inc, prev_inc) << "tol " << tol;
            prev_inc = inc;
        }
        prev = s;
    }
}

TEST(Ode, InitialStepDoesNotChangeAnswer) {
    auto prob = example46_problem();
    IntegrationConfig cfg;
    Vector base = ode_subgradient(prob, Vector{0, 0}, cfg).subgradient;
    for (double h0 : {1e-2, 1e-4, 1e-6}) {
        IntegrationConfig c = cfg;
        c.initial_step = h0;
        Vector s = ode_subgradient(prob, Vector{0, 0}, c).subgradient;
        for (int i = 0; i < 2; ++i) EXPECT_NEAR(s[i], base[i], 10 * (cfg.abs_tol + cfg.rel_tol * 5)) << h0;
    }
}

TEST(Ode, SubgradientInequalityOnHaltonSample) {
    auto prob = example46_problem();
    IntegrationConfig cfg;
    Vector s = ode_subgradient(prob, Vector{0, 0}, cfg).subgradient;
    auto phi = [&](std::span<const double> p) { return ode_cost(prob, p, cfg); };
    auto samples = halton_box({-1, -1}, {1, 1}, 200);
    auto rep = verify_subgradient_inequality(phi, Vector{0, 0}, s, samples, kIntegratedSlack);
    EXPECT_TRUE(rep.pass) << rep.max_violation << " at " << to_string(rep.worst_sample);
}

TEST(Ode, CostValueAgainstClosedForm) {
    // For p1, p2 > 0 all states stay positive: x2 = p2 e^t, x3 = p1 e^t,
    // x1' = x1 + (p1 + p2) e^t gives x1(1) = p1 e + (p1 + p2) e.
    auto prob = example46_problem();
    double v = ode_cost(prob, Vector{0.3, 0.2}, tight());
    EXPECT_NEAR(v, 0.3 * M_E + 0.5 * M_E, 1e-8);
}

TEST(Ode, Errors) {
    auto prob = example46_problem();
    IntegrationConfig few;
    few.max_steps = 3;
    try {
        integrate_coupled(prob, Vector{0, 0}, Vector{1, 0}, few);
        FAIL();
    } catch (const IntegrationError& e) {
        EXPECT_GT(e.time(), 0.0);
        EXPECT_LT(e.time(), 1.0);
        EXPECT_EQ(e.direction(), (Vector{1, 0}));
    }
    try {
        ode_subgradient(prob, Vector{0, 0}, few);
        FAIL();
    } catch (const IntegrationError& e) {
        EXPECT_EQ(e.direction(), (Vector{1, 0}));
    }

    // x' = x^2 from 1 blows up at t = 1.
    auto blowup = make_ode_problem({parse_expr("(mul (var 0) (var 0))")}, {parse_expr("(add 1 (var 0))")},
                                   parse_expr("(var 2)"), 2.0);
    try {
        integrate_state(blowup, Vector{0, 0}, IntegrationConfig{});
        FAIL();
    } catch (const IntegrationError& e) {
        EXPECT_NEAR(e.time(), 1.0, 1e-3);
        EXPECT_TRUE(e.direction().empty());
    }

    IntegrationConfig bad;
    bad.abs_tol = 0;
    EXPECT_THROW(integrate_coupled(prob, Vector{0, 0}, Vector{1, 0}, bad), ArgumentError);
    bad = {};
    bad.max_steps = 0;
    EXPECT_THROW(ode_subgradient(prob, Vector{0, 0}, bad), ArgumentError);
    EXPECT_THROW(ode_subgradient(prob, Vector{0, 0, 0}, IntegrationConfig{}), ArgumentError);
    EXPECT_THROW(make_ode_problem({parse_expr("(var 0)")}, {parse_expr("(var 0)")}, parse_expr("(var 5)"), 1.0),
                 ArgumentError);
    EXPECT_THROW(make_ode_problem({parse_expr("(var 0)")}, {parse_expr("(var 0)")}, parse_expr("(var 2)"), -1.0),
                 ArgumentError);
    EXPECT_THROW(make_ode_problem({parse_expr("(var 0)")}, {}, parse_expr("(var 2)"), 1.0), ArgumentError);
}

TEST(Ode, Deterministic) {
    auto prob = example46_problem();
    auto a = ode_subgradient_with_trajectories(prob, Vector{0.1, -0.2}, IntegrationConfig{});
    auto b = ode_subgradient_with_trajectories(prob, Vector{0.1, -0.2}, IntegrationConfig{});
    EXPECT_EQ(a.result.subgradient, b.result.subgradient);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(a.trajectories[k].times, b.trajectories[k].times);
}
