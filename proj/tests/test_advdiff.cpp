#include <cmath>

#include <gtest/gtest.h>

#include "lvpp/entropy.hpp"
#include "lvpp/error.hpp"
#include "lvpp/problems.hpp"
#include "lvpp/solver.hpp"

using namespace lvpp;

TEST(AdvectionDiffusion, BoundLayerBenchmark) {
    const double eps = 1e-2;
    const EjBenchmark ej = eriksson_johnson_benchmark(eps);
    const PointFn exact = [ej](double x, double y) { return ej.value(x, y); };
    const Mesh m = rectangle_mesh(0.0, 1.0, 0.0, 1.0, 32, 32);
    AdvDiffOptions o;
    o.eps_diff = eps;
    o.rho = 10.0;
    o.iterations = 2;
    StepSchedule sch = StepSchedule::parse("fixed:1");
    const AdvDiffReport r =
        lvpp_advection_diffusion(m, [](double, double) { return 0.0; }, exact, sch, o, exact);
    EXPECT_EQ(r.utilde_violations, 0);
    EXPECT_GE(r.utilde_min, 0.0);
    EXPECT_LE(r.utilde_max, 1.0);
    EXPECT_LT(r.galerkin_min, -1e-3);
    EXPECT_LE(r.utilde_l2_error, 2.0 * r.galerkin_l2_error);
    EXPECT_LT(r.nodal_feasibility_gap, 1e-8);
    EXPECT_EQ(r.rows.size(), 2u);
    EXPECT_LT(r.wall_seconds, 30.0);
    ASSERT_EQ(r.psi.size(), r.u.size());
    for (std::size_t i = 0; i < r.psi.size(); ++i) {
        const double s = entropy::sigmoid(r.psi[i]);
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, 1.0);
    }
}

TEST(AdvectionDiffusion, ConstantDataWithoutTransport) {
    const Mesh m = rectangle_mesh(0.0, 1.0, 0.0, 1.0, 8, 8);
    AdvDiffOptions o;
    o.beta = {0.0, 0.0};
    o.iterations = 3;
    StepSchedule sch = StepSchedule::parse("fixed:1");
    const AdvDiffReport r = lvpp_advection_diffusion(m, [](double, double) { return 0.0; },
                                                     [](double, double) { return 0.5; }, sch, o);
    for (double u : r.u) EXPECT_NEAR(u, 0.5, 1e-9);
    for (double u : r.galerkin) EXPECT_NEAR(u, 0.5, 1e-12);
    for (double p : r.psi) EXPECT_NEAR(p, 0.0, 1e-8);
}

TEST(AdvectionDiffusion, RejectsBadOptions) {
    const Mesh m = rectangle_mesh(0.0, 1.0, 0.0, 1.0, 4, 4);
    const PointFn z = [](double, double) { return 0.0; };
    AdvDiffOptions o;
    o.rho = 0.0;
    StepSchedule sch = StepSchedule::parse("fixed:1");
    EXPECT_THROW(lvpp_advection_diffusion(m, z, z, sch, o), ConfigError);
    o.rho = 1.0;
    o.lumped = false;
    EXPECT_THROW(lvpp_advection_diffusion(m, z, z, sch, o), ConfigError);
}
