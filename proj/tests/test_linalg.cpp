#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "lvpp/error.hpp"
#include "lvpp/fespace.hpp"
#include "lvpp/linalg.hpp"
#include "lvpp/mesh.hpp"

using namespace lvpp;

namespace {

SparseMatrix laplacian_1d(int n, double h) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0 / (h * h)});
        if (i > 0) t.push_back({i, i - 1, -1.0 / (h * h)});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0 / (h * h)});
    }
    return SparseMatrix::from_triplets(n, n, t);
}

// (P1-bubble, P0) system on the two-cell square: interior bubbles only.
SaddleSystem toy_system(double eps) {
    static const Mesh m = unit_square_mesh(1);
    FeSpace V(m, SpaceKind::P1Bubble), W(m, SpaceKind::P0Broken);
    V.set_dirichlet([](double, double) { return 0.0; });
    SaddleSystem s;
    s.A = assemble_stiffness(V);
    s.B = assemble_coupling(V, W);
    s.C = {m.cell_area(0) * (0.7 + eps), m.cell_area(1) * (1.9 + eps)};
    s.rhs_V = assemble_load(V, [](double x, double y) { return 1.0 + x * y; });
    s.rhs_W = {0.3, -0.2};
    s.dirichlet = V.dirichlet_mask();
    s.dirichlet_values = V.dirichlet_values();
    return s;
}

} // namespace

TEST(Sparse, TripletsSumDuplicates) {
    const SparseMatrix A = SparseMatrix::from_triplets(2, 3, {{0, 1, 1.0}, {0, 1, 2.0}, {1, 2, -1.0}, {1, 0, 0.0}});
    EXPECT_DOUBLE_EQ(A.at(0, 1), 3.0);
    EXPECT_DOUBLE_EQ(A.at(1, 2), -1.0);
    EXPECT_DOUBLE_EQ(A.at(0, 0), 0.0);
    EXPECT_EQ(A.nnz(), 3u); // explicit zero kept
    const Vector y = A.multiply({1.0, 1.0, 1.0});
    EXPECT_DOUBLE_EQ(y[0], 3.0);
    EXPECT_DOUBLE_EQ(y[1], -1.0);
    const Vector z = A.multiply_transpose({1.0, 2.0});
    EXPECT_DOUBLE_EQ(z[1], 3.0);
    EXPECT_DOUBLE_EQ(z[2], -2.0);
    EXPECT_DOUBLE_EQ(A.transpose().at(1, 0), 3.0);
    EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
    EXPECT_THROW(A.multiply({1.0}), std::invalid_argument);
}

TEST(Sparse, GramAndAdd) {
    const SparseMatrix B = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}});
    const SparseMatrix G = weighted_gram(B, {2.0, 0.5});
    // B diag(d) B^T
    EXPECT_DOUBLE_EQ(G.at(0, 0), 2.0 + 4.0 * 0.5);
    EXPECT_DOUBLE_EQ(G.at(0, 1), 2.0 * 3.0 * 0.5);
    EXPECT_DOUBLE_EQ(G.at(1, 1), 9.0 * 0.5);
    EXPECT_TRUE(G.is_symmetric());
    const SparseMatrix S = add(B, SparseMatrix::identity(2), 2.0, -1.0);
    EXPECT_DOUBLE_EQ(S.at(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(S.at(1, 1), 5.0);
}

TEST(Solve, Examples) {
    const Vector b = {1.0, -2.0, 3.5};
    const Vector x = solve_spd(SparseMatrix::identity(3), b);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(x[i], b[i]);
    const SparseMatrix A = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 2.0}});
    for (SolverKind k : {SolverKind::Cholesky, SolverKind::ConjugateGradient}) {
        SolveOptions o;
        o.kind = k;
        const Vector y = solve_spd(A, {1.0, 1.0}, o);
        EXPECT_NEAR(y[0], 1.0, 1e-12);
        EXPECT_NEAR(y[1], 1.0, 1e-12);
    }
}

TEST(Solve, Laplacian1dParabola) {
    const int n = 100;
    const double h = 1.0 / (n + 1);
    const SparseMatrix A = laplacian_1d(n, h);
    const Vector rhs(n, 1.0);
    SolveOptions chol;
    chol.kind = SolverKind::Cholesky;
    SolveOptions cg;
    cg.kind = SolverKind::ConjugateGradient;
    cg.tol = 1e-14;
    const Vector x1 = solve_spd(A, rhs, chol);
    const Vector x2 = solve_spd(A, rhs, cg);
    for (int i = 0; i < n; ++i) {
        const double t = (i + 1) * h;
        EXPECT_NEAR(x1[i], 0.5 * t * (1 - t), 1e-10);
        EXPECT_NEAR(x2[i], 0.5 * t * (1 - t), 1e-10);
    }
}

TEST(Solve, NotSpdDetected) {
    const SparseMatrix A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}});
    SolveOptions o;
    o.kind = SolverKind::Cholesky;
    EXPECT_THROW(solve_spd(A, {1.0, 1.0}, o), LinearSolveError);
    EXPECT_THROW(cg_jacobi(A, {1.0, 1.0}, 1e-12, 10), LinearSolveError);
}

TEST(Solve, GeneralLu) {
    const SparseMatrix A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, -3.0}, {1, 1, 1.0}});
    const Vector x = solve_general(A, {5.0, -1.0});
    EXPECT_NEAR(x[0], 1.0, 1e-14);
    EXPECT_NEAR(x[1], 2.0, 1e-14);
    const SparseMatrix S = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}});
    EXPECT_THROW(solve_general(S, {1.0, 1.0}), LinearSolveError);
}

TEST(Solve, ApplyDirichlet) {
    const int n = 5;
    const SparseMatrix A = laplacian_1d(n, 1.0);
    Vector rhs(n, 0.0);
    std::vector<char> mask(n, 0);
    Vector vals(n, 0.0);
    mask[0] = mask[n - 1] = 1;
    vals[0] = 1.0;
    vals[n - 1] = 3.0;
    const SparseMatrix R = apply_dirichlet(A, rhs, mask, vals);
    EXPECT_TRUE(R.is_symmetric());
    const Vector x = solve_spd(R, rhs);
    // harmonic: linear between the constrained values
    for (int i = 0; i < n; ++i) EXPECT_NEAR(x[i], 1.0 + 2.0 * i / (n - 1), 1e-12);
}

TEST(Saddle, MatchesDenseBlockSolve) {
    const SaddleSystem s = toy_system(1e-6);
    int count = 0;
    const SaddleSolution a = condense_and_solve(s, {}, &count);
    const SaddleSolution b = dense_block_solve(s);
    EXPECT_EQ(count, 1);
    ASSERT_EQ(a.u.size(), b.u.size());
    for (std::size_t i = 0; i < a.u.size(); ++i) EXPECT_NEAR(a.u[i], b.u[i], 1e-12);
    for (std::size_t j = 0; j < a.delta.size(); ++j) EXPECT_NEAR(a.delta[j], b.delta[j], 1e-12);
    const auto [r1, r2] = saddle_residuals(s, a);
    EXPECT_LT(r1, 1e-12);
    EXPECT_LT(r2, 1e-12);
}

TEST(Saddle, ZeroCouplingDecouples) {
    SaddleSystem s = toy_system(0.0);
    s.B = SparseMatrix::from_triplets(s.B.rows(), s.B.cols(), {});
    const SaddleSolution sol = condense_and_solve(s);
    Vector rhs = s.rhs_V;
    const Vector u = solve_spd(apply_dirichlet(s.A, rhs, s.dirichlet, s.dirichlet_values), rhs);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(sol.u[i], u[i], 1e-13);
    // -C d = rhs_W
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(sol.delta[j], -s.rhs_W[j] / s.C[j], 1e-14);
}

TEST(Saddle, ZeroDiagonalRejected) {
    SaddleSystem s = toy_system(0.0);
    s.C[1] = 0.0;
    EXPECT_THROW(condense_and_solve(s), LinearSolveError);
}

TEST(Saddle, SchurComplementSpdAndDeterministic) {
    const Mesh m = unit_square_mesh(16);
    FeSpace V(m, SpaceKind::P1Bubble), W(m, SpaceKind::P0Broken);
    V.set_dirichlet([](double, double) { return 0.0; });
    SaddleSystem s;
    s.A = assemble_stiffness(V);
    s.B = assemble_coupling(V, W);
    s.C.resize(W.ndofs());
    for (int c = 0; c < m.num_cells(); ++c) s.C[c] = m.cell_area(c) * (std::exp(-30.0 * (c % 7)) + 1e-6);
    s.rhs_V = assemble_load(V, [](double x, double y) { return std::sin(3 * x) * y; });
    s.rhs_W.assign(W.ndofs(), 1e-3);
    s.dirichlet = V.dirichlet_mask();
    s.dirichlet_values = V.dirichlet_values();
    SolveOptions o;
    o.kind = SolverKind::Cholesky;
    const SaddleSolution a = condense_and_solve(s, o);
    const SaddleSolution b = condense_and_solve(s, o);
    EXPECT_EQ(0, std::memcmp(a.u.data(), b.u.data(), a.u.size() * sizeof(double)));
    EXPECT_EQ(0, std::memcmp(a.delta.data(), b.delta.data(), a.delta.size() * sizeof(double)));
    const auto [r1, r2] = saddle_residuals(s, a);
    EXPECT_LT(r1, 1e-9);
    EXPECT_LT(r2, 1e-9);
}

TEST(Factorization, RefactorSamePattern) {
    SparseMatrix A = laplacian_1d(10, 1.0);
    SpdFactorization f;
    f.factorize(A);
    const Vector x1 = f.solve(Vector(10, 1.0));
    A.scale(2.0);
    f.factorize(A);
    const Vector x2 = f.solve(Vector(10, 1.0));
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(x2[i], 0.5 * x1[i], 1e-12);
}
