#include "lvpp/stability.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>

#include "lvpp/error.hpp"
#include "lvpp/fespace.hpp"

namespace lvpp {

namespace {

// Columns: P0 cell fields of the coarse mesh. Rows: free H1 dofs. Entry: (w_c, v_i).
// Returns G = C^T K^{-1} C restricted to free dofs.
Eigen::MatrixXd hminus1_gram(const FeSpace& V, const SparseMatrix& coupling) {
    const auto mask = V.mesh().boundary_vertex_mask();
    const int n = V.ndofs();
    std::vector<int> free_index(n, -1);
    int nf = 0;
    for (int i = 0; i < n; ++i)
        if (!(i < V.mesh().num_vertices() && mask[i])) free_index[i] = nf++;
    const SparseMatrix K = assemble_stiffness(V);
    std::vector<Eigen::Triplet<double>> kt;
    for (int i = 0; i < n; ++i) {
        if (free_index[i] < 0) continue;
        for (int p = K.row_ptr()[i]; p < K.row_ptr()[i + 1]; ++p) {
            const int j = K.col_idx()[p];
            if (free_index[j] >= 0) kt.emplace_back(free_index[i], free_index[j], K.values()[p]);
        }
    }
    Eigen::SparseMatrix<double> Kf(nf, nf);
    Kf.setFromTriplets(kt.begin(), kt.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(Kf);
    if (chol.info() != Eigen::Success) throw LinearSolveError("discrete_inf_sup: stiffness factorization failed");
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nf, coupling.cols());
    for (int i = 0; i < coupling.rows(); ++i) {
        if (free_index[i] < 0) continue;
        for (int p = coupling.row_ptr()[i]; p < coupling.row_ptr()[i + 1]; ++p)
            C(free_index[i], coupling.col_idx()[p]) += coupling.values()[p];
    }
    const Eigen::MatrixXd X = chol.solve(C);
    return C.transpose() * X;
}

} // namespace

double discrete_inf_sup(const Mesh& mesh, int refinements) {
    if (refinements < 1) throw ConfigError("discrete_inf_sup: need at least one refinement");
    FeSpace V(mesh, SpaceKind::P1Bubble);
    FeSpace W(mesh, SpaceKind::P0Broken);
    const Eigen::MatrixXd Gh = hminus1_gram(V, assemble_coupling(V, W));

    Mesh fine = mesh;
    int children = 1;
    for (int r = 0; r < refinements; ++r) {
        fine = refine_uniform(fine);
        children *= 4;
    }
    FeSpace Vf(fine, SpaceKind::P1Nodal);
    std::vector<Triplet> tr;
    for (int c = 0; c < fine.num_cells(); ++c) {
        const double a = fine.cell_area(c) / 3.0;
        for (int v : fine.cells[c]) tr.push_back({v, c / children, a});
    }
    const SparseMatrix Cf = SparseMatrix::from_triplets(fine.num_vertices(), mesh.num_cells(), std::move(tr));
    const Eigen::MatrixXd Gf = hminus1_gram(Vf, Cf);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Gh, Gf);
    if (es.info() != Eigen::Success) throw NonConvergence("discrete_inf_sup: eigenvalue solve failed");
    return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

} // namespace lvpp
