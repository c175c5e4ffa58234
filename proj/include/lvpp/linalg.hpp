#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseCore>

namespace lvpp {

using Vector = std::vector<double>;

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

    // Duplicates are summed; explicit zeros are kept so sparsity patterns stay stable.
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries);
    static SparseMatrix identity(int n);
    static SparseMatrix diagonal(const Vector& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double at(int i, int j) const;
    Vector multiply(const Vector& x) const;
    Vector multiply_transpose(const Vector& x) const;
    SparseMatrix transpose() const;
    Vector diagonal_entries() const;
    void scale(double s);
    bool is_symmetric(double tol = 1e-12) const;

    Eigen::SparseMatrix<double, Eigen::RowMajor> to_eigen() const;
    static SparseMatrix from_eigen(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

// a*A + b*B
SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B, double a = 1.0, double b = 1.0);
// A * diag(d) * A^T
SparseMatrix weighted_gram(const SparseMatrix& A, const Vector& d);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
// y += a x
void axpy(double a, const Vector& x, Vector& y);

// Symmetric elimination of constrained rows/columns: returns the reduced matrix
// with unit diagonal on constrained dofs and moves known values into rhs.
SparseMatrix apply_dirichlet(const SparseMatrix& A, Vector& rhs, const std::vector<char>& mask,
                             const Vector& values);

enum class SolverKind { Auto, Cholesky, ConjugateGradient };

struct SolveOptions {
    SolverKind kind = SolverKind::Auto;
    double tol = 1e-12;
    int max_iterations = 0; // 0 selects 10 * n
    int direct_limit = 100000;
};

struct CgResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients.
CgResult cg_jacobi(const SparseMatrix& A, const Vector& b, double tol, int max_iterations,
                   const Vector* x0 = nullptr);

// Sparse Cholesky (LLT, with LDLT fallback) that can refactor a matrix with a fixed pattern.
class SpdFactorization {
public:
    SpdFactorization();
    ~SpdFactorization();
    SpdFactorization(SpdFactorization&&) noexcept;
    SpdFactorization& operator=(SpdFactorization&&) noexcept;

    void factorize(const SparseMatrix& A);
    Vector solve(const Vector& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Vector solve_spd(const SparseMatrix& A, const Vector& b, const SolveOptions& opts = {});
// Sparse LU for nonsymmetric systems.
Vector solve_general(const SparseMatrix& A, const Vector& b);

// [A  B ] [u]   [rhs_V]
// [B^T -C] [d] = [rhs_W]   with C diagonal.
struct SaddleSystem {
    SparseMatrix A;
    SparseMatrix B;
    Vector C;
    Vector rhs_V;
    Vector rhs_W;
    // Optional constraints: u fixed on dirichlet dofs, d = 0 on fixed_W dofs.
    std::vector<char> dirichlet;
    Vector dirichlet_values;
    std::vector<char> fixed_W;
};

struct SaddleSolution {
    Vector u;
    Vector delta;
};

// Eliminates d = C^{-1}(B^T u - rhs_W) and solves (A + B C^{-1} B^T) u = rhs_V + B C^{-1} rhs_W.
// Increments *counter once when given.
SaddleSolution condense_and_solve(const SaddleSystem& sys, const SolveOptions& opts = {},
                                  int* counter = nullptr);

// Dense LU on the unreduced block matrix. Small systems only.
SaddleSolution dense_block_solve(const SaddleSystem& sys);

// Relative residuals of the two block equations (free rows only).
std::pair<double, double> saddle_residuals(const SaddleSystem& sys, const SaddleSolution& sol);

} // namespace lvpp
