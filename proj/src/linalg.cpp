#include "lvpp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "lvpp/error.hpp"

namespace lvpp {

using EigenCol = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using EigenRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> entries) {
    SparseMatrix m(rows, cols);
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    m.col_idx_.reserve(entries.size());
    m.values_.reserve(entries.size());
    int last_row = -1, last_col = -1;
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::out_of_range("SparseMatrix: triplet index out of range");
        if (t.row == last_row && t.col == last_col) {
            m.values_.back() += t.value;
            continue;
        }
        m.col_idx_.push_back(t.col);
        m.values_.push_back(t.value);
        ++m.row_ptr_[t.row + 1];
        last_row = t.row;
        last_col = t.col;
    }
    std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
    return m;
}

SparseMatrix SparseMatrix::identity(int n) { return diagonal(Vector(n, 1.0)); }

SparseMatrix SparseMatrix::diagonal(const Vector& d) {
    const int n = static_cast<int>(d.size());
    SparseMatrix m(n, n);
    m.col_idx_.resize(n);
    m.values_ = d;
    for (int i = 0; i < n; ++i) {
        m.row_ptr_[i + 1] = i + 1;
        m.col_idx_[i] = i;
    }
    return m;
}

double SparseMatrix::at(int i, int j) const {
    const auto b = col_idx_.begin() + row_ptr_[i];
    const auto e = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(b, e, j);
    return (it != e && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

Vector SparseMatrix::multiply(const Vector& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
    Vector y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
        y[i] = s;
    }
    return y;
}

Vector SparseMatrix::multiply_transpose(const Vector& x) const {
    if (static_cast<int>(x.size()) != rows_) throw std::invalid_argument("SparseMatrix::multiply_transpose: size mismatch");
    Vector y(cols_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * x[i];
    }
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (int i = 0; i < rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.push_back({col_idx_[k], i, values_[k]});
    return from_triplets(cols_, rows_, std::move(t));
}

Vector SparseMatrix::diagonal_entries() const {
    Vector d(std::min(rows_, cols_), 0.0);
    for (int i = 0; i < static_cast<int>(d.size()); ++i) d[i] = at(i, i);
    return d;
}

void SparseMatrix::scale(double s) {
    for (auto& v : values_) v *= s;
}

bool SparseMatrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    double scale = 0.0;
    for (double v : values_) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (std::abs(values_[k] - at(col_idx_[k], i)) > tol * std::max(scale, 1.0)) return false;
    return true;
}

EigenRow SparseMatrix::to_eigen() const {
    EigenRow m(rows_, cols_);
    if (values_.empty()) return m;
    m.reserve(static_cast<Eigen::Index>(values_.size()));
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(values_.size());
    for (int i = 0; i < rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.emplace_back(i, col_idx_[k], values_[k]);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix SparseMatrix::from_eigen(const EigenRow& in) {
    EigenRow m = in;
    m.makeCompressed();
    SparseMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    const auto nnz = static_cast<std::size_t>(m.nonZeros());
    out.col_idx_.assign(m.innerIndexPtr(), m.innerIndexPtr() + nnz);
    out.values_.assign(m.valuePtr(), m.valuePtr() + nnz);
    out.row_ptr_.assign(m.outerIndexPtr(), m.outerIndexPtr() + m.rows() + 1);
    return out;
}

SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B, double a, double b) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw std::invalid_argument("add: shape mismatch");
    EigenRow s = a * A.to_eigen() + b * B.to_eigen();
    return SparseMatrix::from_eigen(s);
}

SparseMatrix weighted_gram(const SparseMatrix& A, const Vector& d) {
    if (static_cast<int>(d.size()) != A.cols()) throw std::invalid_argument("weighted_gram: size mismatch");
    const EigenRow a = A.to_eigen();
    Eigen::Map<const Eigen::VectorXd> dv(d.data(), static_cast<Eigen::Index>(d.size()));
    const EigenRow ad = a * dv.asDiagonal();
    const EigenRow at = a.transpose();
    EigenRow g = ad * at;
    return SparseMatrix::from_eigen(g);
}

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double a, const Vector& x, Vector& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

SparseMatrix apply_dirichlet(const SparseMatrix& A, Vector& rhs, const std::vector<char>& mask,
                             const Vector& values) {
    const int n = A.rows();
    if (static_cast<int>(mask.size()) != n || static_cast<int>(values.size()) != n || static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("apply_dirichlet: size mismatch");
    const auto& rp = A.row_ptr();
    const auto& ci = A.col_idx();
    const auto& v = A.values();
    std::vector<Triplet> t;
    t.reserve(A.nnz());
    for (int i = 0; i < n; ++i) {
        if (mask[i]) {
            t.push_back({i, i, 1.0});
            continue;
        }
        for (int k = rp[i]; k < rp[i + 1]; ++k) {
            const int j = ci[k];
            if (mask[j]) {
                rhs[i] -= v[k] * values[j];
            } else {
                t.push_back({i, j, v[k]});
            }
        }
    }
    for (int i = 0; i < n; ++i)
        if (mask[i]) rhs[i] = values[i];
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

CgResult cg_jacobi(const SparseMatrix& A, const Vector& b, double tol, int max_iterations, const Vector* x0) {
    const int n = A.rows();
    CgResult res;
    res.x = x0 ? *x0 : Vector(n, 0.0);
    Vector dinv = A.diagonal_entries();
    for (auto& d : dinv) {
        if (!(d > 0.0)) throw LinearSolveError("cg_jacobi: nonpositive diagonal entry (matrix not SPD)");
        d = 1.0 / d;
    }
    Vector r = A.multiply(res.x);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double bnorm = std::max(norm2(b), 1e-300);
    Vector z(n), p(n);
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    p = z;
    double rz = dot(r, z);
    if (max_iterations <= 0) max_iterations = 10 * n + 10;
    res.relative_residual = norm2(r) / bnorm;
    while (res.relative_residual > tol && res.iterations < max_iterations) {
        const Vector Ap = A.multiply(p);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) throw LinearSolveError("cg_jacobi: breakdown, p^T A p = " + std::to_string(pAp));
        const double a = rz / pAp;
        axpy(a, p, res.x);
        axpy(-a, Ap, r);
        for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++res.iterations;
        res.relative_residual = norm2(r) / bnorm;
    }
    if (res.relative_residual > tol)
        throw NonConvergence("cg_jacobi: relative residual " + std::to_string(res.relative_residual) +
                             " after " + std::to_string(res.iterations) + " iterations");
    return res;
}

struct SpdFactorization::Impl {
    Eigen::SimplicialLLT<EigenCol> llt;
    Eigen::SimplicialLDLT<EigenCol> ldlt;
    bool use_ldlt = false;
    bool analyzed = false;
    Eigen::Index rows = -1;
    Eigen::Index nnz = -1;
};

SpdFactorization::SpdFactorization() : impl_(std::make_unique<Impl>()) {}
SpdFactorization::~SpdFactorization() = default;
SpdFactorization::SpdFactorization(SpdFactorization&&) noexcept = default;
SpdFactorization& SpdFactorization::operator=(SpdFactorization&&) noexcept = default;

void SpdFactorization::factorize(const SparseMatrix& A) {
    if (A.rows() != A.cols()) throw LinearSolveError("SpdFactorization: matrix not square");
    EigenCol m = A.to_eigen();
    m.makeCompressed();
    auto& s = *impl_;
    const bool same = s.analyzed && s.rows == m.rows() && s.nnz == m.nonZeros();
    if (!same) {
        s.llt.analyzePattern(m);
        s.analyzed = true;
        s.rows = m.rows();
        s.nnz = m.nonZeros();
    }
    s.llt.factorize(m);
    s.use_ldlt = s.llt.info() != Eigen::Success;
    if (s.use_ldlt) {
        s.ldlt.compute(m);
        if (s.ldlt.info() != Eigen::Success) throw LinearSolveError("SpdFactorization: matrix is not SPD");
        const auto d = s.ldlt.vectorD();
        if ((d.array() <= 0.0).any()) throw LinearSolveError("SpdFactorization: matrix is not SPD (nonpositive pivot)");
    }
}

Vector SpdFactorization::solve(const Vector& b) const {
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = impl_->use_ldlt ? Eigen::VectorXd(impl_->ldlt.solve(bv)) : Eigen::VectorXd(impl_->llt.solve(bv));
    return Vector(x.data(), x.data() + x.size());
}

Vector solve_spd(const SparseMatrix& A, const Vector& b, const SolveOptions& opts) {
    if (A.rows() != static_cast<int>(b.size())) throw std::invalid_argument("solve_spd: size mismatch");
    const bool direct = opts.kind == SolverKind::Cholesky ||
                        (opts.kind == SolverKind::Auto && A.rows() <= opts.direct_limit);
    if (direct) {
        SpdFactorization f;
        f.factorize(A);
        Vector x = f.solve(b);
        for (double v : x)
            if (!std::isfinite(v)) throw LinearSolveError("solve_spd: non-finite solution");
        return x;
    }
    return cg_jacobi(A, b, opts.tol, opts.max_iterations).x;
}

Vector solve_general(const SparseMatrix& A, const Vector& b) {
    if (A.rows() != A.cols() || A.rows() != static_cast<int>(b.size()))
        throw std::invalid_argument("solve_general: size mismatch");
    EigenCol m = A.to_eigen();
    m.makeCompressed();
    Eigen::SparseLU<EigenCol> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw LinearSolveError("solve_general: singular matrix");
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXd x = lu.solve(bv);
    return Vector(x.data(), x.data() + x.size());
}

namespace {

Vector inverse_weights(const SaddleSystem& sys) {
    const int nW = static_cast<int>(sys.C.size());
    Vector cinv(nW, 0.0);
    for (int j = 0; j < nW; ++j) {
        if (!sys.fixed_W.empty() && sys.fixed_W[j]) continue;
        if (!(sys.C[j] > 0.0) || !std::isfinite(sys.C[j]))
            throw LinearSolveError("condense_and_solve: nonpositive diagonal in C (check epsilon)");
        cinv[j] = 1.0 / sys.C[j];
    }
    return cinv;
}

} // namespace

SaddleSolution condense_and_solve(const SaddleSystem& sys, const SolveOptions& opts, int* counter) {
    const int nV = sys.A.rows();
    const int nW = static_cast<int>(sys.C.size());
    if (sys.B.rows() != nV || sys.B.cols() != nW) throw std::invalid_argument("condense_and_solve: B has wrong shape");
    const Vector cinv = inverse_weights(sys);
    SparseMatrix S = add(sys.A, weighted_gram(sys.B, cinv));
    Vector scaled(nW);
    for (int j = 0; j < nW; ++j) scaled[j] = cinv[j] * sys.rhs_W[j];
    Vector r = sys.B.multiply(scaled);
    for (int i = 0; i < nV; ++i) r[i] += sys.rhs_V[i];
    if (!sys.dirichlet.empty()) S = apply_dirichlet(S, r, sys.dirichlet, sys.dirichlet_values);
    SaddleSolution sol;
    sol.u = solve_spd(S, r, opts);
    if (counter) ++*counter;
    const Vector btu = sys.B.multiply_transpose(sol.u);
    sol.delta.assign(nW, 0.0);
    for (int j = 0; j < nW; ++j) sol.delta[j] = cinv[j] * (btu[j] - sys.rhs_W[j]);
    return sol;
}

SaddleSolution dense_block_solve(const SaddleSystem& sys) {
    const int nV = sys.A.rows();
    const int nW = static_cast<int>(sys.C.size());
    const int n = nV + nW;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    const Eigen::MatrixXd A = Eigen::MatrixXd(sys.A.to_eigen());
    const Eigen::MatrixXd B = Eigen::MatrixXd(sys.B.to_eigen());
    M.topLeftCorner(nV, nV) = A;
    M.topRightCorner(nV, nW) = B;
    M.bottomLeftCorner(nW, nV) = B.transpose();
    for (int j = 0; j < nW; ++j) M(nV + j, nV + j) = -sys.C[j];
    for (int i = 0; i < nV; ++i) rhs[i] = sys.rhs_V[i];
    for (int j = 0; j < nW; ++j) rhs[nV + j] = sys.rhs_W[j];
    for (int i = 0; i < nV; ++i) {
        if (sys.dirichlet.empty() || !sys.dirichlet[i]) continue;
        M.row(i).setZero();
        M(i, i) = 1.0;
        rhs[i] = sys.dirichlet_values[i];
    }
    for (int j = 0; j < nW; ++j) {
        if (sys.fixed_W.empty() || !sys.fixed_W[j]) continue;
        M.row(nV + j).setZero();
        M(nV + j, nV + j) = 1.0;
        rhs[nV + j] = 0.0;
    }
    const Eigen::VectorXd x = M.partialPivLu().solve(rhs);
    SaddleSolution sol;
    sol.u.assign(x.data(), x.data() + nV);
    sol.delta.assign(x.data() + nV, x.data() + n);
    return sol;
}

std::pair<double, double> saddle_residuals(const SaddleSystem& sys, const SaddleSolution& sol) {
    const int nV = sys.A.rows();
    const int nW = static_cast<int>(sys.C.size());
    Vector r1 = sys.A.multiply(sol.u);
    const Vector bd = sys.B.multiply(sol.delta);
    double n1 = 0.0, d1 = 0.0;
    for (int i = 0; i < nV; ++i) {
        if (!sys.dirichlet.empty() && sys.dirichlet[i]) continue;
        const double r = r1[i] + bd[i] - sys.rhs_V[i];
        n1 += r * r;
        d1 += sys.rhs_V[i] * sys.rhs_V[i];
    }
    const Vector btu = sys.B.multiply_transpose(sol.u);
    double n2 = 0.0, d2 = 0.0;
    for (int j = 0; j < nW; ++j) {
        if (!sys.fixed_W.empty() && sys.fixed_W[j]) continue;
        const double r = btu[j] - sys.C[j] * sol.delta[j] - sys.rhs_W[j];
        n2 += r * r;
        d2 += sys.rhs_W[j] * sys.rhs_W[j];
    }
    return {std::sqrt(n1) / std::max(std::sqrt(d1), 1e-300), std::sqrt(n2) / std::max(std::sqrt(d2), 1e-300)};
}

} // namespace lvpp
