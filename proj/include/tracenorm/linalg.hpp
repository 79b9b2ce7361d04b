#pragma once

#include <tracenorm/error.hpp>

#include <Eigen/Dense>

namespace tracenorm {

/// Max |A - A^T| relative to max |A|.
double symmetry_defect(const Eigen::MatrixXd& A);

/// Dense Cholesky factorization A = L L^T. Throws (numerical) naming the first
/// non-positive pivot when A is not positive definite.
class Cholesky
{
public:
    explicit Cholesky(const Eigen::MatrixXd& A);

    Eigen::Index size() const { return m_llt.rows(); }
    Eigen::MatrixXd factor() const { return m_llt.matrixL(); }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

private:
    Eigen::LLT<Eigen::MatrixXd> m_llt;
};

struct GeneralizedEigen
{
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // B-orthonormal columns
};

/// A x = lambda B x for symmetric A and symmetric positive definite B, by Cholesky
/// reduction to a standard symmetric problem.
GeneralizedEigen generalized_sym_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, bool with_vectors = true);

/// Extremal eigenvalues of the pencil only.
std::pair<double, double> extremal_eigenvalues(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Orthonormal basis of {x : C x = 0}. Rank is decided by the pivots of a column-pivoted
/// QR factorization of C^T relative to 1e-12 |C|.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& C, Eigen::Index ambient_dim);

/// Numerical rank with the same threshold.
Eigen::Index numerical_rank(const Eigen::MatrixXd& C);

} // namespace tracenorm
