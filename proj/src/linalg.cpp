#include <tracenorm/linalg.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <string>

namespace tracenorm {

double symmetry_defect(const Eigen::MatrixXd& A)
{
    require(A.rows() == A.cols(), ErrorKind::invalid_input, "matrix is not square");
    const double scale = A.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (A - A.transpose()).cwiseAbs().maxCoeff() / scale;
}

namespace {

// Index of the first pivot that fails in a plain right-looking elimination.
Eigen::Index failing_pivot(const Eigen::MatrixXd& A)
{
    Eigen::MatrixXd L = A;
    const Eigen::Index n = L.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double d = L(k, k);
        if (!(d > 0.0)) return k;
        const double s = std::sqrt(d);
        L.col(k).tail(n - k - 1) /= s;
        for (Eigen::Index j = k + 1; j < n; ++j) L.col(j).tail(n - j) -= L(j, k) * L.col(k).tail(n - j);
    }
    return n;
}

} // namespace

Cholesky::Cholesky(const Eigen::MatrixXd& A)
{
    require(A.rows() == A.cols(), ErrorKind::invalid_input, "matrix is not square");
    require(A.allFinite(), ErrorKind::numerical, "matrix has non-finite entries");
    m_llt.compute(A);
    if (m_llt.info() != Eigen::Success) {
        fail(ErrorKind::numerical,
            "matrix is not positive definite (pivot " + std::to_string(failing_pivot(A)) + ")");
    }
}

Eigen::VectorXd Cholesky::solve(const Eigen::VectorXd& rhs) const
{
    require(rhs.size() == size(), ErrorKind::invalid_input, "right-hand side has the wrong length");
    return m_llt.solve(rhs);
}

Eigen::MatrixXd Cholesky::solve(const Eigen::MatrixXd& rhs) const
{
    require(rhs.rows() == size(), ErrorKind::invalid_input, "right-hand side has the wrong length");
    return m_llt.solve(rhs);
}

GeneralizedEigen generalized_sym_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, bool with_vectors)
{
    require(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows(), ErrorKind::invalid_input,
        "pencil matrices must be square and of equal size");
    const Cholesky chol(B);
    const Eigen::MatrixXd L = chol.factor();
    // C = L^{-1} A L^{-T}
    Eigen::MatrixXd C = L.triangularView<Eigen::Lower>().solve(A);
    C = L.triangularView<Eigen::Lower>().solve(C.transpose().eval());
    C = 0.5 * (C + C.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, ErrorKind::numerical, "symmetric eigensolver did not converge");
    GeneralizedEigen out;
    out.values = es.eigenvalues();
    if (with_vectors) out.vectors = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    return out;
}

std::pair<double, double> extremal_eigenvalues(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
{
    const GeneralizedEigen ge = generalized_sym_eig(A, B, false);
    require(ge.values.size() > 0, ErrorKind::invalid_input, "empty pencil");
    return {ge.values[0], ge.values[ge.values.size() - 1]};
}

namespace {

Eigen::Index rank_of(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr, double scale)
{
    const auto& R = qr.matrixR();
    const Eigen::Index k = std::min(R.rows(), R.cols());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < k; ++i)
        if (std::abs(R(i, i)) > 1e-12 * scale) ++r;
    return r;
}

} // namespace

Eigen::Index numerical_rank(const Eigen::MatrixXd& C)
{
    if (C.size() == 0) return 0;
    const double scale = C.norm();
    if (scale == 0.0) return 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C.transpose());
    return rank_of(qr, scale);
}

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& C, Eigen::Index ambient_dim)
{
    require(C.rows() == 0 || C.cols() == ambient_dim, ErrorKind::invalid_input, "constraint matrix has the wrong width");
    const double scale = C.size() ? C.norm() : 0.0;
    if (C.rows() == 0 || scale == 0.0) return Eigen::MatrixXd::Identity(ambient_dim, ambient_dim);
    // C^T P = Q R: the first r columns of Q span range(C^T), the rest its complement
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C.transpose());
    const Eigen::Index r = rank_of(qr, scale);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(ambient_dim, ambient_dim);
    return Q.rightCols(ambient_dim - r);
}

} // namespace tracenorm
