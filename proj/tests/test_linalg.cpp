#include <tracenorm/linalg.hpp>
#include <tracenorm/error.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tracenorm;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_spd(Index n, std::uint64_t seed, double shift)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    MatrixXd X(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) X(i, j) = g(rng);
    return X * X.transpose() + shift * MatrixXd::Identity(n, n);
}

MatrixXd random_symmetric(Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    MatrixXd X(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) X(i, j) = g(rng);
    return 0.5 * (X + X.transpose());
}

// Largest eigenvalue of the pencil by power iteration on B^{-1} A shifted to be positive
// definite, with Rayleigh quotients; the smallest one by the same iteration on
// (sigma B - A).
double pencil_extreme(const MatrixXd& A, const MatrixXd& B, bool largest)
{
    const Eigen::LDLT<MatrixXd> Bf(B);
    const double bound = (Bf.solve(A)).cwiseAbs().rowwise().sum().maxCoeff();  // >= spectral radius
    const MatrixXd T = largest ? MatrixXd(A + bound * B) : MatrixXd(bound * B - A);
    VectorXd x = VectorXd::Ones(A.rows());
    double mu = 0.0;
    for (int it = 0; it < 200000; ++it) {
        VectorXd y = Bf.solve(T * x);
        y /= std::sqrt(y.dot(B * y));
        const double next = y.dot(T * y);
        x = y;
        if (std::abs(next - mu) <= 1e-15 * std::abs(next)) break;
        mu = next;
    }
    // inverse iteration from the power-iteration estimate sharpens the value
    const double lambda = largest ? mu - bound : bound - mu;
    const double sigma = lambda + (largest ? 1e-6 : -1e-6) * (1.0 + std::abs(lambda));
    const Eigen::PartialPivLU<MatrixXd> lu(A - sigma * B);
    for (int it = 0; it < 50; ++it) {
        x = lu.solve(B * x);
        x /= std::sqrt(x.dot(B * x));
    }
    return x.dot(A * x);
}

} // namespace

TEST_SUITE("linalg")
{
    TEST_CASE("Cholesky of the identity and a 2x2 example")
    {
        const Cholesky I(MatrixXd::Identity(5, 5));
        CHECK((I.factor() - MatrixXd::Identity(5, 5)).norm() == 0.0);

        MatrixXd A(2, 2);
        A << 4, 2, 2, 3;
        const Cholesky c(A);
        MatrixXd L(2, 2);
        L << 2, 0, 1, std::sqrt(2.0);
        CHECK((c.factor() - L).cwiseAbs().maxCoeff() <= 1e-15);
        const VectorXd rhs = VectorXd::Ones(2);
        const VectorXd x = c.solve(rhs);
        CHECK((A * x - rhs).norm() <= 1e-15);
    }

    TEST_CASE("Cholesky residual on random SPD matrices")
    {
        const MatrixXd A = random_spd(50, 1, 1.0);
        const Cholesky c(A);
        const MatrixXd L = c.factor();
        CHECK((L * L.transpose() - A).norm() <= 1e-12 * A.norm());
        const VectorXd b = VectorXd::LinSpaced(50, -1.0, 1.0);
        CHECK((A * c.solve(b) - b).norm() <= 1e-12 * A.norm() * c.solve(b).norm());
    }

    TEST_CASE("Cholesky reports the failing pivot")
    {
        MatrixXd A(3, 3);
        A << 1, 0, 0, 0, 1, 2, 0, 2, 1;
        try {
            Cholesky c(A);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::numerical);
            CHECK(std::string(e.what()).find("pivot 2") != std::string::npos);
        }
    }

    TEST_CASE("generalized eigenvalues of simple pencils")
    {
        const VectorXd d = (VectorXd(4) << 3, 1, 4, 2).finished();
        const auto diag = generalized_sym_eig(d.asDiagonal(), MatrixXd::Identity(4, 4));
        CHECK((diag.values - (VectorXd(4) << 1, 2, 3, 4).finished()).norm() <= 1e-14);

        const MatrixXd B = random_spd(8, 2, 0.5);
        const auto same = generalized_sym_eig(B, B);
        CHECK((same.values - VectorXd::Ones(8)).cwiseAbs().maxCoeff() <= 1e-12);
    }

    TEST_CASE("random pencil against an iteration oracle")
    {
        const MatrixXd A = random_symmetric(30, 3);
        const MatrixXd B = random_spd(30, 4, 1.0);
        const auto eig = generalized_sym_eig(A, B);
        const MatrixXd& X = eig.vectors;
        CHECK((A * X - B * X * eig.values.asDiagonal()).norm() <= 1e-10 * A.norm() * X.norm());
        CHECK((X.transpose() * B * X - MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff() <= 1e-10);
        for (Index i = 1; i < 30; ++i) CHECK(eig.values[i - 1] <= eig.values[i]);

        const auto [lo, hi] = extremal_eigenvalues(A, B);
        CHECK(lo == doctest::Approx(eig.values[0]).epsilon(1e-12));
        CHECK(hi == doctest::Approx(eig.values[29]).epsilon(1e-12));
        CHECK(lo == doctest::Approx(pencil_extreme(A, B, false)).epsilon(1e-9));
        CHECK(hi == doctest::Approx(pencil_extreme(A, B, true)).epsilon(1e-9));
    }

    TEST_CASE("indefinite right-hand form is rejected")
    {
        MatrixXd B = MatrixXd::Identity(3, 3);
        B(2, 2) = -1.0;
        CHECK_THROWS_AS(generalized_sym_eig(MatrixXd::Identity(3, 3), B), Error);
    }

    TEST_CASE("nullspace bases")
    {
        const MatrixXd one = (MatrixXd(1, 2) << 1, 1).finished();
        const MatrixXd Z = nullspace(one, 2);
        REQUIRE(Z.cols() == 1);
        CHECK(std::abs(std::abs(Z(0, 0)) - 1.0 / std::sqrt(2.0)) <= 1e-15);
        CHECK(Z(0, 0) == doctest::Approx(-Z(1, 0)));

        const MatrixXd zero = MatrixXd::Zero(2, 3);
        const MatrixXd Zz = nullspace(zero, 3);
        CHECK(Zz.cols() == 3);
        CHECK((Zz.transpose() * Zz - MatrixXd::Identity(3, 3)).norm() <= 1e-14);

        CHECK(nullspace(MatrixXd::Identity(3, 3), 3).cols() == 0);

        // rank-nullity with a dependent row
        MatrixXd C = random_symmetric(6, 5).topRows(3);
        MatrixXd D(4, 6);
        D << C, C.row(0) + 2.0 * C.row(1);
        CHECK(numerical_rank(D) == 3);
        const MatrixXd Zd = nullspace(D, 6);
        CHECK(Zd.cols() == 3);
        CHECK((D * Zd).cwiseAbs().maxCoeff() <= 1e-12 * D.norm());
        CHECK((Zd.transpose() * Zd - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);
    }

    TEST_CASE("symmetry defect")
    {
        MatrixXd A = random_symmetric(5, 6);
        CHECK(symmetry_defect(A) == 0.0);
        A(0, 1) += 1e-3;
        CHECK(symmetry_defect(A) > 1e-4);
    }
}
