#include <tracenorm/function_spaces.hpp>
#include <tracenorm/forms.hpp>
#include <tracenorm/error.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tracenorm;

namespace {

MeshPtr refined(BoundaryMesh m, int levels)
{
    for (int i = 0; i < levels; ++i) m = refine_uniform(m);
    return std::make_shared<BoundaryMesh>(std::move(m));
}

SurfacePoint random_point(const BoundaryMesh& m, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, m.num_elements() - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t e = pick(rng);
    Barycentric b{};
    if (m.dim() == 2) {
        const double t = u(rng);
        b = {1.0 - t, t, 0.0};
    } else {
        double s = u(rng), t = u(rng);
        if (s + t > 1.0) s = 1.0 - s, t = 1.0 - t;
        b = {1.0 - s - t, s, t};
    }
    return {e, b, m.map(e, b)};
}

Point midpoint(const BoundaryMesh& m, std::size_t e)
{
    return m.dim() == 2 ? m.map(e, {0.5, 0.5, 0.0}) : m.map(e, {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

} // namespace

TEST_SUITE("function_spaces")
{
    TEST_CASE("nodal evaluation")
    {
        const MeshPtr m = refined(make_lshape(), 1);
        const DiscreteSpace p1(SpaceKind::P1, m);
        CHECK(p1.dim() == m->num_vertices());
        for (std::size_t i = 0; i < m->num_vertices(); i += 3) {
            Eigen::VectorXd c = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(p1.dim()), static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < m->num_vertices(); ++j) CHECK(p1.evaluate_at(c, m->vertex(j)) == (i == j ? 1.0 : 0.0));
        }

        const DiscreteSpace p0(SpaceKind::P0, m);
        CHECK(p0.dim() == m->num_elements());
        const Eigen::VectorXd ind = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(p0.dim()), 0);
        CHECK(p0.evaluate_at(ind, midpoint(*m, 0)) == 1.0);
        CHECK(p0.evaluate_at(ind, midpoint(*m, 1)) == 0.0);

        CHECK_THROWS_AS(p1.evaluate_at(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p1.dim())), Point(0.5, 0.5, 0.0)), Error);
    }

    TEST_CASE("normalized hats")
    {
        for (int l = 1; l <= 4; ++l) {
            const MeshPtr m = refined(make_unit_square(), l);
            const auto fam = make_phi_star(m);
            const Eigen::MatrixXd M = mass_matrix(*fam.space).matrix;
            const Eigen::VectorXd ints = Eigen::VectorXd::Ones(M.rows()).transpose() * M * fam.coefficients;
            for (Eigen::Index y = 0; y < ints.size(); ++y) CHECK(std::abs(ints[y] - 1.0) <= 1e-12);
            const double h = m->h();
            for (Eigen::Index y = 0; y < fam.coefficients.cols(); ++y) {
                const Eigen::VectorXd c = fam.coefficients.col(y);
                CHECK(std::sqrt(c.dot(M * c)) == doctest::Approx(std::sqrt(2.0 / (3.0 * h))).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("normalized hat scaling on the cube")
    {
        std::vector<double> scaled;
        for (int l = 0; l <= 2; ++l) {
            const MeshPtr m = refined(make_cube_surface(), l);
            const auto fam = make_phi_star(m);
            const Eigen::MatrixXd M = mass_matrix(*fam.space).matrix;
            double lo = INFINITY, hi = 0.0;
            for (Eigen::Index y = 0; y < fam.coefficients.cols(); ++y) {
                const Eigen::VectorXd c = fam.coefficients.col(y);
                const double v = std::sqrt(c.dot(M * c)) * m->h();
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (l == 0) {
                scaled = {lo, hi};
            } else {
                CHECK(lo / scaled[0] == doctest::Approx(1.0).epsilon(0.1));
                CHECK(hi / scaled[1] == doctest::Approx(1.0).epsilon(0.1));
            }
        }
    }

    TEST_CASE("element indicator family")
    {
        const MeshPtr m = refined(make_unit_square(), 2);
        const auto fam = make_phi_star(m, PhiStarKind::element_indicators);
        CHECK(fam.space->kind() == SpaceKind::P0);
        const auto patches = build_patches(*m);
        const Eigen::VectorXd measures = mass_matrix(*fam.space).matrix.diagonal();
        for (std::size_t y = 0; y < fam.size(); ++y) {
            const Eigen::VectorXd c = fam.coefficients.col(static_cast<Eigen::Index>(y));
            CHECK(c.dot(measures) == doctest::Approx(1.0).epsilon(1e-12));
            for (Eigen::Index e = 0; e < c.size(); ++e)
                if (c[e] != 0.0) CHECK(static_cast<std::size_t>(e) == patches[y].elements.front());
        }
    }

    TEST_CASE("hats partition unity and are supported in their patches")
    {
        std::mt19937_64 rng(3);
        for (const MeshPtr& m : {refined(make_lshape(), 2), refined(make_cube_surface(), 1)}) {
            const auto fam = make_partition(m);
            const auto patches = build_patches(*m);
            for (int s = 0; s < 1000; ++s) {
                const SurfacePoint p = random_point(*m, rng);
                double sum = 0.0;
                for (std::size_t y = 0; y < fam.size(); ++y) {
                    const double v = fam.member(y)(p);
                    const auto& els = patches[y].elements;
                    if (std::find(els.begin(), els.end(), p.element) == els.end()) CHECK(v == 0.0);
                    sum += v;
                }
                CHECK(std::abs(sum - 1.0) <= 1e-12);
            }
        }
    }

    TEST_CASE("hat Lipschitz constant scales like 1/h")
    {
        std::vector<double> scaled;
        for (int l = 0; l <= 3; ++l) {
            const MeshPtr m = refined(make_cube_surface(), l);
            double lip = 0.0;
            for (std::size_t e = 0; e < m->num_elements(); ++e)
                for (const Point& g : m->barycentric_gradients(e)) lip = std::max(lip, g.norm());
            scaled.push_back(lip * m->h());
        }
        for (double s : scaled) CHECK(s == doctest::Approx(scaled[0]).epsilon(1e-10));
    }

    TEST_CASE("dual cells")
    {
        for (int l = 0; l <= 3; ++l) {
            const MeshPtr m = refined(make_unit_square(), l);
            const Eigen::VectorXd meas = dual_cell_measures(*m);
            for (Eigen::Index i = 0; i < meas.size(); ++i) CHECK(meas[i] == doctest::Approx(m->h()).epsilon(1e-14));
            CHECK(std::abs(meas.sum() - 4.0) <= 1e-12);
        }
        const MeshPtr m = refined(make_lshape(), 1);
        const auto dual = dual_cells(m);
        CHECK(dual->dim() == m->num_vertices());
        const auto patches = build_patches(*m);
        std::mt19937_64 rng(5);
        for (int s = 0; s < 500; ++s) {
            const SurfacePoint p = random_point(*m, rng);
            double sum = 0.0;
            for (std::size_t y = 0; y < dual->dim(); ++y) {
                const double v = dual->basis(y, p);
                const auto& els = patches[y].elements;
                if (std::find(els.begin(), els.end(), p.element) == els.end()) CHECK(v == 0.0);
                sum += v;
            }
            CHECK(sum == 1.0);
        }
        try {
            dual_cells(refined(make_cube_surface(), 0));
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::unsupported);
        }
    }

    TEST_CASE("interpolation reproduces P1 functions")
    {
        const MeshPtr m = refined(make_cube_surface(), 1);
        const DiscreteSpace p1(SpaceKind::P1, m);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Eigen::VectorXd v(static_cast<Eigen::Index>(p1.dim()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u(rng);
        const Eigen::VectorXd back = p1.interpolate([&](const Point& x) { return p1.evaluate_at(v, x); });
        CHECK((back - v).cwiseAbs().maxCoeff() <= 1e-14);
    }

    TEST_CASE("refinement embedding")
    {
        for (const BoundaryMesh& coarse : {make_regular_polygon(5), make_cube_surface()}) {
            MeshHierarchy hier(coarse);
            hier.refine_to(2);
            const DiscreteSpace c(SpaceKind::P1, hier.mesh_ptr(0));
            const DiscreteSpace f(SpaceKind::P1, hier.mesh_ptr(2));
            const Eigen::MatrixXd P = prolongation(hier, c, f);
            std::mt19937_64 rng(13);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            Eigen::VectorXd v(static_cast<Eigen::Index>(c.dim()));
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u(rng);
            const Eigen::VectorXd w = P * v;
            const Evaluator lifted = lift_evaluator(hier, 0, 2, c.evaluator(v));
            for (int s = 0; s < 300; ++s) {
                const SurfacePoint p = random_point(hier.mesh(2), rng);
                CHECK(std::abs(f.evaluate(w, p) - lifted(p)) <= 1e-14);
            }
        }
    }

    TEST_CASE("cross mass matrix of element indicators against hats")
    {
        MeshHierarchy hier(make_unit_square());
        hier.refine_to(2);
        const DiscreteSpace p0(SpaceKind::P0, hier.mesh_ptr(1));
        const DiscreteSpace p1(SpaceKind::P1, hier.mesh_ptr(1));
        const Eigen::MatrixXd G = cross_mass_matrix(hier, p0, p1);
        const auto& m = hier.mesh(1);
        for (std::size_t e = 0; e < m.num_elements(); ++e)
            for (std::size_t i = 0; i < m.num_vertices(); ++i) {
                const bool inside = m.element(e)[0] == i || m.element(e)[1] == i;
                CHECK(G(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(i)) == doctest::Approx(inside ? m.h() / 2 : 0.0));
            }
        const Eigen::VectorXd ints = hat_integrals(m);
        for (Eigen::Index i = 0; i < ints.size(); ++i) CHECK(ints[i] == doctest::Approx(m.h()));
    }
}
