#include <tracenorm/localization.hpp>
#include <tracenorm/error.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tracenorm;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd random_vector(Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST_SUITE("localization")
{
    TEST_CASE("constrained primal subspace")
    {
        MeshHierarchy hier(make_unit_square());
        hier.refine_to(4);
        const DiscreteSpace fine(SpaceKind::P1, hier.mesh_ptr(4));
        const auto phi_star = make_phi_star(hier.mesh_ptr(2));
        const MatrixXd C = family_moments(hier, phi_star, fine);
        const MatrixXd Z = constrained_primal_subspace(hier, fine, phi_star);
        CHECK(Z.cols() == static_cast<Index>(fine.dim()) - numerical_rank(C));
        CHECK(Z.cols() == 64 - 16);
        CHECK((C * Z).cwiseAbs().maxCoeff() <= 1e-10);
        // the constant has unit moments
        const VectorXd one = VectorXd::Ones(static_cast<Index>(fine.dim()));
        CHECK((C * one - VectorXd::Ones(C.rows())).cwiseAbs().maxCoeff() <= 1e-12);

        // same-level constraints leave nothing
        const DiscreteSpace coarse(SpaceKind::P1, hier.mesh_ptr(2));
        CHECK_THROWS_AS(constrained_primal_subspace(hier, coarse, phi_star), Error);
    }

    TEST_CASE("L2 and oblique projectors")
    {
        MeshHierarchy hier(make_lshape());
        hier.refine_to(3);
        const DiscreteSpace fine(SpaceKind::P1, hier.mesh_ptr(3));
        const DiscreteSpace coarse(SpaceKind::P1, hier.mesh_ptr(1));
        const auto dual = dual_cells(hier.mesh_ptr(1));
        const MatrixXd embed = prolongation(hier, coarse, fine);
        const MatrixXd M = mass_matrix(fine).matrix;
        const VectorXd v = random_vector(static_cast<Index>(fine.dim()), 3);

        const ProjectorMatrix l2 = l2_projection_matrix(hier, fine, coarse);
        CHECK(l2.kind == ProjectorKind::l2_p1);
        CHECK((l2.matrix * embed - embed).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((l2.matrix * l2.matrix - l2.matrix).cwiseAbs().maxCoeff() <= 1e-10 * l2.matrix.cwiseAbs().maxCoeff());
        CHECK((embed.transpose() * M * (v - l2.matrix * v)).cwiseAbs().maxCoeff() <= 1e-10);

        const ProjectorMatrix obl = oblique_projection_matrix(hier, fine, coarse, *dual);
        CHECK(obl.kind == ProjectorKind::oblique_dualP0_to_P1);
        CHECK((obl.matrix * embed - embed).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((obl.matrix * obl.matrix - obl.matrix).cwiseAbs().maxCoeff() <= 1e-10 * obl.matrix.cwiseAbs().maxCoeff());
        const MatrixXd chi = cross_mass_matrix(hier, *dual, fine);
        CHECK((chi * (v - obl.matrix * v)).cwiseAbs().maxCoeff() <= 1e-10);

        CHECK((obl.matrix - l2.matrix).norm() >= 1e-3);
        CHECK((obl.matrix * v - l2.matrix * v).norm() >= 1e-3);
    }

    TEST_CASE("global dual norm")
    {
        const Cholesky four(MatrixXd::Constant(1, 1, 4.0));
        CHECK(global_dual_norm(VectorXd::Constant(1, 2.0), four) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(global_dual_norm(VectorXd::Zero(1), four) == 0.0);

        // nested test spaces give a non-decreasing sup
        MeshHierarchy hier(make_unit_square());
        hier.refine_to(5);
        const Evaluator zeta = [](const SurfacePoint& p) { return std::sin(5.0 * p.x[0]) - std::cos(3.0 * p.x[1]) + 0.3; };
        double previous = 0.0;
        for (int l = 1; l <= 5; ++l) {
            const double value = global_dual_norm(zeta, DiscreteSpace(SpaceKind::P1, hier.mesh_ptr(l)));
            CHECK(value >= previous - 1e-12);
            previous = value;
        }
        CHECK(global_dual_norm([](const SurfacePoint&) { return 0.0; }, DiscreteSpace(SpaceKind::P1, hier.mesh_ptr(2))) == 0.0);
    }

    TEST_CASE("local dual norm")
    {
        MeshHierarchy hier(make_unit_square());
        hier.refine_to(4);
        const DiscreteSpace test(SpaceKind::P1, hier.mesh_ptr(4));
        const auto patches = build_patches(hier.mesh(2));
        const Patch& p = patches[5];
        const PatchForm form = h00_patch_matrix(test, hier.descendants(2, p.elements, 4), p.boundary, p.diameter);

        // a functional supported away from the patch
        const DiscreteSpace p0(SpaceKind::P0, hier.mesh_ptr(2));
        std::size_t far = 0;
        while (std::find(p.elements.begin(), p.elements.end(), far) != p.elements.end() || hier.mesh(2).shared_vertices(far, p.elements[0]) > 0 ||
               hier.mesh(2).shared_vertices(far, p.elements[1]) > 0)
            ++far;
        CHECK(local_dual_norm(moment_vector(p0.basis_evaluator(far), test), form) == 0.0);
        CHECK(local_dual_norm(VectorXd::Zero(static_cast<Index>(test.dim())), form) == 0.0);

        const Evaluator zeta = [](const SurfacePoint& s) { return 1.0 + s.x[0] * s.x[0] - 2.0 * s.x[1]; };
        const VectorXd b = moment_vector(zeta, test);
        VectorXd local(static_cast<Index>(form.dofs.size()));
        for (std::size_t i = 0; i < form.dofs.size(); ++i) local[static_cast<Index>(i)] = b[static_cast<Index>(form.dofs[i])];
        // sup of <zeta, v>^2 / |v|^2_00 is the top eigenvalue of (b b^T, G)
        const double oracle = extremal_eigenvalues(local * local.transpose(), form.matrix).second;
        CHECK(rel(local_dual_norm(b, form), std::sqrt(oracle)) <= 1e-8);
    }

    TEST_CASE("localized dual norm of a single-patch functional")
    {
        LocalizationStudy study("square", make_unit_square());
        const auto& d = study.dual_forms(2);
        const auto& mesh = study.hierarchy().mesh(d.functional_level);
        const auto patch = build_patches(study.hierarchy().mesh(2))[3];
        const auto inside = study.hierarchy().descendants(2, patch.elements, d.functional_level);
        VectorXd zeta = VectorXd::Zero(static_cast<Index>(mesh.num_elements()));
        for (auto e : inside) zeta[static_cast<Index>(e)] = std::cos(static_cast<double>(e));
        const double global = zeta.dot(d.global * zeta);
        const double local = zeta.dot(d.local * zeta);
        CHECK(global > 0.0);
        CHECK(local > 0.0);
        CHECK(local / global <= study.dual_one_sided_check(2).lambda_max * (1.0 + 1e-10));
        VectorXd zero = VectorXd::Zero(zeta.size());
        CHECK(zero.dot(d.local * zero) == 0.0);
        CHECK(zero.dot(d.global * zero) == 0.0);
    }

    TEST_CASE("identical forms give unit pencil")
    {
        LocalizationStudy study("square", make_unit_square());
        const MatrixXd& A = study.h_half(3);
        const auto [lo, hi] = extremal_eigenvalues(A, A);
        CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("primal localization report")
    {
        LocalizationStudy study("square", make_unit_square());
        const auto r = study.primal_equivalence(2);
        CHECK(r.statement == "thm32");
        CHECK(r.level == 2);
        CHECK(r.h == doctest::Approx(0.25));
        CHECK(0.0 < r.lambda_min);
        CHECK(r.lambda_min <= r.lambda_max);
        CHECK(r.dim + r.constraints == r.ambient_dim);
        CHECK(r.constraints == 16);
        CHECK(r.extras.at("constraint_residual") <= 1e-10);
        CHECK(r.extras.at("patch_sum_ratio") <= 1.0 + 1e-10);

        const auto ind = study.primal_equivalence(2, PhiStarKind::element_indicators);
        CHECK(ind.statement == "thm32-indicators");
        CHECK(ind.lambda_min > 0.0);
    }

    TEST_CASE("faermann bound on the constant")
    {
        LocalizationStudy study("square", make_unit_square());
        const int level = 2, fine = 4;
        const auto r = study.faermann_bound_check(level);
        const VectorXd one = VectorXd::Ones(study.h_half(fine).rows());
        const double h = study.hierarchy().mesh(level).h();
        const double left = one.dot(study.h_half(fine) * one);
        const double right = one.dot(study.patch_sum(level, fine) * one) + 2.0 / h * one.dot(study.mass(fine) * one);
        CHECK(left == doctest::Approx(4.0).epsilon(1e-10));
        CHECK(right == doctest::Approx(2.0 * 4.0 / h).epsilon(1e-10));
        CHECK(left / right <= r.lambda_max);
    }

    TEST_CASE("patch sum bound on random functions")
    {
        for (const char* g : {"square", "cube"}) {
            LocalizationStudy study(g, std::string(g) == "cube" ? make_cube_surface() : make_unit_square());
            const int level = std::string(g) == "cube" ? 1 : 3;
            const MatrixXd& L = study.patch_sum(level - 1, level);
            const MatrixXd& S = study.slobodeckij(level);
            for (int s = 0; s < 50; ++s) {
                const VectorXd v = random_vector(S.rows(), 500 + static_cast<std::uint64_t>(s));
                CHECK(v.dot(L * v) <= study.dim() * v.dot(S * v) * (1.0 + 1e-10));
            }
        }
    }

    TEST_CASE("decomposition ratios")
    {
        LocalizationStudy study("square", make_unit_square());
        const auto n = static_cast<Index>(study.p1(2)->dim());
        CHECK(study.decomposition_ratio(2, VectorXd::Zero(n)) == 0.0);
        CHECK(study.decomposition_l1_ratio(2, VectorXd::Zero(n)) == 0.0);
        const auto r = study.decomposition_bound_check(2);
        for (int s = 0; s < 10; ++s) {
            const VectorXd v = random_vector(n, 40 + static_cast<std::uint64_t>(s));
            const double ratio = study.decomposition_ratio(2, v);
            CHECK(ratio <= r.lambda_max * (1.0 + 1e-10));
            CHECK(ratio == doctest::Approx(study.decomposition_ratio(2, 1e3 * v)).epsilon(1e-8));
            CHECK(study.decomposition_l1_ratio(2, v) <= 1.0);
        }
        CHECK(r.extras.at("l1_ratio_max") <= 1.0);
        CHECK(r.extras.at("sample_ratio_max") <= r.lambda_max * (1.0 + 1e-10));
    }

    TEST_CASE("cutoff ratios")
    {
        LocalizationStudy study("lshape", make_lshape());
        const auto n = static_cast<Index>(study.p1(1)->dim());
        CHECK(study.cutoff_ratio(1, VectorXd::Constant(n, 2.5)) == 0.0);
        const auto r = study.cutoff_stability_check(1);
        for (int s = 0; s < 10; ++s) {
            const VectorXd v = random_vector(n, 60 + static_cast<std::uint64_t>(s));
            const double ratio = study.cutoff_ratio(1, v);
            CHECK(ratio <= r.lambda_max * (1.0 + 1e-10));
            CHECK(ratio == doctest::Approx(study.cutoff_ratio(1, 1e3 * v)).epsilon(1e-8));
        }
        // without the average the ratio of a shifted function blows up under refinement
        LocalizationStudy square("square", make_unit_square());
        double previous = 0.0;
        for (int l = 1; l <= 3; ++l) {
            const VectorXd shifted = square.p1(l)->interpolate([](const Point& x) { return 1.0 + x[0]; });
            const double c = square.cutoff_ratio(l, shifted, false);
            CHECK(c > 1.5 * previous);
            CHECK(square.cutoff_ratio(l, shifted) <= square.cutoff_stability_check(l).lambda_max * (1.0 + 1e-10));
            previous = c;
        }
    }

    TEST_CASE("projector localization")
    {
        LocalizationStudy study("square", make_unit_square());
        const int level = 2, fine = 4;
        for (auto kind : {ProjectorKind::l2_p1, ProjectorKind::oblique_dualP0_to_P1}) {
            const auto r = study.projector_equivalence(level, kind);
            CHECK(r.lambda_min > 0.0);
            CHECK(r.extras.at("hypothesis_residual") <= 1e-10);
            CHECK(r.extras.at("idempotency_residual") <= 1e-10);
        }
        // a coarse function is its own projection, so the localized part vanishes
        auto& hier = study.hierarchy();
        const auto coarse = study.p1(level), space = study.p1(fine);
        const ProjectorMatrix P = l2_projection_matrix(hier, *space, *coarse);
        const VectorXd v = prolongation(hier, *coarse, *space) * random_vector(static_cast<Index>(coarse->dim()), 8);
        const MatrixXd I = MatrixXd::Identity(P.matrix.rows(), P.matrix.cols());
        const MatrixXd& A = study.h_half(fine);
        const MatrixXd Q = P.matrix.transpose() * A * P.matrix + (I - P.matrix).transpose() * study.patch_sum(level, fine) * (I - P.matrix);
        CHECK(v.dot(Q * v) == doctest::Approx(v.dot(A * v)).epsilon(1e-10));
        // without the projected term the constants are invisible
        const VectorXd one = VectorXd::Ones(v.size());
        const MatrixXd localized_only = (I - P.matrix).transpose() * study.patch_sum(level, fine) * (I - P.matrix);
        CHECK(one.dot(localized_only * one) <= 1e-10 * one.dot(A * one));

        CHECK_THROWS_AS(study.projector_equivalence(level, ProjectorKind::dual_oblique_P0dual), Error);
    }

    TEST_CASE("dual localization")
    {
        LocalizationStudy study("square", make_unit_square());
        const auto r = study.dual_equivalence(2);
        CHECK(r.statement == "thm42");
        CHECK(r.lambda_min > 0.0);
        CHECK(r.ambient_dim == study.hierarchy().mesh(study.functional_level(2)).num_elements());
        CHECK(r.constraints == study.hierarchy().mesh(2).num_vertices());
        CHECK(r.dim + r.constraints == r.ambient_dim);
        CHECK(r.extras.at("constraint_residual") <= 1e-10);

        const auto one_sided = study.dual_one_sided_check(2);
        CHECK(one_sided.lambda_min >= 0.0);
        CHECK(one_sided.lambda_max > 0.0);
    }

    TEST_CASE("dual projectors")
    {
        LocalizationStudy study("square", make_unit_square());
        const int level = 2;
        const auto& d = study.dual_forms(level);
        for (auto kind : {ProjectorKind::l2_p1, ProjectorKind::dual_oblique_P0dual}) {
            const auto r = study.dual_projector_equivalence(level, kind);
            CHECK(r.lambda_min > 0.0);
            CHECK(r.extras.at("hypothesis_residual") <= 1e-10);
        }
        // a dual-cell indicator lies in the oblique projector's range
        auto& hier = study.hierarchy();
        const auto& coarse = hier.mesh(level);
        const auto& fmesh = hier.mesh(d.functional_level);
        const auto dual = dual_cells(hier.mesh_ptr(level));
        const std::size_t cell = 3;
        VectorXd zeta(static_cast<Index>(fmesh.num_elements()));
        for (std::size_t e = 0; e < fmesh.num_elements(); ++e) {
            const auto [anc, b] = hier.to_ancestor(d.functional_level, e, {0.5, 0.5, 0.0}, level);
            zeta[static_cast<Index>(e)] = dual->basis(cell, {anc, b, coarse.map(anc, b)});
        }
        const MatrixXd projected = study.dual_projection_moments(level, ProjectorKind::dual_oblique_P0dual);
        const VectorXd residual = (d.moments - projected) * zeta;
        CHECK(residual.cwiseAbs().maxCoeff() <= 1e-12 * (d.moments * zeta).cwiseAbs().maxCoeff());
        const VectorXd pz = projected * zeta;
        const double q = pz.dot(d.h_half_factor->solve(pz)) + zeta.dot(d.localized(d.moments - projected) * zeta);
        CHECK(q / zeta.dot(d.global * zeta) == doctest::Approx(1.0).epsilon(1e-10));
    }

    TEST_CASE("oblique statements need polygons")
    {
        LocalizationStudy study("cube", make_cube_surface());
        try {
            study.projector_equivalence(0, ProjectorKind::oblique_dualP0_to_P1);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::unsupported);
        }
    }

    TEST_CASE("Poincare checks")
    {
        LocalizationStudy study("lshape", make_lshape());
        for (bool avfree : {false, true}) {
            const auto r = study.poincare_check(1, avfree);
            CHECK(r.lambda_min > 0.0);
            CHECK(std::isfinite(r.lambda_max));
            CHECK(r.extras.at("patches") == 6.0);
        }
    }

    TEST_CASE("rotation invariance")
    {
        const double angle = 0.7;
        const Eigen::Rotation2Dd rot(angle);
        std::vector<Eigen::Vector2d> corners{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
        for (auto& c : corners) c = rot * c + Eigen::Vector2d(0.3, -2.0);
        LocalizationStudy plain("square", make_unit_square()), rotated("rotated", make_polygon_boundary(corners));
        for (int level : {1, 2}) {
            const auto a = plain.primal_equivalence(level), b = rotated.primal_equivalence(level);
            CHECK(rel(b.lambda_min, a.lambda_min) <= 1e-8);
            CHECK(rel(b.lambda_max, a.lambda_max) <= 1e-8);
            const auto da = plain.dual_equivalence(level), db = rotated.dual_equivalence(level);
            CHECK(rel(db.lambda_min, da.lambda_min) <= 1e-8);
            CHECK(rel(db.lambda_max, da.lambda_max) <= 1e-8);
        }
    }

    TEST_CASE("statement identifiers")
    {
        const auto& ids = statement_ids();
        for (const char* id : {"thm32", "faermann", "lemma31", "cor33-l2", "cor33-oblique", "prop41", "thm42", "claim", "cor43-l2", "cor43-oblique", "poincare", "poincare_avfree"})
            CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
    }
}
