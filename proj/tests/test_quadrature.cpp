#include <tracenorm/quadrature.hpp>
#include <tracenorm/function_spaces.hpp>
#include <tracenorm/error.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace tracenorm;

namespace {

BoundaryMesh refined(BoundaryMesh m, int levels)
{
    for (int i = 0; i < levels; ++i) m = refine_uniform(m);
    return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const Evaluator smooth = [](const SurfacePoint& p) { return p.x[0] + 0.5 * p.x[1] * p.x[1] + 0.25 * p.x[2]; };
const Evaluator other = [](const SurfacePoint& p) { return std::cos(p.x[0]) - p.x[1] * p.x[2]; };
const Evaluator one = [](const SurfacePoint&) { return 1.0; };

} // namespace

TEST_SUITE("quadrature")
{
    TEST_CASE("Gauss-Legendre rules")
    {
        const auto g1 = gauss_legendre(1);
        CHECK(g1.nodes.size() == 1);
        CHECK(g1.nodes[0] == doctest::Approx(0.0));
        CHECK(g1.weights[0] == doctest::Approx(2.0));

        const auto g2 = gauss_legendre(2);
        CHECK(std::abs(std::abs(g2.nodes[0]) - 1.0 / std::sqrt(3.0)) < 1e-15);
        CHECK(g2.nodes[0] == doctest::Approx(-g2.nodes[1]));
        CHECK(g2.weights[0] == doctest::Approx(1.0));
        CHECK(g2.weights[1] == doctest::Approx(1.0));

        const auto g3 = gauss_legendre(3);
        double x4 = 0.0;
        for (std::size_t i = 0; i < 3; ++i) x4 += g3.weights[i] * std::pow(g3.nodes[i], 4);
        CHECK(std::abs(x4 - 0.4) < 1e-14);

        for (int order = 1; order <= 20; ++order) {
            const auto g = gauss_legendre(order);
            const auto u = gauss_legendre_unit(order);
            double ws = 0.0, us = 0.0;
            for (int i = 0; i < order; ++i) {
                CHECK(g.weights[static_cast<std::size_t>(i)] > 0.0);
                ws += g.weights[static_cast<std::size_t>(i)];
                us += u.weights[static_cast<std::size_t>(i)];
            }
            CHECK(ws == doctest::Approx(2.0).epsilon(1e-14));
            CHECK(us == doctest::Approx(1.0).epsilon(1e-14));
            // exact up to degree 2 order - 1
            const int deg = 2 * order - 2;
            double mono = 0.0;
            for (int i = 0; i < order; ++i) mono += g.weights[static_cast<std::size_t>(i)] * std::pow(g.nodes[static_cast<std::size_t>(i)], deg);
            CHECK(mono == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-13));
        }
        CHECK_THROWS_AS(gauss_legendre(0), Error);
    }

    TEST_CASE("pair classification by shared vertices")
    {
        const BoundaryMesh sq = refined(make_unit_square(), 2);
        CHECK(classify_pair(sq, 3, 3) == PairClass::identical);
        CHECK(classify_pair(sq, 0, 1) == PairClass::vertex_adjacent);
        CHECK(classify_pair(make_unit_square(), 0, 2) == PairClass::disjoint);

        const BoundaryMesh cube = make_cube_surface();
        int counts[4] = {0, 0, 0, 0};
        for (std::size_t a = 0; a < cube.num_elements(); ++a)
            for (std::size_t b = 0; b < cube.num_elements(); ++b) {
                const int shared = cube.shared_vertices(a, b);
                const PairClass c = classify_pair(cube, a, b);
                ++counts[static_cast<int>(c)];
                CHECK(c == (shared == 0 ? PairClass::disjoint : shared == 1 ? PairClass::vertex_adjacent : shared == 2 ? PairClass::edge_adjacent : PairClass::identical));
            }
        CHECK(counts[static_cast<int>(PairClass::identical)] == 12);
        CHECK(counts[static_cast<int>(PairClass::edge_adjacent)] == 36);
    }

    TEST_CASE("constants integrate to zero")
    {
        for (const BoundaryMesh& m : {refined(make_unit_square(), 1), make_cube_surface()})
            for (std::size_t b = 0; b < m.num_elements(); ++b) {
                CHECK(integrate_pair(m, one, smooth, 0, b, 6) == 0.0);
                CHECK(integrate_pair(m, smooth, one, 0, b, 6) == 0.0);
                CHECK(adaptive_reference_oracle(m, one, one, 0, b) == 0.0);
            }
    }

    TEST_CASE("hat function on adjacent unit segments against the oracle")
    {
        // vertex 1 joins the unit segments [0, 1] and [1, 2] of the bottom side
        const BoundaryMesh m = make_polygon_boundary({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}});
        const DiscreteSpace p1(SpaceKind::P1, std::make_shared<BoundaryMesh>(m));
        const Evaluator hat = p1.basis_evaluator(1);
        for (std::size_t a : {0u, 1u})
            for (std::size_t b : {0u, 1u}) {
                const double v = integrate_pair(m, hat, hat, a, b, 8);
                const double ref = adaptive_reference_oracle(m, hat, hat, a, b);
                CHECK(rel(v, ref) <= 1e-6);
            }
    }

    TEST_CASE("oracle agreement on every pair class")
    {
        for (const BoundaryMesh& m : {refined(make_lshape(), 1), make_cube_surface()}) {
            bool seen[4] = {false, false, false, false};
            for (std::size_t b = 0; b < m.num_elements(); ++b) {
                const PairClass c = classify_pair(m, 0, b);
                if (seen[static_cast<int>(c)]) continue;
                seen[static_cast<int>(c)] = true;
                const double v = integrate_pair(m, smooth, other, 0, b, 8);
                const double ref = adaptive_reference_oracle(m, smooth, other, 0, b);
                INFO(to_string(c));
                CHECK(rel(v, ref) <= 1e-6);
            }
        }
    }

    TEST_CASE("symmetry and bilinearity")
    {
        for (const BoundaryMesh& m : {refined(make_unit_square(), 2), make_cube_surface()})
            for (std::size_t b = 0; b < m.num_elements(); ++b) {
                const double fg = integrate_pair(m, smooth, other, 0, b, 6);
                const double scale = std::sqrt(integrate_pair(m, smooth, smooth, 0, b, 6) * integrate_pair(m, other, other, 0, b, 6));
                CHECK(std::abs(integrate_pair(m, other, smooth, 0, b, 6) - fg) <= 1e-12 * scale);
                CHECK(std::abs(integrate_pair(m, smooth, other, b, 0, 6) - fg) <= 1e-12 * scale);
                const Evaluator combo = [](const SurfacePoint& p) { return smooth(p) + 2.0 * other(p); };
                const double lhs = integrate_pair(m, combo, smooth, 0, b, 6);
                const double rhs = integrate_pair(m, smooth, smooth, 0, b, 6) + 2.0 * integrate_pair(m, other, smooth, 0, b, 6);
                CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), scale));
            }
        const BoundaryMesh m = make_cube_surface();
        CHECK(adaptive_reference_oracle(m, smooth, other, 0, 1) == adaptive_reference_oracle(m, other, smooth, 0, 1));
    }

    TEST_CASE("spectral convergence on a disjoint pair")
    {
        const BoundaryMesh m = refined(make_unit_square(), 1);
        // elements 0 and 4 are separated by one element
        REQUIRE(classify_pair(m, 0, 4) == PairClass::disjoint);
        const double ref = integrate_pair(m, smooth, other, 0, 4, 16);
        double previous = std::abs(integrate_pair(m, smooth, other, 0, 4, 2) - ref);
        for (int order = 4; order <= 8; order += 2) {
            const double err = std::abs(integrate_pair(m, smooth, other, 0, 4, order) - ref);
            if (previous > 1e-13 * std::abs(ref)) CHECK(err < 0.1 * previous);
            previous = err;
        }
    }

    TEST_CASE("pairs folded across a cube edge")
    {
        const BoundaryMesh m = make_cube_surface();
        auto normal = [&m](std::size_t e) {
            const auto el = m.element(e);
            return Point((m.vertex(el[1]) - m.vertex(el[0])).cross(m.vertex(el[2]) - m.vertex(el[0])).normalized());
        };
        int seen[3] = {0, 0, 0};
        int near = 0;
        for (std::size_t b = 1; b < m.num_elements(); ++b) {
            if (std::abs(normal(0).dot(normal(b))) > 0.5) continue;
            const auto cls = classify_pair(m, 0, b);
            if (cls == PairClass::disjoint && near_pair(m, 0, b)) ++near;
            ++seen[static_cast<int>(cls)];
            CAPTURE(b);
            CHECK(rel(integrate_pair(m, smooth, smooth, 0, b, 8), integrate_pair(m, smooth, smooth, 0, b, 16)) < 1e-8);
        }
        CHECK(seen[1] > 0);
        CHECK(seen[2] > 0);
        CHECK(near > 0);
        CHECK_FALSE(near_pair(refined(make_unit_square(), 1), 0, 4));
    }

    TEST_CASE("non-finite integrand is an error")
    {
        const BoundaryMesh m = make_unit_square();
        const Evaluator bad = [](const SurfacePoint&) { return std::numeric_limits<double>::quiet_NaN(); };
        CHECK_THROWS_AS(integrate_pair(m, bad, smooth, 0, 1, 4), Error);
    }

    TEST_CASE("weighted boundary integral")
    {
        const BoundaryMesh m = refined(make_unit_square(), 1);
        const auto patches = build_patches(m);
        // the midpoint of the bottom side: two collinear halves of [0, 1]
        const Patch* mid = nullptr;
        for (const auto& p : patches)
            if ((m.vertex(p.center) - Point(0.5, 0.0, 0.0)).norm() < 1e-14) mid = &p;
        REQUIRE(mid != nullptr);
        CHECK(mid->diameter == doctest::Approx(1.0));

        const Evaluator tent = [](const SurfacePoint& p) { return std::min(p.x[0], 1.0 - p.x[0]); };
        CHECK(integrate_weighted_boundary(m, *mid, tent, 6) == doctest::Approx(0.25).epsilon(1e-8));
        CHECK(integrate_weighted_boundary(m, *mid, [](const SurfacePoint&) { return 0.0; }, 6) == 0.0);
        try {
            integrate_weighted_boundary(m, *mid, one, 6);
            FAIL("expected divergence");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::divergence);
            CHECK(std::string(e.what()).find("not in H^{1/2}_{00}") != std::string::npos);
        }
    }

    TEST_CASE("weighted boundary integral on a surface patch")
    {
        // hat of the patch centre: bounded integrand, positive value, scales like h
        const BoundaryMesh m0 = refined(make_cube_surface(), 1);
        const BoundaryMesh m1 = refine_uniform(m0);
        double values[2];
        int i = 0;
        for (const BoundaryMesh* m : {&m0, &m1}) {
            const auto patches = build_patches(*m);
            const DiscreteSpace p1(SpaceKind::P1, std::make_shared<BoundaryMesh>(*m));
            values[i++] = integrate_weighted_boundary(*m, patches[20], p1.basis_evaluator(20), 6);
        }
        CHECK(values[0] > 0.0);
        CHECK(values[1] / values[0] == doctest::Approx(0.5).epsilon(0.05));
    }
}
