// Brute-force reference for pair integrals: nested, globally adaptive dyadic
// subdivision. Deliberately shares no coordinate transforms with the pair rules.

#include <tracenorm/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <queue>

namespace tracenorm {
namespace {

constexpr int max_depth = 24;

// A plain cell is the triangle (segment) c. A polar cell is the part of the triangle c
// given by x = c0 + r ((c1 - c0) + s (c2 - c1)) with r in [r0, r1], s in [s0, s1].
struct Cell
{
    std::array<Barycentric, 3> c;
    bool polar = false;
    int depth = 0; // bisections of the cell (per direction for polar cells)
    std::array<double, 4> range{0.0, 1.0, 0.0, 1.0};
    std::array<int, 2> polar_depth{0, 0};
    double value = 0.0;
    double abs_value = 0.0;
    double error = 0.0;
};

struct ByError
{
    bool operator()(const Cell& x, const Cell& y) const { return x.error < y.error; }
};

Barycentric lerp(const Barycentric& p, const Barycentric& q, double t)
{
    return {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), p[2] + t * (q[2] - p[2])};
}

Barycentric blend(const Barycentric& p, const Barycentric& q, const Barycentric& r, double a, double b, double c)
{
    return {a * p[0] + b * q[0] + c * r[0], a * p[1] + b * q[1] + c * r[1], a * p[2] + b * q[2] + c * r[2]};
}

// 7-point degree-5 rule on the unit triangle (weights sum to 1)
struct Radon
{
    std::array<std::array<double, 2>, 7> p;
    std::array<double, 7> w;

    Radon()
    {
        const double s = std::sqrt(15.0);
        const double a1 = (6.0 - s) / 21.0, b1 = (9.0 + 2.0 * s) / 21.0, w1 = (155.0 - s) / 1200.0;
        const double a2 = (6.0 + s) / 21.0, b2 = (9.0 - 2.0 * s) / 21.0, w2 = (155.0 + s) / 1200.0;
        p = {{{1.0 / 3, 1.0 / 3}, {a1, a1}, {b1, a1}, {a1, b1}, {a2, a2}, {b2, a2}, {a2, b2}}};
        w = {9.0 / 40, w1, w1, w1, w2, w2, w2};
    }
};

class CellIntegrator
{
public:
    template <class F>
    std::pair<double, double> operator()(const BoundaryMesh& mesh, std::size_t e, const Cell& cell, const F& h) const
    {
        double v = 0.0, av = 0.0;
        auto acc = [&](const Barycentric& b, double w) {
            const double y = h(SurfacePoint{e, b, mesh.map(e, b)});
            v += w * y;
            av += w * std::abs(y);
        };
        if (mesh.dim() == 2) {
            const double len = mesh.element_measure(e) * std::abs(cell.c[1][1] - cell.c[0][1]);
            for (std::size_t i = 0; i < m_gauss.nodes.size(); ++i)
                acc(lerp(cell.c[0], cell.c[1], m_gauss.nodes[i]), m_gauss.weights[i] * len);
            return {v, av};
        }
        const Point x0 = mesh.map(e, cell.c[0]);
        const double area = 0.5 * (mesh.map(e, cell.c[1]) - x0).cross(mesh.map(e, cell.c[2]) - x0).norm();
        if (!cell.polar) {
            for (std::size_t i = 0; i < 7; ++i) {
                const double u = m_radon.p[i][0], t = m_radon.p[i][1];
                acc(blend(cell.c[0], cell.c[1], cell.c[2], 1.0 - u - t, u, t), m_radon.w[i] * area);
            }
            return {v, av};
        }
        const auto [r0, r1, s0, s1] = cell.range;
        for (std::size_t i = 0; i < m_gauss.nodes.size(); ++i) {
            const double r = r0 + (r1 - r0) * m_gauss.nodes[i];
            for (std::size_t j = 0; j < m_gauss.nodes.size(); ++j) {
                const double s = s0 + (s1 - s0) * m_gauss.nodes[j];
                acc(blend(cell.c[0], cell.c[1], cell.c[2], 1.0 - r, r * (1.0 - s), r * s),
                    m_gauss.weights[i] * m_gauss.weights[j] * (r1 - r0) * (s1 - s0) * 2.0 * r * area);
            }
        }
        return {v, av};
    }

private:
    GaussRule m_gauss = gauss_legendre_unit(5);
    Radon m_radon;
};

std::vector<Cell> split(int dim, const Cell& cell)
{
    std::vector<Cell> out;
    const int d = cell.depth + 1;
    if (dim == 2) {
        const Barycentric m = lerp(cell.c[0], cell.c[1], 0.5);
        out.push_back({{cell.c[0], m, Barycentric{}}, false, d});
        out.push_back({{m, cell.c[1], Barycentric{}}, false, d});
        return out;
    }
    if (cell.polar) {
        // radial halves first, then angular halves; the caller keeps one pair
        const auto [r0, r1, s0, s1] = cell.range;
        const double rm = 0.5 * (r0 + r1), sm = 0.5 * (s0 + s1);
        const auto [dr, ds] = cell.polar_depth;
        const int rd = std::max(dr + 1, ds), sd = std::max(dr, ds + 1);
        out.push_back({cell.c, true, rd, {r0, rm, s0, s1}, {dr + 1, ds}});
        out.push_back({cell.c, true, rd, {rm, r1, s0, s1}, {dr + 1, ds}});
        out.push_back({cell.c, true, sd, {r0, r1, s0, sm}, {dr, ds + 1}});
        out.push_back({cell.c, true, sd, {r0, r1, sm, s1}, {dr, ds + 1}});
        return out;
    }
    const auto& c = cell.c;
    const Barycentric m01 = lerp(c[0], c[1], 0.5), m12 = lerp(c[1], c[2], 0.5), m20 = lerp(c[2], c[0], 0.5);
    out.push_back({{c[0], m01, m20}, false, d});
    out.push_back({{m01, c[1], m12}, false, d});
    out.push_back({{m20, m12, c[2]}, false, d});
    out.push_back({{m01, m12, m20}, false, d});
    return out;
}

template <class F>
double adaptive(const BoundaryMesh& mesh, std::size_t e, std::vector<Cell> roots, const F& h, double rel_tol)
{
    static const CellIntegrator integrate;
    std::priority_queue<Cell, std::vector<Cell>, ByError> leaves;
    double total = 0.0, total_abs = 0.0, total_err = 0.0;

    auto refine = [&](const Cell& parent) {
        auto children = split(mesh.dim(), parent);
        for (auto& ch : children) {
            require(ch.depth <= max_depth, ErrorKind::numerical, "reference quadrature exceeded subdivision depth 24");
            std::tie(ch.value, ch.abs_value) = integrate(mesh, e, ch, h);
        }
        if (parent.polar) {
            // keep the direction in which halving changes the estimate most
            const double er = std::abs(children[0].value + children[1].value - parent.value);
            const double es = std::abs(children[2].value + children[3].value - parent.value);
            children.erase(er >= es ? children.begin() + 2 : children.begin(), er >= es ? children.end() : children.begin() + 2);
        }
        double sum = 0.0, sum_abs = 0.0;
        for (const auto& ch : children) {
            sum += ch.value;
            sum_abs += ch.abs_value;
        }
        const double err = std::abs(sum - parent.value);
        total += sum - parent.value;
        total_abs += sum_abs - parent.abs_value;
        total_err += -parent.error;
        for (auto& ch : children) {
            ch.error = err / static_cast<double>(children.size());
            total_err += ch.error;
            leaves.push(ch);
        }
    };

    for (auto& r : roots) {
        std::tie(r.value, r.abs_value) = integrate(mesh, e, r, h);
        total += r.value;
        total_abs += r.abs_value;
    }
    for (const auto& r : roots) refine(r);

    while (total_err > rel_tol * total_abs && !leaves.empty()) {
        const Cell worst = leaves.top();
        leaves.pop();
        refine(worst);
    }
    return total;
}

std::vector<Cell> whole_element(int dim)
{
    if (dim == 2) return {Cell{{Barycentric{1, 0, 0}, Barycentric{0, 1, 0}, Barycentric{}}}};
    return {Cell{{Barycentric{1, 0, 0}, Barycentric{0, 1, 0}, Barycentric{0, 0, 1}}}};
}

// Cells of the element around the point p (barycentrics): the two sub-segments, or
// polar sectors centred at p.
std::vector<Cell> split_at(int dim, const Barycentric& p)
{
    const Barycentric v0{1, 0, 0}, v1{0, 1, 0}, v2{0, 0, 1};
    constexpr double eps = 1e-14;
    std::vector<Cell> out;
    if (dim == 2) {
        if (p[1] > eps) out.push_back({{p, v0, Barycentric{}}});
        if (p[0] > eps) out.push_back({{p, v1, Barycentric{}}});
        return out;
    }
    const std::array<Barycentric, 3> v{v0, v1, v2};
    for (std::size_t k = 0; k < 3; ++k) {
        // the sector opposite vertex k is degenerate when p lies on that edge
        if (p[k] > eps) out.push_back({{p, v[(k + 1) % 3], v[(k + 2) % 3]}, true});
    }
    return out;
}

} // namespace

double adaptive_reference_oracle(
    const BoundaryMesh& mesh,
    const Evaluator& f,
    const Evaluator& g,
    std::size_t a,
    std::size_t b,
    double rel_tol)
{
    require(rel_tol > 0.0, ErrorKind::invalid_input, "tolerance must be positive");
    const int n = mesh.dim();
    const double inner_tol = 0.3 * rel_tol;

    auto outer = [&](const SurfacePoint& s) {
        const double fs = f(s), gs = g(s);
        auto inner = [&](const SurfacePoint& t) {
            const double r2 = (s.x - t.x).squaredNorm();
            if (r2 == 0.0) return 0.0;
            const double kern = n == 2 ? 1.0 / r2 : 1.0 / (r2 * std::sqrt(r2));
            const double v = (fs - f(t)) * (gs - g(t)) * kern;
            require(std::isfinite(v), ErrorKind::numerical, "non-finite integrand in reference quadrature");
            return v;
        };
        std::vector<Cell> roots;
        if (a == b) {
            roots = split_at(n, s.bary);
        } else if (n == 3) {
            Barycentric nearest{};
            mesh.distance_to_element(b, s.x, &nearest);
            roots = split_at(n, nearest);
        } else {
            roots = whole_element(n);
        }
        return adaptive(mesh, b, std::move(roots), inner, inner_tol);
    };
    // outer sectors around the centroid put the edge singularities of the inner integral at r = 1
    auto roots = n == 2 ? whole_element(n) : split_at(n, Barycentric{1.0 / 3, 1.0 / 3, 1.0 / 3});
    return adaptive(mesh, a, std::move(roots), outer, rel_tol);
}

} // namespace tracenorm
