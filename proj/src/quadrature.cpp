#include <tracenorm/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

namespace tracenorm {

GaussRule gauss_legendre(int order)
{
    require(order >= 1, ErrorKind::invalid_input, "Gauss order must be >= 1");
    GaussRule rule;
    rule.order = order;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const double pi = std::acos(-1.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // three-term recurrence for P_order and its derivative
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) p0 = 1.0;
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute the derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
    }
    if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
    return rule;
}

GaussRule gauss_legendre_unit(int order)
{
    GaussRule rule = gauss_legendre(order);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.nodes[i] = 0.5 * (rule.nodes[i] + 1.0);
        rule.weights[i] *= 0.5;
    }
    return rule;
}

PairClass classify_pair(const BoundaryMesh& mesh, std::size_t a, std::size_t b)
{
    const int shared = mesh.shared_vertices(a, b);
    if (shared == 0) return PairClass::disjoint;
    if (shared == 1) return PairClass::vertex_adjacent;
    if (shared == mesh.dim()) return PairClass::identical;
    return PairClass::edge_adjacent;
}

const char* to_string(PairClass c)
{
    switch (c) {
    case PairClass::disjoint: return "disjoint";
    case PairClass::vertex_adjacent: return "vertex-adjacent";
    case PairClass::edge_adjacent: return "edge-adjacent";
    case PairClass::identical: return "identical";
    }
    return "?";
}

namespace {

// Reference rule: local coordinates of both points (segment parameter, or the usual
// unit-triangle coordinates) and weights, for one singularity class.
struct ReferencePairRule
{
    std::vector<std::array<double, 2>> a;
    std::vector<std::array<double, 2>> b;
    std::vector<double> w;

    void add(double a0, double a1, double b0, double b1, double weight)
    {
        a.push_back({a0, a1});
        b.push_back({b0, b1});
        w.push_back(weight);
    }
};

ReferencePairRule make_segment_rule(PairClass cls, int order)
{
    const GaussRule g = gauss_legendre_unit(order);
    ReferencePairRule r;
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
            const double xi = g.nodes[static_cast<std::size_t>(i)];
            const double eta = g.nodes[static_cast<std::size_t>(j)];
            const double w = g.weights[static_cast<std::size_t>(i)] * g.weights[static_cast<std::size_t>(j)];
            switch (cls) {
            case PairClass::disjoint: r.add(xi, 0, eta, 0, w); break;
            case PairClass::vertex_adjacent:
                // shared vertex at s = t = 0; Duffy split of the square along its diagonal
                r.add(xi, 0, xi * eta, 0, w * xi);
                r.add(xi * eta, 0, xi, 0, w * xi);
                break;
            case PairClass::identical: {
                // z = s - t = xi, base point (1 - xi) eta
                const double t0 = (1.0 - xi) * eta;
                r.add(t0 + xi, 0, t0, 0, w * (1.0 - xi));
                r.add(t0, 0, t0 + xi, 0, w * (1.0 - xi));
                break;
            }
            default: break;
            }
        }
    }
    return r;
}

// Triangle pair rules on the usual unit triangle {u, v >= 0, u + v <= 1}. The
// singular-case formulas are the four-dimensional Sauter-Schwab transforms on
// {0 <= x2 <= x1 <= 1}, followed by (x1, x2) -> (x1 - x2, x2).
ReferencePairRule make_triangle_rule(PairClass cls, bool near, int order)
{
    const GaussRule g = gauss_legendre_unit(order);
    ReferencePairRule r;
    auto add_ss = [&r](double x1, double x2, double y1, double y2, double w) {
        r.add(x1 - x2, x2, y1 - y2, y2, w);
    };
    const std::size_t q = static_cast<std::size_t>(order);

    // Gauss nodes on [0, 1], optionally as a two-panel composite rule split at 1/2.
    struct Axis
    {
        std::vector<double> x, w;
    };
    auto axis = [&](bool split) {
        if (!split) return Axis{g.nodes, g.weights};
        Axis a;
        for (double shift : {0.0, 0.5})
            for (std::size_t l = 0; l < q; ++l) {
                a.x.push_back(shift + 0.5 * g.nodes[l]);
                a.w.push_back(0.5 * g.weights[l]);
            }
        return a;
    };

    if (cls == PairClass::disjoint) {
        // close pairs, typically folded across an edge of the surface, are nearly singular
        const Axis ax = axis(near);
        const auto& x = ax.x;
        const auto& wg = ax.w;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < x.size(); ++j)
                for (std::size_t k = 0; k < x.size(); ++k)
                    for (std::size_t l = 0; l < x.size(); ++l) {
                        const double u1 = x[i], v1 = (1.0 - x[i]) * x[j];
                        const double u2 = x[k], v2 = (1.0 - x[k]) * x[l];
                        r.add(u1, v1, u2, v2, wg[i] * wg[j] * wg[k] * wg[l] * (1.0 - x[i]) * (1.0 - x[k]));
                    }
        return r;
    }

    // After the transforms the integrand is smooth but, on folded pairs and in the
    // direction variable of identical pairs, has complex singularities close to [0, 1].
    // Two panels in those variables restore the accuracy of the flat disjoint case.
    const Axis a0 = axis(false);
    const Axis a1 = axis(cls != PairClass::identical);
    const Axis a2 = axis(cls != PairClass::identical);
    const Axis a3 = axis(cls != PairClass::vertex_adjacent);
    for (std::size_t i = 0; i < a0.x.size(); ++i) {
        for (std::size_t j = 0; j < a1.x.size(); ++j) {
            for (std::size_t k = 0; k < a2.x.size(); ++k) {
                for (std::size_t l = 0; l < a3.x.size(); ++l) {
                    const double xi = a0.x[i], e1 = a1.x[j], e2 = a2.x[k], e3 = a3.x[l];
                    const double w = a0.w[i] * a1.w[j] * a2.w[k] * a3.w[l];
                    switch (cls) {
                    case PairClass::identical: {
                        const double lw = w * xi * xi * xi * e1 * e1 * e2;
                        add_ss(xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), lw);
                        add_ss(xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), lw);
                        add_ss(xi, xi * (e1 * (1 - e2 + e2 * e3)), xi * (1 - e1 * e2), xi * (e1 * (1 - e2)), lw);
                        add_ss(xi * (1 - e1 * e2), xi * (e1 * (1 - e2)), xi, xi * (e1 * (1 - e2 + e2 * e3)), lw);
                        add_ss(xi * (1 - e1 * e2 * e3), xi * (e1 * (1 - e2 * e3)), xi, xi * (e1 * (1 - e2)), lw);
                        add_ss(xi, xi * (e1 * (1 - e2)), xi * (1 - e1 * e2 * e3), xi * (e1 * (1 - e2 * e3)), lw);
                        break;
                    }
                    case PairClass::edge_adjacent: {
                        const double lw = w * xi * xi * xi * e1 * e1 * e2;
                        add_ss(xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2), w * xi * xi * xi * e1 * e1);
                        add_ss(xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), lw);
                        add_ss(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, lw);
                        add_ss(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, lw);
                        add_ss(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, lw);
                        break;
                    }
                    case PairClass::vertex_adjacent: {
                        const double lw = w * xi * xi * xi * e2;
                        add_ss(xi, xi * e1, xi * e2, xi * e2 * e3, lw);
                        add_ss(xi * e2, xi * e2 * e3, xi, xi * e1, lw);
                        break;
                    }
                    default: break;
                    }
                }
            }
        }
    }
    return r;
}

const ReferencePairRule& reference_rule(int dim, PairClass cls, bool near, int order)
{
    static std::mutex mutex;
    static std::map<std::tuple<int, int, bool, int>, ReferencePairRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_tuple(dim, static_cast<int>(cls), near, order);
    auto it = cache.find(key);
    if (it == cache.end()) {
        ReferencePairRule r = dim == 2 ? make_segment_rule(cls, order) : make_triangle_rule(cls, near, order);
        it = cache.emplace(key, std::move(r)).first;
    }
    return it->second;
}

// Local orderings that put the shared vertices first, in matching order.
void shared_orderings(const BoundaryMesh& mesh, std::size_t a, std::size_t b, std::array<int, 3>& pa, std::array<int, 3>& pb)
{
    const int n = mesh.dim();
    const auto ea = mesh.element(a);
    const auto eb = mesh.element(b);
    pa = {0, 1, 2};
    pb = {0, 1, 2};
    std::vector<std::pair<int, int>> common;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (ea[static_cast<std::size_t>(i)] == eb[static_cast<std::size_t>(j)]) common.emplace_back(i, j);

    if (a == b) return; // identical: same ordering for both
    int na = 0, nb = 0;
    for (const auto& [i, j] : common) {
        pa[static_cast<std::size_t>(na++)] = i;
        pb[static_cast<std::size_t>(nb++)] = j;
    }
    for (int i = 0; i < n; ++i)
        if (std::none_of(common.begin(), common.end(), [i](auto c) { return c.first == i; }))
            pa[static_cast<std::size_t>(na++)] = i;
    for (int j = 0; j < n; ++j)
        if (std::none_of(common.begin(), common.end(), [j](auto c) { return c.second == j; }))
            pb[static_cast<std::size_t>(nb++)] = j;
}

Barycentric to_barycentric(int dim, const std::array<double, 2>& local, const std::array<int, 3>& perm)
{
    Barycentric permuted{};
    if (dim == 2) {
        permuted = {1.0 - local[0], local[0], 0.0};
    } else {
        permuted = {1.0 - local[0] - local[1], local[0], local[1]};
    }
    Barycentric out{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) out[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = permuted[static_cast<std::size_t>(k)];
    return out;
}

} // namespace

bool near_pair(const BoundaryMesh& mesh, std::size_t a, std::size_t b)
{
    if (mesh.dim() != 3) return false;
    const Barycentric mid{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    const double d = (mesh.map(a, mid) - mesh.map(b, mid)).norm();
    return d < std::max(mesh.element_diameter(a), mesh.element_diameter(b));
}

PairRule pair_rule(const BoundaryMesh& mesh, std::size_t a, std::size_t b, int order)
{
    require(order >= 1, ErrorKind::invalid_input, "quadrature order must be >= 1");
    const int n = mesh.dim();
    const PairClass cls = classify_pair(mesh, a, b);
    const ReferencePairRule& ref = reference_rule(n, cls, cls == PairClass::disjoint && near_pair(mesh, a, b), order);

    std::array<int, 3> pa{}, pb{};
    shared_orderings(mesh, a, b, pa, pb);

    // reference measure: 1 for segments, 1/2 for the unit triangle
    const double jac = n == 2 ? mesh.element_measure(a) * mesh.element_measure(b)
                              : 4.0 * mesh.element_measure(a) * mesh.element_measure(b);
    PairRule rule;
    rule.a.reserve(ref.w.size());
    rule.b.reserve(ref.w.size());
    rule.weights.reserve(ref.w.size());
    for (std::size_t i = 0; i < ref.w.size(); ++i) {
        rule.a.push_back(to_barycentric(n, ref.a[i], pa));
        rule.b.push_back(to_barycentric(n, ref.b[i], pb));
        rule.weights.push_back(ref.w[i] * jac);
    }
    return rule;
}

double integrate_pair(
    const BoundaryMesh& mesh,
    const Evaluator& f,
    const Evaluator& g,
    std::size_t a,
    std::size_t b,
    int order)
{
    // the integrand is symmetric under s <-> t, so both orders give the same value
    if (a > b) std::swap(a, b);
    const PairRule rule = pair_rule(mesh, a, b, order);
    const int n = mesh.dim();
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const SurfacePoint s{a, rule.a[q], mesh.map(a, rule.a[q])};
        const SurfacePoint t{b, rule.b[q], mesh.map(b, rule.b[q])};
        const double fs = f(s), ft = f(t), gs = g(s), gt = g(t);
        require(std::isfinite(fs) && std::isfinite(ft) && std::isfinite(gs) && std::isfinite(gt),
            ErrorKind::numerical, "evaluator returned a non-finite value");
        sum += rule.weights[q] * (fs - ft) * (gs - gt) * slobodeckij_kernel(n, s.x, t.x);
    }
    return sum;
}

// ---------------------------------------------------------------------------------
// Graded rule for the distance-weighted boundary term

GradedBoundaryRule::GradedBoundaryRule(
    const BoundaryMesh& mesh,
    std::vector<std::size_t> elements,
    PatchBoundary boundary,
    double diameter,
    int order)
    : m_mesh(&mesh)
    , m_boundary(std::move(boundary))
    , m_scale(mesh.dim() == 2 ? 1.0 : diameter)
    , m_tol(1e-12 * diameter)
    , m_gauss(gauss_legendre_unit(order))
{
    const int n = mesh.dim();
    auto singular = [&](std::size_t e, const Barycentric& b) {
        return m_boundary.distance(mesh.map(e, b)) <= m_tol;
    };

    for (auto e : elements) {
        if (n == 2) {
            // breakpoints where the nearest boundary point switches
            const Point p0 = mesh.vertex(mesh.element(e)[0]);
            const Point d = mesh.vertex(mesh.element(e)[1]) - p0;
            std::vector<double> cuts{0.0, 1.0};
            const auto& pts = m_boundary.points;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                for (std::size_t j = i + 1; j < pts.size(); ++j) {
                    const Point ab = pts[j] - pts[i];
                    const double denom = 2.0 * d.dot(ab);
                    if (std::abs(denom) < 1e-300) continue;
                    const double t = (pts[j].squaredNorm() - pts[i].squaredNorm() - 2.0 * p0.dot(ab)) / denom;
                    if (t > 1e-12 && t < 1.0 - 1e-12) cuts.push_back(t);
                }
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                const Barycentric lo{1.0 - cuts[k], cuts[k], 0.0};
                const Barycentric hi{1.0 - cuts[k + 1], cuts[k + 1], 0.0};
                const bool slo = singular(e, lo), shi = singular(e, hi);
                if (slo && shi) {
                    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
                    const Barycentric m{1.0 - mid, mid, 0.0};
                    m_pieces.push_back({PieceKind::graded_segment, e, {lo, m, Barycentric{}}});
                    m_pieces.push_back({PieceKind::graded_segment, e, {hi, m, Barycentric{}}});
                } else if (slo) {
                    m_pieces.push_back({PieceKind::graded_segment, e, {lo, hi, Barycentric{}}});
                } else if (shi) {
                    m_pieces.push_back({PieceKind::graded_segment, e, {hi, lo, Barycentric{}}});
                } else {
                    m_pieces.push_back({PieceKind::plain, e, {lo, hi, Barycentric{}}});
                }
            }
        } else {
            add_triangle(e, {Barycentric{1, 0, 0}, Barycentric{0, 1, 0}, Barycentric{0, 0, 1}}, 0);
        }
    }
}

void GradedBoundaryRule::add_triangle(std::size_t e, const std::array<Barycentric, 3>& c, int depth)
{
    auto mid = [](const Barycentric& p, const Barycentric& q) {
        return Barycentric{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])};
    };
    auto singular = [&](const Barycentric& b) { return m_boundary.distance(m_mesh->map(e, b)) <= m_tol; };

    std::array<bool, 3> sv{singular(c[0]), singular(c[1]), singular(c[2])};
    const int count = sv[0] + sv[1] + sv[2];
    if (count == 0) {
        m_pieces.push_back({PieceKind::plain, e, c});
        return;
    }
    if (count == 1) {
        const int k = sv[0] ? 0 : (sv[1] ? 1 : 2);
        m_pieces.push_back({PieceKind::graded_vertex, e, {c[static_cast<std::size_t>(k)], c[static_cast<std::size_t>((k + 1) % 3)], c[static_cast<std::size_t>((k + 2) % 3)]}});
        return;
    }
    if (count == 2) {
        const int k = !sv[0] ? 0 : (!sv[1] ? 1 : 2); // the regular vertex
        const Barycentric& p = c[static_cast<std::size_t>((k + 1) % 3)];
        const Barycentric& q = c[static_cast<std::size_t>((k + 2) % 3)];
        if (singular(mid(p, q))) {
            m_pieces.push_back({PieceKind::graded_edge, e, {p, q, c[static_cast<std::size_t>(k)]}});
            return;
        }
    }
    require(depth < 8, ErrorKind::numerical, "cannot separate boundary contacts of a triangle");
    const Barycentric m01 = mid(c[0], c[1]), m12 = mid(c[1], c[2]), m20 = mid(c[2], c[0]);
    add_triangle(e, {c[0], m01, m20}, depth + 1);
    add_triangle(e, {m01, c[1], m12}, depth + 1);
    add_triangle(e, {m20, m12, c[2]}, depth + 1);
    add_triangle(e, {m01, m12, m20}, depth + 1);
}

void GradedBoundaryRule::add_point(std::vector<GradedPoint>& out, std::size_t e, const Barycentric& b, double w) const
{
    const Point x = m_mesh->map(e, b);
    const double d = m_boundary.distance(x);
    const double weight = m_mesh->dim() == 2 ? w / d : w * m_scale / (d * d);
    out.push_back({e, b, x, weight});
}

std::vector<GradedPoint> GradedBoundaryRule::layer(int k) const
{
    std::vector<GradedPoint> out;
    const auto& nodes = m_gauss.nodes;
    const auto& wts = m_gauss.weights;
    const std::size_t q = nodes.size();
    const int n = m_mesh->dim();

    auto combine2 = [](const Barycentric& p, const Barycentric& r, double t) {
        return Barycentric{(1 - t) * p[0] + t * r[0], (1 - t) * p[1] + t * r[1], (1 - t) * p[2] + t * r[2]};
    };
    auto combine3 = [](const Barycentric& p, const Barycentric& r, const Barycentric& s, double a, double b, double c) {
        return Barycentric{a * p[0] + b * r[0] + c * s[0], a * p[1] + b * r[1] + c * s[1], a * p[2] + b * r[2] + c * s[2]};
    };
    const double lo = std::ldexp(1.0, -(k + 1));
    const double hi = std::ldexp(1.0, -k);

    for (const auto& piece : m_pieces) {
        const std::size_t e = piece.element;
        if (n == 2) {
            const double len = m_mesh->element_measure(e) * std::abs(piece.corners[1][1] - piece.corners[0][1]);
            if (piece.kind == PieceKind::plain) {
                if (k != 0) continue;
                for (std::size_t i = 0; i < q; ++i)
                    add_point(out, e, combine2(piece.corners[0], piece.corners[1], nodes[i]), wts[i] * len);
            } else {
                for (std::size_t i = 0; i < q; ++i) {
                    const double t = lo + (hi - lo) * nodes[i];
                    add_point(out, e, combine2(piece.corners[0], piece.corners[1], t), wts[i] * (hi - lo) * len);
                }
            }
            continue;
        }

        const auto& c = piece.corners;
        // area of the piece relative to the element, times the element area
        const Point x0 = m_mesh->map(e, c[0]), x1 = m_mesh->map(e, c[1]), x2 = m_mesh->map(e, c[2]);
        const double twice_area = (x1 - x0).cross(x2 - x0).norm();
        if (piece.kind == PieceKind::plain) {
            if (k != 0) continue;
            for (std::size_t i = 0; i < q; ++i)
                for (std::size_t j = 0; j < q; ++j) {
                    const double u = nodes[i], v = (1.0 - nodes[i]) * nodes[j];
                    add_point(out, e, combine3(c[0], c[1], c[2], 1 - u - v, u, v), wts[i] * wts[j] * (1.0 - nodes[i]) * twice_area);
                }
        } else if (piece.kind == PieceKind::graded_vertex) {
            // x = c0 + rho ((c1 - c0) + s (c2 - c1)), Jacobian rho * 2|T|
            for (std::size_t i = 0; i < q; ++i) {
                const double rho = lo + (hi - lo) * nodes[i];
                for (std::size_t j = 0; j < q; ++j) {
                    const double s = nodes[j];
                    add_point(out, e, combine3(c[0], c[1], c[2], 1 - rho, rho * (1 - s), rho * s),
                        wts[i] * (hi - lo) * wts[j] * rho * twice_area);
                }
            }
        } else {
            // edge c0-c1 on the boundary: x = (1 - t)(c0 + s (c1 - c0)) + t c2, Jacobian (1 - t) 2|T|
            for (std::size_t i = 0; i < q; ++i) {
                const double t = lo + (hi - lo) * nodes[i];
                for (std::size_t j = 0; j < q; ++j) {
                    const double s = nodes[j];
                    add_point(out, e, combine3(c[0], c[1], c[2], (1 - t) * (1 - s), (1 - t) * s, t),
                        wts[i] * (hi - lo) * wts[j] * (1 - t) * twice_area);
                }
            }
        }
    }
    return out;
}

double integrate_weighted_boundary(const GradedBoundaryRule& rule, const Evaluator& f)
{
    double total = 0.0;
    double previous = -1.0;
    int non_decreasing = 0;
    for (int k = 0; k < GradedBoundaryRule::max_layers; ++k) {
        double layer_sum = 0.0;
        for (const auto& p : rule.layer(k)) {
            const double v = f({p.element, p.bary, p.x});
            require(std::isfinite(v), ErrorKind::numerical, "evaluator returned a non-finite value");
            layer_sum += p.weight * v * v;
        }
        total += layer_sum;
        if (k >= 1) {
            if (layer_sum <= 1e-8 * total) return total;
            if (previous > 0.0 && layer_sum >= 0.99 * previous) {
                if (++non_decreasing >= 2)
                    fail(ErrorKind::divergence, "weighted boundary integral diverges: function not in H^{1/2}_{00}");
            } else {
                non_decreasing = 0;
            }
        }
        previous = layer_sum;
    }
    fail(ErrorKind::divergence, "weighted boundary integral did not converge: function not in H^{1/2}_{00}");
}

double integrate_weighted_boundary(const BoundaryMesh& mesh, const Patch& patch, const Evaluator& f, int order)
{
    const GradedBoundaryRule rule(mesh, patch.elements, patch.boundary, patch.diameter, order);
    return integrate_weighted_boundary(rule, f);
}

} // namespace tracenorm
