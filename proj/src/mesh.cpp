#include <tracenorm/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

namespace tracenorm {

namespace {

double point_segment_distance(const Point& x, const Point& a, const Point& b, double* t_out = nullptr)
{
    const Point d = b - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? (x - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if (t_out) *t_out = t;
    return (a + t * d - x).norm();
}

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection, 5.1.5).
Barycentric closest_on_triangle(const Point& p, const Point& a, const Point& b, const Point& c)
{
    const Point ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return {1.0, 0.0, 0.0};

    const Point bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return {0.0, 1.0, 0.0};

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return {1.0 - v, v, 0.0};
    }

    const Point cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return {0.0, 0.0, 1.0};

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return {1.0 - w, 0.0, w};
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return {0.0, 1.0 - w, w};
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom;
    const double w = vc * denom;
    return {1.0 - v - w, v, w};
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

// Closed-segment intersection test in the plane.
bool segments_intersect(
    const Eigen::Vector2d& p1,
    const Eigen::Vector2d& p2,
    const Eigen::Vector2d& q1,
    const Eigen::Vector2d& q2)
{
    auto on_segment = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& x) {
        return std::min(a.x(), b.x()) <= x.x() && x.x() <= std::max(a.x(), b.x()) &&
               std::min(a.y(), b.y()) <= x.y() && x.y() <= std::max(a.y(), b.y());
    };
    const double d1 = cross2(q2 - q1, p1 - q1);
    const double d2 = cross2(q2 - q1, p2 - q1);
    const double d3 = cross2(p2 - p1, q1 - p1);
    const double d4 = cross2(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

} // namespace

BoundaryMesh::BoundaryMesh(int dim, std::vector<Point> vertices, std::vector<Element> elements, int level)
    : m_dim(dim)
    , m_level(level)
    , m_vertices(std::move(vertices))
    , m_elements(std::move(elements))
{
    validate();
}

void BoundaryMesh::validate()
{
    require(m_dim == 2 || m_dim == 3, ErrorKind::invalid_input, "mesh dimension must be 2 or 3");
    require(!m_elements.empty(), ErrorKind::invalid_input, "mesh has no elements");
    const std::size_t nv = m_vertices.size();

    m_vertex_elements.assign(nv, {});
    for (std::size_t e = 0; e < m_elements.size(); ++e) {
        auto& el = m_elements[e];
        if (m_dim == 2) el[2] = 0;
        for (int k = 0; k < m_dim; ++k) {
            require(el[k] < nv, ErrorKind::invalid_input, "element " + std::to_string(e) + " has an invalid vertex index");
            for (int j = 0; j < k; ++j)
                require(el[j] != el[k], ErrorKind::invalid_input, "element " + std::to_string(e) + " repeats a vertex");
            m_vertex_elements[el[k]].push_back(e);
        }
    }

    if (m_dim == 2) {
        std::vector<int> as_first(nv, 0), as_second(nv, 0);
        for (const auto& el : m_elements) {
            ++as_first[el[0]];
            ++as_second[el[1]];
        }
        for (std::size_t i = 0; i < nv; ++i) {
            require(as_first[i] == 1 && as_second[i] == 1, ErrorKind::invalid_input,
                "vertex " + std::to_string(i) + " is not shared by exactly two consistently oriented segments");
        }
    } else {
        std::map<std::pair<std::size_t, std::size_t>, int> directed;
        for (const auto& el : m_elements) {
            for (int k = 0; k < 3; ++k) {
                const auto key = std::make_pair(el[k], el[(k + 1) % 3]);
                require(++directed[key] == 1, ErrorKind::invalid_input, "inconsistent triangle orientation");
            }
        }
        for (const auto& [key, count] : directed) {
            require(directed.count({key.second, key.first}) == 1, ErrorKind::invalid_input,
                "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) + ") is not shared by exactly two triangles");
            if (key.first < key.second) m_edges.push_back({key.first, key.second});
        }
        for (std::size_t i = 0; i < nv; ++i)
            require(!m_vertex_elements[i].empty(), ErrorKind::invalid_input, "unreferenced vertex " + std::to_string(i));
    }

    m_measure.resize(m_elements.size());
    m_diameter.resize(m_elements.size());
    double min_regularity = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < m_elements.size(); ++e) {
        const auto& el = m_elements[e];
        if (m_dim == 2) {
            const double len = (m_vertices[el[1]] - m_vertices[el[0]]).norm();
            m_measure[e] = len;
            m_diameter[e] = len;
        } else {
            const Point& a = m_vertices[el[0]];
            const Point& b = m_vertices[el[1]];
            const Point& c = m_vertices[el[2]];
            const double area = 0.5 * (b - a).cross(c - a).norm();
            const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
            m_measure[e] = area;
            m_diameter[e] = std::max({la, lb, lc});
            const double inradius = 2.0 * area / (la + lb + lc);
            min_regularity = std::min(min_regularity, inradius / m_diameter[e]);
        }
        require(m_measure[e] > 0.0, ErrorKind::invalid_input, "degenerate element " + std::to_string(e));
    }
    m_h_max = *std::max_element(m_diameter.begin(), m_diameter.end());
    m_h_min = *std::min_element(m_diameter.begin(), m_diameter.end());
    require(m_h_max <= max_quasi_uniformity * m_h_min, ErrorKind::invalid_input,
        "mesh is not quasi-uniform: h_max / h_min = " + std::to_string(m_h_max / m_h_min));
    if (m_dim == 3) {
        require(min_regularity >= min_shape_regularity, ErrorKind::invalid_input,
            "triangle shape regularity " + std::to_string(min_regularity) + " below threshold");
    }
}

double BoundaryMesh::total_measure() const
{
    return std::accumulate(m_measure.begin(), m_measure.end(), 0.0);
}

Point BoundaryMesh::map(std::size_t e, const Barycentric& b) const
{
    const auto& el = m_elements[e];
    Point x = b[0] * m_vertices[el[0]] + b[1] * m_vertices[el[1]];
    if (m_dim == 3) x += b[2] * m_vertices[el[2]];
    return x;
}

std::array<Point, 3> BoundaryMesh::barycentric_gradients(std::size_t e) const
{
    const auto& el = m_elements[e];
    const Point& p0 = m_vertices[el[0]];
    if (m_dim == 2) {
        const Point t = (m_vertices[el[1]] - p0) / (m_vertices[el[1]] - p0).squaredNorm();
        return {-t, t, Point::Zero()};
    }
    const Point e1 = m_vertices[el[1]] - p0;
    const Point e2 = m_vertices[el[2]] - p0;
    Eigen::Matrix2d g;
    g << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
    const Eigen::Matrix2d ginv = g.inverse();
    const Point g1 = ginv(0, 0) * e1 + ginv(0, 1) * e2;
    const Point g2 = ginv(1, 0) * e1 + ginv(1, 1) * e2;
    return {-(g1 + g2), g1, g2};
}

int BoundaryMesh::shared_vertices(std::size_t a, std::size_t b) const
{
    int count = 0;
    for (int i = 0; i < m_dim; ++i)
        for (int j = 0; j < m_dim; ++j)
            if (m_elements[a][i] == m_elements[b][j]) ++count;
    return count;
}

double BoundaryMesh::distance_to_element(std::size_t e, const Point& x, Barycentric* closest) const
{
    const auto& el = m_elements[e];
    if (m_dim == 2) {
        double t = 0.0;
        const double d = point_segment_distance(x, m_vertices[el[0]], m_vertices[el[1]], &t);
        if (closest) *closest = {1.0 - t, t, 0.0};
        return d;
    }
    const Barycentric b = closest_on_triangle(x, m_vertices[el[0]], m_vertices[el[1]], m_vertices[el[2]]);
    if (closest) *closest = b;
    return (map(e, b) - x).norm();
}

RefinedMesh refine_with_parents(const BoundaryMesh& mesh)
{
    std::vector<Point> vertices = mesh.vertices();
    std::vector<Element> elements;
    std::vector<ParentLink> parents;
    const std::size_t nv = mesh.num_vertices();

    if (mesh.dim() == 2) {
        elements.reserve(2 * mesh.num_elements());
        for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
            const auto el = mesh.elements()[e];
            const std::size_t m = nv + e;
            vertices.push_back(0.5 * (mesh.vertex(el[0]) + mesh.vertex(el[1])));
            elements.push_back({el[0], m, 0});
            elements.push_back({m, el[1], 0});
            parents.push_back({e, {Barycentric{1.0, 0.0, 0.0}, Barycentric{0.5, 0.5, 0.0}, Barycentric{}}});
            parents.push_back({e, {Barycentric{0.5, 0.5, 0.0}, Barycentric{0.0, 1.0, 0.0}, Barycentric{}}});
        }
    } else {
        const auto& edges = mesh.edges();
        for (const auto& ed : edges) vertices.push_back(0.5 * (mesh.vertex(ed[0]) + mesh.vertex(ed[1])));
        auto midpoint = [&](std::size_t a, std::size_t b) {
            const std::array<std::size_t, 2> key{std::min(a, b), std::max(a, b)};
            const auto it = std::lower_bound(edges.begin(), edges.end(), key);
            return nv + static_cast<std::size_t>(it - edges.begin());
        };
        elements.reserve(4 * mesh.num_elements());
        const Barycentric A{1, 0, 0}, B{0, 1, 0}, C{0, 0, 1};
        const Barycentric AB{0.5, 0.5, 0}, BC{0, 0.5, 0.5}, CA{0.5, 0, 0.5};
        for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
            const auto el = mesh.elements()[e];
            const std::size_t mab = midpoint(el[0], el[1]);
            const std::size_t mbc = midpoint(el[1], el[2]);
            const std::size_t mca = midpoint(el[2], el[0]);
            elements.push_back({el[0], mab, mca});
            elements.push_back({mab, el[1], mbc});
            elements.push_back({mca, mbc, el[2]});
            elements.push_back({mab, mbc, mca});
            parents.push_back({e, {A, AB, CA}});
            parents.push_back({e, {AB, B, BC}});
            parents.push_back({e, {CA, BC, C}});
            parents.push_back({e, {AB, BC, CA}});
        }
    }
    return {BoundaryMesh(mesh.dim(), std::move(vertices), std::move(elements), mesh.level() + 1), std::move(parents)};
}

BoundaryMesh refine_uniform(const BoundaryMesh& mesh)
{
    return refine_with_parents(mesh).mesh;
}

BoundaryMesh make_polygon_boundary(const std::vector<Eigen::Vector2d>& polygon)
{
    const std::size_t n = polygon.size();
    require(n >= 3, ErrorKind::invalid_input, "polygon needs at least 3 vertices");

    double scale = 0.0;
    for (const auto& p : polygon) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double tol = 1e-14 * std::max(scale, 1.0);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            require((polygon[i] - polygon[j]).norm() > tol, ErrorKind::invalid_input,
                "polygon repeats vertex " + std::to_string(j));

    bool collinear = true;
    for (std::size_t i = 2; i < n && collinear; ++i)
        if (std::abs(cross2(polygon[1] - polygon[0], polygon[i] - polygon[0])) > tol * scale) collinear = false;
    require(!collinear, ErrorKind::invalid_input, "polygon vertices are collinear");

    for (std::size_t i = 0; i < n; ++i) {
        const auto& p1 = polygon[i];
        const auto& p2 = polygon[(i + 1) % n];
        // consecutive edges must not fold back onto each other
        const auto& p0 = polygon[(i + n - 1) % n];
        if (std::abs(cross2(p1 - p0, p2 - p1)) <= tol * scale)
            require((p1 - p0).dot(p2 - p1) > 0.0, ErrorKind::invalid_input, "polygon folds back at vertex " + std::to_string(i));
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent through the closing edge
            if (segments_intersect(p1, p2, polygon[j], polygon[(j + 1) % n]))
                fail(ErrorKind::invalid_input,
                    "polygon is self-intersecting: edges " + std::to_string(i) + " and " + std::to_string(j));
        }
    }

    std::vector<Point> vertices;
    std::vector<Element> elements;
    for (std::size_t i = 0; i < n; ++i) {
        vertices.emplace_back(polygon[i].x(), polygon[i].y(), 0.0);
        elements.push_back({i, (i + 1) % n, 0});
    }
    return BoundaryMesh(2, std::move(vertices), std::move(elements));
}

BoundaryMesh make_cube_surface()
{
    std::vector<Point> vertices;
    for (int i = 0; i < 8; ++i) vertices.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    // outward-oriented faces, each split along the diagonal through its first vertex
    const std::array<std::array<std::size_t, 4>, 6> faces{{
        {0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5},
    }};
    std::vector<Element> elements;
    for (const auto& f : faces) {
        elements.push_back({f[0], f[1], f[2]});
        elements.push_back({f[0], f[2], f[3]});
    }
    return BoundaryMesh(3, std::move(vertices), std::move(elements));
}

BoundaryMesh make_unit_square()
{
    return make_polygon_boundary({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

BoundaryMesh make_lshape()
{
    return make_polygon_boundary({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
}

BoundaryMesh make_regular_polygon(int k)
{
    require(k >= 3, ErrorKind::invalid_input, "regular polygon needs k >= 3");
    std::vector<Eigen::Vector2d> polygon;
    const double pi = std::acos(-1.0);
    for (int i = 0; i < k; ++i) polygon.emplace_back(std::cos(2 * pi * i / k), std::sin(2 * pi * i / k));
    return make_polygon_boundary(polygon);
}

MeshHierarchy::MeshHierarchy(BoundaryMesh coarse)
{
    m_meshes.push_back(std::make_shared<const BoundaryMesh>(std::move(coarse)));
    m_parents.emplace_back();
}

void MeshHierarchy::refine_to(int level)
{
    while (finest_level() < level) {
        auto refined = refine_with_parents(*m_meshes.back());
        m_meshes.push_back(std::make_shared<const BoundaryMesh>(std::move(refined.mesh)));
        m_parents.push_back(std::move(refined.parents));
    }
}

const BoundaryMesh& MeshHierarchy::mesh(int level) const
{
    return *mesh_ptr(level);
}

MeshPtr MeshHierarchy::mesh_ptr(int level) const
{
    require(level >= 0 && level <= finest_level(), ErrorKind::invalid_input,
        "mesh level " + std::to_string(level) + " not available");
    return m_meshes[static_cast<std::size_t>(level)];
}

std::size_t MeshHierarchy::ancestor(int fine_level, std::size_t e, int coarse_level) const
{
    require(coarse_level <= fine_level, ErrorKind::invalid_input, "ancestor level must be coarser");
    for (int l = fine_level; l > coarse_level; --l) e = m_parents[static_cast<std::size_t>(l)][e].parent;
    return e;
}

std::pair<std::size_t, Barycentric>
MeshHierarchy::to_ancestor(int fine_level, std::size_t e, const Barycentric& b, int coarse_level) const
{
    require(coarse_level <= fine_level, ErrorKind::invalid_input, "ancestor level must be coarser");
    Barycentric cur = b;
    for (int l = fine_level; l > coarse_level; --l) {
        const auto& link = m_parents[static_cast<std::size_t>(l)][e];
        Barycentric next{0.0, 0.0, 0.0};
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) next[j] += cur[k] * link.child_vertices[k][j];
        cur = next;
        e = link.parent;
    }
    return {e, cur};
}

std::vector<std::size_t>
MeshHierarchy::descendants(int coarse_level, std::span<const std::size_t> coarse_elements, int fine_level) const
{
    const auto& coarse = mesh(coarse_level);
    std::vector<char> in(coarse.num_elements(), 0);
    for (auto e : coarse_elements) in[e] = 1;
    std::vector<std::size_t> out;
    const auto& fine = mesh(fine_level);
    for (std::size_t e = 0; e < fine.num_elements(); ++e)
        if (in[ancestor(fine_level, e, coarse_level)]) out.push_back(e);
    return out;
}

double PatchBoundary::distance(const Point& x) const
{
    double d = std::numeric_limits<double>::infinity();
    if (dim == 2) {
        for (const auto& p : points) d = std::min(d, (x - p).norm());
    } else {
        for (const auto& s : segments) d = std::min(d, point_segment_distance(x, s[0], s[1]));
    }
    return d;
}

std::vector<Patch> build_patches(const BoundaryMesh& mesh)
{
    std::vector<Patch> patches(mesh.num_vertices());
    const int n = mesh.dim();
    for (std::size_t y = 0; y < mesh.num_vertices(); ++y) {
        Patch& p = patches[y];
        p.center = y;
        p.elements = mesh.vertex_elements(y);
        p.boundary.dim = n;
        std::vector<std::size_t> verts;
        for (auto e : p.elements) {
            const auto el = mesh.element(e);
            p.measure += mesh.element_measure(e);
            int k = 0;
            while (el[static_cast<std::size_t>(k)] != y) ++k;
            for (int j = 0; j < n; ++j)
                if (j != k) verts.push_back(el[static_cast<std::size_t>(j)]);
            if (n == 3) {
                const std::size_t a = el[static_cast<std::size_t>((k + 1) % 3)];
                const std::size_t b = el[static_cast<std::size_t>((k + 2) % 3)];
                p.boundary.segments.push_back({mesh.vertex(a), mesh.vertex(b)});
            }
        }
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        p.boundary_vertices = verts;
        if (n == 2)
            for (auto v : verts) p.boundary.points.push_back(mesh.vertex(v));

        verts.push_back(y);
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (std::size_t j = i + 1; j < verts.size(); ++j)
                p.diameter = std::max(p.diameter, (mesh.vertex(verts[i]) - mesh.vertex(verts[j])).norm());
    }
    return patches;
}

double distance_to_patch_boundary(const BoundaryMesh& mesh, const Patch& patch, const Point& s)
{
    double off = std::numeric_limits<double>::infinity();
    for (auto e : patch.elements) off = std::min(off, mesh.distance_to_element(e, s));
    require(off <= 1e-10 * std::max(patch.diameter, 1.0), ErrorKind::invalid_input, "point is not on the patch");
    return patch.boundary.distance(s);
}

std::vector<double> geodesic_distances(const BoundaryMesh& mesh, std::size_t source)
{
    const std::size_t nv = mesh.num_vertices();
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(nv);
    auto link = [&](std::size_t a, std::size_t b) {
        const double w = (mesh.vertex(a) - mesh.vertex(b)).norm();
        adj[a].emplace_back(b, w);
        adj[b].emplace_back(a, w);
    };
    if (mesh.dim() == 2) {
        for (const auto& el : mesh.elements()) link(el[0], el[1]);
    } else {
        for (const auto& ed : mesh.edges()) link(ed[0], ed[1]);
    }

    std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        for (const auto& [v, w] : adj[u]) {
            if (d + w < dist[v]) {
                dist[v] = d + w;
                queue.emplace(dist[v], v);
            }
        }
    }
    return dist;
}

double geodesic_ratio(const BoundaryMesh& mesh, std::size_t a, std::size_t b)
{
    require(a != b, ErrorKind::invalid_input, "geodesic ratio needs distinct vertices");
    return geodesic_distances(mesh, a)[b] / (mesh.vertex(a) - mesh.vertex(b)).norm();
}

double nondegeneracy_constant(const BoundaryMesh& mesh)
{
    double ratio = 1.0;
    for (std::size_t a = 0; a < mesh.num_vertices(); ++a) {
        const auto dist = geodesic_distances(mesh, a);
        for (std::size_t b = a + 1; b < mesh.num_vertices(); ++b)
            ratio = std::max(ratio, dist[b] / (mesh.vertex(a) - mesh.vertex(b)).norm());
    }
    return ratio;
}

void write_mesh(std::ostream& out, const BoundaryMesh& mesh)
{
    const int n = mesh.dim();
    out << n << ' ' << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
    char buf[64];
    for (const auto& v : mesh.vertices()) {
        for (int k = 0; k < n; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", v[k]);
            out << (k ? " " : "") << buf;
        }
        out << '\n';
    }
    for (const auto& el : mesh.elements()) {
        for (int k = 0; k < n; ++k) out << (k ? " " : "") << el[static_cast<std::size_t>(k)];
        out << '\n';
    }
}

BoundaryMesh read_mesh(std::istream& in)
{
    int dim = 0;
    std::size_t nv = 0, ne = 0;
    require(static_cast<bool>(in >> dim >> nv >> ne), ErrorKind::invalid_input, "malformed mesh header");
    require(dim == 2 || dim == 3, ErrorKind::invalid_input, "mesh dimension must be 2 or 3");
    std::vector<Point> vertices(nv, Point::Zero());
    for (auto& v : vertices) {
        for (int k = 0; k < dim; ++k) {
            std::string token;
            require(static_cast<bool>(in >> token), ErrorKind::invalid_input, "truncated vertex list");
            std::size_t used = 0;
            try {
                v[k] = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            require(used == token.size(), ErrorKind::invalid_input, "malformed coordinate '" + token + "'");
        }
    }
    std::vector<Element> elements(ne, Element{0, 0, 0});
    for (auto& el : elements)
        for (int k = 0; k < dim; ++k)
            require(static_cast<bool>(in >> el[static_cast<std::size_t>(k)]), ErrorKind::invalid_input, "truncated element list");
    return BoundaryMesh(dim, std::move(vertices), std::move(elements));
}

} // namespace tracenorm
