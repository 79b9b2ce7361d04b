#pragma once

#include <tracenorm/error.hpp>

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace tracenorm {

/// Points live in R^3; two-dimensional meshes keep z = 0.
using Point = Eigen::Vector3d;

/// Barycentric coordinates with respect to an element's vertices. Segments use the
/// first two entries, the third is zero.
using Barycentric = std::array<double, 3>;

/// Vertex indices of an element; segments use the first two entries.
using Element = std::array<std::size_t, 3>;

/// Meshed boundary of a polygon (dim = 2, closed polyline) or a polyhedron
/// (dim = 3, closed triangulated surface).
///
/// The constructor validates the closed-manifold, orientation, quasi-uniformity
/// (h_max / h_min <= 4) and, for surfaces, shape-regularity (inradius / diameter >= 0.2)
/// invariants. Meshes are immutable afterwards.
class BoundaryMesh
{
public:
    static constexpr double max_quasi_uniformity = 4.0;
    static constexpr double min_shape_regularity = 0.2;

    BoundaryMesh(int dim, std::vector<Point> vertices, std::vector<Element> elements, int level = 0);

    int dim() const { return m_dim; }
    int level() const { return m_level; }
    /// Vertices per element (= dim).
    int element_size() const { return m_dim; }

    std::size_t num_vertices() const { return m_vertices.size(); }
    std::size_t num_elements() const { return m_elements.size(); }

    const Point& vertex(std::size_t i) const { return m_vertices[i]; }
    const std::vector<Point>& vertices() const { return m_vertices; }
    std::span<const std::size_t> element(std::size_t e) const
    {
        return {m_elements[e].data(), static_cast<std::size_t>(m_dim)};
    }
    const std::vector<Element>& elements() const { return m_elements; }

    /// Elements incident to vertex i, ascending.
    const std::vector<std::size_t>& vertex_elements(std::size_t i) const { return m_vertex_elements[i]; }

    /// Undirected edges (sorted vertex pairs, lexicographic order). Empty for dim = 2.
    const std::vector<std::array<std::size_t, 2>>& edges() const { return m_edges; }

    double h() const { return m_h_max; }
    double h_min() const { return m_h_min; }

    double element_measure(std::size_t e) const { return m_measure[e]; }
    double element_diameter(std::size_t e) const { return m_diameter[e]; }
    double total_measure() const;

    Point map(std::size_t e, const Barycentric& b) const;
    /// Gradients (ambient, tangential) of the barycentric coordinate functions of element e.
    std::array<Point, 3> barycentric_gradients(std::size_t e) const;

    /// Number of vertices the two elements share.
    int shared_vertices(std::size_t a, std::size_t b) const;

    /// Euclidean distance from x to element e, and the closest point's barycentrics.
    double distance_to_element(std::size_t e, const Point& x, Barycentric* closest = nullptr) const;

private:
    void validate();

    int m_dim;
    int m_level;
    std::vector<Point> m_vertices;
    std::vector<Element> m_elements;
    std::vector<std::vector<std::size_t>> m_vertex_elements;
    std::vector<std::array<std::size_t, 2>> m_edges;
    std::vector<double> m_measure;
    std::vector<double> m_diameter;
    double m_h_max = 0.0;
    double m_h_min = 0.0;
};

using MeshPtr = std::shared_ptr<const BoundaryMesh>;

/// Child-to-parent link produced by uniform refinement.
struct ParentLink
{
    std::size_t parent;
    /// Barycentrics (in the parent) of the child's vertices.
    std::array<Barycentric, 3> child_vertices;
};

struct RefinedMesh
{
    BoundaryMesh mesh;
    std::vector<ParentLink> parents;
};

/// Uniform refinement: segments split at the midpoint, triangles split 1 -> 4 through
/// the edge midpoints. Coarse vertex indices are preserved; new vertices are appended.
RefinedMesh refine_with_parents(const BoundaryMesh& mesh);
BoundaryMesh refine_uniform(const BoundaryMesh& mesh);

/// Polygon boundary, one segment per polygon edge.
BoundaryMesh make_polygon_boundary(const std::vector<Eigen::Vector2d>& polygon);
/// Unit-cube surface, every face split into two triangles (8 vertices, 12 triangles).
BoundaryMesh make_cube_surface();

BoundaryMesh make_unit_square();
/// L-shaped hexagon (0,0),(2,0),(2,1),(1,1),(1,2),(0,2).
BoundaryMesh make_lshape();
/// Regular k-gon inscribed in the unit circle.
BoundaryMesh make_regular_polygon(int k);

/// Sequence of uniformly refined meshes with parent maps between consecutive levels.
class MeshHierarchy
{
public:
    explicit MeshHierarchy(BoundaryMesh coarse);

    /// Makes levels up to (and including) `level` available.
    void refine_to(int level);

    int finest_level() const { return static_cast<int>(m_meshes.size()) - 1; }
    const BoundaryMesh& mesh(int level) const;
    MeshPtr mesh_ptr(int level) const;

    /// Ancestor of fine element e at the coarser level.
    std::size_t ancestor(int fine_level, std::size_t e, int coarse_level) const;

    /// Maps barycentrics on a fine element to (ancestor, barycentrics in the ancestor).
    std::pair<std::size_t, Barycentric>
    to_ancestor(int fine_level, std::size_t e, const Barycentric& b, int coarse_level) const;

    /// All elements at fine_level descending from the given coarse elements (sorted).
    std::vector<std::size_t>
    descendants(int coarse_level, std::span<const std::size_t> coarse_elements, int fine_level) const;

private:
    std::vector<MeshPtr> m_meshes;
    std::vector<std::vector<ParentLink>> m_parents; // m_parents[l] links level l to l - 1
};

/// Boundary of a vertex patch: two endpoints (dim = 2) or a closed edge loop (dim = 3).
struct PatchBoundary
{
    int dim = 2;
    std::vector<Point> points;
    std::vector<std::array<Point, 2>> segments;

    /// Euclidean distance from x to the boundary set.
    double distance(const Point& x) const;
};

/// Star of a vertex: all elements having it as a vertex.
struct Patch
{
    std::size_t center = 0;
    std::vector<std::size_t> elements;
    double diameter = 0.0;
    double measure = 0.0;
    /// Mesh vertices on the patch boundary.
    std::vector<std::size_t> boundary_vertices;
    PatchBoundary boundary;
};

std::vector<Patch> build_patches(const BoundaryMesh& mesh);

/// Distance from a point of the patch to its boundary; throws if the point is not on the patch.
double distance_to_patch_boundary(const BoundaryMesh& mesh, const Patch& patch, const Point& s);

/// Shortest-path distances along mesh edges from a source vertex.
std::vector<double> geodesic_distances(const BoundaryMesh& mesh, std::size_t source);

/// Ratio geodesic / Euclidean distance between two vertices.
double geodesic_ratio(const BoundaryMesh& mesh, std::size_t a, std::size_t b);

/// max over vertex pairs of geodesic / Euclidean distance.
double nondegeneracy_constant(const BoundaryMesh& mesh);

/// Plain-text format: `dim nv ne`, vertex lines, element lines (0-based), 17 significant digits.
void write_mesh(std::ostream& out, const BoundaryMesh& mesh);
BoundaryMesh read_mesh(std::istream& in);

} // namespace tracenorm
