#pragma once

#include <tracenorm/mesh.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace tracenorm {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule
{
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int order);
/// The same rule mapped to [0, 1] (weights sum to 1).
GaussRule gauss_legendre_unit(int order);

/// Singularity class of an element pair, from the number of shared vertices.
enum class PairClass { disjoint, vertex_adjacent, edge_adjacent, identical };

PairClass classify_pair(const BoundaryMesh& mesh, std::size_t a, std::size_t b);
const char* to_string(PairClass c);

/// A point of the mesh given by element, barycentrics and ambient position.
struct SurfacePoint
{
    std::size_t element;
    Barycentric bary;
    Point x;
};

/// Scalar function on the boundary, evaluated element-wise.
using Evaluator = std::function<double(const SurfacePoint&)>;

/// Tensor quadrature on an element pair. Barycentrics refer to the original vertex
/// order of each element; weights include both Jacobians.
struct PairRule
{
    std::vector<Barycentric> a;
    std::vector<Barycentric> b;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

/// Disjoint triangles whose centroids are closer than the larger diameter. Their pair
/// rule uses two panels per variable.
bool near_pair(const BoundaryMesh& mesh, std::size_t a, std::size_t b);

/// Pair rule with singularity removal: Duffy-type splits for segments, the
/// Sauter-Schwab four-dimensional transforms for triangles. `order` Gauss points per
/// (transformed) variable.
PairRule pair_rule(const BoundaryMesh& mesh, std::size_t a, std::size_t b, int order);

/// Kernel |x - y|^{-dim}.
inline double slobodeckij_kernel(int dim, const Point& x, const Point& y)
{
    const double r2 = (x - y).squaredNorm();
    return dim == 2 ? 1.0 / r2 : 1.0 / (r2 * std::sqrt(r2));
}

/// int_A int_B (f(s) - f(t)) (g(s) - g(t)) / |s - t|^dim dt ds.
double integrate_pair(
    const BoundaryMesh& mesh,
    const Evaluator& f,
    const Evaluator& g,
    std::size_t a,
    std::size_t b,
    int order = 6);

/// Independent brute-force value of integrate_pair: nested globally adaptive dyadic
/// subdivision (outer element, then inner element split at the outer point), iterated
/// until the successive estimates agree to `rel_tol`. Throws when a cell would have to
/// be subdivided beyond depth 24.
double adaptive_reference_oracle(
    const BoundaryMesh& mesh,
    const Evaluator& f,
    const Evaluator& g,
    std::size_t a,
    std::size_t b,
    double rel_tol = 1e-8);

/// A weighted point of the graded rule for the patch boundary term.
struct GradedPoint
{
    std::size_t element;
    Barycentric bary;
    Point x;
    /// Quadrature weight times diam^{dim-2} / d(x, boundary)^{dim-1}.
    double weight;
};

/// Composite rule on a set of elements, graded geometrically (ratio 1/2) toward the
/// points where the distance to the patch boundary vanishes. Layer 0 holds the
/// unrefined pieces and the outermost graded layer; layer k > 0 the k-th graded layer.
class GradedBoundaryRule
{
public:
    static constexpr int max_layers = 60;

    GradedBoundaryRule(
        const BoundaryMesh& mesh,
        std::vector<std::size_t> elements,
        PatchBoundary boundary,
        double diameter,
        int order = 6);

    std::vector<GradedPoint> layer(int k) const;

    const BoundaryMesh& mesh() const { return *m_mesh; }

private:
    enum class PieceKind { plain, graded_segment, graded_edge, graded_vertex };

    struct Piece
    {
        PieceKind kind;
        std::size_t element;
        // Barycentric corners of the piece; for graded pieces corner 0 is the singular
        // vertex (or corners 0, 1 the singular edge).
        std::array<Barycentric, 3> corners;
    };

    void add_triangle(std::size_t e, const std::array<Barycentric, 3>& corners, int depth);
    void add_point(std::vector<GradedPoint>& out, std::size_t e, const Barycentric& b, double w) const;

    const BoundaryMesh* m_mesh;
    PatchBoundary m_boundary;
    double m_scale;
    double m_tol;
    GaussRule m_gauss;
    std::vector<Piece> m_pieces;
};

/// diam^{dim-2} * int f^2 / d(s, boundary)^{dim-1} over the listed elements. Layers are
/// added until the last one contributes less than 1e-8 of the total; non-decreasing
/// layer contributions raise a divergence error ("not in H^{1/2}_{00}").
double integrate_weighted_boundary(const GradedBoundaryRule& rule, const Evaluator& f);

/// Same, for a patch on its own mesh.
double integrate_weighted_boundary(const BoundaryMesh& mesh, const Patch& patch, const Evaluator& f, int order = 6);

} // namespace tracenorm
