#pragma once

#include <tracenorm/mesh.hpp>
#include <tracenorm/quadrature.hpp>

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace tracenorm {

/// P1: continuous piecewise linears (dof = vertex). P0: piecewise constants (dof =
/// element). DualP0: constants on dual cells, the two half-segments around a vertex
/// (dof = vertex, dim = 2 only).
enum class SpaceKind { P1, P0, DualP0 };

const char* to_string(SpaceKind kind);

/// Nonzero basis functions at one point: (dof, value) pairs.
struct BasisValues
{
    std::array<std::size_t, 3> dofs{};
    std::array<double, 3> values{};
    int count = 0;
};

class DiscreteSpace
{
public:
    DiscreteSpace(SpaceKind kind, MeshPtr mesh);

    SpaceKind kind() const { return m_kind; }
    const BoundaryMesh& mesh() const { return *m_mesh; }
    const MeshPtr& mesh_ptr() const { return m_mesh; }
    int level() const { return m_mesh->level(); }
    std::size_t dim() const;

    /// Basis functions not vanishing at barycentrics b of element e.
    BasisValues basis_at(std::size_t e, const Barycentric& b) const;

    double basis(std::size_t i, const SurfacePoint& p) const;
    double evaluate(const Eigen::VectorXd& coefficients, const SurfacePoint& p) const;
    /// Locates x on the mesh first; throws if x is farther than 1e-10 h from every element.
    double evaluate_at(const Eigen::VectorXd& coefficients, const Point& x) const;

    Evaluator evaluator(Eigen::VectorXd coefficients) const;
    Evaluator basis_evaluator(std::size_t i) const;

    /// Nodal interpolation (P1: vertex values; P0/DualP0: value at the element midpoint
    /// or the vertex).
    Eigen::VectorXd interpolate(const std::function<double(const Point&)>& f) const;

private:
    SpaceKind m_kind;
    MeshPtr m_mesh;
};

using SpacePtr = std::shared_ptr<const DiscreteSpace>;

SpacePtr make_space(SpaceKind kind, MeshPtr mesh);

/// Dual-cell space of a polygon boundary mesh; unsupported for surfaces.
SpacePtr dual_cells(MeshPtr mesh);
/// Measures of the dual cells.
Eigen::VectorXd dual_cell_measures(const BoundaryMesh& mesh);

/// Function on a hierarchy level, evaluated at points of a finer level.
Evaluator lift_evaluator(const MeshHierarchy& hierarchy, int coarse_level, int fine_level, Evaluator coarse);

/// Coefficient map from a coarse space to the same kind of space on a finer level of
/// the hierarchy (P1: interpolation at the fine vertices; P0: copy from the ancestor).
Eigen::MatrixXd prolongation(const MeshHierarchy& hierarchy, const DiscreteSpace& coarse, const DiscreteSpace& fine);

/// Gram matrix G(i, j) = <coarse_i, fine_j> for spaces on levels coarse <= fine of
/// the same hierarchy, by quadrature exact for the piecewise polynomial products.
/// Restricted to the listed fine elements when `fine_elements` is non-null.
Eigen::MatrixXd cross_mass_matrix(
    const MeshHierarchy& hierarchy,
    const DiscreteSpace& coarse,
    const DiscreteSpace& fine,
    const std::vector<std::size_t>* fine_elements = nullptr);

/// A family of functions indexed by mesh vertices, stored as coefficient columns in
/// a discrete space.
struct FunctionFamily
{
    SpacePtr space;
    Eigen::MatrixXd coefficients; // space dofs x members

    std::size_t size() const { return static_cast<std::size_t>(coefficients.cols()); }
    Evaluator member(std::size_t y) const;
};

/// Choice of the unit-integral family attached to the vertices.
enum class PhiStarKind { normalized_hats, element_indicators };

/// Unit-integral functions supported in the vertex patches: normalized hats, or the
/// normalized indicator of one element of each patch (the lowest-numbered one).
FunctionFamily make_phi_star(MeshPtr mesh, PhiStarKind kind = PhiStarKind::normalized_hats);

/// Hat functions of all vertices (a partition of unity).
FunctionFamily make_partition(MeshPtr mesh);

/// Integrals of the P1 hats.
Eigen::VectorXd hat_integrals(const BoundaryMesh& mesh);

} // namespace tracenorm
