#pragma once

#include <tracenorm/function_spaces.hpp>

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <vector>

namespace tracenorm {

/// Dense symmetric matrix of a quadratic form on a discrete space, with the elements
/// of the subdomain it integrates over (empty: all of the mesh).
struct QuadraticForm
{
    Eigen::MatrixXd matrix;
    std::vector<std::size_t> elements;

    double operator()(const Eigen::VectorXd& v) const { return v.dot(matrix * v); }
};

/// Weight of an element pair (a, b) in a weighted Slobodeckij assembly; pairs with
/// weight 0 are skipped. Called with a <= b.
using PairWeight = std::function<double(std::size_t a, std::size_t b)>;

/// Gauss order used for well-separated pairs: the full order below separation 4 (in
/// element diameters), reduced by 1, 2, 3 beyond separations 4, 8, 16, never below 2.
int far_field_order(int order, double separation);

/// Mass matrix of the space restricted to the listed elements (all when empty).
QuadraticForm mass_matrix(const DiscreteSpace& space, const std::vector<std::size_t>& elements = {});

/// Slobodeckij matrices sum_{a,b} w(a, b) int_a int_b (u(s)-u(t))(v(s)-v(t))/|s-t|^n, one
/// per weight function, in a single pass over element pairs. P1 spaces only.
std::vector<Eigen::MatrixXd> slobodeckij_matrices(const DiscreteSpace& space, const std::vector<PairWeight>& weights, int order = 6);

/// Seminorm matrix over the listed elements (all when empty).
QuadraticForm slobodeckij_matrix(const DiscreteSpace& space, const std::vector<std::size_t>& elements = {}, int order = 6);

/// Mass plus Slobodeckij matrix on the whole boundary.
QuadraticForm h_half_matrix(const DiscreteSpace& space, int order = 6);

/// H^{1/2}_{00} form of a patch on a P1 space of a (possibly refined) mesh:
/// |v|^2_{1/2,patch} + diam^{n-2} int_patch v^2 / d(s, boundary)^{n-1}, on the dofs
/// interior to the patch.
struct PatchForm
{
    Eigen::MatrixXd matrix;         // interior dofs x interior dofs
    std::vector<std::size_t> dofs;  // global P1 indices of the interior dofs
    std::vector<std::size_t> elements;
    Eigen::MatrixXd seminorm;       // Slobodeckij part alone
    Eigen::MatrixXd boundary_mass;  // weighted part alone
};

/// `elements` are the patch elements on the space's mesh, `boundary`/`diameter` those
/// of the (coarse) patch. Throws when a requested dof does not vanish on the boundary.
PatchForm h00_patch_matrix(
    const DiscreteSpace& space,
    const std::vector<std::size_t>& elements,
    const PatchBoundary& boundary,
    double diameter,
    int order = 6,
    const std::vector<std::size_t>* dofs = nullptr);

/// Moments int zeta psi_i against every basis function of the test space, by Gauss
/// rules of the given order per element (segments split at midpoints).
Eigen::VectorXd moment_vector(const Evaluator& zeta, const DiscreteSpace& test, int order = 4);

/// |f|^2_{1/2} over the listed elements by pair quadrature (all elements when empty).
double seminorm_of_evaluator(const Evaluator& f, const BoundaryMesh& mesh, const std::vector<std::size_t>& elements = {}, int order = 6);

/// Row-major CSV with 17 significant digits.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& A);
Eigen::MatrixXd read_matrix_csv(std::istream& in);

} // namespace tracenorm
