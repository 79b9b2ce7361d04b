#pragma once

#include <tracenorm/forms.hpp>
#include <tracenorm/linalg.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tracenorm {

/// Extremal constants of one statement at one refinement level.
struct EquivalenceReport
{
    std::string statement;
    std::string geometry;
    int level = 0;
    double h = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::size_t dim = 0;          // dimension of the tested space
    std::size_t ambient_dim = 0;  // before constraints
    std::size_t constraints = 0;  // rank of the constraint matrix
    /// Statement-specific values (contrast ratios, residuals, sample counts), by name.
    std::map<std::string, double> extras;
};

enum class ProjectorKind { l2_p1, oblique_dualP0_to_P1, dual_oblique_P0dual };

const char* to_string(ProjectorKind kind);

struct ProjectorMatrix
{
    ProjectorKind kind;
    Eigen::MatrixXd matrix;
};

/// Orthonormal basis of {w in fine P1 : <w, phi*_y> = 0 for all members}. Throws if
/// the subspace is empty.
Eigen::MatrixXd constrained_primal_subspace(const MeshHierarchy& hierarchy, const DiscreteSpace& fine_p1, const FunctionFamily& phi_star);

/// Moment matrix C(y, i) = <family_y, psi_i> against a space on the same or a finer level.
Eigen::MatrixXd family_moments(const MeshHierarchy& hierarchy, const FunctionFamily& family, const DiscreteSpace& fine);

/// L2 projection of fine P1 onto coarse P1, as a fine-coefficient matrix.
ProjectorMatrix l2_projection_matrix(const MeshHierarchy& hierarchy, const DiscreteSpace& fine_p1, const DiscreteSpace& coarse_p1);

/// Projection onto coarse P1 along the orthogonal complement of the coarse dual-cell
/// constants (polygons only). Throws if the coarse coupling matrix is singular.
ProjectorMatrix oblique_projection_matrix(
    const MeshHierarchy& hierarchy,
    const DiscreteSpace& fine_p1,
    const DiscreteSpace& coarse_p1,
    const DiscreteSpace& coarse_dual);

/// sqrt(b^T A^{-1} b) for moments b against the test space with H^{1/2} matrix A.
double global_dual_norm(const Eigen::VectorXd& moments, const Cholesky& h_half);
double global_dual_norm(const Evaluator& zeta, const DiscreteSpace& test_p1, int order = 6);

/// sqrt(b_y^T G00^{-1} b_y), b_y the moments against the interior dofs of the patch form.
double local_dual_norm(const Eigen::VectorXd& moments, const PatchForm& patch_form);

/// Forms of the products hat_y * psi_i, psi_i the hats of the vertices of patch y, on
/// the patch refined once.
struct CutoffForms
{
    std::vector<std::size_t> vertices;  // vertices of the patch
    Eigen::MatrixXd h00;                // H^{1/2}_{00} form of hat_y * psi_i
    Eigen::MatrixXd seminorm;           // Slobodeckij form of psi_i over the patch
    Eigen::VectorXd integrals;          // int_patch psi_i
    double measure = 0.0;
};

CutoffForms cutoff_forms(const MeshHierarchy& hierarchy, int level, const Patch& patch, int order);

/// Verification driver for one geometry: owns the mesh hierarchy and caches the
/// assembled forms shared by several statements.
class LocalizationStudy
{
public:
    LocalizationStudy(std::string geometry, BoundaryMesh coarse, int quad_order = 6, std::uint64_t seed = 1);

    const std::string& geometry() const { return m_geometry; }
    int dim() const { return m_hierarchy.mesh(0).dim(); }
    int quad_order() const { return m_order; }
    MeshHierarchy& hierarchy() { return m_hierarchy; }

    int samples = 50;

    /// Levels on which functionals and dual test functions live for the dual statements
    /// with patches on `level`.
    int functional_level(int level) const;
    int test_level(int level) const;

    EquivalenceReport primal_equivalence(int level, PhiStarKind kind = PhiStarKind::normalized_hats);  // thm32
    EquivalenceReport faermann_bound_check(int level);                                                    // faermann
    EquivalenceReport decomposition_bound_check(int level);                                               // lemma31
    EquivalenceReport projector_equivalence(int level, ProjectorKind kind);                               // cor33
    EquivalenceReport dual_one_sided_check(int level);                                                    // prop41
    EquivalenceReport dual_equivalence(int level);                                                        // thm42
    EquivalenceReport cutoff_stability_check(int level);                                                  // claim
    EquivalenceReport dual_projector_equivalence(int level, ProjectorKind kind);                          // cor43
    /// Patches of the level-0 mesh refined `depth` times.
    EquivalenceReport poincare_check(int depth, bool average_free);                                       // poincare(_avfree)

    /// |v|^2 / sum_y ||hat_y v||^2_00 for v in P1(level); 0 when both vanish.
    double decomposition_ratio(int level, const Eigen::VectorXd& v);
    /// |v| / sum_y ||hat_y v||_00.
    double decomposition_l1_ratio(int level, const Eigen::VectorXd& v);
    /// max_y ||hat_y (v - mean_y v)||^2_00 / |v|^2_{patch y}; patches on which v is
    /// constant are skipped.
    double cutoff_ratio(int level, const Eigen::VectorXd& v, bool subtract_mean = true);
    const std::vector<CutoffForms>& cutoff_forms(int level);

    /// Test moments (test dofs x functional dofs) of the projected functionals.
    Eigen::MatrixXd dual_projection_moments(int level, ProjectorKind kind);

    /// Fine P1 forms on `level`.
    const Eigen::MatrixXd& mass(int level);
    const Eigen::MatrixXd& slobodeckij(int level);
    const Eigen::MatrixXd& h_half(int level);
    /// Sum over the patches of `patch_level` of the patch seminorms, on P1(`level`).
    const Eigen::MatrixXd& patch_sum(int patch_level, int level);

    /// Global and localized dual forms on P0(functional_level) for patches on `level`.
    struct DualForms
    {
        int functional_level = 0;
        int test_level = 0;
        Eigen::MatrixXd moments;  // test dofs x functional dofs
        Eigen::MatrixXd global;   // M^T A^{-1} M
        Eigen::MatrixXd local;    // sum_y M_y^T G00_y^{-1} M_y
        std::vector<PatchForm> patches;
        std::vector<std::shared_ptr<Cholesky>> patch_factors;
        std::shared_ptr<Cholesky> h_half_factor;

        /// Localized quadratic form of arbitrary functionals given by test moments.
        Eigen::MatrixXd localized(const Eigen::MatrixXd& test_moments) const;
        Eigen::MatrixXd globalized(const Eigen::MatrixXd& test_moments) const;
    };
    const DualForms& dual_forms(int level);

    /// P1 space on a level of the hierarchy.
    SpacePtr p1(int level);
    SpacePtr p0(int level);

private:
    void refine_to(int level);
    Eigen::VectorXd random_vector(std::size_t n);

    std::string m_geometry;
    MeshHierarchy m_hierarchy;
    int m_order;
    std::uint64_t m_seed;

    std::map<int, Eigen::MatrixXd> m_mass, m_slobodeckij, m_h_half;
    std::map<std::pair<int, int>, Eigen::MatrixXd> m_patch_sum;
    std::map<int, DualForms> m_dual;
    std::map<int, std::vector<CutoffForms>> m_cutoff;
    std::map<std::pair<int, int>, SpacePtr> m_spaces;
    std::uint64_t m_draws = 0;
};

/// Level-independent identifiers used in reports and configuration files.
const std::vector<std::string>& statement_ids();

} // namespace tracenorm
