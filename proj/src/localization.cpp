#include <tracenorm/localization.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tracenorm {

using Index = Eigen::Index;

const char* to_string(ProjectorKind kind)
{
    switch (kind) {
    case ProjectorKind::l2_p1: return "l2";
    case ProjectorKind::oblique_dualP0_to_P1: return "oblique";
    case ProjectorKind::dual_oblique_P0dual: return "dual-oblique";
    }
    return "?";
}

const std::vector<std::string>& statement_ids()
{
    static const std::vector<std::string> ids{"thm32", "faermann", "lemma31", "cor33-l2", "cor33-oblique", "prop41", "thm42",
        "claim", "cor43-l2", "cor43-oblique", "poincare", "poincare_avfree"};
    return ids;
}

Eigen::MatrixXd family_moments(const MeshHierarchy& hierarchy, const FunctionFamily& family, const DiscreteSpace& fine)
{
    return family.coefficients.transpose() * cross_mass_matrix(hierarchy, *family.space, fine);
}

Eigen::MatrixXd constrained_primal_subspace(const MeshHierarchy& hierarchy, const DiscreteSpace& fine_p1, const FunctionFamily& phi_star)
{
    require(fine_p1.kind() == SpaceKind::P1, ErrorKind::invalid_input, "constrained subspace needs a P1 space");
    const Eigen::MatrixXd C = family_moments(hierarchy, phi_star, fine_p1);
    Eigen::MatrixXd Z = nullspace(C, static_cast<Index>(fine_p1.dim()));
    require(Z.cols() > 0, ErrorKind::invalid_input, "constraints leave no admissible functions");
    return Z;
}

ProjectorMatrix l2_projection_matrix(const MeshHierarchy& hierarchy, const DiscreteSpace& fine_p1, const DiscreteSpace& coarse_p1)
{
    require(fine_p1.kind() == SpaceKind::P1 && coarse_p1.kind() == SpaceKind::P1, ErrorKind::invalid_input,
        "L2 projection is defined between P1 spaces");
    const Eigen::MatrixXd G = cross_mass_matrix(hierarchy, coarse_p1, fine_p1);
    const Cholesky mass(mass_matrix(coarse_p1).matrix);
    return {ProjectorKind::l2_p1, prolongation(hierarchy, coarse_p1, fine_p1) * mass.solve(G)};
}

ProjectorMatrix oblique_projection_matrix(
    const MeshHierarchy& hierarchy,
    const DiscreteSpace& fine_p1,
    const DiscreteSpace& coarse_p1,
    const DiscreteSpace& coarse_dual)
{
    require(coarse_dual.kind() == SpaceKind::DualP0, ErrorKind::invalid_input, "oblique projection needs the dual-cell space");
    require(coarse_dual.level() == coarse_p1.level(), ErrorKind::invalid_input, "dual cells and P1 must share a level");
    const Eigen::MatrixXd B = cross_mass_matrix(hierarchy, coarse_dual, fine_p1);
    const Eigen::MatrixXd Bc = cross_mass_matrix(hierarchy, coarse_dual, coarse_p1);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(Bc);
    require(lu.isInvertible(), ErrorKind::numerical, "dual-cell coupling matrix is singular");
    return {ProjectorKind::oblique_dualP0_to_P1, prolongation(hierarchy, coarse_p1, fine_p1) * lu.solve(B)};
}

double global_dual_norm(const Eigen::VectorXd& moments, const Cholesky& h_half)
{
    const double q = moments.dot(h_half.solve(moments));
    require(std::isfinite(q) && q >= -1e-14 * moments.squaredNorm(), ErrorKind::numerical, "dual norm is not real");
    return std::sqrt(std::max(q, 0.0));
}

double global_dual_norm(const Evaluator& zeta, const DiscreteSpace& test_p1, int order)
{
    const Cholesky A(h_half_matrix(test_p1, order).matrix);
    return global_dual_norm(moment_vector(zeta, test_p1, order), A);
}

double local_dual_norm(const Eigen::VectorXd& moments, const PatchForm& patch_form)
{
    const auto m = static_cast<Index>(patch_form.dofs.size());
    Eigen::VectorXd b(m);
    for (Index i = 0; i < m; ++i) {
        const auto g = static_cast<Index>(patch_form.dofs[static_cast<std::size_t>(i)]);
        require(g < moments.size(), ErrorKind::invalid_input, "moment vector is shorter than the test space");
        b[i] = moments[g];
    }
    return global_dual_norm(b, Cholesky(patch_form.matrix));
}

// ---------------------------------------------------------------------------------------

namespace {

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& A, const std::vector<std::size_t>& rows)
{
    Eigen::MatrixXd out(static_cast<Index>(rows.size()), A.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = A.row(static_cast<Index>(rows[i]));
    return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& A, const std::vector<std::size_t>& idx)
{
    const auto m = static_cast<Index>(idx.size());
    Eigen::MatrixXd out(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) out(i, j) = A(static_cast<Index>(idx[static_cast<std::size_t>(i)]), static_cast<Index>(idx[static_cast<std::size_t>(j)]));
    return out;
}

Eigen::MatrixXd restrict_pencil(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& A)
{
    Eigen::MatrixXd R = Z.transpose() * A * Z;
    return 0.5 * (R + R.transpose());
}

double max_abs(const Eigen::MatrixXd& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

std::vector<std::size_t> patch_vertices(const BoundaryMesh& mesh, const std::vector<std::size_t>& elements)
{
    std::vector<std::size_t> out;
    for (auto e : elements)
        for (auto v : mesh.element(e)) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

CutoffForms cutoff_forms(const MeshHierarchy& hier, int level, const Patch& patch, int order)
{
    const auto& coarse = hier.mesh(level);
    const auto fine_mesh = hier.mesh_ptr(level + 1);
    const DiscreteSpace p1(SpaceKind::P1, hier.mesh_ptr(level));
    const auto fine_elements = hier.descendants(level, patch.elements, level + 1);

    CutoffForms out;
    out.vertices = patch_vertices(coarse, patch.elements);
    out.measure = patch.measure;
    const auto k = static_cast<Index>(out.vertices.size());

    const Evaluator cut = lift_evaluator(hier, level, level + 1, p1.basis_evaluator(patch.center));
    std::vector<Evaluator> hats, products;
    for (auto v : out.vertices) {
        hats.push_back(lift_evaluator(hier, level, level + 1, p1.basis_evaluator(v)));
        products.push_back([cut, hat = hats.back()](const SurfacePoint& p) { return cut(p) * hat(p); });
    }

    out.h00 = Eigen::MatrixXd::Zero(k, k);
    out.seminorm = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t a = 0; a < fine_elements.size(); ++a)
        for (std::size_t b = a; b < fine_elements.size(); ++b) {
            const double f = a == b ? 1.0 : 2.0;
            for (Index i = 0; i < k; ++i)
                for (Index j = i; j < k; ++j) {
                    const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
                    const double s = f * integrate_pair(*fine_mesh, hats[si], hats[sj], fine_elements[a], fine_elements[b], order);
                    const double q = f * integrate_pair(*fine_mesh, products[si], products[sj], fine_elements[a], fine_elements[b], order);
                    out.seminorm(i, j) += s;
                    out.h00(i, j) += q;
                }
        }
    const GradedBoundaryRule rule(*fine_mesh, fine_elements, patch.boundary, patch.diameter, order);
    for (Index i = 0; i < k; ++i)
        for (Index j = i; j < k; ++j) {
            const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
            const Evaluator prod = [&products, si, sj](const SurfacePoint& p) { return products[si](p) * products[sj](p); };
            out.h00(i, j) += integrate_weighted_boundary(rule, prod);
        }
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < i; ++j) {
            out.h00(i, j) = out.h00(j, i);
            out.seminorm(i, j) = out.seminorm(j, i);
        }

    out.integrals = Eigen::VectorXd::Zero(k);
    const Eigen::MatrixXd M = mass_matrix(p1, patch.elements).matrix;
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) out.integrals[i] += M(static_cast<Index>(out.vertices[static_cast<std::size_t>(i)]), static_cast<Index>(out.vertices[static_cast<std::size_t>(j)]));
    return out;
}

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx)
{
    Eigen::VectorXd out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[static_cast<Index>(idx[i])];
    return out;
}

} // namespace

// ---------------------------------------------------------------------------------------

LocalizationStudy::LocalizationStudy(std::string geometry, BoundaryMesh coarse, int quad_order, std::uint64_t seed)
    : m_geometry(std::move(geometry)), m_hierarchy(std::move(coarse)), m_order(quad_order), m_seed(seed)
{
    require(quad_order >= 2 && quad_order <= 20, ErrorKind::invalid_input, "quadrature order must lie in [2, 20]");
}

int LocalizationStudy::functional_level(int level) const { return level + (dim() == 2 ? 2 : 0); }
int LocalizationStudy::test_level(int level) const { return functional_level(level) + 2; }

void LocalizationStudy::refine_to(int level)
{
    require(level >= 0, ErrorKind::invalid_input, "levels must be non-negative");
    m_hierarchy.refine_to(level);
}

SpacePtr LocalizationStudy::p1(int level)
{
    refine_to(level);
    auto& s = m_spaces[{0, level}];
    if (!s) s = make_space(SpaceKind::P1, m_hierarchy.mesh_ptr(level));
    return s;
}

SpacePtr LocalizationStudy::p0(int level)
{
    refine_to(level);
    auto& s = m_spaces[{1, level}];
    if (!s) s = make_space(SpaceKind::P0, m_hierarchy.mesh_ptr(level));
    return s;
}

Eigen::VectorXd LocalizationStudy::random_vector(std::size_t n)
{
    std::seed_seq seq{static_cast<std::uint32_t>(m_seed), static_cast<std::uint32_t>(m_seed >> 32), static_cast<std::uint32_t>(m_draws++)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(static_cast<Index>(n));
    for (Index i = 0; i < v.size(); ++i) v[i] = u(rng);
    return v;
}

const Eigen::MatrixXd& LocalizationStudy::mass(int level)
{
    auto it = m_mass.find(level);
    if (it == m_mass.end()) it = m_mass.emplace(level, mass_matrix(*p1(level)).matrix).first;
    return it->second;
}

const Eigen::MatrixXd& LocalizationStudy::slobodeckij(int level)
{
    auto it = m_slobodeckij.find(level);
    if (it == m_slobodeckij.end()) it = m_slobodeckij.emplace(level, slobodeckij_matrix(*p1(level), {}, m_order).matrix).first;
    return it->second;
}

const Eigen::MatrixXd& LocalizationStudy::h_half(int level)
{
    auto it = m_h_half.find(level);
    if (it == m_h_half.end()) it = m_h_half.emplace(level, mass(level) + slobodeckij(level)).first;
    return it->second;
}

const Eigen::MatrixXd& LocalizationStudy::patch_sum(int patch_level, int level)
{
    require(patch_level <= level, ErrorKind::invalid_input, "patches must live on a coarser level");
    const auto key = std::make_pair(patch_level, level);
    auto it = m_patch_sum.find(key);
    if (it != m_patch_sum.end()) return it->second;

    refine_to(level);
    const auto& coarse = m_hierarchy.mesh(patch_level);
    const auto& fine = m_hierarchy.mesh(level);
    std::vector<std::size_t> anc(fine.num_elements());
    for (std::size_t e = 0; e < anc.size(); ++e) anc[e] = m_hierarchy.ancestor(level, e, patch_level);
    // a pair contributes once for every patch containing both elements, i.e. every
    // vertex shared by the two ancestors
    const PairWeight count = [&](std::size_t a, std::size_t b) { return static_cast<double>(coarse.shared_vertices(anc[a], anc[b])); };

    if (m_slobodeckij.count(level)) {
        auto mats = slobodeckij_matrices(*p1(level), {count}, m_order);
        return m_patch_sum.emplace(key, std::move(mats[0])).first->second;
    }
    auto mats = slobodeckij_matrices(*p1(level), {[](std::size_t, std::size_t) { return 1.0; }, count}, m_order);
    m_slobodeckij.emplace(level, std::move(mats[0]));
    return m_patch_sum.emplace(key, std::move(mats[1])).first->second;
}

// ---------------------------------------------------------------------------------------

EquivalenceReport LocalizationStudy::primal_equivalence(int level, PhiStarKind kind)
{
    const int fine = level + 2;
    refine_to(fine);
    const auto space = p1(fine);
    const int n = dim();

    const Eigen::MatrixXd& L = patch_sum(level, fine);
    const Eigen::MatrixXd& S = slobodeckij(fine);
    const Eigen::MatrixXd& A = h_half(fine);

    const FunctionFamily phi_star = make_phi_star(m_hierarchy.mesh_ptr(level), kind);
    const Eigen::MatrixXd C = family_moments(m_hierarchy, phi_star, *space);
    const Eigen::MatrixXd Z = nullspace(C, static_cast<Index>(space->dim()));
    require(Z.cols() > 0, ErrorKind::invalid_input, "constraints leave no admissible functions");

    const auto [lo, hi] = extremal_eigenvalues(restrict_pencil(Z, A), restrict_pencil(Z, L));

    EquivalenceReport r;
    r.statement = kind == PhiStarKind::normalized_hats ? "thm32" : "thm32-indicators";
    r.geometry = m_geometry;
    r.level = level;
    r.h = m_hierarchy.mesh(level).h();
    r.lambda_min = lo;
    r.lambda_max = hi;
    r.ambient_dim = space->dim();
    r.dim = static_cast<std::size_t>(Z.cols());
    r.constraints = r.ambient_dim - r.dim;
    r.extras["constraint_residual"] = max_abs(C * Z) / max_abs(C);

    // without the constraints a smooth function is far from localizable
    const Eigen::VectorXd w = space->interpolate([](const Point& x) { return std::sin(2.0 * M_PI * x[0]); });
    r.extras["contrast"] = w.dot(A * w) / w.dot(L * w);

    // sum_y |v|^2_{patch y} <= n |v|^2, exactly, on the complement of the constants
    const Eigen::MatrixXd Z0 = nullspace(Eigen::RowVectorXd::Ones(static_cast<Index>(space->dim())), static_cast<Index>(space->dim()));
    r.extras["patch_sum_ratio"] = extremal_eigenvalues(restrict_pencil(Z0, L), restrict_pencil(Z0, static_cast<double>(n) * S)).second;
    return r;
}

EquivalenceReport LocalizationStudy::faermann_bound_check(int level)
{
    const int fine = level + 2;
    refine_to(fine);
    const auto space = p1(fine);
    const double h = m_hierarchy.mesh(level).h();
    // every element lies in exactly n vertex patches
    const Eigen::MatrixXd R = patch_sum(level, fine) + (static_cast<double>(dim()) / h) * mass(fine);
    const auto [lo, hi] = extremal_eigenvalues(h_half(fine), R);

    EquivalenceReport r;
    r.statement = "faermann";
    r.geometry = m_geometry;
    r.level = level;
    r.h = h;
    r.lambda_min = lo;
    r.lambda_max = hi;
    r.dim = r.ambient_dim = space->dim();
    return r;
}

const std::vector<CutoffForms>& LocalizationStudy::cutoff_forms(int level)
{
    auto it = m_cutoff.find(level);
    if (it != m_cutoff.end()) return it->second;
    refine_to(level + 1);
    std::vector<CutoffForms> forms;
    for (const auto& patch : build_patches(m_hierarchy.mesh(level))) forms.push_back(tracenorm::cutoff_forms(m_hierarchy, level, patch, m_order));
    return m_cutoff.emplace(level, std::move(forms)).first->second;
}

namespace {

struct DecompositionSums
{
    double seminorm_sq = 0.0;
    double sum_sq = 0.0;
    double sum = 0.0;
};

DecompositionSums decomposition_sums(const std::vector<CutoffForms>& forms, const Eigen::MatrixXd& S, const Eigen::VectorXd& v)
{
    require(v.size() == S.rows(), ErrorKind::invalid_input, "coefficient vector does not match the space");
    DecompositionSums out;
    out.seminorm_sq = std::max(v.dot(S * v), 0.0);
    for (const auto& f : forms) {
        const Eigen::VectorXd local = gather(v, f.vertices);
        const double q = std::max(local.dot(f.h00 * local), 0.0);
        out.sum_sq += q;
        out.sum += std::sqrt(q);
    }
    return out;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

} // namespace

double LocalizationStudy::decomposition_ratio(int level, const Eigen::VectorXd& v)
{
    const auto& forms = cutoff_forms(level);
    const auto s = decomposition_sums(forms, slobodeckij(level), v);
    return safe_ratio(s.seminorm_sq, s.sum_sq);
}

double LocalizationStudy::decomposition_l1_ratio(int level, const Eigen::VectorXd& v)
{
    const auto& forms = cutoff_forms(level);
    const auto s = decomposition_sums(forms, slobodeckij(level), v);
    return safe_ratio(std::sqrt(s.seminorm_sq), s.sum);
}

double LocalizationStudy::cutoff_ratio(int level, const Eigen::VectorXd& v, bool subtract_mean)
{
    const auto& forms = cutoff_forms(level);
    require(v.size() == static_cast<Index>(p1(level)->dim()), ErrorKind::invalid_input, "coefficient vector does not match the space");
    double out = 0.0;
    for (const auto& f : forms) {
        const auto k = static_cast<Index>(f.vertices.size());
        Eigen::VectorXd local = gather(v, f.vertices);
        const double den = local.dot(f.seminorm * local);
        if (!(den > 1e-12 * local.squaredNorm() * f.seminorm.diagonal().maxCoeff())) continue;
        if (subtract_mean) local -= Eigen::VectorXd::Constant(k, f.integrals.dot(local) / f.measure);
        out = std::max(out, local.dot(f.h00 * local) / den);
    }
    return out;
}

EquivalenceReport LocalizationStudy::decomposition_bound_check(int level)
{
    const auto space = p1(level);
    const auto& forms = cutoff_forms(level);
    const auto nv = static_cast<Index>(space->dim());
    const Eigen::MatrixXd& S = slobodeckij(level);

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nv, nv);
    for (const auto& f : forms)
        for (std::size_t i = 0; i < f.vertices.size(); ++i)
            for (std::size_t j = 0; j < f.vertices.size(); ++j)
                D(static_cast<Index>(f.vertices[i]), static_cast<Index>(f.vertices[j])) += f.h00(static_cast<Index>(i), static_cast<Index>(j));

    double smin = std::numeric_limits<double>::infinity(), smax = 0.0, l1 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd v = random_vector(space->dim());
        const auto sums = decomposition_sums(forms, S, v);
        const double ratio = safe_ratio(sums.seminorm_sq, sums.sum_sq);
        smin = std::min(smin, ratio);
        smax = std::max(smax, ratio);
        l1 = std::max(l1, safe_ratio(std::sqrt(sums.seminorm_sq), sums.sum));
    }

    auto [lo, hi] = extremal_eigenvalues(S, 0.5 * (D + D.transpose()));
    // the constants span the kernel of the seminorm
    if (std::abs(lo) <= 1e-12 * hi) lo = 0.0;
    EquivalenceReport r;
    r.statement = "lemma31";
    r.geometry = m_geometry;
    r.level = level;
    r.h = m_hierarchy.mesh(level).h();
    r.lambda_min = lo;
    r.lambda_max = hi;
    r.dim = r.ambient_dim = space->dim();
    r.extras["samples"] = samples;
    r.extras["sample_ratio_min"] = smin;
    r.extras["sample_ratio_max"] = smax;
    r.extras["l1_ratio_max"] = l1;
    return r;
}

EquivalenceReport LocalizationStudy::projector_equivalence(int level, ProjectorKind kind)
{
    require(kind != ProjectorKind::dual_oblique_P0dual, ErrorKind::invalid_input, "dual projector used on the primal side");
    const int fine = level + 2;
    refine_to(fine);
    const auto space = p1(fine);
    const auto coarse = p1(level);
    const auto nf = static_cast<Index>(space->dim());

    ProjectorMatrix P;
    FunctionFamily phi_star;
    if (kind == ProjectorKind::l2_p1) {
        P = l2_projection_matrix(m_hierarchy, *space, *coarse);
        phi_star = make_phi_star(m_hierarchy.mesh_ptr(level));
    } else {
        require(dim() == 2, ErrorKind::unsupported, "oblique projection needs dual cells (polygons only)");
        const auto dual = dual_cells(m_hierarchy.mesh_ptr(level));
        P = oblique_projection_matrix(m_hierarchy, *space, *coarse, *dual);
        phi_star = {dual, dual_cell_measures(m_hierarchy.mesh(level)).cwiseInverse().asDiagonal().toDenseMatrix()};
    }
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nf, nf);
    const Eigen::MatrixXd Q = P.matrix.transpose() * h_half(fine) * P.matrix + (I - P.matrix).transpose() * patch_sum(level, fine) * (I - P.matrix);
    const auto [lo, hi] = extremal_eigenvalues(h_half(fine), 0.5 * (Q + Q.transpose()));

    const Eigen::MatrixXd C = family_moments(m_hierarchy, phi_star, *space);
    EquivalenceReport r;
    r.statement = std::string("cor33-") + to_string(kind);
    r.geometry = m_geometry;
    r.level = level;
    r.h = m_hierarchy.mesh(level).h();
    r.lambda_min = lo;
    r.lambda_max = hi;
    r.dim = r.ambient_dim = space->dim();
    r.extras["hypothesis_residual"] = max_abs(C * (I - P.matrix)) / max_abs(C);
    r.extras["idempotency_residual"] = max_abs(P.matrix * P.matrix - P.matrix) / max_abs(P.matrix);
    return r;
}

Eigen::MatrixXd LocalizationStudy::DualForms::localized(const Eigen::MatrixXd& test_moments) const
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(test_moments.cols(), test_moments.cols());
    for (std::size_t y = 0; y < patches.size(); ++y) {
        const Eigen::MatrixXd My = rows_of(test_moments, patches[y].dofs);
        out += My.transpose() * patch_factors[y]->solve(My);
    }
    return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd LocalizationStudy::DualForms::globalized(const Eigen::MatrixXd& test_moments) const
{
    const Eigen::MatrixXd out = test_moments.transpose() * h_half_factor->solve(test_moments);
    return 0.5 * (out + out.transpose());
}

const LocalizationStudy::DualForms& LocalizationStudy::dual_forms(int level)
{
    auto it = m_dual.find(level);
    if (it != m_dual.end()) return it->second;

    DualForms d;
    d.functional_level = functional_level(level);
    d.test_level = test_level(level);
    refine_to(d.test_level);
    const auto test = p1(d.test_level);
    d.moments = cross_mass_matrix(m_hierarchy, *p0(d.functional_level), *test).transpose();
    d.h_half_factor = std::make_shared<Cholesky>(h_half(d.test_level));
    d.global = d.globalized(d.moments);

    for (const auto& patch : build_patches(m_hierarchy.mesh(level))) {
        const auto elements = m_hierarchy.descendants(level, patch.elements, d.test_level);
        d.patches.push_back(h00_patch_matrix(*test, elements, patch.boundary, patch.diameter, m_order));
        d.patch_factors.push_back(std::make_shared<Cholesky>(d.patches.back().matrix));
    }
    d.local = d.localized(d.moments);
    return m_dual.emplace(level, std::move(d)).first->second;
}

EquivalenceReport LocalizationStudy::dual_one_sided_check(int level)
{
    const DualForms& d = dual_forms(level);
    const auto [lo, hi] = extremal_eigenvalues(d.local, d.global);
    EquivalenceReport r;
    r.statement = "prop41";
    r.geometry = m_geometry;
    r.level = level;
    r.h = m_hierarchy.mesh(level).h();
    r.lambda_min = lo;
    r.lambda_max = hi;
    r.dim = r.ambient_dim = static_cast<std::size_t>(d.moments.cols());
    return r;
}

EquivalenceReport LocalizationStudy::dual_equivalence(int level)
{
    const DualForms& d = dual_forms(level);
    const auto zeta_space = p0(d.functional_level);
    const Eigen::MatrixXd H = cross_mass_matrix(m_hierarchy, *p1(level), *zeta_space);
    const Eigen::MatrixXd Z = nullspace(H, H.cols());
    require(Z.cols() > 0, ErrorKind::invalid_input, "constraints leave no admissible functionals");
    const auto [lo, hi] = extremal_eigenvalues(restrict_pencil(Z, d.global), restrict_pencil(Z, d.local));

    EquivalenceReport r;
    r.statement = "thm42";
    r.geometry = m_geometry;
    r.level = level;
    r.h = m_hierarchy.mesh(level).h();
    r.lambda_min = lo;
    r.lambda_max = hi;
    r.ambient_dim = static_cast<std::size_t>(H.cols());
    r.dim = static_cast<std::size_t>(Z.cols());
    r.constraints = r.ambient_dim - r.dim;
    r.extras["constraint_residual"] = max_abs(H * Z) / max_abs(H);

    // functionals with nonzero moments against the hats: the indicator of the first
    // element, and the constant
    Eigen::VectorXd indicator = Eigen::VectorXd::Zero(H.cols());
    indicator[0] = 1.0;
    r.extras["contrast"] = indicator.dot(d.global * indicator) / indicator.dot(d.local * indicator);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(H.cols());
    r.extras["contrast_constant"] = one.dot(d.global * one) / one.dot(d.local * one);
    return r;
}

EquivalenceReport LocalizationStudy::cutoff_stability_check(int level)
{
    const auto space = p1(level);
    const auto& forms = cutoff_forms(level);

    double sup = 0.0, inf = std::numeric_limits<double>::infinity(), sampled = 0.0;
    for (const auto& f : forms) {
        const auto k = static_cast<Index>(f.vertices.size());
        // v - mean(v) on the patch, in local coefficients
        const Eigen::MatrixXd centre = Eigen::MatrixXd::Identity(k, k) - Eigen::VectorXd::Ones(k) * f.integrals.transpose() / f.measure;
        const Eigen::MatrixXd num = centre.transpose() * f.h00 * centre;
        const Eigen::MatrixXd Z = nullspace(Eigen::RowVectorXd::Ones(k), k);
        const auto [lo, hi] = extremal_eigenvalues(restrict_pencil(Z, num), restrict_pencil(Z, f.seminorm));
        sup = std::max(sup, hi);
        inf = std::min(inf, lo);
    }
    for (int s = 0; s < samples; ++s) sampled = std::max(sampled, cutoff_ratio(level, random_vector(space->dim())));

    EquivalenceReport r;
    r.statement = "claim";
    r.geometry = m_geometry;
    r.level = level;
    r.h = m_hierarchy.mesh(level).h();
    // squared-norm ratios over all patches
    r.lambda_min = inf;
    r.lambda_max = sup;
    r.dim = r.ambient_dim = space->dim();
    r.extras["samples"] = samples;
    r.extras["sample_ratio_max"] = sampled;
    r.extras["contrast"] = cutoff_ratio(level, space->interpolate([](const Point& x) { return 1.0 + x[0]; }), false);
    return r;
}

Eigen::MatrixXd LocalizationStudy::dual_projection_moments(int level, ProjectorKind kind)
{
    require(kind != ProjectorKind::oblique_dualP0_to_P1, ErrorKind::invalid_input, "primal projector used on the dual side");
    const DualForms& d = dual_forms(level);
    const auto coarse = p1(level);
    const auto test = p1(d.test_level);
    const Eigen::MatrixXd H = cross_mass_matrix(m_hierarchy, *coarse, *p0(d.functional_level));  // <hat_y, zeta>
    if (kind == ProjectorKind::l2_p1) {
        const Cholesky mass(mass_matrix(*coarse).matrix);
        return cross_mass_matrix(m_hierarchy, *coarse, *test).transpose() * mass.solve(H);
    }
    require(dim() == 2, ErrorKind::unsupported, "oblique projection needs dual cells (polygons only)");
    const auto dual = dual_cells(m_hierarchy.mesh_ptr(level));
    const Eigen::MatrixXd Bc = cross_mass_matrix(m_hierarchy, *dual, *coarse);  // <chi_j, hat_y>
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(Bc.transpose());
    require(lu.isInvertible(), ErrorKind::numerical, "dual-cell coupling matrix is singular");
    return cross_mass_matrix(m_hierarchy, *dual, *test).transpose() * lu.solve(H);
}

EquivalenceReport LocalizationStudy::dual_projector_equivalence(int level, ProjectorKind kind)
{
    const Eigen::MatrixXd projected = dual_projection_moments(level, kind);
    const DualForms& d = dual_forms(level);
    const auto coarse = p1(level);
    const auto test = p1(d.test_level);
    const Eigen::MatrixXd H = cross_mass_matrix(m_hierarchy, *coarse, *p0(d.functional_level));

    // <zeta - projection, hat_y> through the hats written on the test level
    const Eigen::MatrixXd residual = d.moments - projected;
    const double violation = max_abs(prolongation(m_hierarchy, *coarse, *test).transpose() * residual) / max_abs(H);
    require(violation <= 1e-10, ErrorKind::numerical, "projector does not preserve the moments against the coarse hats");

    const Eigen::MatrixXd Q = d.globalized(projected) + d.localized(residual);
    const auto [lo, hi] = extremal_eigenvalues(d.global, Q);

    EquivalenceReport r;
    r.statement = std::string("cor43-") + (kind == ProjectorKind::l2_p1 ? "l2" : "oblique");
    r.geometry = m_geometry;
    r.level = level;
    r.h = m_hierarchy.mesh(level).h();
    r.lambda_min = lo;
    r.lambda_max = hi;
    r.dim = r.ambient_dim = static_cast<std::size_t>(d.moments.cols());
    r.extras["hypothesis_residual"] = violation;
    return r;
}

EquivalenceReport LocalizationStudy::poincare_check(int depth, bool average_free)
{
    refine_to(depth);
    const auto space = p1(depth);
    const auto patches = build_patches(m_hierarchy.mesh(0));
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::size_t dim_total = 0;
    for (const auto& patch : patches) {
        const auto elements = m_hierarchy.descendants(0, patch.elements, depth);
        const Eigen::MatrixXd M = mass_matrix(*space, elements).matrix;
        std::pair<double, double> ev;
        if (!average_free) {
            const PatchForm pf = h00_patch_matrix(*space, elements, patch.boundary, patch.diameter, m_order);
            ev = extremal_eigenvalues(submatrix(M, pf.dofs), patch.diameter * pf.matrix);
            dim_total += pf.dofs.size();
        } else {
            const auto dofs = patch_vertices(space->mesh(), elements);
            const Eigen::MatrixXd Mp = submatrix(M, dofs);
            const Eigen::MatrixXd Sp = submatrix(slobodeckij_matrix(*space, elements, m_order).matrix, dofs);
            const auto k = static_cast<Index>(dofs.size());
            const Eigen::MatrixXd Z = nullspace(Eigen::VectorXd(Mp * Eigen::VectorXd::Ones(k)).transpose(), k);
            ev = extremal_eigenvalues(restrict_pencil(Z, Mp), patch.diameter * restrict_pencil(Z, Sp));
            dim_total += static_cast<std::size_t>(Z.cols());
        }
        lo = std::min(lo, ev.first);
        hi = std::max(hi, ev.second);
    }

    EquivalenceReport r;
    r.statement = average_free ? "poincare_avfree" : "poincare";
    r.geometry = m_geometry;
    r.level = depth;
    r.h = m_hierarchy.mesh(depth).h();
    r.lambda_min = lo;
    r.lambda_max = hi;
    r.dim = r.ambient_dim = dim_total;
    r.extras["patches"] = static_cast<double>(patches.size());
    return r;
}

} // namespace tracenorm
