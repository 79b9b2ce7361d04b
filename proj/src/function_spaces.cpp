#include <tracenorm/function_spaces.hpp>

#include <algorithm>
#include <limits>

namespace tracenorm {

const char* to_string(SpaceKind kind)
{
    switch (kind) {
    case SpaceKind::P1: return "P1";
    case SpaceKind::P0: return "P0";
    case SpaceKind::DualP0: return "DualP0";
    }
    return "?";
}

DiscreteSpace::DiscreteSpace(SpaceKind kind, MeshPtr mesh)
    : m_kind(kind)
    , m_mesh(std::move(mesh))
{
    require(m_mesh != nullptr, ErrorKind::invalid_input, "space needs a mesh");
    if (m_kind == SpaceKind::DualP0)
        require(m_mesh->dim() == 2, ErrorKind::unsupported, "dual cells are only available for polygon boundaries");
}

std::size_t DiscreteSpace::dim() const
{
    return m_kind == SpaceKind::P0 ? m_mesh->num_elements() : m_mesh->num_vertices();
}

BasisValues DiscreteSpace::basis_at(std::size_t e, const Barycentric& b) const
{
    BasisValues out;
    const auto el = m_mesh->element(e);
    switch (m_kind) {
    case SpaceKind::P1:
        out.count = m_mesh->dim();
        for (int k = 0; k < out.count; ++k) {
            out.dofs[static_cast<std::size_t>(k)] = el[static_cast<std::size_t>(k)];
            out.values[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k)];
        }
        break;
    case SpaceKind::P0:
        out.count = 1;
        out.dofs[0] = e;
        out.values[0] = 1.0;
        break;
    case SpaceKind::DualP0:
        out.count = 1;
        out.dofs[0] = b[0] >= 0.5 ? el[0] : el[1];
        out.values[0] = 1.0;
        break;
    }
    return out;
}

double DiscreteSpace::basis(std::size_t i, const SurfacePoint& p) const
{
    const BasisValues bv = basis_at(p.element, p.bary);
    for (int k = 0; k < bv.count; ++k)
        if (bv.dofs[static_cast<std::size_t>(k)] == i) return bv.values[static_cast<std::size_t>(k)];
    return 0.0;
}

double DiscreteSpace::evaluate(const Eigen::VectorXd& coefficients, const SurfacePoint& p) const
{
    const BasisValues bv = basis_at(p.element, p.bary);
    double v = 0.0;
    for (int k = 0; k < bv.count; ++k)
        v += bv.values[static_cast<std::size_t>(k)] * coefficients[static_cast<Eigen::Index>(bv.dofs[static_cast<std::size_t>(k)])];
    return v;
}

double DiscreteSpace::evaluate_at(const Eigen::VectorXd& coefficients, const Point& x) const
{
    require(coefficients.size() == static_cast<Eigen::Index>(dim()), ErrorKind::invalid_input, "coefficient length does not match the space");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_e = 0;
    Barycentric best_b{};
    for (std::size_t e = 0; e < m_mesh->num_elements(); ++e) {
        Barycentric b{};
        const double d = m_mesh->distance_to_element(e, x, &b);
        if (d < best) {
            best = d;
            best_e = e;
            best_b = b;
        }
    }
    require(best <= 1e-10 * m_mesh->h(), ErrorKind::invalid_input, "point is not on the boundary mesh");
    return evaluate(coefficients, {best_e, best_b, x});
}

Evaluator DiscreteSpace::evaluator(Eigen::VectorXd coefficients) const
{
    require(coefficients.size() == static_cast<Eigen::Index>(dim()), ErrorKind::invalid_input, "coefficient length does not match the space");
    return [space = *this, c = std::move(coefficients)](const SurfacePoint& p) { return space.evaluate(c, p); };
}

Evaluator DiscreteSpace::basis_evaluator(std::size_t i) const
{
    return [space = *this, i](const SurfacePoint& p) { return space.basis(i, p); };
}

Eigen::VectorXd DiscreteSpace::interpolate(const std::function<double(const Point&)>& f) const
{
    Eigen::VectorXd c(static_cast<Eigen::Index>(dim()));
    if (m_kind == SpaceKind::P0) {
        const Barycentric mid = m_mesh->dim() == 2 ? Barycentric{0.5, 0.5, 0.0} : Barycentric{1.0 / 3, 1.0 / 3, 1.0 / 3};
        for (std::size_t e = 0; e < m_mesh->num_elements(); ++e) c[static_cast<Eigen::Index>(e)] = f(m_mesh->map(e, mid));
    } else {
        for (std::size_t v = 0; v < m_mesh->num_vertices(); ++v) c[static_cast<Eigen::Index>(v)] = f(m_mesh->vertex(v));
    }
    return c;
}

SpacePtr make_space(SpaceKind kind, MeshPtr mesh)
{
    return std::make_shared<const DiscreteSpace>(kind, std::move(mesh));
}

SpacePtr dual_cells(MeshPtr mesh)
{
    require(mesh && mesh->dim() == 2, ErrorKind::unsupported, "dual cells are only available for polygon boundaries");
    return make_space(SpaceKind::DualP0, std::move(mesh));
}

Eigen::VectorXd dual_cell_measures(const BoundaryMesh& mesh)
{
    require(mesh.dim() == 2, ErrorKind::unsupported, "dual cells are only available for polygon boundaries");
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
        for (auto v : mesh.element(e)) m[static_cast<Eigen::Index>(v)] += 0.5 * mesh.element_measure(e);
    return m;
}

Evaluator lift_evaluator(const MeshHierarchy& hierarchy, int coarse_level, int fine_level, Evaluator coarse)
{
    if (coarse_level == fine_level) return coarse;
    return [&hierarchy, coarse_level, fine_level, f = std::move(coarse)](const SurfacePoint& p) {
        const auto [e, b] = hierarchy.to_ancestor(fine_level, p.element, p.bary, coarse_level);
        return f(SurfacePoint{e, b, p.x});
    };
}

namespace {

void require_same_hierarchy(const MeshHierarchy& hierarchy, const DiscreteSpace& coarse, const DiscreteSpace& fine)
{
    require(coarse.level() <= fine.level(), ErrorKind::invalid_input, "first space must live on the coarser level");
    require(hierarchy.mesh_ptr(coarse.level()) == coarse.mesh_ptr() && hierarchy.mesh_ptr(fine.level()) == fine.mesh_ptr(),
        ErrorKind::invalid_input, "spaces are not defined on this hierarchy");
}

} // namespace

Eigen::MatrixXd prolongation(const MeshHierarchy& hierarchy, const DiscreteSpace& coarse, const DiscreteSpace& fine)
{
    require_same_hierarchy(hierarchy, coarse, fine);
    require(coarse.kind() == fine.kind() && coarse.kind() != SpaceKind::DualP0, ErrorKind::unsupported,
        "prolongation needs nested P1 or P0 spaces");
    const int lc = coarse.level(), lf = fine.level();
    const auto& fm = fine.mesh();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fine.dim()), static_cast<Eigen::Index>(coarse.dim()));
    if (coarse.kind() == SpaceKind::P0) {
        for (std::size_t e = 0; e < fm.num_elements(); ++e)
            P(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(hierarchy.ancestor(lf, e, lc))) = 1.0;
        return P;
    }
    for (std::size_t v = 0; v < fm.num_vertices(); ++v) {
        const std::size_t e = fm.vertex_elements(v).front();
        const auto el = fm.element(e);
        Barycentric b{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < el.size(); ++k)
            if (el[k] == v) b[k] = 1.0;
        const auto [ce, cb] = hierarchy.to_ancestor(lf, e, b, lc);
        const BasisValues bv = coarse.basis_at(ce, cb);
        for (int k = 0; k < bv.count; ++k)
            P(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(bv.dofs[static_cast<std::size_t>(k)])) += bv.values[static_cast<std::size_t>(k)];
    }
    return P;
}

Eigen::MatrixXd cross_mass_matrix(
    const MeshHierarchy& hierarchy,
    const DiscreteSpace& coarse,
    const DiscreteSpace& fine,
    const std::vector<std::size_t>* fine_elements)
{
    require_same_hierarchy(hierarchy, coarse, fine);
    const int lc = coarse.level(), lf = fine.level();
    const auto& fm = fine.mesh();
    const int n = fm.dim();

    // Reference points: segments are split at the midpoint so that dual cells are
    // resolved; triangles use a collapsed Gauss rule exact for degree 4.
    static const GaussRule g = gauss_legendre_unit(3);
    std::vector<std::pair<Barycentric, double>> ref;
    if (n == 2) {
        for (double shift : {0.0, 0.5})
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                const double t = shift + 0.5 * g.nodes[i];
                ref.push_back({Barycentric{1.0 - t, t, 0.0}, 0.5 * g.weights[i]});
            }
    } else {
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            for (std::size_t j = 0; j < g.nodes.size(); ++j) {
                const double u = g.nodes[i], v = (1.0 - g.nodes[i]) * g.nodes[j];
                ref.push_back({Barycentric{1.0 - u - v, u, v}, 2.0 * g.weights[i] * g.weights[j] * (1.0 - g.nodes[i])});
            }
    }

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(coarse.dim()), static_cast<Eigen::Index>(fine.dim()));
    auto add_element = [&](std::size_t e) {
        const double meas = fm.element_measure(e);
        for (const auto& [b, w] : ref) {
            const BasisValues fv = fine.basis_at(e, b);
            const auto [ce, cb] = hierarchy.to_ancestor(lf, e, b, lc);
            const BasisValues cv = coarse.basis_at(ce, cb);
            for (int i = 0; i < cv.count; ++i)
                for (int j = 0; j < fv.count; ++j)
                    G(static_cast<Eigen::Index>(cv.dofs[static_cast<std::size_t>(i)]), static_cast<Eigen::Index>(fv.dofs[static_cast<std::size_t>(j)])) +=
                        w * meas * cv.values[static_cast<std::size_t>(i)] * fv.values[static_cast<std::size_t>(j)];
        }
    };
    if (fine_elements) {
        for (auto e : *fine_elements) add_element(e);
    } else {
        for (std::size_t e = 0; e < fm.num_elements(); ++e) add_element(e);
    }
    return G;
}

Evaluator FunctionFamily::member(std::size_t y) const
{
    return space->evaluator(coefficients.col(static_cast<Eigen::Index>(y)));
}

Eigen::VectorXd hat_integrals(const BoundaryMesh& mesh)
{
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
        for (auto v : mesh.element(e)) w[static_cast<Eigen::Index>(v)] += mesh.element_measure(e) / mesh.dim();
    return w;
}

FunctionFamily make_phi_star(MeshPtr mesh, PhiStarKind kind)
{
    const auto nv = static_cast<Eigen::Index>(mesh->num_vertices());
    if (kind == PhiStarKind::normalized_hats) {
        const Eigen::VectorXd w = hat_integrals(*mesh);
        return {make_space(SpaceKind::P1, mesh), w.cwiseInverse().asDiagonal().toDenseMatrix()};
    }
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mesh->num_elements()), nv);
    for (Eigen::Index y = 0; y < nv; ++y) {
        const std::size_t e = mesh->vertex_elements(static_cast<std::size_t>(y)).front();
        c(static_cast<Eigen::Index>(e), y) = 1.0 / mesh->element_measure(e);
    }
    return {make_space(SpaceKind::P0, mesh), std::move(c)};
}

FunctionFamily make_partition(MeshPtr mesh)
{
    const auto nv = static_cast<Eigen::Index>(mesh->num_vertices());
    return {make_space(SpaceKind::P1, mesh), Eigen::MatrixXd::Identity(nv, nv)};
}

} // namespace tracenorm
