#include <tracenorm/forms.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>

namespace tracenorm {

int far_field_order(int order, double separation)
{
    if (separation < 4.0) return order;
    if (separation < 8.0) return std::max(order - 1, 2);
    if (separation < 16.0) return std::max(order - 2, 2);
    return std::max(order - 3, 2);
}

namespace {

using Index = Eigen::Index;

// Reference points of a single element: barycentrics and weights summing to 1.
struct ElementRule
{
    std::vector<Barycentric> points;
    std::vector<double> weights;
};

ElementRule make_element_rule(int dim, int order, bool split_segments)
{
    const GaussRule g = gauss_legendre_unit(order);
    ElementRule r;
    if (dim == 2) {
        const int panels = split_segments ? 2 : 1;
        for (int p = 0; p < panels; ++p)
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                const double t = (p + g.nodes[i]) / panels;
                r.points.push_back({1.0 - t, t, 0.0});
                r.weights.push_back(g.weights[i] / panels);
            }
        return r;
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
            const double u = g.nodes[i], v = (1.0 - g.nodes[i]) * g.nodes[j];
            r.points.push_back({1.0 - u - v, u, v});
            r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - g.nodes[i]));
        }
    return r;
}

const ElementRule& element_rule(int dim, int order, bool split_segments = false)
{
    static std::mutex mutex;
    static std::map<std::tuple<int, int, bool>, ElementRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_tuple(dim, order, split_segments);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, make_element_rule(dim, order, split_segments)).first;
    return it->second;
}

struct ElementGeometry
{
    std::vector<Point> centroid;
    std::vector<double> diameter;
};

ElementGeometry element_geometry(const BoundaryMesh& mesh)
{
    ElementGeometry g;
    const Barycentric mid = mesh.dim() == 2 ? Barycentric{0.5, 0.5, 0.0} : Barycentric{1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        g.centroid.push_back(mesh.map(e, mid));
        g.diameter.push_back(mesh.element_diameter(e));
    }
    return g;
}

// Local matrix of one element pair for P1 hats, over the union of their vertices.
class PairAssembler
{
public:
    PairAssembler(const BoundaryMesh& mesh, int order)
        : m_mesh(mesh)
        , m_order(order)
        , m_geometry(element_geometry(mesh))
    {}

    // Fills dofs (<= 6) and the local matrix; returns the number of dofs.
    int local_matrix(std::size_t a, std::size_t b, std::array<std::size_t, 6>& dofs, Eigen::Matrix<double, 6, 6>& M)
    {
        const int n = m_mesh.dim();
        const auto ea = m_mesh.element(a);
        const auto eb = m_mesh.element(b);
        int nd = 0;
        std::array<int, 3> ia{}, ib{};
        auto slot = [&](std::size_t v) {
            for (int k = 0; k < nd; ++k)
                if (dofs[static_cast<std::size_t>(k)] == v) return k;
            dofs[static_cast<std::size_t>(nd)] = v;
            return nd++;
        };
        for (int k = 0; k < n; ++k) ia[static_cast<std::size_t>(k)] = slot(ea[static_cast<std::size_t>(k)]);
        for (int k = 0; k < n; ++k) ib[static_cast<std::size_t>(k)] = slot(eb[static_cast<std::size_t>(k)]);
        M.setZero();

        const PairClass cls = classify_pair(m_mesh, a, b);
        if (cls == PairClass::disjoint && !near_pair(m_mesh, a, b)) {
            const double sep = (m_geometry.centroid[a] - m_geometry.centroid[b]).norm()
                / std::max(m_geometry.diameter[a], m_geometry.diameter[b]);
            disjoint(a, b, far_field_order(m_order, sep), ia, ib, M);
            return nd;
        }

        const PairRule& rule = cached_rule(a, b);
        std::array<double, 6> d{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point xs = m_mesh.map(a, rule.a[q]);
            const Point xt = m_mesh.map(b, rule.b[q]);
            d.fill(0.0);
            for (int k = 0; k < n; ++k) {
                d[static_cast<std::size_t>(ia[static_cast<std::size_t>(k)])] += rule.a[q][static_cast<std::size_t>(k)];
                d[static_cast<std::size_t>(ib[static_cast<std::size_t>(k)])] -= rule.b[q][static_cast<std::size_t>(k)];
            }
            const double w = rule.weights[q] * slobodeckij_kernel(n, xs, xt);
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j) M(i, j) += w * d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)];
        }
        return nd;
    }

private:
    const PairRule& cached_rule(std::size_t a, std::size_t b)
    {
        m_rule = pair_rule(m_mesh, a, b, m_order);
        return m_rule;
    }

    void disjoint(std::size_t a, std::size_t b, int order, const std::array<int, 3>& ia, const std::array<int, 3>& ib,
        Eigen::Matrix<double, 6, 6>& M)
    {
        const int n = m_mesh.dim();
        const ElementRule& r = element_rule(n, order);
        const auto Q = static_cast<Index>(r.points.size());
        Eigen::MatrixXd xa(3, Q), xb(3, Q);
        Eigen::VectorXd wa(Q), wb(Q);
        Eigen::MatrixXd pa(n, Q), pb(n, Q);
        for (Index q = 0; q < Q; ++q) {
            const auto& bq = r.points[static_cast<std::size_t>(q)];
            xa.col(q) = m_mesh.map(a, bq);
            xb.col(q) = m_mesh.map(b, bq);
            wa[q] = r.weights[static_cast<std::size_t>(q)] * m_mesh.element_measure(a);
            wb[q] = r.weights[static_cast<std::size_t>(q)] * m_mesh.element_measure(b);
            for (int k = 0; k < n; ++k) {
                pa(k, q) = bq[static_cast<std::size_t>(k)];
                pb(k, q) = bq[static_cast<std::size_t>(k)];
            }
        }
        Eigen::MatrixXd K(Q, Q);
        for (Index t = 0; t < Q; ++t)
            for (Index s = 0; s < Q; ++s) K(s, t) = slobodeckij_kernel(n, xa.col(s), xb.col(t));
        const Eigen::VectorXd row = K * wb;               // sum_t K_st w_t
        const Eigen::VectorXd col = K.transpose() * wa;   // sum_s w_s K_st
        const Eigen::MatrixXd Maa = pa * (wa.cwiseProduct(row)).asDiagonal() * pa.transpose();
        const Eigen::MatrixXd Mbb = pb * (wb.cwiseProduct(col)).asDiagonal() * pb.transpose();
        const Eigen::MatrixXd Mab = pa * wa.asDiagonal() * K * wb.asDiagonal() * pb.transpose();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                M(ia[static_cast<std::size_t>(i)], ia[static_cast<std::size_t>(j)]) += Maa(i, j);
                M(ib[static_cast<std::size_t>(i)], ib[static_cast<std::size_t>(j)]) += Mbb(i, j);
                M(ia[static_cast<std::size_t>(i)], ib[static_cast<std::size_t>(j)]) -= Mab(i, j);
                M(ib[static_cast<std::size_t>(j)], ia[static_cast<std::size_t>(i)]) -= Mab(i, j);
            }
    }

    const BoundaryMesh& m_mesh;
    int m_order;
    ElementGeometry m_geometry;
    PairRule m_rule;
};

// Core pair loop over a list of elements; `local` maps global dofs to rows (-1: drop).
void assemble_pairs(
    const DiscreteSpace& space,
    const std::vector<std::size_t>& elements,
    const std::vector<PairWeight>& weights,
    int order,
    const std::vector<Index>& local,
    std::vector<Eigen::MatrixXd>& out)
{
    require(space.kind() == SpaceKind::P1, ErrorKind::invalid_input,
        "Slobodeckij forms need continuous piecewise linears: piecewise constants are not in H^{1/2}");
    const auto& mesh = space.mesh();
    PairAssembler pa(mesh, order);
    std::array<std::size_t, 6> dofs{};
    Eigen::Matrix<double, 6, 6> M;
    std::vector<double> w(weights.size());
    for (std::size_t ii = 0; ii < elements.size(); ++ii) {
        for (std::size_t jj = ii; jj < elements.size(); ++jj) {
            const std::size_t a = std::min(elements[ii], elements[jj]);
            const std::size_t b = std::max(elements[ii], elements[jj]);
            bool any = false;
            for (std::size_t k = 0; k < weights.size(); ++k) {
                w[k] = weights[k](a, b);
                any = any || w[k] != 0.0;
            }
            if (!any) continue;
            const int nd = pa.local_matrix(a, b, dofs, M);
            const double factor = a == b ? 1.0 : 2.0;
            for (int i = 0; i < nd; ++i) {
                const Index li = local[dofs[static_cast<std::size_t>(i)]];
                if (li < 0) continue;
                for (int j = 0; j < nd; ++j) {
                    const Index lj = local[dofs[static_cast<std::size_t>(j)]];
                    if (lj < 0) continue;
                    for (std::size_t k = 0; k < weights.size(); ++k)
                        if (w[k] != 0.0) out[k](li, lj) += factor * w[k] * M(i, j);
                }
            }
        }
    }
    for (auto& A : out) A = 0.5 * (A + A.transpose()).eval();
}

std::vector<std::size_t> all_elements(const BoundaryMesh& mesh)
{
    std::vector<std::size_t> e(mesh.num_elements());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = i;
    return e;
}

std::vector<Index> identity_map(std::size_t n)
{
    std::vector<Index> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<Index>(i);
    return m;
}

} // namespace

QuadraticForm mass_matrix(const DiscreteSpace& space, const std::vector<std::size_t>& elements)
{
    const auto& mesh = space.mesh();
    const auto dim = static_cast<Index>(space.dim());
    QuadraticForm form{Eigen::MatrixXd::Zero(dim, dim), elements};
    const ElementRule& r = element_rule(mesh.dim(), 3, true);
    auto add = [&](std::size_t e) {
        for (std::size_t q = 0; q < r.points.size(); ++q) {
            const BasisValues bv = space.basis_at(e, r.points[q]);
            const double w = r.weights[q] * mesh.element_measure(e);
            for (int i = 0; i < bv.count; ++i)
                for (int j = 0; j < bv.count; ++j)
                    form.matrix(static_cast<Index>(bv.dofs[static_cast<std::size_t>(i)]), static_cast<Index>(bv.dofs[static_cast<std::size_t>(j)])) +=
                        w * bv.values[static_cast<std::size_t>(i)] * bv.values[static_cast<std::size_t>(j)];
        }
    };
    if (elements.empty()) {
        for (std::size_t e = 0; e < mesh.num_elements(); ++e) add(e);
    } else {
        for (auto e : elements) add(e);
    }
    return form;
}

std::vector<Eigen::MatrixXd> slobodeckij_matrices(const DiscreteSpace& space, const std::vector<PairWeight>& weights, int order)
{
    const auto dim = static_cast<Index>(space.dim());
    std::vector<Eigen::MatrixXd> out(weights.size(), Eigen::MatrixXd::Zero(dim, dim));
    assemble_pairs(space, all_elements(space.mesh()), weights, order, identity_map(space.dim()), out);
    return out;
}

QuadraticForm slobodeckij_matrix(const DiscreteSpace& space, const std::vector<std::size_t>& elements, int order)
{
    const auto dim = static_cast<Index>(space.dim());
    std::vector<Eigen::MatrixXd> out(1, Eigen::MatrixXd::Zero(dim, dim));
    const auto list = elements.empty() ? all_elements(space.mesh()) : elements;
    assemble_pairs(space, list, {[](std::size_t, std::size_t) { return 1.0; }}, order, identity_map(space.dim()), out);
    return {std::move(out[0]), elements};
}

QuadraticForm h_half_matrix(const DiscreteSpace& space, int order)
{
    QuadraticForm A = slobodeckij_matrix(space, {}, order);
    A.matrix += mass_matrix(space).matrix;
    return A;
}

PatchForm h00_patch_matrix(
    const DiscreteSpace& space,
    const std::vector<std::size_t>& elements,
    const PatchBoundary& boundary,
    double diameter,
    int order,
    const std::vector<std::size_t>* dofs)
{
    require(space.kind() == SpaceKind::P1, ErrorKind::invalid_input, "H^{1/2}_{00} forms need a P1 space");
    const auto& mesh = space.mesh();
    const double tol = 1e-10 * diameter;

    std::vector<char> in_patch(mesh.num_elements(), 0);
    for (auto e : elements) in_patch[e] = 1;

    PatchForm out;
    out.elements = elements;
    if (dofs) {
        out.dofs = *dofs;
    } else {
        for (auto e : elements)
            for (auto v : mesh.element(e))
                if (boundary.distance(mesh.vertex(v)) > tol) out.dofs.push_back(v);
        std::sort(out.dofs.begin(), out.dofs.end());
        out.dofs.erase(std::unique(out.dofs.begin(), out.dofs.end()), out.dofs.end());
    }
    for (auto v : out.dofs) {
        require(boundary.distance(mesh.vertex(v)) > tol, ErrorKind::invalid_input,
            "basis function does not vanish on the patch boundary");
        for (auto e : mesh.vertex_elements(v))
            require(in_patch[e] != 0, ErrorKind::invalid_input, "basis function is not supported in the patch");
    }

    std::vector<Index> local(mesh.num_vertices(), -1);
    for (std::size_t i = 0; i < out.dofs.size(); ++i) local[out.dofs[i]] = static_cast<Index>(i);
    const auto m = static_cast<Index>(out.dofs.size());

    std::vector<Eigen::MatrixXd> S(1, Eigen::MatrixXd::Zero(m, m));
    assemble_pairs(space, elements, {[](std::size_t, std::size_t) { return 1.0; }}, order, local, S);
    out.seminorm = std::move(S[0]);

    // graded weighted mass, layer by layer with the same stopping rule as the scalar integral
    out.boundary_mass = Eigen::MatrixXd::Zero(m, m);
    const GradedBoundaryRule rule(mesh, elements, boundary, diameter, order);
    double total = 0.0, previous = -1.0;
    int non_decreasing = 0;
    bool converged = false;
    for (int k = 0; k < GradedBoundaryRule::max_layers && m > 0; ++k) {
        Eigen::MatrixXd layer = Eigen::MatrixXd::Zero(m, m);
        for (const auto& p : rule.layer(k)) {
            const BasisValues bv = space.basis_at(p.element, p.bary);
            for (int i = 0; i < bv.count; ++i) {
                const Index li = local[bv.dofs[static_cast<std::size_t>(i)]];
                if (li < 0) continue;
                for (int j = 0; j < bv.count; ++j) {
                    const Index lj = local[bv.dofs[static_cast<std::size_t>(j)]];
                    if (lj >= 0) layer(li, lj) += p.weight * bv.values[static_cast<std::size_t>(i)] * bv.values[static_cast<std::size_t>(j)];
                }
            }
        }
        out.boundary_mass += layer;
        const double contribution = layer.trace();
        total += contribution;
        if (k >= 1) {
            if (contribution <= 1e-8 * total) {
                converged = true;
                break;
            }
            if (previous > 0.0 && contribution >= 0.99 * previous) {
                require(++non_decreasing < 2, ErrorKind::divergence,
                    "weighted boundary integral diverges: function not in H^{1/2}_{00}");
            } else {
                non_decreasing = 0;
            }
        }
        previous = contribution;
    }
    require(converged || m == 0, ErrorKind::divergence, "weighted boundary integral did not converge");
    out.boundary_mass = 0.5 * (out.boundary_mass + out.boundary_mass.transpose()).eval();
    out.matrix = out.seminorm + out.boundary_mass;
    return out;
}

Eigen::VectorXd moment_vector(const Evaluator& zeta, const DiscreteSpace& test, int order)
{
    const auto& mesh = test.mesh();
    const ElementRule& r = element_rule(mesh.dim(), order, true);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Index>(test.dim()));
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        for (std::size_t q = 0; q < r.points.size(); ++q) {
            const SurfacePoint p{e, r.points[q], mesh.map(e, r.points[q])};
            const double z = zeta(p);
            require(std::isfinite(z), ErrorKind::numerical, "functional returned a non-finite value");
            if (z == 0.0) continue;
            const BasisValues bv = test.basis_at(e, r.points[q]);
            const double w = r.weights[q] * mesh.element_measure(e) * z;
            for (int i = 0; i < bv.count; ++i)
                b[static_cast<Index>(bv.dofs[static_cast<std::size_t>(i)])] += w * bv.values[static_cast<std::size_t>(i)];
        }
    }
    return b;
}

double seminorm_of_evaluator(const Evaluator& f, const BoundaryMesh& mesh, const std::vector<std::size_t>& elements, int order)
{
    const auto list = elements.empty() ? all_elements(mesh) : elements;
    double sum = 0.0;
    for (std::size_t i = 0; i < list.size(); ++i)
        for (std::size_t j = i; j < list.size(); ++j)
            sum += (i == j ? 1.0 : 2.0) * integrate_pair(mesh, f, f, list[i], list[j], order);
    return sum;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& A)
{
    char buf[40];
    for (Index i = 0; i < A.rows(); ++i) {
        for (Index j = 0; j < A.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            require(used == cell.size(), ErrorKind::invalid_input, "malformed CSV entry '" + cell + "'");
            row.push_back(v);
        }
        require(rows.empty() || row.size() == rows.front().size(), ErrorKind::invalid_input, "ragged CSV matrix");
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd A(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) A(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return A;
}

} // namespace tracenorm
