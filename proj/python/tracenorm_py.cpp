// Python bindings: meshes, Gram matrices, localization statements and config runs.

#include <tracenorm/experiment.hpp>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace tracenorm;

namespace {

Eigen::MatrixXd vertex_array(const BoundaryMesh& m)
{
    Eigen::MatrixXd out(m.num_vertices(), m.dim());
    for (std::size_t i = 0; i < m.num_vertices(); ++i)
        for (int k = 0; k < m.dim(); ++k) out(i, k) = m.vertex(i)[k];
    return out;
}

Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> element_array(const BoundaryMesh& m)
{
    Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> out(m.num_elements(), m.dim());
    for (std::size_t e = 0; e < m.num_elements(); ++e)
        for (int k = 0; k < m.dim(); ++k) out(e, k) = static_cast<long>(m.element(e)[k]);
    return out;
}

DiscreteSpace p1_space(const MeshHierarchy& hier, int level)
{
    return DiscreteSpace(SpaceKind::P1, hier.mesh_ptr(level));
}

} // namespace

PYBIND11_MODULE(_tracenorm, m)
{
    m.doc() = "Discrete fractional trace norms and their localization";

    static py::exception<Error> base(m, "TracenormError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::invalid_input || e.kind() == ErrorKind::unsupported)
                PyErr_SetString(PyExc_ValueError, e.what());
            else
                base(e.what());
        }
    });

    m.def("version", [] { return std::string(version()); });

    py::class_<BoundaryMesh>(m, "BoundaryMesh")
        .def_property_readonly("dim", &BoundaryMesh::dim)
        .def_property_readonly("level", &BoundaryMesh::level)
        .def_property_readonly("num_vertices", &BoundaryMesh::num_vertices)
        .def_property_readonly("num_elements", &BoundaryMesh::num_elements)
        .def_property_readonly("h", &BoundaryMesh::h)
        .def_property_readonly("h_min", &BoundaryMesh::h_min)
        .def_property_readonly("total_measure", &BoundaryMesh::total_measure)
        .def_property_readonly("vertices", &vertex_array)
        .def_property_readonly("elements", &element_array)
        .def("to_text", [](const BoundaryMesh& mesh) {
            std::ostringstream out;
            write_mesh(out, mesh);
            return out.str();
        });

    m.def("make_geometry", &make_geometry, py::arg("name"));
    m.def("read_mesh", [](const std::string& text) {
        std::istringstream in(text);
        return read_mesh(in);
    });

    py::class_<MeshHierarchy>(m, "MeshHierarchy")
        .def(py::init<BoundaryMesh>(), py::arg("coarse"))
        .def("refine_to", &MeshHierarchy::refine_to)
        .def_property_readonly("finest_level", &MeshHierarchy::finest_level)
        .def("mesh", &MeshHierarchy::mesh, py::return_value_policy::reference_internal);

    m.def("mass_matrix", [](const MeshHierarchy& h, int level) { return mass_matrix(p1_space(h, level)).matrix; });
    m.def(
        "slobodeckij_matrix",
        [](const MeshHierarchy& h, int level, int order) { return slobodeckij_matrix(p1_space(h, level), {}, order).matrix; },
        py::arg("hierarchy"), py::arg("level"), py::arg("quad_order") = 6);
    m.def(
        "h_half_matrix", [](const MeshHierarchy& h, int level, int order) { return h_half_matrix(p1_space(h, level), order).matrix; },
        py::arg("hierarchy"), py::arg("level"), py::arg("quad_order") = 6);

    py::class_<EquivalenceReport>(m, "EquivalenceReport")
        .def_readonly("statement", &EquivalenceReport::statement)
        .def_readonly("geometry", &EquivalenceReport::geometry)
        .def_readonly("level", &EquivalenceReport::level)
        .def_readonly("h", &EquivalenceReport::h)
        .def_readonly("lambda_min", &EquivalenceReport::lambda_min)
        .def_readonly("lambda_max", &EquivalenceReport::lambda_max)
        .def_readonly("dim", &EquivalenceReport::dim)
        .def_readonly("ambient_dim", &EquivalenceReport::ambient_dim)
        .def_readonly("constraints", &EquivalenceReport::constraints)
        .def_readonly("extras", &EquivalenceReport::extras);

    py::class_<LocalizationStudy>(m, "LocalizationStudy")
        .def(py::init([](const std::string& geometry, int order, std::uint64_t seed) {
                 return std::make_unique<LocalizationStudy>(geometry, make_geometry(geometry), order, seed);
             }),
             py::arg("geometry"), py::arg("quad_order") = 6, py::arg("seed") = 1)
        .def_property_readonly("dim", &LocalizationStudy::dim)
        .def(
            "run", [](LocalizationStudy& s, const std::string& statement, int level) { return run_statement(s, statement, level); },
            py::arg("statement"), py::arg("level"))
        .def("mass", &LocalizationStudy::mass)
        .def("slobodeckij", &LocalizationStudy::slobodeckij)
        .def("h_half", &LocalizationStudy::h_half)
        .def("decomposition_ratio", &LocalizationStudy::decomposition_ratio)
        .def("cutoff_ratio", &LocalizationStudy::cutoff_ratio, py::arg("level"), py::arg("v"), py::arg("subtract_mean") = true);

    m.def("supported_statements", &supported_statements, py::arg("dim"));

    // Parses a config text, runs it and returns (exit code, manifest JSON). Writes nothing.
    m.def(
        "run_config",
        [](const std::string& text) {
            std::istringstream in(text);
            ExperimentConfig cfg = parse_config(in, "<python>");
            RunManifest manifest;
            {
                py::gil_scoped_release release;
                manifest = run(cfg);
            }
            return py::make_tuple(manifest.exit_code(), manifest_json(manifest));
        },
        py::arg("text"));
}
