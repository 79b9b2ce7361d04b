// Command-line driver: mesh, assemble, verify, plot.
//
// Exit codes: 0 pass, 1 threshold failure, 2 configuration error, 3 numerical failure.

#include <tracenorm/experiment.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace tracenorm;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Common
{
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> quad_order;
    std::string levels;
    std::string geometry;
    std::vector<std::string> statements;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "configuration file (key = value lines)");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--seed", c.seed, "seed of the random test functions");
    cmd->add_option("--quad-order", c.quad_order, "Gauss order of the pair rules");
    cmd->add_option("--levels", c.levels, "level range A..B");
    cmd->add_option("--geometry", c.geometry, "square | lshape | polygon:K | cube");
}

// Configuration from --config (or the built-in suite), with the command-line overrides.
ExperimentConfig resolve(const Common& c, bool default_to_suite)
{
    ExperimentConfig cfg;
    if (!c.config.empty()) {
        cfg = load_config(c.config);
    } else if (default_to_suite && c.geometry.empty()) {
        cfg = default_suite();
    } else {
        cfg.runs.push_back(RunConfig{});
        cfg.runs.back().statements = {"thm32"};
    }
    if (!c.out.empty()) cfg.out = c.out;
    for (auto& r : cfg.runs) {
        if (!c.geometry.empty()) r.geometry = c.geometry;
        if (!c.levels.empty()) std::tie(r.level_min, r.level_max) = parse_level_range(c.levels);
        if (c.seed) r.seed = *c.seed;
        if (c.quad_order) r.quad_order = *c.quad_order;
        if (!c.statements.empty()) {
            r.statements = c.statements;
            if (r.statements.size() == 1 && r.statements[0] == "all") r.statements = supported_statements(make_geometry(r.geometry).dim());
        }
        validate(r);
    }
    return cfg;
}

fs::path prepare_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec && fs::is_directory(dir), ErrorKind::invalid_input, "cannot create output directory '" + dir + "'");
    return fs::path(dir);
}

int cmd_mesh(const Common& c)
{
    const ExperimentConfig cfg = resolve(c, false);
    const fs::path dir = prepare_dir(cfg.out);
    for (const auto& r : cfg.runs) {
        MeshHierarchy hier(make_geometry(r.geometry));
        hier.refine_to(r.level_max);
        for (int l = r.level_min; l <= r.level_max; ++l) {
            const auto& m = hier.mesh(l);
            std::string stem = r.geometry;
            std::replace(stem.begin(), stem.end(), ':', '-');
            const fs::path file = dir / (stem + "_l" + std::to_string(l) + ".mesh");
            std::ofstream out(file);
            write_mesh(out, m);
            std::cout << file.string() << ": " << m.num_vertices() << " vertices, " << m.num_elements() << " elements, h = " << m.h()
                      << ", h_min = " << m.h_min() << "\n";
        }
    }
    return 0;
}

int cmd_assemble(const Common& c, const std::vector<std::string>& forms)
{
    const ExperimentConfig cfg = resolve(c, false);
    const fs::path dir = prepare_dir(cfg.out);
    for (const auto& f : forms)
        require(f == "mass" || f == "slobodeckij" || f == "h_half", ErrorKind::invalid_input, "unknown form '" + f + "'");
    for (const auto& r : cfg.runs) {
        MeshHierarchy hier(make_geometry(r.geometry));
        hier.refine_to(r.level_max);
        for (int l = r.level_min; l <= r.level_max; ++l) {
            const DiscreteSpace space(SpaceKind::P1, hier.mesh_ptr(l));
            std::string stem = r.geometry;
            std::replace(stem.begin(), stem.end(), ':', '-');
            std::optional<Eigen::MatrixXd> M, S;
            for (const auto& f : forms) {
                if ((f == "mass" || f == "h_half") && !M) M = mass_matrix(space).matrix;
                if ((f == "slobodeckij" || f == "h_half") && !S) S = slobodeckij_matrix(space, {}, r.quad_order).matrix;
                const Eigen::MatrixXd A = f == "mass" ? *M : f == "slobodeckij" ? *S : Eigen::MatrixXd(*M + *S);
                const fs::path file = dir / (stem + "_l" + std::to_string(l) + "_" + f + ".csv");
                std::ofstream out(file);
                write_matrix_csv(out, A);
                std::cout << file.string() << ": " << A.rows() << " x " << A.cols() << "\n";
            }
        }
    }
    return 0;
}

int cmd_verify(const Common& c)
{
    const ExperimentConfig cfg = resolve(c, true);
    const RunManifest manifest = run(cfg, &std::cerr);
    write_outputs(manifest);
    int failed = 0;
    for (const auto& r : manifest.runs)
        for (const auto& chk : r.checks) {
            if (chk.passed) continue;
            ++failed;
            std::cout << "FAIL " << r.config.name << ' ' << chk.statement << ": " << chk.criterion << (chk.detail.empty() ? "" : " (" + chk.detail + ")")
                      << "\n";
        }
    const int code = manifest.exit_code();
    std::cout << (code == 0 ? "all thresholds passed" : std::to_string(failed) + " threshold checks failed") << "; results in " << cfg.out << "\n";
    return code;
}

int cmd_plot(const Common& c, const std::string& manifest_path)
{
    std::string dir = c.out;
    std::string path = manifest_path;
    if (!c.config.empty() && (dir.empty() || path.empty())) {
        const ExperimentConfig cfg = load_config(c.config);
        if (dir.empty()) dir = cfg.out;
    }
    if (dir.empty()) dir = "results";
    if (path.empty()) path = (fs::path(dir) / "manifest.json").string();
    std::ifstream in(path);
    require(in.good(), ErrorKind::invalid_input, "cannot open manifest '" + path + "'");
    std::stringstream text;
    text << in.rdbuf();
    prepare_dir(dir);
    for (const auto& f : write_plots(text.str(), dir)) std::cout << f << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete fractional trace norms and their localization"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    Common common;
    auto* mesh = app.add_subcommand("mesh", "write refined boundary meshes");
    add_common(mesh, common);

    std::vector<std::string> forms{"mass", "slobodeckij", "h_half"};
    auto* assemble = app.add_subcommand("assemble", "write Gram matrices as CSV");
    add_common(assemble, common);
    assemble->add_option("--form", forms, "mass | slobodeckij | h_half (repeatable)");

    auto* verify = app.add_subcommand("verify", "run localization statements over a level sweep");
    add_common(verify, common);
    verify->add_option("--statements", common.statements, "statement ids, or 'all'")->delimiter(',');

    std::string manifest_path;
    auto* plot = app.add_subcommand("plot", "draw SVG charts from a manifest");
    plot->add_option("--config", common.config, "configuration file (for its output directory)");
    plot->add_option("--out", common.out, "output directory (default: the manifest's)");
    plot->add_option("manifest", manifest_path, "manifest.json (default: OUT/manifest.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*mesh) return cmd_mesh(common);
        if (*assemble) return cmd_assemble(common, forms);
        if (*verify) return cmd_verify(common);
        if (*plot) return cmd_plot(common, manifest_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::invalid_input || e.kind() == ErrorKind::unsupported ? exit_config : exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
    return 0;
}
