#pragma once

#include <tracenorm/localization.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tracenorm {

const char* version();

/// One geometry with its levels and statements.
///
/// Configuration files are lines of `key = value`; `#` starts a comment. A line
/// `[name]` opens a new run, which starts from the keys given before the first
/// section. Keys:
///
///   geometry      square | lshape | polygon:K | cube
///   levels        A..B (or a single level)
///   statements    comma-separated ids, or `all`
///   quad_order    Gauss order of the pair rules (2..20)
///   seed          seed of the random test functions
///   oracle_checks yes | no
///   out           output directory (global)
struct RunConfig
{
    std::string name;
    std::string geometry = "square";
    int level_min = 2;
    int level_max = 4;
    std::vector<std::string> statements;
    int quad_order = 6;
    std::uint64_t seed = 1;
    bool oracle_checks = true;
};

struct ExperimentConfig
{
    std::vector<RunConfig> runs;
    std::string out = "results";
};

ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Square levels 2-5 with every statement, Poincare checks on square and L-shape
/// patches, cube levels 0-2 for thm32, prop41, thm42.
ExperimentConfig default_suite();

/// Throws (invalid_input / unsupported) before any computation.
void validate(const RunConfig& run);

/// "A..B" or "A".
std::pair<int, int> parse_level_range(const std::string& text);

BoundaryMesh make_geometry(const std::string& name);

/// Statement ids a geometry of the given dimension supports.
std::vector<std::string> supported_statements(int dim);

EquivalenceReport run_statement(LocalizationStudy& study, const std::string& statement, int level);

struct StatementOutcome
{
    std::string statement;
    int level = 0;
    bool ok = false;
    std::string error;
    EquivalenceReport report;
    double seconds = 0.0;
};

struct ThresholdCheck
{
    std::string statement;
    std::string criterion;
    bool passed = false;
    std::string detail;
};

struct OracleSpotCheck
{
    std::string pair_class;
    std::size_t a = 0, b = 0;
    double value = 0.0;      // order 8
    double reference = 0.0;
    double rel_error = 0.0;
    double run_order_rel_error = 0.0;
};

struct RunResult
{
    RunConfig config;
    std::vector<StatementOutcome> outcomes;
    std::vector<ThresholdCheck> checks;
    std::vector<OracleSpotCheck> oracle;
    double seconds = 0.0;

    bool numerical_failure() const;
    bool thresholds_passed() const;
};

struct RunManifest
{
    ExperimentConfig config;
    std::vector<RunResult> runs;

    /// 0 pass, 1 threshold failure, 3 numerical failure.
    int exit_code() const;
};

/// One pair per class with element 0 of the mesh, smooth integrand, order 8 and the
/// run's order against the adaptive oracle.
std::vector<OracleSpotCheck> oracle_spot_checks(const BoundaryMesh& mesh, int quad_order);

/// Level-sweep thresholds of every statement of a run.
std::vector<ThresholdCheck> evaluate_thresholds(const RunResult& run);

/// Runs every statement; errors are recorded per (statement, level). Progress goes to
/// `log` when non-null. Writes nothing.
RunManifest run(const ExperimentConfig& config, std::ostream* log = nullptr);

/// One row per statement and level, no timings.
void write_csv(std::ostream& out, const RunResult& run);
std::string manifest_json(const RunManifest& manifest);

/// CSV per run, manifest.json, and the plots, under config.out.
void write_outputs(const RunManifest& manifest);

/// Log-log charts of lambda_min, lambda_max (and the contrast, when reported) against h,
/// one per run and statement with at least two levels. Returns the files written.
std::vector<std::string> write_plots(const std::string& manifest_text, const std::string& out_dir);

} // namespace tracenorm
