#include <tracenorm/experiment.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#ifndef TRACENORM_VERSION
#define TRACENORM_VERSION "0.0.0"
#endif

namespace tracenorm {

using json = nlohmann::ordered_json;

const char* version() { return TRACENORM_VERSION; }

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int parse_int(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == s.size() && !s.empty(), ErrorKind::invalid_input, "invalid " + what + " '" + s + "'");
    return v;
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const std::vector<std::string>& known_statements()
{
    static const std::vector<std::string> ids = [] {
        auto v = statement_ids();
        v.push_back("thm32-indicators");
        return v;
    }();
    return ids;
}

bool is_two_sided(const std::string& id)
{
    return id.rfind("thm32", 0) == 0 || id.rfind("cor33", 0) == 0 || id == "thm42" || id.rfind("cor43", 0) == 0;
}

std::string run_name(const RunConfig& run)
{
    if (!run.name.empty()) return run.name;
    std::string s = run.geometry;
    std::replace(s.begin(), s.end(), ':', '-');
    return s;
}

void assign(RunConfig& run, std::string& out, const std::string& key, const std::string& value, bool global)
{
    if (key == "geometry") {
        run.geometry = value;
    } else if (key == "levels") {
        std::tie(run.level_min, run.level_max) = parse_level_range(value);
    } else if (key == "statements") {
        if (value == "all") {
            run.statements = {};
            run.statements.push_back("all");
        } else {
            run.statements = split_list(value);
        }
    } else if (key == "quad_order") {
        run.quad_order = parse_int(value, "quadrature order");
    } else if (key == "seed") {
        std::size_t used = 0;
        try {
            run.seed = std::stoull(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used == value.size() && !value.empty() && value[0] != '-', ErrorKind::invalid_input, "invalid seed '" + value + "'");
    } else if (key == "oracle_checks") {
        require(value == "yes" || value == "no", ErrorKind::invalid_input, "oracle_checks must be yes or no");
        run.oracle_checks = value == "yes";
    } else if (key == "out") {
        require(global, ErrorKind::invalid_input, "'out' must be given before the first section");
        out = value;
    } else {
        fail(ErrorKind::invalid_input, "unknown key '" + key + "'");
    }
}

void expand_all(RunConfig& run)
{
    if (run.statements.size() == 1 && run.statements[0] == "all") {
        const int n = make_geometry(run.geometry).dim();
        run.statements = supported_statements(n);
    }
}

} // namespace

std::pair<int, int> parse_level_range(const std::string& text)
{
    const std::string t = trim(text);
    const auto dots = t.find("..");
    if (dots == std::string::npos) {
        const int l = parse_int(t, "level");
        return {l, l};
    }
    const int a = parse_int(trim(t.substr(0, dots)), "level");
    const int b = parse_int(trim(t.substr(dots + 2)), "level");
    require(a <= b, ErrorKind::invalid_input, "empty level range '" + t + "'");
    return {a, b};
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin)
{
    ExperimentConfig cfg;
    RunConfig defaults;
    std::vector<RunConfig> sections;
    std::string line;
    int lineno = 0;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                require(line.back() == ']' && line.size() > 2, ErrorKind::invalid_input, "malformed section header");
                RunConfig r = defaults;
                r.name = trim(line.substr(1, line.size() - 2));
                for (char c : r.name)
                    require(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_', ErrorKind::invalid_input,
                        "section names may contain letters, digits, '-' and '_' only");
                sections.push_back(std::move(r));
                continue;
            }
            const auto eq = line.find('=');
            require(eq != std::string::npos, ErrorKind::invalid_input, "expected 'key = value'");
            const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
            require(!value.empty(), ErrorKind::invalid_input, "missing value for '" + key + "'");
            if (sections.empty())
                assign(defaults, cfg.out, key, value, true);
            else
                assign(sections.back(), cfg.out, key, value, false);
        }
    } catch (const Error& e) {
        fail(ErrorKind::invalid_input, origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
    cfg.runs = sections.empty() ? std::vector<RunConfig>{defaults} : sections;
    std::set<std::string> names;
    for (auto& r : cfg.runs) {
        expand_all(r);
        validate(r);
        require(names.insert(run_name(r)).second, ErrorKind::invalid_input, "duplicate run name '" + run_name(r) + "'");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    require(in.good(), ErrorKind::invalid_input, "cannot open config '" + path + "'");
    return parse_config(in, path);
}

ExperimentConfig default_suite()
{
    ExperimentConfig cfg;
    RunConfig square;
    square.name = "square";
    square.geometry = "square";
    square.level_min = 2;
    square.level_max = 5;
    square.statements = {"thm32", "faermann", "lemma31", "cor33-l2", "cor33-oblique", "prop41", "thm42", "claim", "cor43-l2", "cor43-oblique"};
    cfg.runs.push_back(square);

    for (const char* g : {"square", "lshape"}) {
        RunConfig p;
        p.name = std::string(g) + "-poincare";
        p.geometry = g;
        p.level_min = 1;
        p.level_max = 3;
        p.statements = {"poincare", "poincare_avfree"};
        p.oracle_checks = false;
        cfg.runs.push_back(p);
    }

    RunConfig cube;
    cube.name = "cube";
    cube.geometry = "cube";
    cube.level_min = 0;
    cube.level_max = 2;
    cube.statements = {"thm32", "prop41", "thm42"};
    cfg.runs.push_back(cube);
    return cfg;
}

BoundaryMesh make_geometry(const std::string& name)
{
    if (name == "square") return make_unit_square();
    if (name == "lshape") return make_lshape();
    if (name == "cube") return make_cube_surface();
    if (name.rfind("polygon:", 0) == 0) {
        const int k = parse_int(name.substr(8), "polygon vertex count");
        require(k >= 3, ErrorKind::invalid_input, "a polygon needs at least 3 vertices");
        return make_regular_polygon(k);
    }
    fail(ErrorKind::invalid_input, "unknown geometry '" + name + "'");
}

std::vector<std::string> supported_statements(int dim)
{
    std::vector<std::string> out;
    for (const auto& id : known_statements())
        if (dim == 2 || id.find("oblique") == std::string::npos) out.push_back(id);
    return out;
}

void validate(const RunConfig& run)
{
    const int n = make_geometry(run.geometry).dim();
    require(run.level_min >= 0 && run.level_min <= run.level_max, ErrorKind::invalid_input, "level range must be nonempty and non-negative");
    // the finest mesh of a statement is up to four levels below the patches
    const int cap = n == 2 ? 6 : 2;
    require(run.level_max <= cap, ErrorKind::invalid_input,
        "levels above " + std::to_string(cap) + " are out of reach of dense assembly for this geometry");
    require(run.quad_order >= 2 && run.quad_order <= 20, ErrorKind::invalid_input, "quadrature order must lie in [2, 20]");
    const auto supported = supported_statements(n);
    std::set<std::string> seen;
    for (const auto& s : run.statements) {
        require(std::find(known_statements().begin(), known_statements().end(), s) != known_statements().end(),
            ErrorKind::invalid_input, "unknown statement '" + s + "'");
        require(std::find(supported.begin(), supported.end(), s) != supported.end(), ErrorKind::unsupported,
            "statement '" + s + "' needs a polygon boundary (geometry '" + run.geometry + "')");
        require(seen.insert(s).second, ErrorKind::invalid_input, "statement '" + s + "' listed twice");
    }
}

EquivalenceReport run_statement(LocalizationStudy& study, const std::string& s, int level)
{
    if (s == "thm32") return study.primal_equivalence(level);
    if (s == "thm32-indicators") return study.primal_equivalence(level, PhiStarKind::element_indicators);
    if (s == "faermann") return study.faermann_bound_check(level);
    if (s == "lemma31") return study.decomposition_bound_check(level);
    if (s == "cor33-l2") return study.projector_equivalence(level, ProjectorKind::l2_p1);
    if (s == "cor33-oblique") return study.projector_equivalence(level, ProjectorKind::oblique_dualP0_to_P1);
    if (s == "prop41") return study.dual_one_sided_check(level);
    if (s == "thm42") return study.dual_equivalence(level);
    if (s == "claim") return study.cutoff_stability_check(level);
    if (s == "cor43-l2") return study.dual_projector_equivalence(level, ProjectorKind::l2_p1);
    if (s == "cor43-oblique") return study.dual_projector_equivalence(level, ProjectorKind::dual_oblique_P0dual);
    if (s == "poincare") return study.poincare_check(level, false);
    if (s == "poincare_avfree") return study.poincare_check(level, true);
    fail(ErrorKind::invalid_input, "unknown statement '" + s + "'");
}

bool RunResult::numerical_failure() const
{
    return std::any_of(outcomes.begin(), outcomes.end(), [](const StatementOutcome& o) { return !o.ok; });
}

bool RunResult::thresholds_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const ThresholdCheck& c) { return c.passed; });
}

int RunManifest::exit_code() const
{
    bool numeric = false, thresholds = true;
    for (const auto& r : runs) {
        numeric = numeric || r.numerical_failure();
        thresholds = thresholds && r.thresholds_passed();
    }
    return numeric ? 3 : thresholds ? 0 : 1;
}

std::vector<OracleSpotCheck> oracle_spot_checks(const BoundaryMesh& mesh, int quad_order)
{
    const Evaluator f = [](const SurfacePoint& p) { return p.x[0] + 0.5 * p.x[1] * p.x[1] + 0.25 * p.x[2]; };
    std::vector<OracleSpotCheck> out;
    for (PairClass c : {PairClass::identical, PairClass::edge_adjacent, PairClass::vertex_adjacent, PairClass::disjoint}) {
        for (std::size_t b = 0; b < mesh.num_elements(); ++b) {
            if (classify_pair(mesh, 0, b) != c) continue;
            OracleSpotCheck s;
            s.pair_class = to_string(c);
            s.a = 0;
            s.b = b;
            s.value = integrate_pair(mesh, f, f, 0, b, 8);
            s.reference = adaptive_reference_oracle(mesh, f, f, 0, b, 1e-8);
            s.rel_error = std::abs(s.value - s.reference) / std::abs(s.reference);
            s.run_order_rel_error = std::abs(integrate_pair(mesh, f, f, 0, b, quad_order) - s.reference) / std::abs(s.reference);
            out.push_back(s);
            break;
        }
    }
    return out;
}

std::vector<ThresholdCheck> evaluate_thresholds(const RunResult& run)
{
    std::vector<ThresholdCheck> checks;
    const int n = make_geometry(run.config.geometry).dim();
    // allowed max/min ratio of a bounded quantity over the levels of a run
    const double spread_bound = n == 2 ? 2.0 : 3.0;
    auto add = [&](const std::string& st, const std::string& criterion, bool passed, const std::string& detail) {
        checks.push_back({st, criterion, passed, detail});
    };

    for (const auto& o : run.oracle)
        add("quadrature", "order-8 oracle agreement " + o.pair_class, o.rel_error <= 1e-6, "relative error " + format_number(o.rel_error));

    for (const auto& st : run.config.statements) {
        std::vector<const EquivalenceReport*> reps;
        bool complete = true;
        for (const auto& o : run.outcomes) {
            if (o.statement != st) continue;
            if (o.ok)
                reps.push_back(&o.report);
            else
                complete = false;
        }
        add(st, "computed", complete, complete ? "all levels" : "some levels failed");
        if (reps.empty()) continue;

        bool sane = true;
        for (const auto* r : reps) {
            sane = sane && std::isfinite(r->lambda_min) && std::isfinite(r->lambda_max) && r->lambda_min <= r->lambda_max &&
                   r->lambda_min >= -1e-10 * std::abs(r->lambda_max);
            if (is_two_sided(st)) sane = sane && r->lambda_min > 0.0;
        }
        add(st, is_two_sided(st) ? "0 < lambda_min <= lambda_max" : "0 <= lambda_min <= lambda_max", sane, "");

        auto series = [&](auto get) {
            std::vector<double> v;
            for (const auto* r : reps) v.push_back(get(*r));
            return v;
        };
        auto spread_check = [&](const std::string& what, const std::vector<double>& v) {
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            const double spread = *lo > 0.0 ? *hi / *lo : INFINITY;
            add(st, what + " spread <= " + format_number(spread_bound), spread <= spread_bound, "max/min " + format_number(spread));
        };
        auto extra = [](const char* key) {
            return [key](const EquivalenceReport& r) {
                const auto it = r.extras.find(key);
                return it == r.extras.end() ? NAN : it->second;
            };
        };
        auto max_extra = [&](const char* key) {
            const auto v = series(extra(key));
            return *std::max_element(v.begin(), v.end());
        };
        const auto lmin = series([](const EquivalenceReport& r) { return r.lambda_min; });
        const auto lmax = series([](const EquivalenceReport& r) { return r.lambda_max; });

        if (st.rfind("thm32", 0) == 0) {
            spread_check("lambda_max", lmax);
            spread_check("lambda_min", lmin);
            const double ps = max_extra("patch_sum_ratio");
            add(st, "patch sum <= n |v|^2", ps <= 1.0 + 1e-10, "max ratio " + format_number(ps));
            add(st, "constraint residual <= 1e-10", max_extra("constraint_residual") <= 1e-10, "");
            if (n == 2 && reps.size() > 1) {
                const auto c = series(extra("contrast"));
                double growth = INFINITY;
                for (std::size_t i = 1; i < c.size(); ++i) growth = std::min(growth, c[i] / c[i - 1]);
                add(st, "contrast growth >= 1.5 per level", growth >= 1.5, "min growth " + format_number(growth));
            }
        } else if (st == "faermann" || st == "prop41") {
            spread_check("lambda_max", lmax);
        } else if (st == "lemma31") {
            spread_check("lambda_max", lmax);
            spread_check("sampled ratio", series(extra("sample_ratio_max")));
            const double l1 = max_extra("l1_ratio_max");
            add(st, "l1 bound", l1 <= 1.0, "max ratio " + format_number(l1));
        } else if (st.rfind("cor33", 0) == 0 || st.rfind("cor43", 0) == 0) {
            spread_check("lambda_max", lmax);
            spread_check("lambda_min", lmin);
            const double res = max_extra("hypothesis_residual");
            add(st, "projector hypothesis residual <= 1e-10", res <= 1e-10, "max residual " + format_number(res));
        } else if (st == "thm42") {
            std::vector<double> kappa;
            for (std::size_t i = 0; i < lmin.size(); ++i) kappa.push_back(lmax[i] / lmin[i]);
            spread_check("lambda_max/lambda_min", kappa);
            add(st, "constraint residual <= 1e-10", max_extra("constraint_residual") <= 1e-10, "");
            if (n == 2 && reps.size() > 1) {
                const auto c = series(extra("contrast"));
                bool growing = true;
                for (std::size_t i = 1; i < c.size(); ++i) growing = growing && c[i] > c[i - 1];
                add(st, "indicator contrast grows", growing, "last " + format_number(c.back()));
            }
        } else if (st == "claim") {
            spread_check("lambda_max", lmax);
            spread_check("sampled ratio", series(extra("sample_ratio_max")));
        } else if (st.rfind("poincare", 0) == 0) {
            spread_check("lambda_max", lmax);
        }
    }
    return checks;
}

RunManifest run(const ExperimentConfig& config, std::ostream* log)
{
    using clock = std::chrono::steady_clock;
    RunManifest manifest;
    manifest.config = config;
    for (const auto& rc : config.runs) {
        validate(rc);
        RunResult result;
        result.config = rc;
        const auto t0 = clock::now();
        LocalizationStudy study(rc.geometry, make_geometry(rc.geometry), rc.quad_order, rc.seed);
        if (rc.oracle_checks && !rc.statements.empty()) {
            try {
                result.oracle = oracle_spot_checks(study.hierarchy().mesh(0), rc.quad_order);
            } catch (const Error& e) {
                StatementOutcome o;
                o.statement = "quadrature";
                o.error = e.what();
                result.outcomes.push_back(o);
            }
        }
        for (const auto& st : rc.statements) {
            for (int level = rc.level_min; level <= rc.level_max; ++level) {
                StatementOutcome o;
                o.statement = st;
                o.level = level;
                const auto s0 = clock::now();
                try {
                    o.report = run_statement(study, st, level);
                    o.ok = true;
                } catch (const Error& e) {
                    o.error = e.what();
                } catch (const std::bad_alloc&) {
                    o.error = "out of memory";
                }
                o.seconds = std::chrono::duration<double>(clock::now() - s0).count();
                if (log) {
                    *log << run_name(rc) << ' ' << st << " level " << level << ": ";
                    if (o.ok)
                        *log << "lambda [" << format_number(o.report.lambda_min) << ", " << format_number(o.report.lambda_max) << "]";
                    else
                        *log << "FAILED (" << o.error << ")";
                    *log << " in " << format_number(std::round(o.seconds * 100) / 100) << " s\n";
                }
                result.outcomes.push_back(std::move(o));
            }
        }
        result.checks = evaluate_thresholds(result);
        result.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        manifest.runs.push_back(std::move(result));
    }
    return manifest;
}

void write_csv(std::ostream& out, const RunResult& run)
{
    std::set<std::string> keys;
    for (const auto& o : run.outcomes)
        for (const auto& [k, v] : o.report.extras) keys.insert(k);
    out << "statement,level,h,lambda_min,lambda_max,dim,ambient_dim,constraints";
    for (const auto& k : keys) out << ',' << k;
    out << ",status\n";
    for (const auto& o : run.outcomes) {
        if (o.statement == "quadrature") continue;
        const auto& r = o.report;
        out << o.statement << ',' << o.level;
        if (o.ok) {
            out << ',' << format_number(r.h) << ',' << format_number(r.lambda_min) << ',' << format_number(r.lambda_max) << ',' << r.dim << ','
                << r.ambient_dim << ',' << r.constraints;
            for (const auto& k : keys) {
                const auto it = r.extras.find(k);
                out << ',' << (it == r.extras.end() ? "" : format_number(it->second));
            }
            out << ",ok\n";
        } else {
            for (std::size_t i = 0; i < 6 + keys.size(); ++i) out << ',';
            out << ",failed\n";
        }
    }
}

std::string manifest_json(const RunManifest& m)
{
    json j;
    j["tool"] = "tracenorm";
    j["version"] = version();
    j["out"] = m.config.out;
    j["exit_code"] = m.exit_code();
    json runs = json::array();
    for (const auto& r : m.runs) {
        json jr;
        jr["name"] = run_name(r.config);
        jr["config"] = {{"geometry", r.config.geometry}, {"levels", {r.config.level_min, r.config.level_max}}, {"statements", r.config.statements},
            {"quad_order", r.config.quad_order}, {"seed", r.config.seed}, {"oracle_checks", r.config.oracle_checks}};
        jr["wall_seconds"] = r.seconds;
        json oracle = json::array();
        for (const auto& o : r.oracle)
            oracle.push_back({{"pair_class", o.pair_class}, {"a", o.a}, {"b", o.b}, {"value", o.value}, {"reference", o.reference}, {"rel_error", o.rel_error},
                {"run_order_rel_error", o.run_order_rel_error}});
        jr["oracle_spot_checks"] = oracle;
        json reports = json::array();
        for (const auto& o : r.outcomes) {
            json jo;
            jo["statement"] = o.statement;
            jo["level"] = o.level;
            jo["status"] = o.ok ? "ok" : "failed";
            if (!o.ok) jo["reason"] = o.error;
            if (o.ok) {
                jo["h"] = o.report.h;
                jo["lambda_min"] = o.report.lambda_min;
                jo["lambda_max"] = o.report.lambda_max;
                jo["dim"] = o.report.dim;
                jo["ambient_dim"] = o.report.ambient_dim;
                jo["constraints"] = o.report.constraints;
                json extras = json::object();
                for (const auto& [k, v] : o.report.extras) extras[k] = v;
                jo["extras"] = extras;
            }
            jo["wall_seconds"] = o.seconds;
            reports.push_back(jo);
        }
        jr["reports"] = reports;
        json checks = json::array();
        for (const auto& c : r.checks) checks.push_back({{"statement", c.statement}, {"criterion", c.criterion}, {"passed", c.passed}, {"detail", c.detail}});
        jr["thresholds"] = checks;
        runs.push_back(jr);
    }
    j["runs"] = runs;
    return j.dump(2) + "\n";
}

void write_outputs(const RunManifest& manifest)
{
    namespace fs = std::filesystem;
    const fs::path out(manifest.config.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    require(!ec && fs::is_directory(out), ErrorKind::invalid_input, "cannot create output directory '" + out.string() + "'");
    for (const auto& r : manifest.runs) {
        std::ofstream csv(out / (run_name(r.config) + ".csv"));
        require(csv.good(), ErrorKind::invalid_input, "cannot write to '" + out.string() + "'");
        write_csv(csv, r);
    }
    const std::string text = manifest_json(manifest);
    std::ofstream(out / "manifest.json") << text;
    write_plots(text, out.string());
}

// ---------------------------------------------------------------------------------------
// plots

namespace {

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Curve
{
    std::string label;
    std::string colour;
    bool dashed = false;
    std::vector<std::pair<double, double>> points;  // (h, value), positive only
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string decade_label(int k)
{
    if (k == 0) return "1";
    if (k == 1) return "10";
    return "1e" + std::to_string(k);
}

std::string render_svg(const std::string& title, const std::vector<Curve>& curves)
{
    const double W = 560, H = 380, left = 70, right = 150, top = 40, bottom = 50;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& c : curves)
        for (const auto& [x, y] : c.points) {
            xmin = std::min(xmin, std::log10(x));
            xmax = std::max(xmax, std::log10(x));
            ymin = std::min(ymin, std::log10(y));
            ymax = std::max(ymax, std::log10(y));
        }
    const int x0 = static_cast<int>(std::floor(xmin)), x1 = std::max(static_cast<int>(std::ceil(xmax)), x0 + 1);
    const int y0 = static_cast<int>(std::floor(ymin)), y1 = std::max(static_cast<int>(std::ceil(ymax)), y0 + 1);
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double h) { return left + (std::log10(h) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + ph - (std::log10(v) - y0) / (y1 - y0) * ph; };

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
    s << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = x0; k <= x1; ++k) {
        const double x = left + static_cast<double>(k - x0) / (x1 - x0) * pw;
        s << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(top + ph)
          << "\" stroke=\"#dddddd\"/>\n";
        s << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(top + ph + 16) << "\" text-anchor=\"middle\">" << decade_label(k) << "</text>\n";
    }
    for (int k = y0; k <= y1; ++k) {
        const double y = top + ph - static_cast<double>(k - y0) / (y1 - y0) * ph;
        s << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left + pw) << "\" y2=\"" << fmt(y)
          << "\" stroke=\"#dddddd\"/>\n";
        s << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << decade_label(k) << "</text>\n";
    }
    s << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(H - 12) << "\" text-anchor=\"middle\">h</text>\n";

    double ly = top + 10;
    for (const auto& c : curves) {
        if (c.points.empty()) continue;
        s << "<polyline fill=\"none\" stroke=\"" << c.colour << "\" stroke-width=\"2\"" << (c.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
        for (std::size_t i = 0; i < c.points.size(); ++i) s << (i ? " " : "") << fmt(px(c.points[i].first)) << ',' << fmt(py(c.points[i].second));
        s << "\"/>\n";
        for (const auto& [x, y] : c.points)
            s << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"3\" fill=\"" << c.colour << "\"/>\n";
        s << "<line x1=\"" << fmt(W - right + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(W - right + 36) << "\" y2=\"" << fmt(ly)
          << "\" stroke=\"" << c.colour << "\" stroke-width=\"2\"" << (c.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        s << "<text x=\"" << fmt(W - right + 42) << "\" y=\"" << fmt(ly + 4) << "\">" << xml_escape(c.label) << "</text>\n";
        ly += 18;
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace

std::vector<std::string> write_plots(const std::string& manifest_text, const std::string& out_dir)
{
    json m;
    try {
        m = json::parse(manifest_text);
    } catch (const json::exception& e) {
        fail(ErrorKind::invalid_input, std::string("malformed manifest: ") + e.what());
    }
    require(m.contains("runs") && m["runs"].is_array(), ErrorKind::invalid_input, "manifest has no runs");
    std::vector<std::string> files;
    for (const auto& run : m["runs"]) {
        const std::string name = run.at("name").get<std::string>();
        std::vector<std::string> order;
        for (const auto& rep : run.at("reports")) {
            const std::string st = rep.at("statement").get<std::string>();
            if (st != "quadrature" && std::find(order.begin(), order.end(), st) == order.end()) order.push_back(st);
        }
        for (const auto& st : order) {
            Curve lo{"lambda_min", "#1f77b4", false, {}}, hi{"lambda_max", "#d62728", false, {}}, contrast{"contrast", "#2ca02c", true, {}};
            int levels = 0;
            for (const auto& rep : run.at("reports")) {
                if (rep.at("statement") != st || rep.at("status") != "ok") continue;
                ++levels;
                const double h = rep.at("h").get<double>();
                if (h <= 0.0) continue;
                const double a = rep.at("lambda_min").get<double>(), b = rep.at("lambda_max").get<double>();
                if (a > 0.0) lo.points.push_back({h, a});
                if (b > 0.0) hi.points.push_back({h, b});
                if (rep.contains("extras") && rep["extras"].contains("contrast")) {
                    const double c = rep["extras"]["contrast"].get<double>();
                    if (c > 0.0) contrast.points.push_back({h, c});
                }
            }
            if (levels < 2 || (lo.points.empty() && hi.points.empty() && contrast.points.empty())) continue;
            const std::filesystem::path file = std::filesystem::path(out_dir) / (name + "_" + st + ".svg");
            std::ofstream out(file);
            require(out.good(), ErrorKind::invalid_input, "cannot write '" + file.string() + "'");
            out << render_svg(st + " (" + name + ")", {lo, hi, contrast});
            files.push_back(file.string());
        }
    }
    return files;
}

} // namespace tracenorm
