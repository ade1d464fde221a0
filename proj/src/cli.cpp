#include "eigbranch/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace eigbranch {

using nlohmann::json;

const Problem& RunConfig::problem() const {
    if (builtin) return builtin->problem;
    return *inline_problem;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

void require_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where + ": not finite");
    return d;
}

Vector vector_of(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    Vector out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

DenseMatrix matrix_of(const json& v, std::size_t dim, const std::string& where) {
    if (!v.is_array() || v.size() != dim) throw ConfigError(where + ": expected " + std::to_string(dim) + " rows");
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < dim; ++i) {
        rows.push_back(vector_of(v[i], where + "[" + std::to_string(i) + "]"));
        if (rows.back().size() != dim)
            throw ConfigError(where + ": row " + std::to_string(i) + " has " + std::to_string(rows.back().size()) +
                              " entries, matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    return DenseMatrix::from_rows(rows);
}

std::pair<double, double> range_of(const json& v, const std::string& where) {
    const Vector r = vector_of(v, where);
    if (r.size() != 2 || !(r[1] > r[0])) throw ConfigError(where + ": expected [min, max] with min < max");
    return {r[0], r[1]};
}

Problem inline_problem(const json& j) {
    require_keys(j, "problem.inline", {"dim", "l", "c", "n_matrix", "gram_g", "gram_h"});
    if (!j.contains("dim") || !j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0)
        throw ConfigError("problem.inline.dim: expected a positive integer");
    const std::size_t dim = j["dim"].get<std::size_t>();
    if (!j.contains("l")) throw ConfigError("problem.inline: missing 'l'");
    DenseMatrix l = matrix_of(j["l"], dim, "problem.inline.l");
    DenseMatrix c = j.contains("c") ? matrix_of(j["c"], dim, "problem.inline.c") : DenseMatrix::identity(dim);
    NonlinearMap n = j.contains("n_matrix") ? NonlinearMap::linear(matrix_of(j["n_matrix"], dim, "problem.inline.n_matrix"))
                                            : NonlinearMap::zero(dim);
    try {
        GramMetric g = j.contains("gram_g") ? GramMetric(matrix_of(j["gram_g"], dim, "problem.inline.gram_g"))
                                            : GramMetric::identity(dim);
        std::optional<GramMetric> h;
        if (j.contains("gram_h")) h.emplace(matrix_of(j["gram_h"], dim, "problem.inline.gram_h"));
        return Problem(std::move(l), std::move(c), std::move(n), std::move(g), std::move(h), "inline");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("problem.inline: ") + e.what());
    }
}

SolutionPoint point_of(const json& j, const RunConfig& cfg, const std::string& where, bool trivial) {
    const std::size_t dim = cfg.problem().dim();
    if (trivial)
        require_keys(j, where, {"x", "lambda", "builtin"});
    else
        require_keys(j, where, {"x", "eps", "lambda", "builtin", "trivial"});
    const bool named = j.contains("builtin") || j.contains("trivial");
    if (named) {
        if (j.contains("x") || j.contains("eps") || j.contains("lambda") || (j.contains("builtin") && j.contains("trivial")))
            throw ConfigError(where + ": give either a builtin label or explicit coordinates");
        if (!cfg.builtin) throw ConfigError(where + ": builtin labels need a builtin problem");
        const bool is_trivial = trivial || j.contains("trivial");
        const json& label = j.contains("builtin") ? j["builtin"] : j["trivial"];
        if (!label.is_string()) throw ConfigError(where + ": label must be a string");
        try {
            if (is_trivial) {
                const auto& t = cfg.builtin->trivial(label.get<std::string>());
                return {t.x, 0.0, t.lambda};
            }
            return cfg.builtin->start(label.get<std::string>()).point;
        } catch (const std::out_of_range& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    if (!j.contains("x") || !j.contains("lambda") || (!trivial && !j.contains("eps")))
        throw ConfigError(where + ": missing coordinates");
    SolutionPoint s{vector_of(j["x"], where + ".x"), trivial ? 0.0 : number(j["eps"], where + ".eps"),
                    number(j["lambda"], where + ".lambda")};
    if (s.x.size() != dim)
        throw ConfigError(where + ".x: expected " + std::to_string(dim) + " entries, got " + std::to_string(s.x.size()));
    return s;
}

void apply_setting(ContinuationSettings& s, const std::string& key, const json& v) {
    if (key == "secondary_branches") {
        if (!v.is_boolean()) throw ConfigError("settings.secondary_branches: expected true or false");
        s.secondary_branches = v.get<bool>();
        return;
    }
    if (!s.set(key, number(v, "settings." + key))) throw ConfigError("settings: unknown key '" + key + "'");
}

int parse_orient(const std::string& o) {
    if (o == "+" || o == "+1") return 1;
    if (o == "-" || o == "-1") return -1;
    throw ConfigError("orient: expected '+' or '-', got '" + o + "'");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(root, "config", {"problem", "trivial", "start", "orient", "settings", "scan", "compare"});
    if (!root.contains("problem")) throw ConfigError("config: missing 'problem'");

    RunConfig cfg;
    const json& pj = root["problem"];
    require_keys(pj, "problem", {"builtin", "modes", "inline"});
    if (pj.contains("builtin") == pj.contains("inline"))
        throw ConfigError("problem: give exactly one of 'builtin' and 'inline'");
    if (pj.contains("builtin")) {
        if (!pj["builtin"].is_string()) throw ConfigError("problem.builtin: expected a name");
        std::size_t modes = 0;
        if (pj.contains("modes")) {
            if (!pj["modes"].is_number_unsigned()) throw ConfigError("problem.modes: expected a positive integer");
            modes = pj["modes"].get<std::size_t>();
        }
        try {
            cfg.builtin.emplace(make_builtin(pj["builtin"].get<std::string>(), modes));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("problem: ") + e.what());
        }
    } else {
        if (pj.contains("modes")) throw ConfigError("problem.modes: only valid for builtin problems");
        cfg.inline_problem.emplace(inline_problem(pj["inline"]));
    }

    if (root.contains("trivial")) cfg.trivial = point_of(root["trivial"], cfg, "trivial", true);
    if (root.contains("start")) cfg.start = point_of(root["start"], cfg, "start", false);
    if (root.contains("orient")) {
        if (!root["orient"].is_string()) throw ConfigError("orient: expected \"+\" or \"-\"");
        cfg.orient = parse_orient(root["orient"].get<std::string>());
    }
    if (root.contains("settings")) {
        if (!root["settings"].is_object()) throw ConfigError("settings: expected an object");
        for (const auto& [key, value] : root["settings"].items()) apply_setting(cfg.settings, key, value);
    }
    if (root.contains("scan")) {
        const json& sj = root["scan"];
        require_keys(sj, "scan", {"eps_range", "lambda_range", "grid", "parallel"});
        if (sj.contains("eps_range")) std::tie(cfg.window.eps_min, cfg.window.eps_max) = range_of(sj["eps_range"], "scan.eps_range");
        if (sj.contains("lambda_range"))
            std::tie(cfg.window.lambda_min, cfg.window.lambda_max) = range_of(sj["lambda_range"], "scan.lambda_range");
        if (sj.contains("grid")) {
            const json& g = sj["grid"];
            if (g.is_number_unsigned()) {
                cfg.grid.eps_cells = cfg.grid.lambda_cells = g.get<std::size_t>();
            } else if (g.is_array() && g.size() == 2 && g[0].is_number_unsigned() && g[1].is_number_unsigned()) {
                cfg.grid.eps_cells = g[0].get<std::size_t>();
                cfg.grid.lambda_cells = g[1].get<std::size_t>();
            } else {
                throw ConfigError("scan.grid: expected n or [n_eps, n_lambda]");
            }
        }
        if (sj.contains("parallel")) {
            if (!sj["parallel"].is_boolean()) throw ConfigError("scan.parallel: expected true or false");
            cfg.scan_parallel = sj["parallel"].get<bool>();
        }
    }
    if (root.contains("compare")) {
        const json& cj = root["compare"];
        require_keys(cj, "compare", {"families", "tolerance", "branch"});
        if (cj.contains("families")) {
            if (!cj["families"].is_array()) throw ConfigError("compare.families: expected an array of labels");
            for (const auto& f : cj["families"]) {
                if (!f.is_string()) throw ConfigError("compare.families: expected strings");
                cfg.families.push_back(f.get<std::string>());
            }
        }
        if (cj.contains("tolerance")) {
            cfg.tolerance = number(cj["tolerance"], "compare.tolerance");
            if (!(cfg.tolerance > 0)) throw ConfigError("compare.tolerance: must be positive");
        }
        if (cj.contains("branch")) {
            if (!cj["branch"].is_string()) throw ConfigError("compare.branch: expected a path");
            cfg.branch_file = cj["branch"].get<std::string>();
        }
    }
    try {
        cfg.settings.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("settings: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw ConfigError("branch table line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

}  // namespace

void write_branch_csv(std::ostream& os, const Branch& b) {
    const std::size_t dim = b.points.empty() ? 0 : b.points.front().x.size();
    os << "step,arclength,eps,lambda";
    for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
    os << '\n';
    for (std::size_t k = 0; k < b.points.size(); ++k) {
        const auto& s = b.points[k];
        os << k << ',' << fmt(b.arclengths[k]) << ',' << fmt(s.eps) << ',' << fmt(s.lambda);
        for (double v : s.x) os << ',' << fmt(v);
        os << '\n';
    }
}

BranchTable read_branch_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("branch table: empty input");
    const auto header = split_csv(line);
    if (header.size() < 5 || header[0] != "step" || header[1] != "arclength" || header[2] != "eps" ||
        header[3] != "lambda")
        throw ConfigError("branch table: header must start with step,arclength,eps,lambda,x0");
    const std::size_t dim = header.size() - 4;
    for (std::size_t i = 0; i < dim; ++i)
        if (header[4 + i] != "x" + std::to_string(i)) throw ConfigError("branch table: unexpected column " + header[4 + i]);
    BranchTable t;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ConfigError("branch table line " + std::to_string(lineno) + ": expected " +
                              std::to_string(header.size()) + " columns");
        const double step = parse_double(cells[0], lineno);
        if (step < 0 || step != std::floor(step)) throw ConfigError("branch table line " + std::to_string(lineno) + ": bad step");
        t.steps.push_back(static_cast<std::size_t>(step));
        t.arclengths.push_back(parse_double(cells[1], lineno));
        SolutionPoint s;
        s.eps = parse_double(cells[2], lineno);
        s.lambda = parse_double(cells[3], lineno);
        for (std::size_t i = 0; i < dim; ++i) s.x.push_back(parse_double(cells[4 + i], lineno));
        t.points.push_back(std::move(s));
    }
    if (t.points.empty()) throw ConfigError("branch table: no rows");
    return t;
}

namespace {

json branch_json(const Branch& b, bool with_events) {
    json j;
    j["termination"] = to_string(b.termination);
    j["steps"] = b.points.size();
    j["arclength"] = b.arclength;
    if (b.termination == Termination::ClosedLoop)
        j["winding_number"] = winding_number(b);
    else
        j["winding_number"] = nullptr;
    if (!with_events) return j;
    json events = json::array();
    json crossings = json::array();
    std::size_t n_branch = 0;
    for (const auto& e : b.events) {
        events.push_back({{"kind", to_string(e.kind)},
                          {"step", e.step_index},
                          {"eps", e.location.eps},
                          {"lambda", e.location.lambda},
                          {"degraded", e.degraded},
                          {"x", e.location.x}});
        if (e.kind == EventKind::TrivialCrossing)
            crossings.push_back(e.location.lambda);
        else
            ++n_branch;
    }
    j["events"] = std::move(events);
    j["crossing_lambdas"] = std::move(crossings);
    j["trivial_crossings"] = j["crossing_lambdas"].size();
    j["branch_points"] = n_branch;
    return j;
}

}  // namespace

std::string branch_summary_json(const Problem& p, const TraceResult& r) {
    json j = branch_json(r.primary, true);
    j["problem"] = p.label();
    json sec = json::array();
    for (std::size_t k = 0; k < r.secondary.size(); ++k) {
        json s = branch_json(r.secondary[k], true);
        s["file"] = "secondary_" + std::to_string(k) + ".csv";
        sec.push_back(std::move(s));
    }
    j["secondary"] = std::move(sec);
    return j.dump(2);
}

std::string simplicity_report_json(const SimplicityReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["simple"] = r.simple();
    j["kernel_dim"] = r.kernel_dim;
    j["kernel_alignment"] = r.kernel_alignment;
    j["c_xstar_norm"] = r.c_xstar_norm;
    j["ls_residual"] = r.ls_residual;
    j["dpsi_margin"] = r.dpsi_margin;
    j["tol_rank"] = r.tolerances.rank;
    j["tol_alignment"] = r.tolerances.alignment;
    j["tol_c_zero"] = r.tolerances.c_zero;
    j["tol_solvable"] = r.tolerances.solvable;
    j["tol_margin"] = r.tolerances.margin;
    return j.dump(2);
}

void write_polylines(std::ostream& os, const ScanResult& r) {
    os << "eps,lambda\n";
    for (std::size_t k = 0; k < r.polylines.size(); ++k) {
        os << "# polyline " << k << (r.polylines[k].closed ? " closed" : " open") << '\n';
        for (const auto& v : r.polylines[k].vertices) os << fmt(v[0]) << ',' << fmt(v[1]) << '\n';
    }
    for (std::size_t k = 0; k < r.isolated.size(); ++k) {
        os << "# isolated " << k << '\n';
        os << fmt(r.isolated[k][0]) << ',' << fmt(r.isolated[k][1]) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct CommonFlags {
    std::string config;
    std::string out_dir = ".";
    std::string orient;
    std::vector<std::string> settings;
    bool secondary = false;
    std::string branch;
};

RunConfig resolve(const CommonFlags& f) {
    RunConfig cfg = load_config(f.config);
    if (!f.orient.empty()) cfg.orient = parse_orient(f.orient);
    for (const auto& kv : f.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--settings expects KEY=VAL, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "secondary_branches") {
            if (val != "true" && val != "false") throw ConfigError("secondary_branches expects true or false");
            cfg.settings.secondary_branches = val == "true";
            continue;
        }
        double d = 0;
        try {
            std::size_t used = 0;
            d = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw ConfigError("--settings " + key + ": not a number '" + val + "'");
        }
        if (!cfg.settings.set(key, d)) throw ConfigError("--settings: unknown key '" + key + "'");
    }
    if (f.secondary) cfg.settings.secondary_branches = true;
    if (!f.branch.empty()) cfg.branch_file = f.branch;
    try {
        cfg.settings.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("settings: ") + e.what());
    }
    return cfg;
}

std::filesystem::path prepare_out(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    return os;
}

int cmd_check_simple(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.trivial) throw ConfigError("check-simple needs a 'trivial' entry");
    const SimplicityReport r = check_simple(cfg.problem(), cfg.trivial->x, cfg.trivial->lambda);
    out << simplicity_report_json(r) << '\n';
    return r.simple() ? kExitOk : kExitVerdict;
}

int cmd_trace(const RunConfig& cfg, const std::string& out_dir, std::ostream& out) {
    SolutionPoint start;
    if (cfg.start)
        start = *cfg.start;
    else if (cfg.builtin && !cfg.builtin->starts.empty())
        start = cfg.builtin->starts.front().point;
    else
        throw ConfigError("trace needs a 'start' entry");
    const auto dir = prepare_out(out_dir);
    const TraceResult r = trace_with_secondary(cfg.problem(), start, cfg.orient, cfg.settings);
    {
        auto os = open_out(dir / "branch.csv");
        write_branch_csv(os, r.primary);
    }
    for (std::size_t k = 0; k < r.secondary.size(); ++k) {
        auto os = open_out(dir / ("secondary_" + std::to_string(k) + ".csv"));
        write_branch_csv(os, r.secondary[k]);
    }
    const std::string summary = branch_summary_json(cfg.problem(), r);
    {
        auto os = open_out(dir / "summary.json");
        os << summary << '\n';
    }
    out << summary << '\n';
    return kExitOk;
}

int cmd_scan(const RunConfig& cfg, const std::string& out_dir, std::ostream& out) {
    ScanOptions opt;
    opt.parallel = cfg.scan_parallel;
    ScanResult r;
    try {
        r = eigenpair_scan(cfg.problem(), cfg.window, cfg.grid, opt);
    } catch (const UnsupportedOperation& e) {
        throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scan: ") + e.what());
    }
    const auto dir = prepare_out(out_dir);
    {
        auto os = open_out(dir / "contours.csv");
        write_polylines(os, r);
    }
    json j;
    j["polylines"] = r.polylines.size();
    j["closed"] = std::count_if(r.polylines.begin(), r.polylines.end(), [](const Polyline& p) { return p.closed; });
    j["isolated"] = json::array();
    for (const auto& v : r.isolated) j["isolated"].push_back({v[0], v[1]});
    j["file"] = (dir / "contours.csv").string();
    out << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_compare_oracle(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.builtin) throw ConfigError("compare-oracle needs a builtin problem");
    if (cfg.branch_file.empty()) throw ConfigError("compare-oracle needs a branch file (--branch or compare.branch)");
    std::vector<const OracleFamily*> families;
    try {
        if (cfg.families.empty())
            for (const auto& f : cfg.builtin->families) families.push_back(&f);
        for (const auto& label : cfg.families) families.push_back(&cfg.builtin->family(label));
    } catch (const std::out_of_range& e) {
        throw ConfigError(e.what());
    }
    std::ifstream in(cfg.branch_file);
    if (!in) throw ConfigError("cannot read branch file '" + cfg.branch_file + "'");
    const BranchTable t = read_branch_csv(in);
    if (t.points.front().x.size() != cfg.problem().dim())
        throw ConfigError("branch file has dimension " + std::to_string(t.points.front().x.size()) + ", problem " +
                          cfg.builtin->name + " has " + std::to_string(cfg.problem().dim()));

    json j;
    double combined = 0.0;
    std::vector<double> nearest(t.points.size(), std::numeric_limits<double>::infinity());
    for (const auto* f : families) {
        double worst = 0.0;
        for (std::size_t k = 0; k < t.points.size(); ++k) {
            const double d = f->distance_to(t.points[k]);
            worst = std::max(worst, d);
            nearest[k] = std::min(nearest[k], d);
        }
        j["distance"][f->label()] = worst;
    }
    for (double d : nearest) combined = std::max(combined, d);
    double max_residual = 0.0;
    for (const auto& s : t.points) max_residual = std::max(max_residual, max_abs(augmented_residual(cfg.problem(), s)));
    j["combined_distance"] = combined;
    j["max_residual"] = max_residual;
    j["tolerance"] = cfg.tolerance;
    j["points"] = t.points.size();
    const bool pass = combined <= cfg.tolerance;
    j["pass"] = pass;
    out << j.dump(2) << '\n';
    return pass ? kExitOk : kExitTolerance;
}

void list_examples(std::ostream& out) {
    for (const auto& name : builtin_names()) {
        const std::size_t modes = (name == "ex42" || name == "ex43") ? 2 : 0;
        const Builtin b = make_builtin(name, modes);
        out << name << (modes ? "  (modes >= 1; listed for modes = 2)" : "") << "\n  trivial:";
        for (const auto& t : b.trivials) out << ' ' << t.name;
        out << "\n  start:";
        for (const auto& s : b.starts) out << ' ' << s.name;
        out << "\n  oracle:";
        for (const auto& f : b.families) out << ' ' << f.label();
        out << '\n';
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Branches of perturbed eigenvalue problems L x + eps N(x) = lambda C x"};
    app.require_subcommand(1);
    CommonFlags flags;
    auto add_common = [&](CLI::App* sub, bool trace_flags) {
        sub->add_option("--config", flags.config, "JSON run configuration")->required();
        sub->add_option("--settings", flags.settings, "KEY=VAL continuation setting override (repeatable)");
        if (trace_flags) {
            sub->add_option("--out", flags.out_dir, "output directory");
            sub->add_option("--orient", flags.orient, "initial direction: + or -");
            sub->add_flag("--secondary-branches", flags.secondary, "trace secondary branches at branch points");
        }
    };
    auto* check = app.add_subcommand("check-simple", "certify a trivial solution as simple");
    add_common(check, false);
    auto* trace = app.add_subcommand("trace", "pseudo-arclength trace of the branch through a start point");
    add_common(trace, true);
    auto* scan = app.add_subcommand("scan", "eigenpair set of a linear pencil on an (eps, lambda) grid");
    add_common(scan, false);
    scan->add_option("--out", flags.out_dir, "output directory");
    auto* compare = app.add_subcommand("compare-oracle", "distance of a branch file to the closed-form families");
    add_common(compare, false);
    compare->add_option("--branch", flags.branch, "branch table written by trace");
    auto* list = app.add_subcommand("list-examples", "built-in problems with their labels");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (list->parsed()) {
            list_examples(out);
            return kExitOk;
        }
        const RunConfig cfg = resolve(flags);
        if (check->parsed()) return cmd_check_simple(cfg, out);
        if (trace->parsed()) return cmd_trace(cfg, flags.out_dir, out);
        if (scan->parsed()) return cmd_scan(cfg, flags.out_dir, out);
        if (compare->parsed()) return cmd_compare_oracle(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SingularStart& e) {
        err << "singular start: " << e.what() << '\n';
        return kExitVerdict;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace eigbranch
