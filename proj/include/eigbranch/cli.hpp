#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eigbranch/builtins.hpp"
#include "eigbranch/continuation.hpp"
#include "eigbranch/scan.hpp"
#include "eigbranch/simplicity.hpp"

namespace eigbranch {

/// Malformed or inconsistent configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitVerdict = 3, kExitTolerance = 4 };

struct RunConfig {
    std::optional<Builtin> builtin;
    std::optional<Problem> inline_problem;

    std::optional<SolutionPoint> trivial;  // check-simple target, eps = 0
    std::optional<SolutionPoint> start;    // trace start
    int orient = 1;
    ContinuationSettings settings;

    ScanWindow window;
    ScanGrid grid;
    bool scan_parallel = true;

    std::vector<std::string> families;  // empty: every family of the builtin
    double tolerance = 1e-8;
    std::string branch_file;

    const Problem& problem() const;
};

/// Strict: unknown keys, wrong types and inconsistent matrices throw ConfigError.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);

struct BranchTable {
    std::vector<std::size_t> steps;
    std::vector<double> arclengths;
    std::vector<SolutionPoint> points;
};

/// Header `step,arclength,eps,lambda,x0,...`; numbers with 17 significant digits.
void write_branch_csv(std::ostream& os, const Branch& b);
/// Throws ConfigError on a malformed table.
BranchTable read_branch_csv(std::istream& is);

/// Summary document of a trace (termination, events, crossings, winding).
std::string branch_summary_json(const Problem& p, const TraceResult& r);
/// Flat key-value JSON object.
std::string simplicity_report_json(const SimplicityReport& r);
/// `eps,lambda` rows; `# polyline k closed|open` and `# isolated k` separators.
void write_polylines(std::ostream& os, const ScanResult& r);

/// Runs one subcommand; args exclude the program name. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eigbranch
