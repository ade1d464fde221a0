#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eigbranch/cli.hpp"

using namespace eigbranch;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "eigbranch_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_config(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("check-simple exit codes") {
    const auto ok = write_config("c41.json", R"({"problem": {"builtin": "ex41"}, "trivial": {"x": [1, 0], "lambda": 1}})");
    CHECK(run({"check-simple", "--config", ok}).code == 0);

    const auto ns = write_config("c44.json", R"({"trivial": {"x": [0, 1], "lambda": 0}, "problem": {"builtin": "ex44"}})");
    const Run r = run({"check-simple", "--config", ns});
    CHECK(r.code == 3);
    CHECK(r.out.find("NotSimple_Solvable") != std::string::npos);

    const auto bad = write_config(
        "bad.json", R"({"problem": {"inline": {"dim": 2, "l": [[1, 0, 0], [0, 1, 0]]}}, "trivial": {"x": [1, 0], "lambda": 1}})");
    CHECK(run({"check-simple", "--config", bad}).code == 1);

    const auto labelled = write_config("c43.json", R"({"problem": {"builtin": "ex43", "modes": 2}, "trivial": {"builtin": "circle1_pos"}})");
    CHECK(run({"check-simple", "--config", labelled}).code == 3);
}

TEST_CASE("strict config parsing") {
    CHECK_THROWS_AS(parse_config(R"({"problem": {"builtin": "ex41"}, "extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": {"builtin": "ex41", "colour": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": {"builtin": "ex41"}, "settings": {"h00": 0.1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": {"builtin": "ex41"}, "settings": {"h0": 5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": {"builtin": "ex41"}, "start": {"x": [1, 0, 0], "eps": 0, "lambda": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": {"builtin": "ex99"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": {"builtin": "ex41", "inline": {}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": {"inline": {"dim": 2, "l": [[1, 0], [0, 1]], "gram_g": [[1, 2], [2, 1]]}}})"),
                    ConfigError);

    const RunConfig a = parse_config(
        R"({"settings": {"R_max": 12, "secondary_branches": true}, "problem": {"modes": 3, "builtin": "ex42"}})");
    const RunConfig b = parse_config(
        R"({"problem": {"builtin": "ex42", "modes": 3}, "settings": {"secondary_branches": true, "R_max": 12}})");
    CHECK(a.settings.escape_radius == 12);
    CHECK(b.settings.escape_radius == 12);
    CHECK(a.settings.secondary_branches);
    CHECK(a.problem().dim() == b.problem().dim());
}

TEST_CASE("trace writes a table and a summary; table round trips") {
    const auto cfg = write_config("t41.json", R"({"problem": {"builtin": "ex41"}, "start": {"x": [1, 0], "eps": 0, "lambda": 1}})");
    const fs::path out = scratch() / "t41";
    const Run r = run({"trace", "--config", cfg, "--out", out.string(), "--orient", "-"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"termination\": \"ClosedLoop\"") != std::string::npos);
    CHECK(fs::exists(out / "summary.json"));

    std::ifstream in(out / "branch.csv");
    const BranchTable t = read_branch_csv(in);
    const Problem p = make_builtin("ex41").problem;
    CHECK(t.points.size() > 10);
    for (const auto& s : t.points) CHECK(max_abs(augmented_residual(p, s)) <= 1e-10);
    CHECK(t.points[1].eps < 0.0);

    const Run cmp = run({"compare-oracle", "--config", cfg, "--branch", (out / "branch.csv").string()});
    CHECK(cmp.code == 0);
}

TEST_CASE("compare-oracle: planted defect and mismatched families") {
    const auto cfg = write_config("t41b.json", R"({"problem": {"builtin": "ex41"}})");
    const fs::path out = scratch() / "t41b";
    REQUIRE(run({"trace", "--config", cfg, "--out", out.string()}).code == 0);

    std::ifstream in(out / "branch.csv");
    std::stringstream text;
    text << in.rdbuf();
    std::string csv = text.str();
    // bump the eps value of row 5 by 1e-3
    std::istringstream rows(csv);
    std::ostringstream planted;
    std::string line;
    for (int k = 0; std::getline(rows, line); ++k) {
        if (k == 5) {
            auto cells = line;
            const auto c1 = cells.find(',', cells.find(',') + 1);
            const auto c2 = cells.find(',', c1 + 1);
            const double eps = std::stod(cells.substr(c1 + 1, c2 - c1 - 1)) + 1e-3;
            line = cells.substr(0, c1 + 1) + std::to_string(eps) + cells.substr(c2);
        }
        planted << line << '\n';
    }
    const fs::path bad = scratch() / "planted.csv";
    std::ofstream(bad) << planted.str();
    CHECK(run({"compare-oracle", "--config", cfg, "--branch", bad.string()}).code == 4);

    const auto other = write_config("m43.json", R"({"problem": {"builtin": "ex43", "modes": 2}, "compare": {"families": ["ex41"]}})");
    CHECK(run({"compare-oracle", "--config", other, "--branch", (out / "branch.csv").string()}).code == 1);
    const auto dims = write_config("d43.json", R"({"problem": {"builtin": "ex43", "modes": 2}})");
    CHECK(run({"compare-oracle", "--config", dims, "--branch", (out / "branch.csv").string()}).code == 1);
}

TEST_CASE("trace errors map to exit codes") {
    const auto singular =
        write_config("s43.json", R"({"problem": {"builtin": "ex43", "modes": 2}, "start": {"trivial": "circle1_pos"}})");
    const Run r = run({"trace", "--config", singular, "--out", (scratch() / "s43").string()});
    CHECK(r.code == 3);
    CHECK_FALSE(r.err.empty());

    const auto cfg = write_config("t41c.json", R"({"problem": {"builtin": "ex41"}})");
    CHECK(run({"trace", "--config", cfg, "--settings", "h0=abc"}).code == 1);
    CHECK(run({"trace", "--config", cfg, "--settings", "unknown=1"}).code == 1);
    CHECK(run({"trace", "--config", cfg, "--orient", "x"}).code == 1);
    CHECK(run({"trace"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"trace", "--config", (scratch() / "missing.json").string()}).code == 1);
}

TEST_CASE("scan output and the nonlinear refusal") {
    const auto cfg = write_config("s41.json", R"({"problem": {"builtin": "ex41"}, "scan": {"grid": 64}})");
    const fs::path out = scratch() / "s41";
    REQUIRE(run({"scan", "--config", cfg, "--out", out.string()}).code == 0);
    std::ifstream in(out / "contours.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "eps,lambda");
    std::string sep;
    std::getline(in, sep);
    CHECK(sep == "# polyline 0 closed");

    const auto small = write_config("s41s.json", R"({"problem": {"builtin": "ex41"}, "scan": {"grid": 4}})");
    CHECK(run({"scan", "--config", small, "--out", out.string()}).code == 1);
}

TEST_CASE("secondary branches flag writes extra tables") {
    const auto cfg = write_config("t42.json", R"({"problem": {"builtin": "ex42", "modes": 8}, "start": {"builtin": "one"}})");
    const fs::path out = scratch() / "t42";
    REQUIRE(run({"trace", "--config", cfg, "--out", out.string(), "--secondary-branches", "--settings", "R_max=10"}).code ==
            0);
    CHECK(fs::exists(out / "secondary_0.csv"));
    CHECK(fs::exists(out / "secondary_1.csv"));
}

TEST_CASE("list-examples") {
    const Run r = run({"list-examples"});
    CHECK(r.code == 0);
    CHECK(r.out.find("ex44") != std::string::npos);
}
