#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "aniso/json_io.hpp"
#include "aniso/measures.hpp"
#include "aniso/runner.hpp"

using namespace aniso;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("aniso_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void put(const std::string& path, const std::string& text) { write_file(path, text); }

}  // namespace

TEST_CASE("matrix and set JSON round trips") {
    const std::string mtext = R"({"matrix": [[2.0, 1.0], [1.0, 2.0]]})";
    const SpdMatrix a = parse_spd_json(mtext);
    CHECK(a.entries()(0, 1) == doctest::Approx(1.0));

    const SetRegion h = parse_set_json(R"({"type":"halfspace","omega":[0.0,1.0],"t":0.25})");
    REQUIRE(h.as_halfspace() != nullptr);
    const SetRegion h2 = parse_set_json(set_to_json(h));
    CHECK(h2.as_halfspace()->t() == doctest::Approx(0.25));

    const SetRegion box = parse_set_json(R"({"type":"box","lo":[-1.0,"-inf"],"hi":[1.0,"inf"]})");
    REQUIRE(box.as_box() != nullptr);
    CHECK(box.as_box()->lo()[1] == -std::numeric_limits<double>::infinity());
    const SetRegion box2 = parse_set_json(set_to_json(box));
    CHECK(box2.as_box()->hi()[0] == doctest::Approx(1.0));

    const SetRegion poly = parse_set_json(
        R"({"type":"polytope","constraints":[{"omega":[1,0],"t":1},{"omega":[-1,0],"t":1},{"omega":[0,-1],"t":0}]})");
    REQUIRE(poly.as_polytope() != nullptr);
    CHECK(poly.as_polytope()->constraints().size() == 3);

    CHECK_THROWS_AS(parse_set_json(R"({"type":"banana"})"), InputError);
}

TEST_CASE("iso-check command on the extremal half-space") {
    TempDir dir;
    put(dir.file("a.json"), R"({"matrix": [[4.0, 0.0], [0.0, 1.0]]})");
    put(dir.file("h.json"), R"({"type":"halfspace","omega":[0.0,1.0],"t":0.0})");

    RunConfig cfg;
    cfg.command = "iso-check";
    cfg.matrix_path = dir.file("a.json");
    cfg.set_path = dir.file("h.json");
    cfg.out_path = dir.file("report.json");
    CHECK(run(cfg) == 0);

    const json rep = json::parse(read_file(cfg.out_path));
    CHECK(std::fabs(rep["deficit"].get<double>()) < 1e-9);
    CHECK(rep["perimeter"]["method"] == "closed_form");
}

TEST_CASE("iso-check emits the deficit-vs-mass curve") {
    TempDir dir;
    put(dir.file("a.json"), R"({"matrix": [[4.0, 0.0], [0.0, 1.0]]})");
    put(dir.file("h.json"), R"({"type":"halfspace","omega":[0.0,1.0],"t":0.0})");
    RunConfig cfg;
    cfg.command = "iso-check";
    cfg.matrix_path = dir.file("a.json");
    cfg.set_path = dir.file("h.json");
    cfg.out_path = dir.file("r.json");
    cfg.csv_path = dir.file("curve.csv");
    REQUIRE(run(cfg) == 0);
    const std::string csv = read_file(cfg.csv_path);
    CHECK(csv.rfind("mass,bound,flat_deficit,steep_deficit\n", 0) == 0);
    int rows = -1;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 39);
}

TEST_CASE("reports are byte-identical across runs") {
    TempDir dir;
    put(dir.file("a.json"), R"({"matrix": [[2.0, 1.0], [1.0, 2.0]]})");
    put(dir.file("e.json"), R"({"type":"box","lo":[-0.6,-0.4],"hi":[0.8,1.0]})");

    RunConfig cfg;
    cfg.command = "symmetrize";
    cfg.matrix_path = dir.file("a.json");
    cfg.set_path = dir.file("e.json");
    cfg.direction = "0.3,-0.95";
    cfg.grid = 65;
    cfg.out_path = dir.file("r1.json");
    cfg.csv_path = dir.file("p1.csv");
    REQUIRE(run(cfg) == 0);
    cfg.out_path = dir.file("r2.json");
    cfg.csv_path = dir.file("p2.csv");
    REQUIRE(run(cfg) == 0);
    CHECK(read_file(dir.file("r1.json")) == read_file(dir.file("r2.json")));
    CHECK(read_file(dir.file("p1.csv")) == read_file(dir.file("p2.csv")));

    const std::string csv = read_file(dir.file("p1.csv"));
    CHECK(csv.rfind("z,h,p_E,p_Es\n", 0) == 0);
}

TEST_CASE("emitted subgraph JSON reloads with matching mass") {
    TempDir dir;
    put(dir.file("a.json"), R"({"matrix": [[2.0, 1.0], [1.0, 2.0]]})");
    put(dir.file("e.json"), R"({"type":"box","lo":[-0.7,-0.5],"hi":[0.7,0.9]})");

    RunConfig cfg;
    cfg.command = "symmetrize";
    cfg.matrix_path = dir.file("a.json");
    cfg.set_path = dir.file("e.json");
    cfg.direction = "0,-1";
    cfg.grid = 129;
    cfg.out_path = dir.file("rep.json");
    REQUIRE(run(cfg) == 0);

    const json rep = json::parse(read_file(cfg.out_path));
    const SetRegion reloaded = parse_set_json(rep["symmetrized_set"].dump());
    REQUIRE(reloaded.as_subgraph() != nullptr);
    const SpdMatrix a = parse_spd_json(read_file(dir.file("a.json")));
    QuadratureConfig qc;
    const double m = mass(a, reloaded, qc).value;
    CHECK(std::fabs(m - rep["mass_after"].get<double>()) < 1e-10);
}

TEST_CASE("counterexample command emits the frozen CSV columns") {
    TempDir dir;
    RunConfig cfg;
    cfg.command = "counterexample";
    cfg.ce_a = 1.0;
    cfg.ce_b = 0.5;
    cfg.ce_c = 1.0;
    cfg.alphas = "0.2,0.1,0.05";
    cfg.grid = 401;
    cfg.out_path = dir.file("ce.json");
    cfg.csv_path = dir.file("ce.csv");
    REQUIRE(run(cfg) == 0);

    const std::string csv = read_file(cfg.csv_path);
    CHECK(csv.rfind("alpha,P_E,P_Es,error_term,slope1,slope2\n", 0) == 0);
    int rows = -1;  // header
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 3);

    const json rep = json::parse(read_file(cfg.out_path));
    CHECK(rep["strict_increase"] == true);
}

TEST_CASE("usage errors exit with status 1") {
    RunConfig cfg;
    cfg.command = "measure";
    CHECK(run(cfg) == 1);  // missing --matrix
    cfg.command = "no-such-command";
    CHECK(run(cfg) == 1);
    cfg.command = "measure";
    cfg.matrix_path = "/nonexistent/matrix.json";
    cfg.set_path = "/nonexistent/set.json";
    CHECK(run(cfg) == 1);

    TempDir dir;
    put(dir.file("bad.json"), "{not json");
    put(dir.file("indef.json"), R"({"matrix": [[1.0, 2.0], [2.0, 1.0]]})");
    put(dir.file("h.json"), R"({"type":"halfspace","omega":[0,1],"t":0})");
    cfg.matrix_path = dir.file("bad.json");
    cfg.set_path = dir.file("h.json");
    CHECK(run(cfg) == 1);
    cfg.matrix_path = dir.file("indef.json");
    CHECK(run(cfg) == 1);
}

TEST_CASE("direction-audit on an eigenvector reports decrease") {
    TempDir dir;
    put(dir.file("a.json"), R"({"matrix": [[2.0, 1.0], [1.0, 2.0]]})");
    RunConfig cfg;
    cfg.command = "direction-audit";
    cfg.matrix_path = dir.file("a.json");
    cfg.direction = "1,1";
    cfg.out_path = dir.file("audit.json");
    CHECK(run(cfg) == 0);
    const json rep = json::parse(read_file(cfg.out_path));
    CHECK(rep["is_eigen"] == true);
    CHECK(rep["gradient_norm"].get<double>() < 1e-10);
    CHECK(rep["eigenvalue"].get<double>() == doctest::Approx(3.0));
}
