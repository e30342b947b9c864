#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "hfh/error.hpp"
#include "hfh/report.hpp"

using namespace hfh;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::string svg_of(const PipelineResult& r)
{
    std::ostringstream out;
    emit_svg_tangle(r, out);
    return out.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing")
{
    const RunConfig c = parse(R"(# comment
model = henon_cubic
param.a = 2.5   # trailing comment
guess = 0.1, -0.2
depth = auto
box = -4, -4, 4, 4
wide_scan = yes
n_scan = 6
crossing_cap = 1000
out = somewhere
)");
    CHECK(c.model == "henon_cubic");
    REQUIRE(c.params.size() == 1);
    CHECK(c.params[0].name == "a");
    CHECK(c.params[0].value == 2.5);
    CHECK(c.guess.x == 0.1);
    CHECK(c.guess.y == -0.2);
    CHECK(c.depth == 0);
    CHECK(c.box.lo.x == -4.0);
    CHECK(c.box.hi.y == 4.0);
    CHECK(c.wide_scan);
    CHECK(c.n_scan == 6);
    CHECK(c.crossing_cap == 1000);
    CHECK(c.out_dir == "somewhere");

    CHECK(parse("model = standard_map\ndepth = 12\n").depth == 12);
    CHECK_THROWS_WITH_AS(parse("model = standard_map\nfoo = 1\n"), "line 2: unknown key 'foo'", ConfigError);
    CHECK_THROWS_AS(parse("model = standard_map\ndelta = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse("model = standard_map\ndelta = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("model = standard_map\ndepth = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("model = standard_map\ndepth = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("model = standard_map\nbox = 1, 2, 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("model = standard_map\nbox = 1, 1, 0, 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("model = standard_map\nwide_scan = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse("param.k = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("model standard_map\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/hfh.cfg"), ConfigError);
}

TEST_CASE("pipeline errors name their step")
{
    RunConfig flat = testing::standard_config(0.0);
    try {
        run_pipeline(flat);
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("step 0") == 0);
        CHECK(std::string(e.what()).find("not hyperbolic") != std::string::npos);
    }

    RunConfig shallow = testing::standard_config();
    shallow.depth = 1;
    try {
        run_pipeline(shallow);
        FAIL("expected a window error");
    } catch (const WindowError& e) {
        CHECK(std::string(e.what()).find("step 1") == 0);
        CHECK(std::string(e.what()).find("window insufficient") != std::string::npos);
    }

    RunConfig unknown;
    unknown.model = "no_such_map";
    CHECK_THROWS_AS(run_pipeline(unknown), ConfigError);
}

TEST_CASE("validate stops after the primary classes")
{
    RunConfig c = testing::standard_config(2.0);
    const PipelineResult r = run_pipeline(c, 3);
    CHECK(r.last_step == 3);
    CHECK(r.classes.size() == 24);
    CHECK_FALSE(r.complex);
    CHECK(r.generators.empty());
}

TEST_CASE("tangle SVG is deterministic with one marker per point")
{
    const auto& r = testing::standard_run();
    const std::string a = svg_of(r);
    CHECK(a == svg_of(r));
    std::size_t points = 0, primary = 0;
    for (const auto& t : r.tangles) {
        points += t.points.size();
        for (char f : t.primary) primary += f;
    }
    CHECK(count(a, "<circle class=\"hp") == points);
    CHECK(count(a, "<circle class=\"hp primary\"") == primary);
    CHECK(count(a, "<polyline class=\"u\"") == 2);
    CHECK(count(a, "<polyline class=\"s\"") == 2);
    CHECK(count(a, "stroke-dasharray") == 1);
    CHECK(a.find(">x</text>") != std::string::npos);

    PipelineResult curves_only;
    curves_only.config = r.config;
    curves_only.manifolds = r.manifolds;
    const std::string b = svg_of(curves_only);
    CHECK(count(b, "<circle class=\"hp") == 0);
    CHECK(count(b, "<polyline") == 4);
}

TEST_CASE("reports are consistent with the run")
{
    const auto& r = testing::standard_run();
    const fs::path dir = scratch("hfh_test_reports");
    emit_reports(r, dir.string());
    for (const char* f : {"points.csv", "classes.csv", "complex.json", "homology.json", "report.json", "tangle.svg"}) {
        CHECK(fs::exists(dir / f));
    }
    const Json rep = read_json((dir / "report.json").string());
    CHECK(rep.at("sum_c").get<std::size_t>() == rep.at("primary_classes").get<std::size_t>());
    CHECK(rep.at("primary_classes").get<std::size_t>() == r.classes.size());
    CHECK(rep.at("pairs").size() == 4);
    CHECK(rep.at("wide_scan").at("violations").get<std::size_t>() == 0);
    CHECK(rep.at("homology").at("torsion_free").get<bool>());
    CHECK(rep.at("homology").at("morse").at("all_pass").get<bool>());
    CHECK(rep.at("warnings").is_array());
    for (const auto& w : rep.at("warnings")) CHECK_FALSE(w.get<std::string>().empty());
    CHECK(rep.at("timings").size() == 8);

    std::ifstream classes(dir / "classes.csv");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(classes, line)) ++lines;
    CHECK(lines == r.classes.size() + 1);
}

TEST_CASE("serialized steps replay to identical results")
{
    const auto& r = testing::standard_run();
    const fs::path steps = testing::step_dir();
    for (int s = 0; s <= 7; ++s) {
        bool found = false;
        for (const auto& e : fs::directory_iterator(steps)) {
            found = found || e.path().filename().string().rfind("step" + std::to_string(s) + "_", 0) == 0;
        }
        CHECK(found);
    }
    const Json bigons = read_json((steps / "step5_bigons.json").string());
    const auto gens = generators_from_json(bigons.at("generators"));
    REQUIRE(gens.size() == r.complex->generators.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
        CHECK(gens[i].maslov == r.complex->generators[i].maslov);
        CHECK(gens[i].point.u_tau == r.complex->generators[i].point.u_tau);
        CHECK(gens[i].point.s_tau == r.complex->generators[i].point.s_tau);
    }
    const ChainComplexData again = assemble_complex(gens, terms_from_json(bigons.at("terms")));
    for (int k = -3; k <= 4; ++k) CHECK(again.d(k).data == r.complex->d(k).data);

    const HomologyResult h = homology_of(graded_from_json(read_json((steps / "step6_complex.json").string())));
    CHECK(h.betti == r.homology->betti);
    CHECK(h.chain_ranks == r.homology->chain_ranks);
    CHECK(h.boundary_ranks == r.homology->boundary_ranks);
}

TEST_CASE("matrix JSON input")
{
    const IntMatrix m = matrix_from_json(Json::parse("[[1, 2], [3, 4]]"));
    CHECK(m.rows == 2);
    CHECK(m.cols == 2);
    CHECK(m(1, 0) == 3);
    CHECK(matrix_from_json(Json::parse(R"({"matrix": [[5]]})"))(0, 0) == 5);
    CHECK(matrix_from_json(Json::parse("[]")).rows == 0);
    CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 2], [3]]")), ConfigError);
    CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1.5]]")), ConfigError);
    const Json s = snf_to_json(smith_normal_form(matrix_from_json(Json::parse("[[2, 4], [6, 8]]"))));
    CHECK(s.at("invariant_factors") == Json::parse("[2, 4]"));
    CHECK(s.at("rank") == 2);
}
