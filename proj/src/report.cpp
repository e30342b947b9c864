#include "hfh/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "hfh/error.hpp"

namespace hfh {

namespace {

Json big_json(const BigInt& v)
{
    if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max()) {
        return v.convert_to<long long>();
    }
    return to_string(v);
}

Json big_matrix_json(const BigMatrix& m)
{
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back(big_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json int_matrix_json(const IntMatrix& m)
{
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json orbit_json(const OrbitPoint& p)
{
    return Json{{"side_u", p.side_u}, {"side_s", p.side_s}, {"u_tau", p.u_tau}, {"s_tau", p.s_tau}};
}

OrbitPoint orbit_from_json(const Json& j)
{
    return {j.at("side_u").get<int>(), j.at("side_s").get<int>(), j.at("u_tau").get<double>(),
            j.at("s_tau").get<double>()};
}

Json query_json(const BigonQuery& b)
{
    return Json{{"p", orbit_json(b.p)},
                {"q", orbit_json(b.q)},
                {"sign", b.sign},
                {"comparison_branch", to_string(b.comparison_branch)},
                {"place_case", b.place_case},
                {"in_place_window", b.in_place_window},
                {"window_shift", b.window_shift}};
}

Json wide_scan_json(const WideScanReport& w)
{
    return Json{{"n_scan", w.n_scan},
                {"generator_pairs", w.generator_pairs},
                {"queries", w.queries},
                {"bigons", w.bigons},
                {"bound_violations", w.bound_violations},
                {"exclusivity_violations", w.exclusivity_violations},
                {"place_violations", w.place_violations},
                {"case4_bigons", w.case4_bigons},
                {"coefficient_mismatches", w.coefficient_mismatches},
                {"violations", w.violations()},
                {"details", w.details}};
}

std::string degree_key(int k) { return "d_" + std::to_string(k); }

}  // namespace

Json config_to_json(const RunConfig& c)
{
    Json params = Json::object();
    for (const auto& p : c.params) params[p.name] = p.value;
    return Json{{"model", c.model},
                {"params", params},
                {"square", c.square},
                {"guess", {c.guess.x, c.guess.y}},
                {"delta", c.delta},
                {"depth", c.depth == 0 ? Json("auto") : Json(c.depth)},
                {"max_depth", c.max_depth},
                {"h_max", c.h_max},
                {"theta_max", c.theta_max},
                {"alpha_min", c.alpha_min},
                {"proj_tol", c.proj_tol},
                {"end_margin", c.end_margin},
                {"n_scan", c.n_scan},
                {"box", {c.box.lo.x, c.box.lo.y, c.box.hi.x, c.box.hi.y}},
                {"vertex_cap", c.vertex_cap},
                {"crossing_cap", c.crossing_cap},
                {"symplectic_samples", c.symplectic_samples},
                {"wide_scan", c.wide_scan}};
}

Json generators_to_json(const std::vector<Generator>& generators)
{
    Json out = Json::array();
    for (std::size_t i = 0; i < generators.size(); ++i) {
        const auto& g = generators[i];
        out.push_back(Json{{"id", i},
                           {"pair", g.pair},
                           {"representative", g.representative},
                           {"maslov", g.maslov},
                           {"point", orbit_json(g.point)}});
    }
    return out;
}

std::vector<Generator> generators_from_json(const Json& j)
{
    std::vector<Generator> out;
    for (const auto& g : j) {
        out.push_back({g.at("pair").get<int>(), g.at("representative").get<std::size_t>(),
                       g.at("maslov").get<int>(), orbit_from_json(g.at("point"))});
    }
    return out;
}

Json bigons_to_json(const BigonData& data)
{
    Json terms = Json::array();
    for (const auto& t : data.terms) terms.push_back(Json{{"from", t.from}, {"to", t.to}, {"value", t.value}});
    Json bigons = Json::array();
    for (const auto& b : data.bigons) bigons.push_back(query_json(b));
    Json out{{"generators", generators_to_json(data.generators)}, {"terms", terms}, {"bigons", bigons}};
    out["wide_scan"] = data.wide_scan_run ? wide_scan_json(data.wide_scan) : Json(nullptr);
    return out;
}

std::vector<BoundaryTerm> terms_from_json(const Json& j)
{
    std::vector<BoundaryTerm> out;
    for (const auto& t : j) {
        out.push_back({t.at("from").get<std::size_t>(), t.at("to").get<std::size_t>(), t.at("value").get<int>()});
    }
    return out;
}

Json complex_to_json(const ChainComplexData& complex)
{
    Json degrees = Json::object();
    Json matrices = Json::object();
    for (int k = ChainComplexData::min_degree; k <= ChainComplexData::max_degree; ++k) {
        degrees[std::to_string(k)] = complex.degree(k);
    }
    for (int k = ChainComplexData::min_degree; k <= ChainComplexData::max_degree + 1; ++k) {
        const IntMatrix& d = complex.d(k);
        matrices[degree_key(k)] = Json{{"rows", d.rows}, {"cols", d.cols}, {"entries", int_matrix_json(d)}};
    }
    return Json{{"generators", generators_to_json(complex.generators)},
                {"degrees", degrees},
                {"boundary", matrices}};
}

GradedMatrices graded_from_json(const Json& j)
{
    GradedMatrices g;
    for (const auto& [key, ids] : j.at("degrees").items()) {
        const int k = std::stoi(key);
        if (k < -4 || k > 4) throw ConfigError("degree out of range in complex: " + key);
        g.chain_ranks[static_cast<std::size_t>(k + 4)] = ids.size();
    }
    for (const auto& [key, m] : j.at("boundary").items()) {
        const int k = std::stoi(key.substr(2));
        if (k < -3 || k > 4) throw ConfigError("boundary degree out of range: " + key);
        IntMatrix d = matrix_from_json(m.at("entries"));
        d.rows = m.at("rows").get<std::size_t>();
        d.cols = m.at("cols").get<std::size_t>();
        if (d.data.size() != d.rows * d.cols) throw ConfigError("malformed boundary matrix " + key);
        g.d[static_cast<std::size_t>(k + 4)] = std::move(d);
    }
    return g;
}

Json homology_to_json(const HomologyResult& h, const MorseReport& morse)
{
    Json degrees = Json::array();
    for (int k = -3; k <= 3; ++k) {
        const auto i = static_cast<std::size_t>(k + 4);
        Json torsion = Json::array();
        for (const auto& t : h.torsion[i]) torsion.push_back(big_json(t));
        degrees.push_back(Json{{"k", k},
                               {"c", h.c(k)},
                               {"h", h.h(k)},
                               {"boundary_rank", h.boundary_ranks[i]},
                               {"torsion", torsion}});
    }
    Json instances = Json::array();
    for (const auto& m : morse.instances) {
        instances.push_back(Json{{"item", m.item}, {"relation", m.relation}, {"j", m.j}, {"l", m.l},
                                 {"lhs", m.lhs}, {"rhs", m.rhs}, {"pass", m.pass}});
    }
    return Json{{"degrees", degrees},
                {"torsion_free", h.torsion_free()},
                {"euler_chain", h.euler_chain},
                {"euler_homology", h.euler_homology},
                {"morse", Json{{"all_pass", morse.all_pass()}, {"instances", instances}}}};
}

Json report_to_json(const PipelineResult& r)
{
    Json out;
    out["config"] = config_to_json(r.config);
    out["last_step"] = r.last_step;
    if (r.manifolds.model) {
        const auto& fp = r.manifolds.fp;
        out["model"] = r.manifolds.model->name();
        out["fixed_point"] = Json{{"x", fp.location.x}, {"y", fp.location.y}, {"lambda", fp.lambda}};
        out["symplectic"] = Json{{"samples", r.symplectic.samples},
                                 {"max_det_deviation", r.symplectic.max_det_deviation},
                                 {"max_inverse_error", r.symplectic.max_inverse_error}};
    }
    out["depth"] = r.depth;
    Json pairs = Json::array();
    for (const auto& p : r.pairs) {
        pairs.push_back(Json{{"pair", p.label},
                             {"points", p.points},
                             {"primary_points", p.primary_points},
                             {"window_points", p.window_points},
                             {"classes", p.classes},
                             {"witnesses", p.witnesses},
                             {"near_tangent", p.near_tangent},
                             {"low_accuracy", p.low_accuracy},
                             {"max_residual", p.max_residual},
                             {"min_angle", p.min_angle},
                             {"u_limit", p.u_limit},
                             {"s_limit", p.s_limit}});
    }
    out["pairs"] = pairs;
    out["primary_classes"] = r.classes.size();
    out["maslov_member_mismatches"] = r.maslov_member_mismatches;
    out["max_maslov_residual"] = r.max_maslov_residual;
    if (r.complex) {
        Json c = Json::object();
        std::size_t sum = 0;
        for (int k = -3; k <= 3; ++k) {
            c[std::to_string(k)] = r.complex->rank(k);
            sum += r.complex->rank(k);
        }
        out["chain_ranks"] = c;
        out["sum_c"] = sum;
    }
    if (r.bigons) {
        out["bigons"] = r.bigons->bigons.size();
        out["wide_scan"] = r.bigons->wide_scan_run ? wide_scan_json(r.bigons->wide_scan) : Json(nullptr);
    }
    if (r.homology && r.morse) out["homology"] = homology_to_json(*r.homology, *r.morse);
    out["warnings"] = r.warnings;
    Json timings = Json::array();
    for (const auto& t : r.timings) timings.push_back(Json{{"step", t.step}, {"name", t.name}, {"seconds", t.seconds}});
    out["timings"] = timings;
    return out;
}

IntMatrix matrix_from_json(const Json& j)
{
    const Json& rows = j.is_object() ? j.at("matrix") : j;
    if (!rows.is_array()) throw ConfigError("matrix must be an array of rows");
    IntMatrix m;
    m.rows = rows.size();
    m.cols = m.rows == 0 ? 0 : rows.front().size();
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != m.cols) throw ConfigError("matrix rows must have equal length");
        for (const auto& v : row) {
            if (!v.is_number_integer()) throw ConfigError("matrix entries must be integers");
            m.data.push_back(v.get<std::int64_t>());
        }
    }
    return m;
}

Json snf_to_json(const SNFResult& snf)
{
    Json factors = Json::array();
    for (const auto& f : snf.invariant_factors) factors.push_back(big_json(f));
    return Json{{"rank", snf.rank},
                {"invariant_factors", factors},
                {"D", big_matrix_json(snf.D)},
                {"U", big_matrix_json(snf.U)},
                {"V", big_matrix_json(snf.V)}};
}

void emit_svg_tangle(const PipelineResult& r, std::ostream& out)
{
    constexpr double size = 800.0;
    constexpr double pad = 20.0;
    const Box& box = r.config.box;
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi = -lo;
    auto grow = [&](Vec2 z) {
        if (!box.contains(z)) return;
        lo = {std::min(lo.x, z.x), std::min(lo.y, z.y)};
        hi = {std::max(hi.x, z.x), std::max(hi.y, z.y)};
    };
    const std::array<const BranchCurve*, 4> curves{&r.manifolds.unstable[0], &r.manifolds.unstable[1],
                                                   &r.manifolds.stable[0], &r.manifolds.stable[1]};
    for (const auto* c : curves) {
        for (const auto& v : c->vertices) grow(v.position);
    }
    grow(r.manifolds.fp.location);
    if (!(lo.x <= hi.x)) lo = hi = r.manifolds.fp.location;
    const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});
    const double scale = (size - 2.0 * pad) / span;
    auto px = [&](Vec2 z) { return Vec2{pad + (z.x - lo.x) * scale, size - pad - (z.y - lo.y) * scale}; };

    char buf[160];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
    out << "<style>.u{fill:none;stroke:#c0392b;stroke-width:1}.s{fill:none;stroke:#2471a3;stroke-width:1;"
           "stroke-dasharray:4 3}.hp{fill:#555}.primary{fill:#000}</style>\n";
    out << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    for (const auto* c : curves) {
        if (c->vertices.empty()) continue;
        std::snprintf(buf, sizeof buf, "<polyline class=\"%s\" data-side=\"%d\" points=\"",
                      c->kind == ManifoldKind::Unstable ? "u" : "s", c->side);
        out << buf;
        Vec2 last{-1e9, -1e9};
        const std::size_t n = c->vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 z = c->vertices[i].position;
            if (!box.contains(z)) continue;
            const Vec2 p = px(z);
            if (i + 1 < n && distance(p, last) < 0.5) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", p.x, p.y);
            out << buf;
            last = p;
        }
        out << "\"/>\n";
    }
    for (const auto& t : r.tangles) {
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            const Vec2 p = px(t.points[i].position);
            std::snprintf(buf, sizeof buf, "<circle class=\"%s\" cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\"/>\n",
                          t.primary[i] ? "hp primary" : "hp", p.x, p.y);
            out << buf;
        }
    }
    const Vec2 x = px(r.manifolds.fp.location);
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"16\">x</text>\n",
                  x.x, x.y, x.x + 6.0, x.y - 6.0);
    out << buf << "</svg>\n";
}

void emit_svg_tangle(const PipelineResult& result, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    emit_svg_tangle(result, out);
}

void write_json(const Json& j, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

Json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void emit_reports(const PipelineResult& r, const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(dir) / name);
        if (!out) throw ConfigError("cannot write '" + (fs::path(dir) / name).string() + "'");
        return out;
    };
    {
        auto out = open("points.csv");
        bool header = true;
        for (const auto& t : r.tangles) {
            write_points_csv(out, t.points, header);
            header = false;
        }
        if (header) write_points_csv(out, {}, true);
    }
    {
        auto out = open("classes.csv");
        write_classes_csv(out, r.tangles, r.classes);
    }
    if (r.complex) write_json(complex_to_json(*r.complex), (fs::path(dir) / "complex.json").string());
    if (r.homology && r.morse) {
        write_json(homology_to_json(*r.homology, *r.morse), (fs::path(dir) / "homology.json").string());
    }
    write_json(report_to_json(r), (fs::path(dir) / "report.json").string());
    if (r.manifolds.model) emit_svg_tangle(r, (fs::path(dir) / "tangle.svg").string());
    if (r.config.dump_curves) {
        for (const auto& group : {r.manifolds.unstable, r.manifolds.stable}) {
            for (const auto& c : group) {
                if (c.vertices.empty()) continue;
                auto out = open("curve_" + std::string(c.kind == ManifoldKind::Unstable ? "u" : "s") +
                                (c.side > 0 ? "+" : "-") + ".csv");
                write_curve_csv(out, c);
            }
        }
    }
}

}  // namespace hfh
