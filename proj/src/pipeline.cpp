#include "hfh/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>

#include "hfh/error.hpp"
#include "hfh/report.hpp"

namespace hfh {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& value, std::size_t count, int line)
{
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const std::string t = trim(item);
            out.push_back(std::stod(t, &used));
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(line) + ": not a number: '" + trim(item) + "'");
        }
    }
    if (out.size() != count) {
        throw ConfigError("line " + std::to_string(line) + ": expected " + std::to_string(count) +
                          " comma-separated numbers");
    }
    return out;
}

bool boolean(const std::string& value, int line)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("line " + std::to_string(line) + ": not a boolean: '" + value + "'");
}

long integer(const std::string& value, int line)
{
    const double v = numbers(value, 1, line)[0];
    if (v != std::floor(v)) {
        throw ConfigError("line " + std::to_string(line) + ": not an integer: '" + value + "'");
    }
    return static_cast<long>(v);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
auto at_step(int step, F&& body) -> decltype(body())
{
    try {
        return body();
    } catch (const Error& e) {
        const std::string what = "step " + std::to_string(step) + ": " + e.what();
        switch (e.kind()) {
        case ErrorKind::Config: throw ConfigError(what);
        case ErrorKind::Window: throw WindowError(what);
        case ErrorKind::TheoremViolation: throw TheoremViolation(what);
        case ErrorKind::Numerical: break;
        }
        throw NumericalError(what);
    }
}

TraceOptions trace_options(const RunConfig& c, int depth)
{
    TraceOptions o;
    o.delta = c.delta;
    o.depth = depth;
    o.h_max = c.h_max;
    o.theta_max = c.theta_max;
    o.vertex_cap = c.vertex_cap;
    o.box = c.box;
    o.truncate_at_box = true;
    return o;
}

CrossingOptions crossing_options(const RunConfig& c)
{
    CrossingOptions o;
    o.alpha_min = c.alpha_min;
    o.end_margin = c.end_margin;
    o.match_tol = c.proj_tol;
    o.max_crossings = c.crossing_cap;
    return o;
}

constexpr std::array<std::array<int, 2>, 4> kPairs{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

void trace_to(PipelineResult& r, int depth)
{
    const TraceOptions o = trace_options(r.config, depth);
    auto& m = r.manifolds;
    for (int side : {1, -1}) {
        const std::size_t slot = TracedManifolds::slot(side);
        for (ManifoldKind kind : {ManifoldKind::Unstable, ManifoldKind::Stable}) {
            BranchCurve& c = kind == ManifoldKind::Unstable ? m.unstable[slot] : m.stable[slot];
            if (c.vertices.empty()) {
                c = trace_branch(m.model, m.fp, kind, side, o);
            } else {
                extend_branch(c, depth, o);
            }
        }
    }
    r.depth = depth;
}

void build_tangles(PipelineResult& r)
{
    r.tangles.clear();
    for (auto [su, ss] : kPairs) {
        r.tangles.push_back(build_tangle(r.manifolds.branch(ManifoldKind::Unstable, su),
                                         r.manifolds.branch(ManifoldKind::Stable, ss),
                                         *r.manifolds.model, crossing_options(r.config)));
    }
}

bool any_truncated(const TracedManifolds& m)
{
    for (const auto& c : m.unstable) {
        if (c.truncated) return true;
    }
    for (const auto& c : m.stable) {
        if (c.truncated) return true;
    }
    return false;
}

bool has_generator_candidate(const Tangle& t)
{
    return std::any_of(t.points.begin(), t.points.end(),
                       [](const HomoclinicPoint& p) { return !p.witness_only; });
}

// Branch parameter the windows of every query need, from the first intersections.
double required_tau(const PipelineResult& r)
{
    double need = 0.0;
    double level = 0.0;
    for (const auto& t : r.tangles) {
        const auto& p = t.points[first_intersection(t)];
        need = std::max({need, p.u_tau + 1.0, p.s_tau});
        level = std::max(level, p.u_tau + p.s_tau + 1.0);
    }
    const double extra = r.config.wide_scan ? r.config.n_scan : 0.0;
    return std::max(need, 0.5 * (level + 2.0 + extra));
}

double tau_limit(const PipelineResult& r)
{
    double lim = std::numeric_limits<double>::infinity();
    for (const auto& t : r.tangles) lim = std::min({lim, t.u_limit, t.s_limit});
    return lim;
}

void write_step(const std::string& dir, int step, const std::string& name, const Json& j)
{
    if (dir.empty()) return;
    write_json(j, (std::filesystem::path(dir) / ("step" + std::to_string(step) + "_" + name + ".json")).string());
}

Json point_json(const HomoclinicPoint& p)
{
    return Json{{"x", p.position.x}, {"y", p.position.y}, {"u_tau", p.u_tau}, {"s_tau", p.s_tau},
                {"u_param", p.u_param}, {"s_param", p.s_param}};
}

}  // namespace

void RunConfig::validate() const
{
    if (model.empty()) throw ConfigError("model is required");
    auto positive = [](double v, const char* key) {
        if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be positive");
    };
    positive(delta, "delta");
    positive(h_max, "h_max");
    positive(theta_max, "theta_max");
    positive(alpha_min, "alpha_min");
    positive(proj_tol, "proj_tol");
    positive(end_margin, "end_margin");
    if (depth < 0) throw ConfigError("depth must be at least 1 (or auto)");
    if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
    if (n_scan < 2) throw ConfigError("n_scan must be at least 2");
    if (vertex_cap < 16) throw ConfigError("vertex_cap too small");
    if (crossing_cap < 1) throw ConfigError("crossing_cap must be positive");
    if (symplectic_samples < 1) throw ConfigError("symplectic_samples must be positive");
    if (!(box.lo.x < box.hi.x && box.lo.y < box.hi.y)) throw ConfigError("box is empty");
}

RunConfig parse_config(std::istream& in)
{
    RunConfig c;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        auto num = [&] { return numbers(value, 1, line)[0]; };
        if (key == "model") {
            c.model = value;
        } else if (key.rfind("param.", 0) == 0 && key.size() > 6) {
            c.params.push_back({key.substr(6), num()});
        } else if (key == "square") {
            c.square = boolean(value, line);
        } else if (key == "guess") {
            const auto v = numbers(value, 2, line);
            c.guess = {v[0], v[1]};
        } else if (key == "delta") {
            c.delta = num();
        } else if (key == "depth") {
            c.depth = value == "auto" ? 0 : static_cast<int>(integer(value, line));
            if (value != "auto" && c.depth < 1) {
                throw ConfigError("line " + std::to_string(line) + ": depth must be at least 1");
            }
        } else if (key == "max_depth") {
            c.max_depth = static_cast<int>(integer(value, line));
        } else if (key == "h_max") {
            c.h_max = num();
        } else if (key == "theta_max") {
            c.theta_max = num();
        } else if (key == "alpha_min") {
            c.alpha_min = num();
        } else if (key == "proj_tol") {
            c.proj_tol = num();
        } else if (key == "end_margin") {
            c.end_margin = num();
        } else if (key == "n_scan") {
            c.n_scan = static_cast<int>(integer(value, line));
        } else if (key == "box") {
            const auto v = numbers(value, 4, line);
            c.box = Box{{v[0], v[1]}, {v[2], v[3]}};
        } else if (key == "vertex_cap") {
            c.vertex_cap = static_cast<std::size_t>(integer(value, line));
        } else if (key == "crossing_cap") {
            c.crossing_cap = static_cast<std::size_t>(integer(value, line));
        } else if (key == "threads") {
            c.threads = static_cast<unsigned>(integer(value, line));
        } else if (key == "symplectic_samples") {
            c.symplectic_samples = static_cast<int>(integer(value, line));
        } else if (key == "out") {
            c.out_dir = value;
        } else if (key == "wide_scan") {
            c.wide_scan = boolean(value, line);
        } else if (key == "dump_curves") {
            c.dump_curves = boolean(value, line);
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in);
}

const std::array<std::string, 4>& pair_labels()
{
    static const std::array<std::string, 4> labels{"++", "+-", "-+", "--"};
    return labels;
}

GradedMatrices graded(const ChainComplexData& complex)
{
    GradedMatrices g;
    for (int k = -4; k <= 4; ++k) {
        const auto i = static_cast<std::size_t>(k + 4);
        g.chain_ranks[i] = complex.rank(k);
        if (k >= -3) g.d[i] = complex.d(k);
    }
    return g;
}

PipelineResult run_pipeline(const RunConfig& config, int last_step, const std::string& step_dir)
{
    config.validate();
    PipelineResult r;
    r.config = config;
    if (!step_dir.empty()) std::filesystem::create_directories(step_dir);
    auto timed = [&](int step, const std::string& name, auto&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        at_step(step, body);
        r.timings.push_back({step, name, seconds_since(t0)});
        r.last_step = step;
    };

    timed(0, "model", [&] {
        MapPtr model = make_model(config.model, config.params);
        if (config.square) model = square_map(model);
        r.manifolds.model = model;
        r.manifolds.fp = find_fixed_point(*model, config.guess);
        r.symplectic = validate_symplectic(*model, config.symplectic_samples, config.box);
        if (!(r.symplectic.max_det_deviation < 1e-9)) {
            throw ConfigError("map is not area-preserving (max |det - 1| = " +
                              std::to_string(r.symplectic.max_det_deviation) + ")");
        }
        const auto& fp = r.manifolds.fp;
        write_step(step_dir, 0, "model",
                   Json{{"model", model->name()},
                        {"fixed_point", {fp.location.x, fp.location.y}},
                        {"lambda", fp.lambda},
                        {"unstable_dir", {fp.unstable_dir.x, fp.unstable_dir.y}},
                        {"stable_dir", {fp.stable_dir.x, fp.stable_dir.y}},
                        {"max_det_deviation", r.symplectic.max_det_deviation},
                        {"max_inverse_error", r.symplectic.max_inverse_error}});
    });
    if (last_step < 1) return r;

    timed(1, "first intersections", [&] {
        const bool automatic = config.depth == 0;
        int depth = automatic ? std::min(8, config.max_depth) : config.depth;
        for (;;) {
            trace_to(r, depth);
            build_tangles(r);
            bool all_found = true;
            for (const auto& t : r.tangles) all_found = all_found && has_generator_candidate(t);
            if (!automatic) break;
            if (all_found) {
                const double need = required_tau(r);
                if (tau_limit(r) >= need) break;
                if (any_truncated(r.manifolds)) {
                    throw WindowError("window insufficient: branches truncated at the box before tau " +
                                      std::to_string(need));
                }
                depth = std::max(depth + 1, static_cast<int>(std::ceil(need)));
            } else {
                if (any_truncated(r.manifolds)) break;
                depth += 2;
            }
            if (depth > config.max_depth) {
                throw WindowError("window insufficient: max_depth " +
                                  std::to_string(config.max_depth) + " reached");
            }
        }
        Json firsts = Json::array();
        for (std::size_t i = 0; i < r.tangles.size(); ++i) {
            const auto& t = r.tangles[i];
            if (!has_generator_candidate(t)) {
                throw WindowError("window insufficient: no intersection on branch pair " +
                                  pair_labels()[i] + " within depth " + std::to_string(r.depth));
            }
            const std::size_t p0 = first_intersection(t);
            if (!t.primary[p0]) {
                throw TheoremViolation("first intersection on pair " + pair_labels()[i] +
                                       " is not primary");
            }
            Json f = point_json(t.points[p0]);
            f["pair"] = pair_labels()[i];
            firsts.push_back(f);
        }
        if (any_truncated(r.manifolds)) r.warnings.push_back("a branch was truncated at the bounding box");
        write_step(step_dir, 1, "first_intersections", Json{{"depth", r.depth}, {"points", firsts}});
    });
    if (last_step < 2) return r;

    timed(2, "intersections", [&] {
        Json pairs = Json::array();
        r.pairs.clear();
        for (std::size_t i = 0; i < r.tangles.size(); ++i) {
            const auto& t = r.tangles[i];
            PairSummary s;
            s.label = pair_labels()[i];
            s.points = t.points.size();
            s.first_point = first_intersection(t);
            s.u_limit = t.u_limit;
            s.s_limit = t.s_limit;
            s.min_angle = std::numbers::pi;
            const auto& p0 = t.points[s.first_point];
            for (const auto& p : t.points) {
                s.witnesses += p.witness_only;
                s.near_tangent += p.angle < config.alpha_min || p.angle > std::numbers::pi - config.alpha_min;
                s.low_accuracy += p.low_accuracy;
                s.max_residual = std::max(s.max_residual, p.residual);
                s.min_angle = std::min(s.min_angle, std::min(p.angle, std::numbers::pi - p.angle));
                if (p.u_tau >= p0.u_tau - 1e-9 && p.u_tau < p0.u_tau + 1.0 - 1e-9 &&
                    p.s_tau > p0.s_tau - 1.0 + 1e-9 && p.s_tau <= p0.s_tau + 1e-9) {
                    ++s.window_points;
                }
            }
            if (s.low_accuracy > 0) {
                r.warnings.push_back(std::to_string(s.low_accuracy) + " crossings on pair " + s.label +
                                     " fell back to the polyline intersection");
            }
            pairs.push_back(Json{{"pair", s.label}, {"points", s.points},
                                 {"window_points", s.window_points}, {"witnesses", s.witnesses},
                                 {"max_residual", s.max_residual}, {"min_angle", s.min_angle}});
            r.pairs.push_back(s);
        }
        write_step(step_dir, 2, "intersections", Json{{"pairs", pairs}});
    });
    if (last_step < 3) return r;

    timed(3, "primary classes", [&] {
        r.classes.clear();
        Json out = Json::array();
        for (std::size_t i = 0; i < r.tangles.size(); ++i) {
            const auto& t = r.tangles[i];
            auto& s = r.pairs[i];
            s.primary_points = static_cast<std::size_t>(std::count(t.primary.begin(), t.primary.end(), 1));
            auto classes = fundamental_representatives(t, s.first_point, static_cast<int>(i));
            s.classes = classes.size();
            for (auto& c : classes) {
                Json cj = point_json(t.points[c.representative]);
                cj["pair"] = s.label;
                cj["members_in_window"] = c.members_in_window.size();
                out.push_back(cj);
                r.classes.push_back(std::move(c));
            }
        }
        write_step(step_dir, 3, "primary_classes", Json{{"classes", out}});
    });
    if (last_step < 4) return r;

    timed(4, "maslov", [&] {
        r.generators.clear();
        r.maslov_member_mismatches = 0;
        for (auto& c : r.classes) {
            const auto [su, ss] = kPairs[static_cast<std::size_t>(c.pair)];
            const auto& u = r.manifolds.branch(ManifoldKind::Unstable, su);
            const auto& s = r.manifolds.branch(ManifoldKind::Stable, ss);
            const auto& t = r.tangles[static_cast<std::size_t>(c.pair)];
            const MaslovResult mu = maslov_index(u, s, t.points[c.representative]);
            c.maslov = mu.value;
            r.max_maslov_residual = std::max(r.max_maslov_residual, mu.residual);
            for (std::size_t k : c.members_in_window) {
                if (t.points[k].witness_only) continue;
                const MaslovResult m = maslov_index(u, s, t.points[k]);
                r.max_maslov_residual = std::max(r.max_maslov_residual, m.residual);
                if (m.value != mu.value) ++r.maslov_member_mismatches;
            }
            r.generators.push_back({c.pair, c.representative, c.maslov,
                                    orbit_point(t.points[c.representative])});
        }
        if (r.maslov_member_mismatches > 0) {
            throw TheoremViolation(std::to_string(r.maslov_member_mismatches) +
                                   " orbit members with a Maslov index different from their class");
        }
        write_step(step_dir, 4, "maslov", Json{{"generators", generators_to_json(r.generators)}});
    });
    if (last_step < 5) return r;

    BigonData bigons;
    timed(5, "bigons", [&] {
        const FloerContext ctx(r.manifolds, r.tangles);
        ComplexOptions o;
        o.wide_scan = config.wide_scan;
        o.n_scan = config.n_scan;
        o.threads = config.threads;
        bigons = determine_bigons(ctx, r.generators, o);
        if (bigons.wide_scan_run && bigons.wide_scan.violations() > 0) {
            throw TheoremViolation("wide scan found " + std::to_string(bigons.wide_scan.violations()) +
                                   " violations: " + bigons.wide_scan.details.front());
        }
        write_step(step_dir, 5, "bigons", bigons_to_json(bigons));
    });
    r.bigons = bigons;
    if (last_step < 6) return r;

    timed(6, "boundary matrices", [&] {
        std::vector<Generator> gens = bigons.generators;
        std::vector<BoundaryTerm> terms = bigons.terms;
        if (!step_dir.empty()) {
            const Json j = read_json((std::filesystem::path(step_dir) / "step5_bigons.json").string());
            gens = generators_from_json(j.at("generators"));
            terms = terms_from_json(j.at("terms"));
        }
        r.complex = assemble_complex(std::move(gens), terms);
        write_step(step_dir, 6, "complex", complex_to_json(*r.complex));
    });
    if (last_step < 7) return r;

    timed(7, "homology", [&] {
        GradedMatrices g = graded(*r.complex);
        if (!step_dir.empty()) {
            g = graded_from_json(read_json((std::filesystem::path(step_dir) / "step6_complex.json").string()));
        }
        r.homology = homology_of(g);
        r.morse = verify_morse_inequalities(*r.homology, r.classes.size());
        write_step(step_dir, 7, "homology", homology_to_json(*r.homology, *r.morse));
        if (!r.homology->torsion_free()) throw TheoremViolation("torsion found in homology");
        if (!r.morse->all_pass()) {
            const auto f = r.morse->failures().front();
            throw TheoremViolation("Morse inequality (" + std::to_string(f.item) + ") " + f.relation +
                                   " fails for j=" + std::to_string(f.j) + ", l=" +
                                   std::to_string(f.l) + ": " + std::to_string(f.lhs) + " vs " +
                                   std::to_string(f.rhs));
        }
    });
    return r;
}

}  // namespace hfh
