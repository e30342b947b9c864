// Acceptance run: criteria 1-9 over the standard map (k = 0.8, 1.2, 2.0) and the cubic
// Henon-type map (a = 2.5, 2.8). Prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hfh/error.hpp"
#include "hfh/pipeline.hpp"
#include "oracles.hpp"

using namespace hfh;

namespace {

constexpr double kRuntimeLimit = 60.0;
constexpr double kResidualTol = 1e-10;
constexpr double kAngleMin = 1e-3;
constexpr double kDetTol = 1e-9;
constexpr int kScan = 5;
constexpr int kRandomMatrices = 1000;

struct Case {
    std::string label;
    std::string model;
    std::string param;
    double value;
};

struct Criterion {
    bool pass = true;
    std::vector<std::string> notes;

    void fail(const std::string& why)
    {
        pass = false;
        notes.push_back(why);
    }
    void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

RunConfig config_for(const Case& c)
{
    RunConfig r;
    r.model = c.model;
    r.params = {{c.param, c.value}};
    return r;
}

double seconds(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Fingerprint {
    std::size_t classes = 0;
    std::array<std::size_t, 9> betti{};
    std::array<std::size_t, 9> chains{};
};

Fingerprint fingerprint(const PipelineResult& r)
{
    return {r.classes.size(), r.homology->betti, r.homology->chain_ranks};
}

std::string describe(const Fingerprint& f)
{
    std::string s = std::to_string(f.classes) + " classes, h =";
    for (int k = -3; k <= 3; ++k) s += " " + std::to_string(f.betti[static_cast<std::size_t>(k + 4)]);
    return s;
}

bool same(const Fingerprint& a, const Fingerprint& b)
{
    return a.classes == b.classes && a.betti == b.betti && a.chains == b.chains;
}

void check_case(const Case& cs, const PipelineResult& r, double runtime, std::vector<Criterion>& crit)
{
    const std::string tag = cs.label + ": ";
    const auto& cx = *r.complex;

    // 1. d_{k-1} d_k = 0, recomputed here.
    for (int k = -2; k <= 4; ++k) {
        const IntMatrix& a = cx.d(k - 1);
        const IntMatrix& b = cx.d(k);
        if (a.cols != b.rows) {
            crit[1].fail(tag + "shape mismatch at k=" + std::to_string(k));
        } else if (a.rows > 0 && b.cols > 0 && !multiply(a, b).is_zero()) {
            crit[1].fail(tag + "d_" + std::to_string(k - 1) + " d_" + std::to_string(k) + " != 0");
        }
    }
    if (runtime >= kRuntimeLimit) crit[1].fail(tag + fmt("runtime %.1f s", runtime));

    // 2 and 3. Wide scan and production bigons.
    const auto& w = r.bigons->wide_scan;
    if (!r.bigons->wide_scan_run || w.n_scan != kScan) crit[2].fail(tag + "wide scan not run with n=5");
    if (w.bound_violations) crit[2].fail(tag + std::to_string(w.bound_violations) + " bigons at 2 <= |n| <= 5");
    if (w.exclusivity_violations) {
        crit[2].fail(tag + std::to_string(w.exclusivity_violations) + " exclusivity violations");
    }
    if (w.coefficient_mismatches) {
        crit[2].fail(tag + std::to_string(w.coefficient_mismatches) + " coefficient mismatches");
    }
    if (w.place_violations) crit[3].fail(tag + std::to_string(w.place_violations) + " bigons outside their window");
    if (w.case4_bigons) crit[3].fail(tag + std::to_string(w.case4_bigons) + " case (4) bigons");
    for (const auto& b : r.bigons->bigons) {
        if (b.place_case == 4 || !in_place_window(b.p, b.q)) crit[3].fail(tag + "production bigon outside its window");
    }

    // 4. Index range and invariance along every matched pair of detected points.
    for (const auto& g : cx.generators) {
        if (g.maslov == 0 || std::abs(g.maslov) > 3) crit[4].fail(tag + "index " + std::to_string(g.maslov));
    }
    for (int k : {-4, 0, 4}) {
        if (cx.rank(k) != 0) crit[4].fail(tag + "C_" + std::to_string(k) + " nonzero");
    }
    std::size_t matched = 0, mismatched = 0;
    for (const auto& t : r.tangles) {
        const auto& u = r.manifolds.branch(ManifoldKind::Unstable, t.side_u);
        const auto& s = r.manifolds.branch(ManifoldKind::Stable, t.side_s);
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            if (t.action[i] < 0) continue;
            const auto& p = t.points[i];
            const auto& q = t.points[static_cast<std::size_t>(t.action[i])];
            if (p.witness_only || q.witness_only) continue;
            ++matched;
            if (maslov_index(u, s, p).value != maslov_index(u, s, q).value) ++mismatched;
        }
    }
    if (mismatched) crit[4].fail(tag + std::to_string(mismatched) + " of " + std::to_string(matched) + " matched pairs change index");
    crit[4].note(tag + std::to_string(matched) + " matched pairs");

    // 5. Torsion and rank oracle.
    const auto& h = *r.homology;
    for (int k = -3; k <= 3; ++k) {
        if (!h.torsion[static_cast<std::size_t>(k + 4)].empty()) crit[5].fail(tag + "torsion in degree " + std::to_string(k));
    }
    for (int k = -3; k <= 4; ++k) {
        const std::size_t rk = h.boundary_ranks[static_cast<std::size_t>(k + 4)];
        if (rk != oracle::rank(cx.d(k)) || rk != rational_rank(cx.d(k))) {
            crit[5].fail(tag + "rank of d_" + std::to_string(k) + " differs from the rational rank");
        }
    }

    // 6. Morse inequalities.
    const auto& m = *r.morse;
    if (!m.all_pass()) crit[6].fail(tag + std::to_string(m.failures().size()) + " inequality instances fail");
    std::size_t sum = 0;
    for (int k = -3; k <= 3; ++k) sum += h.c(k);
    if (sum != r.classes.size()) crit[6].fail(tag + "sum c_k != number of primary classes");

    // 7. Primary flags against the quadratic definition.
    for (const auto& t : r.tangles) {
        if (t.primary != oracle::primary(t.points)) crit[7].fail(tag + "primary flags differ from the definition");
        if (!t.primary[first_intersection(t)]) crit[7].fail(tag + "first intersection not primary");
    }

    // 8. Quality gates on refined crossings (Newton converged); unrefined ones are reported.
    double max_res = 0.0, min_angle = M_PI;
    std::size_t refined = 0, unrefined = 0;
    for (const auto& t : r.tangles) {
        for (const auto& p : t.points) {
            if (p.low_accuracy) {
                ++unrefined;
                continue;
            }
            ++refined;
            max_res = std::max(max_res, p.residual);
            min_angle = std::min(min_angle, std::min(p.angle, M_PI - p.angle));
        }
    }
    if (!(max_res < kResidualTol)) crit[8].fail(tag + fmt("refined residual %.2e", max_res));
    if (!(min_angle >= kAngleMin)) crit[8].fail(tag + fmt("crossing angle %.2e rad", min_angle));
    if (!(r.symplectic.max_det_deviation < kDetTol)) crit[8].fail(tag + fmt("det deviation %.2e", r.symplectic.max_det_deviation));
    crit[8].note(tag + std::to_string(refined) + " refined crossings, max residual " + fmt("%.1e", max_res) +
                 ", min angle " + fmt("%.1e", min_angle) + ", " + std::to_string(unrefined) +
                 " unrefined (witness only)");
}

void check_snf(Criterion& crit)
{
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    std::uniform_int_distribution<int> entry(-9, 9);
    std::size_t bad = 0;
    for (int trial = 0; trial < kRandomMatrices; ++trial) {
        IntMatrix a(dim(rng), dim(rng));
        for (auto& v : a.data) v = entry(rng);
        const SNFResult s = smith_normal_form(a);
        bool ok = multiply(multiply(s.U, to_big(a)), s.V) == s.D;
        ok = ok && abs(determinant(s.U)) == 1 && abs(determinant(s.V)) == 1;
        for (std::size_t i = 0; i < s.D.rows && ok; ++i) {
            for (std::size_t j = 0; j < s.D.cols; ++j) {
                const bool diag_ok = i == j ? (i < s.rank ? s.D(i, j) == s.invariant_factors[i] : s.D(i, j) == 0)
                                            : s.D(i, j) == 0;
                ok = ok && diag_ok;
            }
        }
        ok = ok && s.invariant_factors == oracle::invariant_factors(a);
        bad += !ok;
    }
    if (bad) crit.fail(std::to_string(bad) + " of " + std::to_string(kRandomMatrices) + " matrices disagree");
    crit.note(std::to_string(kRandomMatrices) + " random matrices, entries in [-9, 9], dims <= 8");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria 1-9"};
    std::vector<int> known;
    bool verbose = false;
    app.add_option("--known-failure", known, "Criteria expected to fail; they still print FAIL but do not set the exit code");
    app.add_flag("-v,--verbose", verbose, "Print per-case notes under each criterion");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Case> cases{
        {"standard k=0.8", "standard_map", "k", 0.8},
        {"standard k=1.2", "standard_map", "k", 1.2},
        {"standard k=2.0", "standard_map", "k", 2.0},
        {"henon a=2.5", "henon_cubic", "a", 2.5},
        {"henon a=2.8", "henon_cubic", "a", 2.8},
    };
    std::vector<Criterion> crit(10);
    std::vector<std::optional<Fingerprint>> prints(cases.size());
    std::vector<int> depths(cases.size(), 0);

    for (std::size_t i = 0; i < cases.size(); ++i) {
        const Case& cs = cases[i];
        RunConfig c = config_for(cs);
        c.wide_scan = true;
        c.n_scan = kScan;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const PipelineResult r = run_pipeline(c);
            const double runtime = seconds(t0);
            depths[i] = r.depth;
            prints[i] = fingerprint(r);
            std::printf("%-15s depth %2d  %5.1f s  c =", cs.label.c_str(), r.depth, runtime);
            for (int k = -3; k <= 3; ++k) std::printf(" %zu", r.homology->c(k));
            std::printf("  h =");
            for (int k = -3; k <= 3; ++k) std::printf(" %zu", r.homology->h(k));
            std::printf("  wide-scan queries %zu, bigons %zu\n", r.bigons->wide_scan.queries, r.bigons->wide_scan.bigons);
            std::fflush(stdout);
            check_case(cs, r, runtime, crit);
        } catch (const std::exception& e) {
            std::printf("%-15s run failed: %s\n", cs.label.c_str(), e.what());
            for (int k = 1; k <= 8; ++k) crit[static_cast<std::size_t>(k)].fail(cs.label + ": run failed: " + e.what());
        }
    }

    // 8, stability: one more fundamental domain, then twice the traced depth.
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (!prints[i]) continue;
        RunConfig c = config_for(cases[i]);
        c.depth = depths[i] + 1;
        try {
            const Fingerprint f = fingerprint(run_pipeline(c));
            if (!same(f, *prints[i])) {
                crit[8].fail(cases[i].label + ": depth " + std::to_string(c.depth) + " gives " + describe(f));
            } else {
                crit[8].note(cases[i].label + ": depth " + std::to_string(depths[i]) + " -> " +
                             std::to_string(c.depth) + " unchanged, " + describe(f));
            }
        } catch (const std::exception& e) {
            crit[8].fail(cases[i].label + ": depth " + std::to_string(c.depth) + " not computable: " + e.what());
        }
        c.depth = 2 * depths[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const PipelineResult r = run_pipeline(c);
            const Fingerprint f = fingerprint(r);
            if (!same(f, *prints[i])) {
                crit[8].fail(cases[i].label + ": depth " + std::to_string(c.depth) + " gives " + describe(f));
            } else {
                std::string why = cases[i].label + ": depth " + std::to_string(depths[i]) + " -> " +
                                  std::to_string(c.depth) + " unchanged";
                const bool truncated = std::any_of(r.manifolds.unstable.begin(), r.manifolds.unstable.end(),
                                                   [](const BranchCurve& b) { return b.truncated; });
                if (truncated) why += " (branches truncated at the box)";
                crit[8].note(why);
            }
        } catch (const std::exception& e) {
            crit[8].fail(cases[i].label + ": depth " + std::to_string(depths[i]) + " -> " + std::to_string(c.depth) +
                         " not computable: " + e.what() + fmt(" after %.1f s", seconds(t0)));
        }
    }

    check_snf(crit[9]);

    const char* names[10] = {"",
                             "chain-complex law",
                             "sharp bound and exclusivity",
                             "placement windows",
                             "index bounds and invariance",
                             "torsion-freeness and rank oracle",
                             "Morse inequalities",
                             "primary classification oracle",
                             "geometry gates and depth doubling",
                             "exact algebra"};
    int status = 0;
    std::printf("\n");
    for (int k = 1; k <= 9; ++k) {
        const Criterion& c = crit[static_cast<std::size_t>(k)];
        const bool expected = std::find(known.begin(), known.end(), k) != known.end();
        std::printf("criterion %d %-34s %s%s\n", k, names[k], c.pass ? "PASS" : "FAIL",
                    !c.pass && expected ? " (known failure)" : "");
        for (const auto& n : c.notes) {
            if (verbose || !c.pass) std::printf("    %s\n", n.c_str());
        }
        if (!c.pass && !expected) status = 1;
        if (c.pass && expected) std::printf("    listed as a known failure but passes\n");
    }
    return status;
}
