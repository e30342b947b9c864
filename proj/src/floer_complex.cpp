#include "hfh/floer_complex.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "hfh/error.hpp"

namespace hfh {

namespace {

constexpr double kTauTol = 1e-7;

// Open segment between (side_a, ta) and (side_b, tb) on one manifold, through x when the sides
// differ.
bool in_open(int side_a, double ta, int side_b, double tb, int side, double t)
{
    if (side_a == side_b) {
        return side == side_a && t > std::min(ta, tb) + kTauTol && t < std::max(ta, tb) - kTauTol;
    }
    return (side == side_a && t < ta - kTauTol) || (side == side_b && t < tb - kTauTol);
}

Vec2 point_at_tau(const BranchCurve& c, double tau)
{
    return c.point_at_param(c.param_at_tau(tau));
}

std::string describe(const OrbitPoint& p)
{
    std::ostringstream os;
    os.precision(10);
    os << "(u" << (p.side_u > 0 ? '+' : '-') << ' ' << p.u_tau << ", s" << (p.side_s > 0 ? '+' : '-')
       << ' ' << p.s_tau << ')';
    return os.str();
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::vector<std::exception_ptr> errors(n);
    auto run = [&](unsigned t) {
        for (std::size_t i = t; i < n; i += threads) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run, t);
        for (auto& th : pool) th.join();
    }
    // Lowest index first keeps error reports deterministic.
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

OrbitPoint orbit_point(const HomoclinicPoint& p)
{
    return {p.side_u, p.side_s, p.u_tau, p.s_tau};
}

FloerContext::FloerContext(const TracedManifolds& manifolds, const std::vector<Tangle>& tangles)
    : manifolds_(manifolds)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    u_limit_ = {inf, inf};
    s_limit_ = {inf, inf};
    for (const auto& t : tangles) {
        auto& ul = u_limit_[TracedManifolds::slot(t.side_u)];
        auto& sl = s_limit_[TracedManifolds::slot(t.side_s)];
        ul = std::min(ul, t.u_limit);
        sl = std::min(sl, t.s_limit);
        for (const auto& p : t.points) {
            by_u_[TracedManifolds::slot(p.side_u)].push_back({p.u_tau, p.s_tau, p.side_s});
        }
    }
    for (int side : {1, -1}) {
        auto& ul = u_limit_[TracedManifolds::slot(side)];
        auto& sl = s_limit_[TracedManifolds::slot(side)];
        if (ul == inf) ul = manifolds.branch(ManifoldKind::Unstable, side).tau_max();
        if (sl == inf) sl = manifolds.branch(ManifoldKind::Stable, side).tau_max();
    }
    for (auto& v : by_u_) {
        std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) { return a.u_tau < b.u_tau; });
    }
}

std::size_t FloerContext::points_between(const OrbitPoint& p, const OrbitPoint& q) const
{
    std::size_t count = 0;
    for (int side : {1, -1}) {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = lo;
        if (p.side_u == q.side_u) {
            if (side != p.side_u) continue;
            lo = std::min(p.u_tau, q.u_tau);
            hi = std::max(p.u_tau, q.u_tau);
        } else {
            hi = side == p.side_u ? p.u_tau : q.u_tau;
        }
        const auto& v = by_u_[TracedManifolds::slot(side)];
        auto it = std::upper_bound(v.begin(), v.end(), lo,
                                   [](double t, const Entry& e) { return t < e.u_tau; });
        for (; it != v.end() && it->u_tau < hi; ++it) {
            if (!in_open(p.side_u, p.u_tau, q.side_u, q.u_tau, side, it->u_tau)) continue;
            if (in_open(p.side_s, p.s_tau, q.side_s, q.s_tau, it->side_s, it->s_tau)) ++count;
        }
    }
    return count;
}

std::vector<Vec2> FloerContext::arc(ManifoldKind kind, int side_a, double tau_a, int side_b,
                                    double tau_b) const
{
    const BranchCurve& a = manifolds_.branch(kind, side_a);
    const BranchCurve& b = manifolds_.branch(kind, side_b);
    auto by_tau = [](const CurveVertex& v, double t) { return v.tau < t; };
    std::vector<Vec2> out;
    if (side_a == side_b) {
        const double lo = std::min(tau_a, tau_b);
        const double hi = std::max(tau_a, tau_b);
        out.push_back(point_at_tau(a, lo));
        auto it = std::lower_bound(a.vertices.begin(), a.vertices.end(), lo, by_tau);
        for (; it != a.vertices.end() && it->tau < hi; ++it) {
            if (it->tau > lo) out.push_back(it->position);
        }
        out.push_back(point_at_tau(a, hi));
        if (tau_a > tau_b) std::reverse(out.begin(), out.end());
        return out;
    }
    out.push_back(point_at_tau(a, tau_a));
    auto end_a = std::lower_bound(a.vertices.begin(), a.vertices.end(), tau_a, by_tau);
    for (auto it = std::make_reverse_iterator(end_a); it != a.vertices.rend(); ++it) {
        out.push_back(it->position);
    }
    auto end_b = std::lower_bound(b.vertices.begin(), b.vertices.end(), tau_b, by_tau);
    for (auto it = b.vertices.begin() + 1; it < end_b; ++it) out.push_back(it->position);
    out.push_back(point_at_tau(b, tau_b));
    return out;
}

bool FloerContext::boundary_loop_simple(const OrbitPoint& p, const OrbitPoint& q) const
{
    const auto au = arc(ManifoldKind::Unstable, p.side_u, p.u_tau, q.side_u, q.u_tau);
    const auto as = arc(ManifoldKind::Stable, p.side_s, p.s_tau, q.side_s, q.s_tau);
    // Both arcs run from p to q; the polylines meet at the corners within their end segments.
    const std::size_t nu = au.size() - 1;
    const std::size_t ns = as.size() - 1;
    for (const auto& c : polyline_crossings(au, as)) {
        if (c.a_segment <= 1 && c.b_segment <= 1) continue;
        if (c.a_segment + 2 >= nu && c.b_segment + 2 >= ns) continue;
        return false;
    }
    return true;
}

int FloerContext::window_shift(const OrbitPoint& p, const OrbitPoint& q) const
{
    double k_hi = std::numeric_limits<double>::infinity();
    double k_lo = -k_hi;
    for (const OrbitPoint* z : {&p, &q}) {
        k_hi = std::min(k_hi, std::floor(u_limit(z->side_u) - z->u_tau));
        k_lo = std::max(k_lo, std::ceil(z->s_tau - s_limit(z->side_s)));
    }
    if (k_lo > k_hi) {
        throw WindowError("window insufficient: no iterate of " + describe(p) + ", " + describe(q) +
                          " fits the traced branches");
    }
    return static_cast<int>(std::clamp(0.0, k_lo, k_hi));
}

int place_case(const OrbitPoint& p, const OrbitPoint& q)
{
    const bool xu = p.side_u != q.side_u;
    const bool xs = p.side_s != q.side_s;
    if (!xu && !xs) return 1;
    if (xu && !xs) return 2;
    if (!xu && xs) return 3;
    return 4;
}

bool in_place_window(const OrbitPoint& p, const OrbitPoint& q)
{
    const bool u_ok = std::abs(q.u_tau - p.u_tau) < 1.0;
    const bool s_ok = std::abs(q.s_tau - p.s_tau) < 1.0;
    switch (place_case(p, q)) {
    case 1: return u_ok && s_ok;
    case 2: return s_ok;
    case 3: return u_ok;
    default: return false;
    }
}

int sign_m(const OrbitPoint& p, const OrbitPoint& q, ManifoldKind* comparison)
{
    if (p.side_u == q.side_u) {
        if (comparison) *comparison = ManifoldKind::Unstable;
        return q.u_tau > p.u_tau ? 1 : -1;
    }
    if (comparison) *comparison = ManifoldKind::Stable;
    if (p.side_s != q.side_s) return 0;
    // The jump direction on a stable branch points towards x.
    return q.s_tau < p.s_tau ? 1 : -1;
}

BigonQuery bigon_exists(const FloerContext& ctx, const OrbitPoint& p, const OrbitPoint& q,
                        int index_difference)
{
    BigonQuery r;
    r.p = p;
    r.q = q;
    r.place_case = place_case(p, q);
    r.in_place_window = in_place_window(p, q);
    if (index_difference != 1) return r;
    r.window_shift = ctx.window_shift(p, q);
    const OrbitPoint ps = p.shifted(r.window_shift);
    const OrbitPoint qs = q.shifted(r.window_shift);
    r.points_inside = ctx.points_between(ps, qs);
    if (r.points_inside > 0) return r;
    r.simple_loop = ctx.boundary_loop_simple(ps, qs);
    if (!r.simple_loop) return r;
    r.exists = true;
    r.sign = sign_m(p, q, &r.comparison_branch);
    return r;
}

std::vector<int> candidate_shifts(const OrbitPoint& p, const OrbitPoint& q)
{
    std::vector<int> out;
    auto add = [&](double d) {
        for (double n : {std::floor(d), std::ceil(d)}) {
            if (std::abs(d - n) < 1.0) out.push_back(static_cast<int>(n));
        }
    };
    if (p.side_u == q.side_u) add(p.u_tau - q.u_tau);
    if (p.side_s == q.side_s) add(q.s_tau - p.s_tau);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

CoefficientResult orbit_coefficient(const FloerContext& ctx, const OrbitPoint& p,
                                    const OrbitPoint& q, int index_difference)
{
    CoefficientResult r;
    if (index_difference != 1) return r;
    for (int n : candidate_shifts(p, q)) {
        BigonQuery b = bigon_exists(ctx, p, q.shifted(n), index_difference);
        if (!b.exists) continue;
        if (!b.in_place_window) {
            throw TheoremViolation("placement violated: bigon " + describe(p) + " -> " +
                                   describe(b.q) + " outside its window");
        }
        r.value += b.sign;
        r.shifts.push_back(n);
        r.bigons.push_back(b);
    }
    const bool adjacent_pair = r.shifts.size() == 2 && r.shifts[1] - r.shifts[0] == 1 &&
                               r.bigons[0].sign == -r.bigons[1].sign;
    if (r.shifts.size() > 2 || (r.shifts.size() == 2 && !adjacent_pair)) {
        throw TheoremViolation("bound violated: " + std::to_string(r.shifts.size()) +
                               " bigons from " + describe(p) + " to the orbit of " + describe(q));
    }
    return r;
}

std::size_t ChainComplexData::rank(int k) const
{
    return k < -4 || k > 4 ? 0 : by_degree[static_cast<std::size_t>(k + 4)].size();
}

const IntMatrix& ChainComplexData::d(int k) const
{
    if (k < -3 || k > 4) throw ConfigError("no boundary map in degree " + std::to_string(k));
    return boundary[static_cast<std::size_t>(k + 4)];
}

const std::vector<std::size_t>& ChainComplexData::degree(int k) const
{
    if (k < -4 || k > 4) throw ConfigError("no chain group in degree " + std::to_string(k));
    return by_degree[static_cast<std::size_t>(k + 4)];
}

namespace {

struct ColumnResult {
    std::vector<std::pair<std::size_t, int>> entries;  ///< (generator id, coefficient)
    std::vector<BigonQuery> bigons;
    WideScanReport scan;
};

void wide_scan_pair(const FloerContext& ctx, const OrbitPoint& p, const OrbitPoint& q,
                    const CoefficientResult& production, int n_scan, WideScanReport& out)
{
    ++out.generator_pairs;
    // Centre on the shared branch; without one, balance both parameters.
    double centre = 0.5 * ((p.u_tau - q.u_tau) + (q.s_tau - p.s_tau));
    if (p.side_u == q.side_u) {
        centre = p.u_tau - q.u_tau;
    } else if (p.side_s == q.side_s) {
        centre = q.s_tau - p.s_tau;
    }
    const int n_ref = static_cast<int>(std::lround(centre));
    const auto candidates = candidate_shifts(p, q);
    std::vector<std::pair<int, int>> found;  // (n, sign)
    for (int n = n_ref - n_scan; n <= n_ref + n_scan; ++n) {
        ++out.queries;
        const BigonQuery b = bigon_exists(ctx, p, q.shifted(n), 1);
        if (!b.exists) continue;
        ++out.bigons;
        found.emplace_back(n, b.sign);
        const std::string where = describe(p) + " -> " + describe(b.q);
        if (b.place_case == 4) {
            ++out.case4_bigons;
            out.details.push_back("bigon with x in both segments: " + where);
        }
        if (!b.in_place_window) {
            ++out.place_violations;
            out.details.push_back("bigon outside placement window: " + where);
        }
        if (std::find(candidates.begin(), candidates.end(), n) == candidates.end()) {
            ++out.bound_violations;
            out.details.push_back("bigon beyond one iterate: " + where);
        }
    }
    const bool ok = found.size() < 2 ||
                    (found.size() == 2 && found[1].first - found[0].first == 1 &&
                     found[0].second == -found[1].second);
    if (!ok) {
        ++out.exclusivity_violations;
        out.details.push_back(std::to_string(found.size()) + " bigons between " + describe(p) +
                              " and the orbit of " + describe(q));
    }
    int sum = 0;
    for (auto [n, s] : found) sum += s;
    if (sum != production.value) {
        ++out.coefficient_mismatches;
        out.details.push_back("wide-scan coefficient " + std::to_string(sum) + " vs " +
                              std::to_string(production.value) + " for " + describe(p));
    }
}

void merge(WideScanReport& into, const WideScanReport& from)
{
    into.generator_pairs += from.generator_pairs;
    into.queries += from.queries;
    into.bigons += from.bigons;
    into.bound_violations += from.bound_violations;
    into.exclusivity_violations += from.exclusivity_violations;
    into.place_violations += from.place_violations;
    into.case4_bigons += from.case4_bigons;
    into.coefficient_mismatches += from.coefficient_mismatches;
    into.details.insert(into.details.end(), from.details.begin(), from.details.end());
}

}  // namespace

namespace {

void check_degree(const Generator& g, std::size_t id)
{
    if (g.maslov == 0 || g.maslov < ChainComplexData::min_degree ||
        g.maslov > ChainComplexData::max_degree) {
        throw TheoremViolation("Maslov index " + std::to_string(g.maslov) +
                               " outside {±1,±2,±3} for generator " + std::to_string(id));
    }
}

}  // namespace

BigonData determine_bigons(const FloerContext& ctx, std::vector<Generator> generators,
                           const ComplexOptions& options)
{
    BigonData out;
    std::stable_sort(generators.begin(), generators.end(), [](const Generator& a, const Generator& b) {
        return a.maslov > b.maslov;
    });
    for (std::size_t i = 0; i < generators.size(); ++i) check_degree(generators[i], i);
    out.generators = std::move(generators);
    const auto& gens = out.generators;

    std::vector<ColumnResult> columns(gens.size());
    parallel_for(gens.size(), options.threads, [&](std::size_t i) {
        const Generator& gp = gens[i];
        ColumnResult& col = columns[i];
        col.scan.n_scan = options.n_scan;
        for (std::size_t j = 0; j < gens.size(); ++j) {
            const Generator& gq = gens[j];
            if (gq.maslov != gp.maslov - 1) continue;
            const CoefficientResult r = orbit_coefficient(ctx, gp.point, gq.point, 1);
            if (r.value != 0) col.entries.emplace_back(j, r.value);
            col.bigons.insert(col.bigons.end(), r.bigons.begin(), r.bigons.end());
            if (options.wide_scan) wide_scan_pair(ctx, gp.point, gq.point, r, options.n_scan, col.scan);
        }
    });

    out.wide_scan.n_scan = options.n_scan;
    out.wide_scan_run = options.wide_scan;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (auto [j, v] : columns[i].entries) out.terms.push_back({i, j, v});
        out.bigons.insert(out.bigons.end(), columns[i].bigons.begin(), columns[i].bigons.end());
        merge(out.wide_scan, columns[i].scan);
    }
    return out;
}

ChainComplexData assemble_complex(std::vector<Generator> generators,
                                  const std::vector<BoundaryTerm>& terms)
{
    ChainComplexData c;
    c.generators = std::move(generators);
    std::vector<std::size_t> row_of(c.generators.size());
    for (std::size_t i = 0; i < c.generators.size(); ++i) {
        check_degree(c.generators[i], i);
        auto& bucket = c.by_degree[static_cast<std::size_t>(c.generators[i].maslov + 4)];
        row_of[i] = bucket.size();
        bucket.push_back(i);
    }
    for (int k = -3; k <= 4; ++k) {
        c.boundary[static_cast<std::size_t>(k + 4)] = IntMatrix(c.rank(k - 1), c.rank(k));
    }
    for (const auto& t : terms) {
        if (t.from >= c.generators.size() || t.to >= c.generators.size()) {
            throw ConfigError("boundary term refers to a missing generator");
        }
        const int k = c.generators[t.from].maslov;
        if (c.generators[t.to].maslov != k - 1) {
            throw ConfigError("boundary term between generators of non-adjacent index");
        }
        if (t.value < -1 || t.value > 1) {
            throw TheoremViolation("bound violated: coefficient " + std::to_string(t.value) +
                                   " between generators " + std::to_string(t.from) + " and " +
                                   std::to_string(t.to));
        }
        c.boundary[static_cast<std::size_t>(k + 4)](row_of[t.to], row_of[t.from]) = t.value;
    }
    const std::string failure = check_d_squared(c);
    if (!failure.empty()) throw TheoremViolation("d-squared nonzero: " + failure);
    return c;
}

ChainComplexData build_complex(const FloerContext& ctx, std::vector<Generator> generators,
                               const ComplexOptions& options, BigonData* bigons)
{
    BigonData data = determine_bigons(ctx, std::move(generators), options);
    ChainComplexData c = assemble_complex(data.generators, data.terms);
    if (bigons) *bigons = std::move(data);
    return c;
}

std::string check_d_squared(const ChainComplexData& complex)
{
    for (int k = -2; k <= 4; ++k) {
        const IntMatrix dd = multiply(complex.d(k - 1), complex.d(k));
        for (std::size_t r = 0; r < dd.rows; ++r) {
            for (std::size_t col = 0; col < dd.cols; ++col) {
                if (dd(r, col) != 0) {
                    const auto& gp = complex.generators[complex.degree(k)[col]];
                    const auto& gq = complex.generators[complex.degree(k - 2)[r]];
                    return "degree " + std::to_string(k) + ", from " + describe(gp.point) +
                           " to " + describe(gq.point) + " (entry " + std::to_string(dd(r, col)) +
                           ")";
                }
            }
        }
    }
    return {};
}

}  // namespace hfh
