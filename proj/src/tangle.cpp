#include "hfh/tangle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "hfh/error.hpp"

namespace hfh {

BranchPos x_pos(ManifoldKind kind)
{
    return {kind, 0, -std::numeric_limits<double>::infinity()};
}

BranchPos u_pos(const HomoclinicPoint& p) { return {ManifoldKind::Unstable, p.side_u, p.u_tau}; }

BranchPos s_pos(const HomoclinicPoint& p) { return {ManifoldKind::Stable, p.side_s, p.s_tau}; }

bool precedes(const BranchPos& a, const BranchPos& b)
{
    if (a.side != b.side) return a.side < b.side;
    if (a.side > 0) return a.tau < b.tau;
    if (a.side < 0) return a.tau > b.tau;
    return false;
}

bool segment_contains(const BranchPos& a, const BranchPos& b, const BranchPos& q, bool open)
{
    auto same = [](const BranchPos& l, const BranchPos& r) {
        return l.kind == r.kind || l.side == 0 || r.side == 0;
    };
    if (!same(a, b) || !same(a, q) || !same(b, q)) throw ConfigError("different branches");
    const BranchPos& lo = precedes(b, a) ? b : a;
    const BranchPos& hi = precedes(b, a) ? a : b;
    if (open) return precedes(lo, q) && precedes(q, hi);
    return !precedes(q, lo) && !precedes(hi, q);
}

bool less_u(const HomoclinicPoint& p, const HomoclinicPoint& q)
{
    return p.side_u == q.side_u && p.u_tau < q.u_tau;
}

bool less_s(const HomoclinicPoint& p, const HomoclinicPoint& q)
{
    return p.side_s == q.side_s && p.s_tau > q.s_tau;
}

Tangle build_tangle(const BranchCurve& u, const BranchCurve& s, const MapModel& model,
                    const CrossingOptions& options)
{
    Tangle t;
    t.side_u = u.side;
    t.side_s = s.side;
    PairPoints found = find_homoclinic_points(u, s, options);
    t.points = std::move(found.points);
    t.action = match_phi_action(t.points, model, options.match_tol);
    t.primary = primary_flags(t.points);
    t.u_limit = u.tau_at_param(std::max(0.0, u.length() - options.end_margin));
    t.s_limit = s.tau_at_param(std::max(0.0, s.length() - options.end_margin));
    return t;
}

std::vector<char> primary_flags(const std::vector<HomoclinicPoint>& points)
{
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points[a].u_param < points[b].u_param;
    });
    std::vector<char> flags(points.size(), 0);
    double min_s = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && points[order[j]].u_param == points[order[i]].u_param) ++j;
        for (std::size_t k = i; k < j; ++k) flags[order[k]] = points[order[k]].s_param < min_s;
        for (std::size_t k = i; k < j; ++k) min_s = std::min(min_s, points[order[k]].s_param);
        i = j;
    }
    return flags;
}

bool is_primary(const Tangle& tangle, std::size_t index)
{
    return tangle.primary.at(index) != 0;
}

std::size_t first_intersection(const Tangle& tangle)
{
    std::size_t best = tangle.points.size();
    for (std::size_t i = 0; i < tangle.points.size(); ++i) {
        const auto& p = tangle.points[i];
        if (p.witness_only) continue;
        if (best == tangle.points.size()) {
            best = i;
            continue;
        }
        const auto& b = tangle.points[best];
        const double mp = std::max(p.u_tau, p.s_tau);
        const double mb = std::max(b.u_tau, b.s_tau);
        if (mp < mb || (mp == mb && p.u_tau + p.s_tau < b.u_tau + b.s_tau)) best = i;
    }
    if (best == tangle.points.size()) throw WindowError("no intersection in window");
    return best;
}

long find_point(const Tangle& tangle, double u_tau, double s_tau, double tol)
{
    const auto& pts = tangle.points;
    auto it = std::lower_bound(pts.begin(), pts.end(), u_tau - tol,
                               [](const HomoclinicPoint& p, double v) { return p.u_tau < v; });
    for (; it != pts.end() && it->u_tau <= u_tau + tol; ++it) {
        if (std::abs(it->s_tau - s_tau) <= tol) return static_cast<long>(it - pts.begin());
    }
    return -1;
}

namespace {

bool same_orbit(const HomoclinicPoint& a, const HomoclinicPoint& b)
{
    const double du = b.u_tau - a.u_tau;
    const double ds = a.s_tau - b.s_tau;
    return std::abs(du - ds) < 1e-7 && std::abs(du - std::round(du)) < 1e-7;
}

}  // namespace

std::vector<OrbitClass> fundamental_representatives(const Tangle& tangle, std::size_t p0,
                                                    int pair_index)
{
    const HomoclinicPoint& base = tangle.points.at(p0);
    const double a = base.u_tau;
    const double b = base.s_tau;
    if (a + 1.0 > tangle.u_limit) {
        throw WindowError("window insufficient: [p, phi(p)[ leaves the traced unstable branch");
    }
    constexpr double tol = 1e-9;
    std::vector<long> inverse(tangle.points.size(), -1);
    for (std::size_t k = 0; k < tangle.action.size(); ++k) {
        if (tangle.action[k] >= 0) {
            inverse[static_cast<std::size_t>(tangle.action[k])] = static_cast<long>(k);
        }
    }

    std::vector<OrbitClass> classes;
    for (std::size_t i = 0; i < tangle.points.size(); ++i) {
        const HomoclinicPoint& p = tangle.points[i];
        if (!tangle.primary[i]) continue;
        if (!(p.u_tau > a - tol && p.u_tau < a + 1.0 - tol)) continue;
        if (!(p.s_tau > b - 1.0 + tol && p.s_tau < b + tol)) continue;
        if (p.witness_only) {
            throw NumericalError("primary point in the fundamental window is near-tangent or unrefined");
        }
        for (const auto& c : classes) {
            if (same_orbit(tangle.points[c.representative], p)) {
                throw TheoremViolation("two representatives of one primary orbit");
            }
        }
        OrbitClass c;
        c.pair = pair_index;
        c.representative = i;
        c.level = p.u_tau + p.s_tau;
        c.primary = true;
        // Orbit members by following the action both ways.
        std::vector<std::size_t> members{i};
        for (long k = inverse[i]; k >= 0; k = inverse[static_cast<std::size_t>(k)]) {
            members.push_back(static_cast<std::size_t>(k));
        }
        for (long k = tangle.action[i]; k >= 0; k = tangle.action[static_cast<std::size_t>(k)]) {
            members.push_back(static_cast<std::size_t>(k));
        }
        std::sort(members.begin(), members.end(), [&](std::size_t l, std::size_t r) {
            return tangle.points[l].u_tau < tangle.points[r].u_tau;
        });
        c.members_in_window = std::move(members);
        classes.push_back(std::move(c));
    }
    std::sort(classes.begin(), classes.end(), [&](const OrbitClass& l, const OrbitClass& r) {
        return tangle.points[l.representative].u_tau < tangle.points[r.representative].u_tau;
    });
    return classes;
}

MaslovResult maslov_index(const BranchCurve& u, const BranchCurve& s, const HomoclinicPoint& p)
{
    const CurveVertex& vu = u.vertices.at(p.u_segment);
    const CurveVertex& vs = s.vertices.at(p.s_segment);
    const double turn_u = vu.turning + signed_turn(vu.tangent, p.u_tangent);
    const double turn_s = vs.turning + signed_turn(vs.tangent, p.s_tangent);
    const double corner_x = line_rotation_ccw(u.vertices.front().tangent, s.vertices.front().tangent);
    const double corner_p = line_rotation_ccw(p.u_tangent, p.s_tangent);
    const double total = (-turn_u + corner_x + turn_s - corner_p) / std::numbers::pi;
    MaslovResult r;
    r.value = static_cast<int>(std::lround(total));
    r.residual = std::abs(total - r.value);
    if (!(r.residual < 0.1)) {
        throw NumericalError("turning not near integer multiple of pi (residual " +
                             std::to_string(r.residual) + ")");
    }
    return r;
}

void write_classes_csv(std::ostream& out, const std::vector<Tangle>& tangles,
                       const std::vector<OrbitClass>& classes, bool header)
{
    if (header) out << "orbit_id,rep_x,rep_y,u_param,s_param,maslov,primary\n";
    const auto old = out.precision(17);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        const auto& p = tangles.at(static_cast<std::size_t>(c.pair)).points.at(c.representative);
        out << i << ',' << p.position.x << ',' << p.position.y << ',' << p.u_param << ','
            << p.s_param << ',' << c.maslov << ',' << (c.primary ? 1 : 0) << '\n';
    }
    out.precision(old);
}

}  // namespace hfh
