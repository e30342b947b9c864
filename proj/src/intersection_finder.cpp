#include "hfh/intersection_finder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>

#include "hfh/error.hpp"

namespace hfh {

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c)
{
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

std::uint64_t cell_key(std::int64_t ix, std::int64_t iy)
{
    return (static_cast<std::uint64_t>(ix) << 32) ^ static_cast<std::uint32_t>(iy);
}

double segment_fraction(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const double den = cross(b - a, d - c);
    if (den == 0.0) return 0.5;
    return std::clamp(cross(c - a, d - c) / den, 0.0, 1.0);
}

double tau_on_segment(const BranchCurve& c, std::size_t i, double f)
{
    const double ta = c.vertices[i].tau;
    const double tb = c.vertices[i + 1].tau;
    if (!std::isfinite(ta)) {
        // Segment from x: the branch leaves x geometrically in tau.
        const double growth = c.lambda > 1.0 ? c.lambda : 2.0;
        return tb + std::log(std::max(f, 1e-12)) / std::log(growth);
    }
    return ta + f * (tb - ta);
}

BranchSample sample(const BranchCurve& c, double tau)
{
    return c.parametrization->evaluate(tau);
}

std::string pair_label(int side_u, int side_s)
{
    return std::string(side_u > 0 ? "+" : "-") + (side_s > 0 ? "+" : "-");
}

}  // namespace

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 == 0 && o2 == 0) return false;
    return o1 * o2 <= 0 && o3 * o4 <= 0;
}

namespace {

std::vector<Vec2> positions(const BranchCurve& c)
{
    std::vector<Vec2> out;
    out.reserve(c.vertices.size());
    for (const auto& v : c.vertices) out.push_back(v.position);
    return out;
}

double max_chord(const std::vector<Vec2>& pts)
{
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) h = std::max(h, distance(pts[i], pts[i + 1]));
    return h;
}

// Index pairs (i, j) of touching segments [a_i, a_i+1] x [b_j, b_j+1], sorted and unique.
std::vector<std::pair<std::size_t, std::size_t>> crossing_pairs(const std::vector<Vec2>& a,
                                                                const std::vector<Vec2>& b,
                                                                bool skip_first,
                                                                std::size_t max_pairs)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    auto over_budget = [&] {
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        if (pairs.size() > max_pairs) {
            throw NumericalError("crossing budget exceeded (more than " + std::to_string(max_pairs) +
                                 " crossings)");
        }
    };
    if (a.size() < 2 || b.size() < 2) return pairs;
    const double h = std::max(max_chord(a), max_chord(b));
    if (!(h > 0.0)) return pairs;

    auto cell = [h](double v) { return static_cast<std::int64_t>(std::floor(v / h)); };
    std::vector<std::pair<std::uint64_t, std::uint32_t>> grid;
    grid.reserve(4 * a.size());
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const Vec2 p = a[i];
        const Vec2 q = a[i + 1];
        for (auto ix = cell(std::min(p.x, q.x)); ix <= cell(std::max(p.x, q.x)); ++ix) {
            for (auto iy = cell(std::min(p.y, q.y)); iy <= cell(std::max(p.y, q.y)); ++iy) {
                grid.emplace_back(cell_key(ix, iy), static_cast<std::uint32_t>(i));
            }
        }
    }
    std::sort(grid.begin(), grid.end());

    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
        const Vec2 c = b[j];
        const Vec2 d = b[j + 1];
        for (auto ix = cell(std::min(c.x, d.x)); ix <= cell(std::max(c.x, d.x)); ++ix) {
            for (auto iy = cell(std::min(c.y, d.y)); iy <= cell(std::max(c.y, d.y)); ++iy) {
                const std::uint64_t key = cell_key(ix, iy);
                auto lo = std::lower_bound(grid.begin(), grid.end(),
                                           std::make_pair(key, std::uint32_t{0}));
                for (auto it = lo; it != grid.end() && it->first == key; ++it) {
                    const std::size_t i = it->second;
                    if (skip_first && i == 0 && j == 0) continue;
                    if (segments_cross(a[i], a[i + 1], c, d)) pairs.emplace_back(i, j);
                }
            }
        }
        if (pairs.size() > 2 * max_pairs) over_budget();
    }
    over_budget();
    return pairs;
}

}  // namespace

CrossingSearch find_crossings(const BranchCurve& u, const BranchCurve& s, double alpha_min,
                              std::size_t max_crossings)
{
    CrossingSearch out;
    const auto pairs = crossing_pairs(positions(u), positions(s), true, max_crossings);

    for (auto [i, j] : pairs) {
        const Vec2 a = u.vertices[i].position;
        const Vec2 b = u.vertices[i + 1].position;
        const Vec2 c = s.vertices[j].position;
        const Vec2 d = s.vertices[j + 1].position;
        RawCrossing raw;
        raw.u_segment = i;
        raw.s_segment = j;
        raw.approx_point = a + segment_fraction(a, b, c, d) * (b - a);
        raw.angle = std::atan2(std::abs(cross(b - a, d - c)), std::abs(dot(b - a, d - c)));
        (raw.angle < alpha_min ? out.near_tangent : out.crossings).push_back(raw);
    }
    return out;
}

std::vector<PolylineCrossing> polyline_crossings(const std::vector<Vec2>& a,
                                                 const std::vector<Vec2>& b)
{
    std::vector<PolylineCrossing> out;
    for (auto [i, j] : crossing_pairs(a, b, false, std::numeric_limits<std::size_t>::max() / 4)) {
        out.push_back({i, j, a[i] + segment_fraction(a[i], a[i + 1], b[j], b[j + 1]) * (a[i + 1] - a[i])});
    }
    return out;
}

HomoclinicPoint refine_crossing(const BranchCurve& u, const BranchCurve& s, const RawCrossing& raw)
{
    const std::size_t i = raw.u_segment;
    const std::size_t j = raw.s_segment;
    const Vec2 a = u.vertices[i].position;
    const Vec2 b = u.vertices[i + 1].position;
    const Vec2 c = s.vertices[j].position;
    const Vec2 d = s.vertices[j + 1].position;
    const double fu = segment_fraction(a, b, c, d);
    const double fs = segment_fraction(c, d, a, b);
    const double tu0 = tau_on_segment(u, i, fu);
    const double ts0 = tau_on_segment(s, j, fs);

    // Keep Newton near the raw crossing so it cannot jump to a neighbour.
    auto span = [](const BranchCurve& curve, std::size_t k) {
        const double ta = curve.vertices[k].tau;
        const double tb = curve.vertices[k + 1].tau;
        return std::isfinite(ta) ? tb - ta : 1.0;
    };
    const double slack_u = 2.0 * span(u, i);
    const double slack_s = 2.0 * span(s, j);

    double tu = tu0;
    double ts = ts0;
    const double scale = std::max(1.0, norm(raw.approx_point));
    bool ok = false;
    for (int iter = 0; iter < 30; ++iter) {
        const BranchSample su = sample(u, tu);
        const BranchSample ss = sample(s, ts);
        const Vec2 f = su.point - ss.point;
        if (norm(f) < 1e-15 * scale) {
            ok = true;
            break;
        }
        const Mat2 jac{su.derivative.x, -ss.derivative.x, su.derivative.y, -ss.derivative.y};
        if (!(std::abs(jac.det()) > 0.0)) break;
        const Vec2 step = jac.inverse() * f;
        tu -= step.x;
        ts -= step.y;
        if (!std::isfinite(tu) || !std::isfinite(ts) || std::abs(tu - tu0) > slack_u ||
            std::abs(ts - ts0) > slack_s) {
            break;
        }
        if (std::abs(step.x) < 1e-15 * std::max(1.0, std::abs(tu)) &&
            std::abs(step.y) < 1e-15 * std::max(1.0, std::abs(ts))) {
            ok = true;
            break;
        }
    }

    HomoclinicPoint p;
    BranchSample su = sample(u, tu);
    BranchSample ss = sample(s, ts);
    p.residual = distance(su.point, ss.point);
    if (!ok || !(p.residual < 1e-10) || !std::isfinite(tu) || !std::isfinite(ts)) {
        tu = tu0;
        ts = ts0;
        su = sample(u, tu);
        ss = sample(s, ts);
        p.residual = distance(su.point, ss.point);
        p.low_accuracy = true;
        p.position = raw.approx_point;
    } else {
        p.position = 0.5 * (su.point + ss.point);
    }
    p.u_tau = tu;
    p.s_tau = ts;
    p.u_segment = u.segment_at_tau(tu);
    p.s_segment = s.segment_at_tau(ts);
    p.u_param = u.param_on_segment(p.u_segment, su.point);
    p.s_param = s.param_on_segment(p.s_segment, ss.point);
    p.u_tangent = normalized(su.derivative);
    p.s_tangent = normalized(ss.derivative);
    const double det = cross(p.u_tangent, p.s_tangent);
    p.crossing_sign = det >= 0.0 ? 1 : -1;
    p.angle = std::atan2(std::abs(det), dot(p.u_tangent, p.s_tangent));
    p.side_u = u.side;
    p.side_s = s.side;
    return p;
}

PairPoints find_homoclinic_points(const BranchCurve& u, const BranchCurve& s,
                                  const CrossingOptions& options)
{
    PairPoints out;
    const CrossingSearch search = find_crossings(u, s, options.alpha_min, options.max_crossings);
    std::vector<HomoclinicPoint> pts;
    auto add = [&](const RawCrossing& raw, bool near_tangent) {
        HomoclinicPoint p = refine_crossing(u, s, raw);
        const double line_angle = std::min(p.angle, std::numbers::pi - p.angle);
        if (near_tangent || line_angle < options.alpha_min) {
            p.witness_only = true;
            ++out.near_tangent;
        } else if (p.u_param > u.length() - options.end_margin ||
                   p.s_param > s.length() - options.end_margin) {
            p.witness_only = true;
            ++out.window_truncated;
        }
        if (p.low_accuracy) {
            p.witness_only = true;
            ++out.low_accuracy;
        }
        pts.push_back(p);
    };
    for (const auto& raw : search.crossings) add(raw, false);
    for (const auto& raw : search.near_tangent) add(raw, true);

    std::sort(pts.begin(), pts.end(), [](const HomoclinicPoint& a, const HomoclinicPoint& b) {
        return a.u_param < b.u_param;
    });
    for (const auto& p : pts) {
        bool merged = false;
        for (auto it = out.points.rbegin();
             it != out.points.rend() && p.u_param - it->u_param < options.dedupe_tol; ++it) {
            if (std::abs(p.s_param - it->s_param) < options.dedupe_tol) {
                if (it->witness_only && !p.witness_only) *it = p;
                merged = true;
                break;
            }
        }
        if (!merged) out.points.push_back(p);
    }
    return out;
}

std::vector<long> match_phi_action(const std::vector<HomoclinicPoint>& points,
                                   const MapModel& model, double match_tol)
{
    std::vector<std::size_t> by_x(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) by_x[i] = i;
    std::sort(by_x.begin(), by_x.end(), [&](std::size_t a, std::size_t b) {
        return points[a].position.x < points[b].position.x;
    });

    std::vector<long> action(points.size(), -1);
    std::vector<char> hit(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec2 image = model.forward(points[i].position);
        if (!std::isfinite(image.x) || !std::isfinite(image.y)) continue;
        auto lo = std::lower_bound(by_x.begin(), by_x.end(), image.x - match_tol,
                                   [&](std::size_t k, double v) { return points[k].position.x < v; });
        // Points piling up near another saddle can be closer than match_tol; a match must also
        // shift the branch parameters like phi does (u_tau + 1, s_tau - 1).
        long found = -1;
        for (auto it = lo; it != by_x.end() && points[*it].position.x <= image.x + match_tol; ++it) {
            const auto& q = points[*it];
            if (distance(q.position, image) >= match_tol) continue;
            if (std::abs(q.u_tau - points[i].u_tau - 1.0) >= match_tol ||
                std::abs(points[i].s_tau - q.s_tau - 1.0) >= match_tol) {
                continue;
            }
            if (found >= 0) throw NumericalError("ambiguous match for the image of a crossing");
            found = static_cast<long>(*it);
        }
        if (found >= 0) {
            if (hit[static_cast<std::size_t>(found)]) {
                throw NumericalError("ambiguous match: two crossings map to one");
            }
            hit[static_cast<std::size_t>(found)] = 1;
        }
        action[i] = found;
    }
    return action;
}

void write_points_csv(std::ostream& out, const std::vector<HomoclinicPoint>& points, bool header)
{
    if (header) out << "branch_pair,x,y,u_param,s_param,sign,angle\n";
    const auto old = out.precision(17);
    for (const auto& p : points) {
        out << pair_label(p.side_u, p.side_s) << ',' << p.position.x << ',' << p.position.y << ','
            << p.u_param << ',' << p.s_param << ',' << p.crossing_sign << ',' << p.angle << '\n';
    }
    out.precision(old);
}

}  // namespace hfh
