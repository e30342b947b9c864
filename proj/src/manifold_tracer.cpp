#include "hfh/manifold_tracer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "hfh/error.hpp"

namespace hfh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest tau gap we are willing to bisect.
double tau_resolution(double tau)
{
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(tau));
}

bool finite(Vec2 z) { return std::isfinite(z.x) && std::isfinite(z.y); }

double point_segment_distance(Vec2 z, Vec2 a, Vec2 b, double* fraction = nullptr)
{
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double f = len2 > 0.0 ? dot(z - a, ab) / len2 : 0.0;
    f = std::clamp(f, 0.0, 1.0);
    if (fraction) *fraction = f;
    return distance(z, a + f * ab);
}

const ManifoldParametrization* manifold_of(const BranchCurve& curve)
{
    return dynamic_cast<const ManifoldParametrization*>(curve.parametrization.get());
}

CurveVertex vertex_from(const BranchSample& s, double tau)
{
    CurveVertex v;
    v.position = s.point;
    v.tau = tau;
    v.tangent = s.derivative;
    return v;
}

// Recomputes arclength and cumulative turning from vertex `from` on.
void finalize(BranchCurve& curve, std::size_t from)
{
    auto& v = curve.vertices;
    if (v.empty()) return;
    if (from == 0) {
        v[0].param = 0.0;
        v[0].turning = 0.0;
        from = 1;
    }
    for (std::size_t i = from; i < v.size(); ++i) {
        v[i].param = v[i - 1].param + distance(v[i].position, v[i - 1].position);
        v[i].turning = v[i - 1].turning + signed_turn(v[i - 1].tangent, v[i].tangent);
    }
}

double chord_turn(const std::vector<CurveVertex>& v, std::size_t i)
{
    // Turn of the polyline at interior vertex i.
    return std::abs(signed_turn(v[i].position - v[i - 1].position,
                                v[i + 1].position - v[i].position));
}

// Bisects segments with index >= first until every segment satisfies the chord-length and
// turning limits. Returns true when a midpoint escaped the box (the curve is cut there).
bool refine_tail(BranchCurve& curve, std::size_t first, const TraceOptions& options,
                 const BranchParametrization& w)
{
    auto& v = curve.vertices;
    first = std::max<std::size_t>(first, 1);
    bool changed = true;
    bool cut = false;
    std::size_t unresolved = 0;
    while (changed && !cut) {
        changed = false;
        unresolved = 0;
        std::vector<CurveVertex> tail;
        tail.reserve(2 * (v.size() - first));
        for (std::size_t i = first; i + 1 < v.size(); ++i) {
            const CurveVertex& a = v[i];
            const CurveVertex& b = v[i + 1];
            const double chord = distance(a.position, b.position);
            bool bad = chord > options.h_max;
            bool turn = std::abs(signed_turn(a.tangent, b.tangent)) > options.theta_max;
            if (!turn && i >= 1) turn = chord_turn(v, i) > options.theta_max;
            if (!turn && i + 2 < v.size()) turn = chord_turn(v, i + 1) > options.theta_max;
            if (turn && chord < options.min_chord) {
                // Directions of chords this short are rounding noise.
                ++unresolved;
                turn = false;
            }
            bad = bad || turn;
            if (bad) {
                if (b.tau - a.tau <= tau_resolution(a.tau)) {
                    ++unresolved;
                } else {
                    const double mid = 0.5 * (a.tau + b.tau);
                    const BranchSample s = w.evaluate(mid);
                    if (s.escaped) {
                        cut = true;
                        break;
                    }
                    tail.push_back(vertex_from(s, mid));
                    changed = true;
                }
            }
            tail.push_back(b);
        }
        v.resize(first + 1);
        v.insert(v.end(), tail.begin(), tail.end());
        if (v.size() > options.vertex_cap) {
            throw NumericalError("refinement budget exceeded (" + std::to_string(v.size()) +
                                 " vertices)");
        }
    }
    curve.unresolved_segments += unresolved;
    return cut;
}

// Appends fundamental domain curve.depth + 1 by pushing the last one forward.
void add_domain(BranchCurve& curve, const ManifoldParametrization& w, const TraceOptions& options)
{
    auto& v = curve.vertices;
    const double d = static_cast<double>(curve.depth);
    const std::size_t end = v.size() - 1;  // vertex at tau = depth + 1
    std::size_t start = end;
    while (start > 1 && v[start - 1].tau >= d) --start;

    std::vector<CurveVertex> next;
    next.reserve(end - start);
    bool cut = false;
    for (std::size_t i = start + 1; i <= end; ++i) {
        BranchSample s{v[i].position, v[i].tangent, false};
        s = w.advance(s);
        if (s.escaped) {
            cut = true;
            break;
        }
        next.push_back(vertex_from(s, v[i].tau + 1.0));
    }
    v.insert(v.end(), next.begin(), next.end());
    curve.depth += 1;
    if (!cut) cut = refine_tail(curve, end > 1 ? end - 1 : 1, options, w);
    if (cut) {
        if (!options.truncate_at_box) throw NumericalError("orbit escaped the box while tracing");
        curve.truncated = true;
    }
    finalize(curve, end > 0 ? end - 1 : 0);
}

}  // namespace

std::string to_string(ManifoldKind kind)
{
    return kind == ManifoldKind::Stable ? "stable" : "unstable";
}

ManifoldParametrization::ManifoldParametrization(MapPtr model, const HyperbolicFixedPoint& fp,
                                                 ManifoldKind kind, int side, double delta,
                                                 Box box)
    : model_(std::move(model)),
      kind_(kind),
      side_(side),
      base_(fp.location),
      lambda_(fp.lambda),
      delta_(delta),
      box_(box)
{
    if (side != 1 && side != -1) throw ConfigError("branch side must be +1 or -1");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(lambda_ > 1.0)) throw ConfigError("fixed point is not hyperbolic");
    const Vec2 e = kind == ManifoldKind::Unstable ? fp.unstable_dir : fp.stable_dir;
    direction_ = static_cast<double>(side) * e;
    const double target = 1e-8 * std::max(1.0, norm(base_));
    linear_steps_ =
        delta > target ? static_cast<int>(std::ceil(std::log(delta / target) / std::log(lambda_)))
                       : 0;
}

Vec2 ManifoldParametrization::step(Vec2 z) const
{
    return kind_ == ManifoldKind::Unstable ? model_->forward(z) : model_->inverse(z);
}

Mat2 ManifoldParametrization::step_jacobian(Vec2 z, Vec2 image) const
{
    return kind_ == ManifoldKind::Unstable ? model_->jacobian(z) : model_->jacobian(image).inverse();
}

BranchSample ManifoldParametrization::advance(const BranchSample& sample) const
{
    BranchSample out;
    out.point = step(sample.point);
    out.derivative = step_jacobian(sample.point, out.point) * sample.derivative;
    out.escaped = sample.escaped || !finite(out.point) || !box_.contains(out.point);
    return out;
}

BranchSample ManifoldParametrization::evaluate(double tau) const
{
    if (!std::isfinite(tau)) return {base_, {0.0, 0.0}, false};
    const int m = std::max(0, static_cast<int>(std::floor(tau)) + linear_steps_);
    const double t = delta_ * std::pow(lambda_, tau - m);
    BranchSample s{base_ + t * direction_, (t * std::log(lambda_)) * direction_, false};
    for (int i = 0; i < m && !s.escaped; ++i) s = advance(s);
    return s;
}

BranchSample PolylineParametrization::evaluate(double tau) const
{
    if (points_.size() < 2) return {points_.empty() ? Vec2{} : points_[0], {}, false};
    const double last = static_cast<double>(points_.size() - 2);
    const double i = std::clamp(std::floor(tau), 0.0, last);
    const auto k = static_cast<std::size_t>(i);
    const Vec2 d = points_[k + 1] - points_[k];
    return {points_[k] + (tau - i) * d, d, false};
}

std::size_t BranchCurve::segment_at_param(double param) const
{
    if (vertices.size() < 2) return 0;
    auto it = std::upper_bound(vertices.begin(), vertices.end(), param,
                               [](double p, const CurveVertex& v) { return p < v.param; });
    const auto idx = static_cast<std::size_t>(it - vertices.begin());
    return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, vertices.size() - 2);
}

std::size_t BranchCurve::segment_at_tau(double tau) const
{
    if (vertices.size() < 2) return 0;
    auto it = std::upper_bound(vertices.begin(), vertices.end(), tau,
                               [](double t, const CurveVertex& v) { return t < v.tau; });
    const auto idx = static_cast<std::size_t>(it - vertices.begin());
    return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, vertices.size() - 2);
}

double BranchCurve::param_on_segment(std::size_t segment, Vec2 z) const
{
    return vertices[segment].param + distance(z, vertices[segment].position);
}

double BranchCurve::tau_at_param(double param) const
{
    if (vertices.size() < 2) return 0.0;
    const std::size_t i = segment_at_param(param);
    const CurveVertex& a = vertices[i];
    const CurveVertex& b = vertices[i + 1];
    const double target = param - a.param;
    const double span = b.param - a.param;
    double tau;
    if (std::isfinite(a.tau)) {
        const double f = span > 0.0 ? std::clamp(target / span, 0.0, 1.0) : 0.0;
        tau = a.tau + f * (b.tau - a.tau);
    } else {
        if (target <= 0.0) return -kInf;
        const double growth = lambda > 1.0 ? lambda : 2.0;
        tau = b.tau + std::log(target / std::max(span, 1e-300)) / std::log(growth);
    }
    if (!parametrization) return tau;

    for (int iter = 0; iter < 40; ++iter) {
        const BranchSample s = parametrization->evaluate(tau);
        const Vec2 r = s.point - a.position;
        const double dist = norm(r);
        const double g = dist - target;
        if (std::abs(g) <= 1e-15 * std::max(1.0, param)) break;
        const double slope = dist > 0.0 ? dot(r, s.derivative) / dist : norm(s.derivative);
        if (!(std::abs(slope) > 0.0)) break;
        double next = tau - g / slope;
        if (std::isfinite(a.tau)) next = std::clamp(next, a.tau, b.tau);
        else next = std::min(next, b.tau);
        if (std::abs(next - tau) <= tau_resolution(tau)) {
            tau = next;
            break;
        }
        tau = next;
    }
    return tau;
}

double BranchCurve::param_at_tau(double tau) const
{
    if (vertices.size() < 2) return 0.0;
    if (!std::isfinite(tau) && tau < 0.0) return 0.0;
    const std::size_t i = segment_at_tau(tau);
    Vec2 z;
    if (parametrization) {
        z = parametrization->evaluate(tau).point;
    } else {
        const CurveVertex& a = vertices[i];
        const CurveVertex& b = vertices[i + 1];
        const double f = (tau - a.tau) / (b.tau - a.tau);
        z = a.position + f * (b.position - a.position);
    }
    return param_on_segment(i, z);
}

Vec2 BranchCurve::point_at_param(double param) const
{
    if (vertices.empty()) return {};
    if (vertices.size() == 1) return vertices[0].position;
    const std::size_t i = segment_at_param(param);
    const CurveVertex& a = vertices[i];
    const CurveVertex& b = vertices[i + 1];
    const double span = b.param - a.param;
    const double f = span > 0.0 ? (param - a.param) / span : 0.0;
    return a.position + f * (b.position - a.position);
}

BranchCurve make_polyline_curve(ManifoldKind kind, int side, std::vector<Vec2> points)
{
    BranchCurve curve;
    curve.kind = kind;
    curve.side = side;
    for (std::size_t i = 0; i < points.size(); ++i) {
        CurveVertex v;
        v.position = points[i];
        v.tau = static_cast<double>(i);
        if (i + 1 < points.size()) v.tangent = points[i + 1] - points[i];
        else if (i > 0) v.tangent = points[i] - points[i - 1];
        curve.vertices.push_back(v);
    }
    finalize(curve, 0);
    curve.depth = points.empty() ? 0 : static_cast<int>(points.size()) - 1;
    curve.parametrization = std::make_shared<PolylineParametrization>(std::move(points));
    return curve;
}

std::vector<Vec2> seed_fundamental_segment(MapPtr model, const HyperbolicFixedPoint& fp,
                                           ManifoldKind kind, int side, double delta, int m_pts,
                                           double linear_regime_c)
{
    if (m_pts < 2) throw ConfigError("seed needs at least two points");
    const Box wide{{-1e300, -1e300}, {1e300, 1e300}};
    ManifoldParametrization w(model, fp, kind, side, delta, wide);
    const Vec2 start = fp.location + delta * w.direction();
    const Vec2 image = kind == ManifoldKind::Unstable ? model->forward(start) : model->inverse(start);
    const double err = distance(image, fp.location + (fp.lambda * delta) * w.direction());
    if (!(err < linear_regime_c * delta * delta)) {
        throw ConfigError("delta too large: linear-regime error " + std::to_string(err));
    }
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(m_pts));
    for (int i = 0; i < m_pts; ++i) {
        pts.push_back(w.evaluate(static_cast<double>(i) / (m_pts - 1)).point);
    }
    return pts;
}

BranchCurve trace_branch(MapPtr model, const HyperbolicFixedPoint& fp, ManifoldKind kind,
                         int side, const TraceOptions& options)
{
    if (options.depth < 0) throw ConfigError("depth must be non-negative");
    if (options.seed_points < 2) throw ConfigError("seed needs at least two points");
    // Runs the linear-regime check.
    seed_fundamental_segment(model, fp, kind, side, options.delta, 2, options.linear_regime_c);

    auto w = std::make_shared<ManifoldParametrization>(model, fp, kind, side, options.delta,
                                                       options.box);
    BranchCurve curve;
    curve.kind = kind;
    curve.side = side;
    curve.seed_delta = options.delta;
    curve.lambda = fp.lambda;
    curve.parametrization = w;

    CurveVertex origin;
    origin.position = fp.location;
    origin.tau = -kInf;
    origin.tangent = w->direction();
    curve.vertices.push_back(origin);

    bool cut = false;
    for (int i = 0; i <= options.seed_points; ++i) {
        const double tau = static_cast<double>(i) / options.seed_points;
        const BranchSample s = w->evaluate(tau);
        if (s.escaped) {
            cut = true;
            break;
        }
        curve.vertices.push_back(vertex_from(s, tau));
    }
    if (!cut) cut = refine_tail(curve, 1, options, *w);
    if (cut) {
        if (!options.truncate_at_box) throw NumericalError("orbit escaped the box while tracing");
        curve.truncated = true;
    }
    finalize(curve, 0);
    curve.depth = 0;
    extend_branch(curve, options.depth, options);
    return curve;
}

void extend_branch(BranchCurve& curve, int new_depth, const TraceOptions& options)
{
    const auto* w = manifold_of(curve);
    if (!w) throw ConfigError("only traced manifold branches can be extended");
    while (curve.depth < new_depth && !curve.truncated) add_domain(curve, *w, options);
}

double param_of_iterate(const BranchCurve& curve, double param, int n, const MapModel& model,
                        double proj_tol)
{
    if (n == 0) return param;
    const auto* w = manifold_of(curve);
    if (!w) throw ConfigError("iterates are only defined on traced manifold branches");

    const double tau = curve.tau_at_param(param);
    const Vec2 z = std::isfinite(tau) ? w->evaluate(tau).point : w->base();
    Vec2 image;
    try {
        image = eval_forward(model, z, n, w->box());
    } catch (const NumericalError&) {
        throw WindowError("image beyond traced portion (orbit left the box)");
    }
    if (!std::isfinite(tau)) return 0.0;

    const double predicted = curve.kind == ManifoldKind::Unstable ? tau + n : tau - n;
    if (predicted > curve.tau_max() + 1e-9) throw WindowError("image beyond traced portion");

    // Nearest polyline point among segments of the neighbouring fundamental domains.
    const std::size_t lo = curve.segment_at_tau(predicted - 1.0);
    const std::size_t hi = curve.segment_at_tau(predicted + 1.0);
    double best = kInf;
    double guess = predicted;
    for (std::size_t i = lo; i <= hi; ++i) {
        const CurveVertex& a = curve.vertices[i];
        const CurveVertex& b = curve.vertices[i + 1];
        double f = 0.0;
        const double d = point_segment_distance(image, a.position, b.position, &f);
        if (d < best) {
            best = d;
            if (std::isfinite(a.tau)) {
                guess = a.tau + f * (b.tau - a.tau);
            } else {
                const double r = std::max(distance(image, a.position), 1e-300);
                guess = b.tau + std::log(r / std::max(b.param, 1e-300)) / std::log(w->lambda());
            }
        }
    }

    double t = guess;
    for (int iter = 0; iter < 30; ++iter) {
        const BranchSample s = w->evaluate(t);
        const double g2 = dot(s.derivative, s.derivative);
        if (!(g2 > 0.0)) break;
        const double step = dot(s.point - image, s.derivative) / g2;
        t -= step;
        if (std::abs(step) <= tau_resolution(t)) break;
    }
    const double residual = distance(w->evaluate(t).point, image);
    if (t > curve.tau_max() + 1e-9 || !(residual < proj_tol)) {
        throw WindowError("image beyond traced portion (projection residual " +
                          std::to_string(residual) + ")");
    }
    return curve.param_at_tau(t);
}

void write_curve_csv(std::ostream& out, const BranchCurve& curve, bool header)
{
    if (header) out << "kind,side,index,x,y,param\n";
    const auto old = out.precision(17);
    for (std::size_t i = 0; i < curve.vertices.size(); ++i) {
        const CurveVertex& v = curve.vertices[i];
        out << to_string(curve.kind) << ',' << curve.side << ',' << i << ',' << v.position.x << ','
            << v.position.y << ',' << v.param << '\n';
    }
    out.precision(old);
}

double distance_to_polyline(const BranchCurve& curve, Vec2 z, double tau_lo, double tau_hi)
{
    if (curve.vertices.empty()) return kInf;
    if (curve.vertices.size() == 1) return distance(z, curve.vertices[0].position);
    const std::size_t lo = curve.segment_at_tau(tau_lo);
    const std::size_t hi = curve.segment_at_tau(tau_hi);
    double best = kInf;
    for (std::size_t i = lo; i <= hi; ++i) {
        best = std::min(best, point_segment_distance(z, curve.vertices[i].position,
                                                     curve.vertices[i + 1].position));
    }
    return best;
}

double invariance_residual(const BranchCurve& curve, std::size_t vertex, const MapModel& model,
                           int n_check)
{
    const CurveVertex& v = curve.vertices.at(vertex);
    if (!std::isfinite(v.tau)) return 0.0;
    const int n = curve.kind == ManifoldKind::Unstable ? -n_check : n_check;
    const Vec2 image = eval_forward(model, v.position, n);
    const double tau = v.tau - n_check;
    return distance_to_polyline(curve, image, tau - 0.5, tau + 0.5);
}

}  // namespace hfh
