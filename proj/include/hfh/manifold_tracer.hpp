#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hfh/geometry.hpp"
#include "hfh/map_models.hpp"

namespace hfh {

enum class ManifoldKind { Stable, Unstable };

std::string to_string(ManifoldKind kind);

/// Point and derivative of a branch parametrization at one parameter value.
struct BranchSample {
    Vec2 point;
    Vec2 derivative;  ///< d point / d tau
    bool escaped = false;
};

/// Continuous parametrization tau -> W(tau) of one branch.
///
/// For a traced manifold branch, tau counts fundamental domains: the map acts as
/// tau -> tau + 1 on unstable branches and tau -> tau - 1 on stable branches.
class BranchParametrization {
public:
    virtual ~BranchParametrization() = default;
    virtual BranchSample evaluate(double tau) const = 0;
};

/// Branch of W^u(phi, x) (or of W^s, traced as W^u of phi^-1) seeded on the eigenline.
///
/// W(tau) = g^m(x + delta lambda^(tau - m) e) with g = phi or phi^-1, m = max(0, floor(tau) + j),
/// where j pre-iterations put the seed deep in the linear regime.
class ManifoldParametrization final : public BranchParametrization {
public:
    ManifoldParametrization(MapPtr model, const HyperbolicFixedPoint& fp, ManifoldKind kind,
                            int side, double delta, Box box);

    BranchSample evaluate(double tau) const override;
    /// One step of the map along the branch (phi for unstable, phi^-1 for stable), tau -> tau + 1.
    BranchSample advance(const BranchSample& sample) const;

    ManifoldKind kind() const { return kind_; }
    int side() const { return side_; }
    double delta() const { return delta_; }
    double lambda() const { return lambda_; }
    Vec2 direction() const { return direction_; }
    Vec2 base() const { return base_; }
    int linear_steps() const { return linear_steps_; }
    const MapModel& model() const { return *model_; }
    const Box& box() const { return box_; }

private:
    Vec2 step(Vec2 z) const;
    Mat2 step_jacobian(Vec2 z, Vec2 image) const;

    MapPtr model_;
    ManifoldKind kind_;
    int side_;
    Vec2 base_;
    Vec2 direction_;
    double lambda_;
    double delta_;
    int linear_steps_;
    Box box_;
};

/// Piecewise-linear parametrization through explicit vertices; vertex i sits at tau = i.
/// Used for synthetic curves.
class PolylineParametrization final : public BranchParametrization {
public:
    explicit PolylineParametrization(std::vector<Vec2> points) : points_(std::move(points)) {}
    BranchSample evaluate(double tau) const override;

private:
    std::vector<Vec2> points_;
};

struct CurveVertex {
    Vec2 position;
    double param = 0.0;    ///< cumulative chord arclength from x
    double tau = 0.0;      ///< parametrization value; -inf at x
    Vec2 tangent;          ///< d position / d tau (unit eigendirection at x)
    double turning = 0.0;  ///< cumulative signed tangent turning from x
};

/// Oriented polyline approximation of one branch, starting at the fixed point x.
struct BranchCurve {
    ManifoldKind kind = ManifoldKind::Unstable;
    int side = 1;
    std::vector<CurveVertex> vertices;
    int depth = 0;
    double seed_delta = 0.0;
    double lambda = 0.0;     ///< growth factor per unit tau; 0 for synthetic curves
    bool truncated = false;  ///< stopped at the bounding box
    std::size_t unresolved_segments = 0;  ///< segments that hit the parameter resolution floor
    std::shared_ptr<const BranchParametrization> parametrization;

    double tau_max() const { return vertices.empty() ? 0.0 : vertices.back().tau; }
    double length() const { return vertices.empty() ? 0.0 : vertices.back().param; }
    std::size_t segment_count() const { return vertices.size() < 2 ? 0 : vertices.size() - 1; }

    /// Index of the segment [v_i, v_{i+1}] containing arclength `param` (clamped).
    std::size_t segment_at_param(double param) const;
    /// Index of the segment whose tau range contains `tau` (clamped).
    std::size_t segment_at_tau(double tau) const;
    /// Arclength convention for a point on segment i: param_i + |z - v_i|.
    double param_on_segment(std::size_t segment, Vec2 z) const;
    /// Tau of the point at arclength `param`, refined on the parametrization.
    double tau_at_param(double param) const;
    /// Arclength of W(tau) on this curve.
    double param_at_tau(double tau) const;
    /// Position on the polyline at arclength `param`.
    Vec2 point_at_param(double param) const;
};

/// Builds a synthetic curve through `points` (points[0] is the fixed point).
/// Tangents are the outgoing chord directions.
BranchCurve make_polyline_curve(ManifoldKind kind, int side, std::vector<Vec2> points);

struct TraceOptions {
    double delta = 1e-4;
    int depth = 6;
    double h_max = 1e-2;
    double theta_max = 0.1;
    /// Segments shorter than this are not split for turning.
    double min_chord = 1e-9;
    int seed_points = 32;
    std::size_t vertex_cap = 2'000'000;
    bool truncate_at_box = true;
    Box box{};
    /// Linear-regime tolerance: |phi(x + delta e) - (x + lambda delta e)| < c delta^2.
    double linear_regime_c = 1.0;
};

/// Points spanning [x + delta e, phi(x + delta e)] on the chosen branch, corrected onto the
/// manifold. Throws ConfigError("delta too large") when the linear-regime check fails.
std::vector<Vec2> seed_fundamental_segment(MapPtr model, const HyperbolicFixedPoint& fp,
                                           ManifoldKind kind, int side, double delta, int m_pts,
                                           double linear_regime_c = 1.0);

/// Adaptive polyline covering the seed domain plus `options.depth` further fundamental domains.
/// Errors: "refinement budget exceeded" (NumericalError); "orbit escaped" when the curve leaves
/// the box and truncate_at_box is false.
BranchCurve trace_branch(MapPtr model, const HyperbolicFixedPoint& fp, ManifoldKind kind,
                         int side, const TraceOptions& options);

/// Continues an already traced branch to `new_depth` fundamental domains.
void extend_branch(BranchCurve& curve, int new_depth, const TraceOptions& options);

/// Arclength of phi^n(point at `param`) on the same curve, by projecting the mapped point onto
/// the curve. Throws WindowError("image beyond traced portion") when the residual reaches
/// `proj_tol` or the image lies outside the traced range.
double param_of_iterate(const BranchCurve& curve, double param, int n, const MapModel& model,
                        double proj_tol = 1e-6);

/// Writes columns kind,side,index,x,y,param.
void write_curve_csv(std::ostream& out, const BranchCurve& curve, bool header = true);

/// Independent check that a vertex lies on the manifold: maps it |n_check| steps towards x and
/// returns the distance of the image to the polyline.
double invariance_residual(const BranchCurve& curve, std::size_t vertex, const MapModel& model,
                           int n_check = 3);

/// Distance from z to the polyline, searching segments with tau in [tau_lo, tau_hi].
double distance_to_polyline(const BranchCurve& curve, Vec2 z, double tau_lo, double tau_hi);

}  // namespace hfh
