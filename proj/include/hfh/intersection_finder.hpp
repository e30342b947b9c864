#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hfh/geometry.hpp"
#include "hfh/manifold_tracer.hpp"
#include "hfh/map_models.hpp"

namespace hfh {

struct RawCrossing {
    std::size_t u_segment = 0;
    std::size_t s_segment = 0;
    Vec2 approx_point;
    double angle = 0.0;  ///< angle between the two segment directions, in [0, pi/2]
};

/// True when segments [a,b] and [c,d] touch or cross (non-strict orientation test).
/// Collinear pairs are rejected.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

struct CrossingSearch {
    std::vector<RawCrossing> crossings;
    std::vector<RawCrossing> near_tangent;  ///< segment angle below alpha_min
};

/// All intersecting segment pairs of an unstable and a stable curve, each reported once, via
/// grid hashing. The pair of initial segments (both start at x) is skipped.
/// Throws NumericalError("crossing budget exceeded") beyond `max_crossings`.
CrossingSearch find_crossings(const BranchCurve& u, const BranchCurve& s, double alpha_min = 1e-3,
                              std::size_t max_crossings = 4'000'000);

struct PolylineCrossing {
    std::size_t a_segment = 0;
    std::size_t b_segment = 0;
    Vec2 point;
};

/// Segment pairs where two polylines touch or cross, with approximate locations.
std::vector<PolylineCrossing> polyline_crossings(const std::vector<Vec2>& a,
                                                 const std::vector<Vec2>& b);

struct HomoclinicPoint {
    Vec2 position;
    double u_param = 0.0;
    double s_param = 0.0;
    double u_tau = 0.0;
    double s_tau = 0.0;
    Vec2 u_tangent;  ///< unit
    Vec2 s_tangent;  ///< unit
    int crossing_sign = 0;  ///< sign of det[u_tangent, s_tangent]
    double angle = 0.0;     ///< crossing angle in (0, pi)
    int side_u = 1;
    int side_s = 1;
    std::size_t u_segment = 0;
    std::size_t s_segment = 0;
    double residual = 0.0;  ///< |W_u(u_tau) - W_s(s_tau)|
    bool low_accuracy = false;
    /// Not a generator candidate (near-tangent, unrefined or at the far end of a trace); still a homoclinic
    /// point, so it counts when testing segments for emptiness.
    bool witness_only = false;
};

/// Newton refinement of W_u(a) = W_s(b) from a raw crossing. Falls back to the polyline
/// intersection (flagged low accuracy) when Newton stalls.
HomoclinicPoint refine_crossing(const BranchCurve& u, const BranchCurve& s, const RawCrossing& raw);

struct CrossingOptions {
    double alpha_min = 1e-3;
    double dedupe_tol = 1e-9;
    /// Crossings within this arclength of the far end of either trace are witness-only.
    double end_margin = 1e-4;
    /// Position tolerance when matching phi(p) to a detected point.
    double match_tol = 1e-6;
    std::size_t max_crossings = 4'000'000;
};

struct PairPoints {
    std::vector<HomoclinicPoint> points;  ///< sorted by u_param; includes witnesses
    std::size_t near_tangent = 0;
    std::size_t window_truncated = 0;
    std::size_t low_accuracy = 0;
};

/// Detects, refines and deduplicates all crossings of one branch pair.
PairPoints find_homoclinic_points(const BranchCurve& u, const BranchCurve& s,
                                  const CrossingOptions& options = {});

/// For each point the index of the point matching phi(p) within `match_tol`, or -1 when phi(p)
/// is outside the traced window. Throws NumericalError("ambiguous match").
std::vector<long> match_phi_action(const std::vector<HomoclinicPoint>& points,
                                   const MapModel& model, double match_tol = 1e-6);

/// Columns branch_pair,x,y,u_param,s_param,sign,angle.
void write_points_csv(std::ostream& out, const std::vector<HomoclinicPoint>& points,
                      bool header = true);

}  // namespace hfh
