#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hfh/intersection_finder.hpp"
#include "hfh/manifold_tracer.hpp"
#include "hfh/map_models.hpp"

namespace hfh {

/// Position on W^u or W^s taken as a whole curve through x.
/// side 0 is x itself; otherwise tau orders points on the branch (larger is farther from x).
struct BranchPos {
    ManifoldKind kind = ManifoldKind::Unstable;
    int side = 0;
    double tau = 0.0;
};

BranchPos x_pos(ManifoldKind kind);
BranchPos u_pos(const HomoclinicPoint& p);
BranchPos s_pos(const HomoclinicPoint& p);

/// Order along the curve from the side -1 end through x to the side +1 end.
bool precedes(const BranchPos& a, const BranchPos& b);

/// Whether q lies in the segment between a and b (open or closed). Throws ConfigError
/// ("different branches") when the positions belong to different manifolds.
bool segment_contains(const BranchPos& a, const BranchPos& b, const BranchPos& q, bool open);

/// p <_u q: q farther from x on the same unstable branch.
bool less_u(const HomoclinicPoint& p, const HomoclinicPoint& q);
/// p <_s q: q closer to x on the same stable branch.
bool less_s(const HomoclinicPoint& p, const HomoclinicPoint& q);

/// The four traced branches around one fixed point.
struct TracedManifolds {
    MapPtr model;
    HyperbolicFixedPoint fp;
    std::array<BranchCurve, 2> unstable;  ///< index 0: side +1, index 1: side -1
    std::array<BranchCurve, 2> stable;

    static std::size_t slot(int side) { return side > 0 ? 0 : 1; }
    const BranchCurve& branch(ManifoldKind kind, int side) const
    {
        return kind == ManifoldKind::Unstable ? unstable[slot(side)] : stable[slot(side)];
    }
};

/// Homoclinic points of one branch pair with the phi-action and primary flags.
struct Tangle {
    int side_u = 1;
    int side_s = 1;
    std::vector<HomoclinicPoint> points;  ///< sorted by u_param
    std::vector<long> action;             ///< index of phi(p), -1 outside the window
    std::vector<char> primary;
    double u_limit = 0.0;  ///< generator candidates need u_tau below this
    double s_limit = 0.0;
};

Tangle build_tangle(const BranchCurve& u, const BranchCurve& s, const MapModel& model,
                    const CrossingOptions& options = {});

/// Primary flags by a sweep in u order: p is primary iff no other point has both a smaller
/// u-parameter and a smaller s-parameter.
std::vector<char> primary_flags(const std::vector<HomoclinicPoint>& points);

bool is_primary(const Tangle& tangle, std::size_t index);

/// Index of the crossing met first when both branches grow together from x: minimal
/// max(u_tau, s_tau), ties by the sum. Witness-only points are skipped.
/// Throws WindowError("no intersection in window").
std::size_t first_intersection(const Tangle& tangle);

/// Index of the detected point at the predicted orbit position, or -1.
long find_point(const Tangle& tangle, double u_tau, double s_tau, double tol = 1e-7);

struct OrbitClass {
    int pair = 0;                    ///< index of the tangle
    std::size_t representative = 0;  ///< canonical member in [p0, phi(p0)[
    std::vector<std::size_t> members_in_window;
    int maslov = 0;
    bool primary = true;
    double level = 0.0;  ///< u_tau + s_tau, constant along the orbit
};

/// Primary points in [p0, phi(p0)[_s and [p0, phi(p0)[_u, one class per orbit.
/// Throws WindowError("window insufficient") when [p0, phi(p0)[ is not traced.
std::vector<OrbitClass> fundamental_representatives(const Tangle& tangle, std::size_t p0,
                                                    int pair_index = 0);

struct MaslovResult {
    int value = 0;
    double residual = 0.0;  ///< distance of the turning sum / pi from the nearest integer
};

/// mu(p) = mu(p, x): turning of the loop p -> x along W^u, x -> p along W^s, with the corner
/// at x rotated counter-clockwise and the corner at p clockwise (line rotations).
/// Throws NumericalError when the residual reaches 0.1.
MaslovResult maslov_index(const BranchCurve& u, const BranchCurve& s, const HomoclinicPoint& p);

inline int relative_maslov(int mu_p, int mu_q) { return mu_p - mu_q; }

/// Columns orbit_id,rep_x,rep_y,u_param,s_param,maslov,primary.
void write_classes_csv(std::ostream& out, const std::vector<Tangle>& tangles,
                       const std::vector<OrbitClass>& classes, bool header = true);

}  // namespace hfh
