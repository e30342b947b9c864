#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "hfh/int_matrix.hpp"
#include "hfh/tangle.hpp"

namespace hfh {

/// A point of W^u ∩ W^s given by its branch positions. Integer shifts of detected points are
/// orbit members that need not lie inside the traced window.
struct OrbitPoint {
    int side_u = 1;
    int side_s = 1;
    double u_tau = 0.0;
    double s_tau = 0.0;

    /// phi^n of the point.
    OrbitPoint shifted(int n) const { return {side_u, side_s, u_tau + n, s_tau - n}; }
};

OrbitPoint orbit_point(const HomoclinicPoint& p);

/// Detected homoclinic points of all four branch pairs, indexed for segment queries.
class FloerContext {
public:
    /// `tangles` may cover any subset of the four branch pairs.
    FloerContext(const TracedManifolds& manifolds, const std::vector<Tangle>& tangles);

    /// Detected points in ]p,q[_u ∩ ]p,q[_s. Endpoints are excluded with a tau tolerance.
    std::size_t points_between(const OrbitPoint& p, const OrbitPoint& q) const;

    /// Whether the open arcs ]p,q[_u and ]p,q[_s of the traced polylines are disjoint.
    bool boundary_loop_simple(const OrbitPoint& p, const OrbitPoint& q) const;

    /// Smallest-magnitude k such that phi^k moves both points inside the traced window.
    /// Throws WindowError("window insufficient") when no such k exists.
    int window_shift(const OrbitPoint& p, const OrbitPoint& q) const;

    double u_limit(int side) const { return u_limit_[TracedManifolds::slot(side)]; }
    double s_limit(int side) const { return s_limit_[TracedManifolds::slot(side)]; }

private:
    struct Entry {
        double u_tau;
        double s_tau;
        int side_s;
    };

    std::vector<Vec2> arc(ManifoldKind kind, int side_a, double tau_a, int side_b,
                          double tau_b) const;

    const TracedManifolds& manifolds_;
    std::array<std::vector<Entry>, 2> by_u_;  ///< per unstable side, sorted by u_tau
    std::array<double, 2> u_limit_{};
    std::array<double, 2> s_limit_{};
};

/// Placement case: 1 x in neither open segment, 2 only in ]p,q[_u,
/// 3 only in ]p,q[_s, 4 in both.
int place_case(const OrbitPoint& p, const OrbitPoint& q);

/// Whether q lies in the ]phi^-1(p), phi(p)[ windows required for its case (never for case 4).
bool in_place_window(const OrbitPoint& p, const OrbitPoint& q);

/// Jump-direction sign of the p -> q orientation: on the unstable segment when x is not in
/// ]p,q[_u, otherwise on the stable segment.
int sign_m(const OrbitPoint& p, const OrbitPoint& q, ManifoldKind* comparison = nullptr);

struct BigonQuery {
    OrbitPoint p;
    OrbitPoint q;
    bool exists = false;
    int sign = 0;
    ManifoldKind comparison_branch = ManifoldKind::Unstable;
    int place_case = 0;
    bool in_place_window = false;
    std::size_t points_inside = 0;
    bool simple_loop = false;
    int window_shift = 0;  ///< common iterate used to evaluate the query inside the window
};

/// Bigon test for mu(p) - mu(q) = index_difference. Exists iff the index difference is one,
/// no detected point lies in ]p,q[_u ∩ ]p,q[_s and the boundary loop is simple.
BigonQuery bigon_exists(const FloerContext& ctx, const OrbitPoint& p, const OrbitPoint& q,
                        int index_difference);

/// Shifts n for which phi^n(q) lies in the placement windows around p.
std::vector<int> candidate_shifts(const OrbitPoint& p, const OrbitPoint& q);

struct CoefficientResult {
    int value = 0;
    std::vector<BigonQuery> bigons;  ///< existing bigons, sorted by shift
    std::vector<int> shifts;         ///< shift n of each bigon
};

/// m(<p>,<q>) summed over the placement candidates. Throws TheoremViolation("bound violated")
/// when two bigons are not adjacent iterates of opposite sign.
CoefficientResult orbit_coefficient(const FloerContext& ctx, const OrbitPoint& p,
                                    const OrbitPoint& q, int index_difference);

struct WideScanReport {
    int n_scan = 5;
    std::size_t generator_pairs = 0;
    std::size_t queries = 0;
    std::size_t bigons = 0;
    std::size_t bound_violations = 0;        ///< bigon at a shift outside the placement candidates
    std::size_t exclusivity_violations = 0;  ///< bigon shifts not adjacent or signs not opposite
    std::size_t place_violations = 0;        ///< existing bigon outside its placement window
    std::size_t case4_bigons = 0;
    std::size_t coefficient_mismatches = 0;  ///< wide-scan sum differs from the production sum
    std::vector<std::string> details;

    std::size_t violations() const
    {
        return bound_violations + exclusivity_violations + place_violations + case4_bigons +
               coefficient_mismatches;
    }
};

struct Generator {
    int pair = 0;  ///< index into the tangle list
    std::size_t representative = 0;
    int maslov = 0;
    OrbitPoint point;
};

/// Nonzero boundary coefficient m(<from>, <to>) between generator ids.
struct BoundaryTerm {
    std::size_t from = 0;
    std::size_t to = 0;
    int value = 0;
};

struct BigonData {
    std::vector<Generator> generators;  ///< sorted by decreasing Maslov index
    std::vector<BoundaryTerm> terms;
    std::vector<BigonQuery> bigons;  ///< every existing bigon met by the production search
    WideScanReport wide_scan;
    bool wide_scan_run = false;
};

struct ChainComplexData {
    static constexpr int min_degree = -3;
    static constexpr int max_degree = 3;

    std::vector<Generator> generators;
    std::array<std::vector<std::size_t>, 9> by_degree;  ///< generator ids, index k + 4
    std::array<IntMatrix, 9> boundary;                   ///< d_k : C_k -> C_{k-1}, index k + 4

    std::size_t rank(int k) const;
    const IntMatrix& d(int k) const;
    const std::vector<std::size_t>& degree(int k) const;
};

struct ComplexOptions {
    bool wide_scan = false;
    int n_scan = 5;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Bigons and signs for every generator pair of adjacent index, with the optional wide scan.
/// Throws TheoremViolation for an index outside {±1,±2,±3} and for bound or placement violations.
BigonData determine_bigons(const FloerContext& ctx, std::vector<Generator> generators,
                           const ComplexOptions& options = {});

/// Boundary matrices from the coefficients. Throws TheoremViolation for an entry outside
/// {-1,0,1} ("bound violated") or "d-squared nonzero".
ChainComplexData assemble_complex(std::vector<Generator> generators,
                                  const std::vector<BoundaryTerm>& terms);

/// determine_bigons followed by assemble_complex.
ChainComplexData build_complex(const FloerContext& ctx, std::vector<Generator> generators,
                               const ComplexOptions& options = {}, BigonData* bigons = nullptr);

/// Exact check of d_{k-1} d_k = 0; returns a description of the first failure or "".
std::string check_d_squared(const ChainComplexData& complex);

}  // namespace hfh
