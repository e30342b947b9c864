#include <algorithm>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "doctest.h"
#include "hfh/intersection_finder.hpp"

using namespace hfh;

namespace {

// Proper intersection by solving a + t(b - a) = c + r(d - c) directly.
bool solve_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const Vec2 e = b - a;
    const Vec2 f = d - c;
    const double den = e.x * f.y - e.y * f.x;
    if (den == 0.0) return false;
    const Vec2 g = c - a;
    const double t = (g.x * f.y - g.y * f.x) / den;
    const double r = (g.x * e.y - g.y * e.x) / den;
    return t >= 0.0 && t <= 1.0 && r >= 0.0 && r <= 1.0;
}

std::vector<Vec2> random_walk(std::mt19937_64& rng, std::size_t n, double step)
{
    std::uniform_real_distribution<double> d(-step, step);
    std::vector<Vec2> pts{{0.0, 0.0}};
    for (std::size_t i = 1; i < n; ++i) pts.push_back(pts.back() + Vec2{d(rng), d(rng)});
    return pts;
}

}  // namespace

TEST_CASE("segments_cross basic configurations")
{
    CHECK(segments_cross({-1, 0}, {1, 0}, {0, -1}, {0, 1}));
    CHECK_FALSE(segments_cross({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    CHECK_FALSE(segments_cross({0, 0}, {1, 0}, {2, 0}, {3, 0}));
    CHECK_FALSE(segments_cross({0, 0}, {2, 0}, {1, 0}, {3, 0}));  // collinear overlap
    CHECK(segments_cross({0, 0}, {1, 0}, {1, 0}, {1, 1}));        // touching endpoints
}

TEST_CASE("find_crossings matches a brute-force search")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto up = random_walk(rng, 200, 0.3);
        auto sp = random_walk(rng, 200, 0.3);
        const auto u = make_polyline_curve(ManifoldKind::Unstable, 1, up);
        const auto s = make_polyline_curve(ManifoldKind::Stable, 1, sp);

        std::set<std::pair<std::size_t, std::size_t>> expected;
        for (std::size_t i = 0; i + 1 < up.size(); ++i) {
            for (std::size_t j = 0; j + 1 < sp.size(); ++j) {
                if (i == 0 && j == 0) continue;
                if (solve_cross(up[i], up[i + 1], sp[j], sp[j + 1])) expected.insert({i, j});
            }
        }
        const auto found = find_crossings(u, s, 1e-3);
        std::set<std::pair<std::size_t, std::size_t>> got;
        for (const auto& c : found.crossings) got.insert({c.u_segment, c.s_segment});
        for (const auto& c : found.near_tangent) got.insert({c.u_segment, c.s_segment});
        CHECK(got.size() == found.crossings.size() + found.near_tangent.size());
        CHECK(got == expected);
    }
}

TEST_CASE("polyline_crossings on two zigzags")
{
    const std::vector<Vec2> a{{0, 0}, {1, 1}, {2, 0}, {3, 1}, {4, 0}};
    const std::vector<Vec2> b{{0, 0.5}, {4, 0.5}};
    const auto c = polyline_crossings(a, b);
    REQUIRE(c.size() == 4);
    std::vector<double> xs;
    for (const auto& x : c) {
        CHECK(x.b_segment == 0);
        CHECK(x.point.y == doctest::Approx(0.5));
        xs.push_back(x.point.x);
    }
    std::sort(xs.begin(), xs.end());
    CHECK(xs[0] == doctest::Approx(0.5));
    CHECK(xs[3] == doctest::Approx(3.5));
    CHECK(polyline_crossings(a, {{0, 2}, {4, 2}}).empty());
}

TEST_CASE("perpendicular synthetic crossings refine exactly")
{
    const auto u = make_polyline_curve(ManifoldKind::Unstable, 1, {{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    const auto s = make_polyline_curve(ManifoldKind::Stable, 1,
                                       {{0, 0}, {0, 1}, {1.5, 1}, {1.5, -1}, {2.5, -1}, {2.5, 1}});
    const auto pp = find_homoclinic_points(u, s);
    REQUIRE(pp.points.size() == 2);
    const auto& p = pp.points[0];
    CHECK(p.position.x == doctest::Approx(1.5));
    CHECK(p.position.y == doctest::Approx(0.0));
    CHECK(p.u_param == doctest::Approx(1.5));
    CHECK(p.s_param == doctest::Approx(3.5));
    CHECK(p.angle == doctest::Approx(std::numbers::pi / 2));
    CHECK(p.crossing_sign == -1);
    CHECK(pp.points[1].crossing_sign == 1);
    CHECK(pp.points[1].s_param == doctest::Approx(6.5));
    for (const auto& q : pp.points) {
        CHECK(q.residual < 1e-12);
        CHECK_FALSE(q.witness_only);
        CHECK_FALSE(q.low_accuracy);
    }

    std::ostringstream csv;
    write_points_csv(csv, pp.points);
    CHECK(csv.str().rfind("branch_pair,x,y,u_param,s_param,sign,angle\n", 0) == 0);
    const std::string text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("parallel and grazing curves give no generator candidates")
{
    const auto u = make_polyline_curve(ManifoldKind::Unstable, 1, {{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    const auto parallel = make_polyline_curve(ManifoldKind::Stable, 1, {{0, 0}, {0, 1}, {3, 1}});
    CHECK(find_homoclinic_points(u, parallel).points.empty());

    // Crossing at an angle of 1e-4 rad, below alpha_min.
    const auto grazing =
        make_polyline_curve(ManifoldKind::Stable, 1, {{0, 0}, {0, 1}, {1, 1e-4}, {2, -1e-4}});
    const auto pp = find_homoclinic_points(u, grazing);
    REQUIRE(pp.points.size() == 1);
    CHECK(pp.points[0].witness_only);
    CHECK(pp.near_tangent == 1);
}
