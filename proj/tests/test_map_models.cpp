#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hfh/error.hpp"
#include "hfh/map_models.hpp"

using namespace hfh;

namespace {

// Area-doubling map used to check that the determinant report actually sees a violation.
class Stretch final : public MapModel {
public:
    std::string name() const override { return "stretch"; }
    std::vector<Parameter> parameters() const override { return {}; }
    Vec2 forward(Vec2 z) const override { return {z.x, 2.0 * z.y}; }
    Vec2 inverse(Vec2 z) const override { return {z.x, 0.5 * z.y}; }
    Mat2 jacobian(Vec2) const override { return {1.0, 0.0, 0.0, 2.0}; }
};

// Newton with a central-difference Jacobian.
Vec2 fd_fixed_point(const MapModel& m, Vec2 z)
{
    const double h = 1e-6;
    for (int i = 0; i < 60; ++i) {
        const Vec2 r = m.forward(z) - z;
        const Vec2 dx = (0.5 / h) * (m.forward(z + Vec2{h, 0}) - m.forward(z - Vec2{h, 0}));
        const Vec2 dy = (0.5 / h) * (m.forward(z + Vec2{0, h}) - m.forward(z - Vec2{0, h}));
        Mat2 j{dx.x - 1.0, dy.x, dx.y, dy.y - 1.0};
        z -= j.inverse() * r;
    }
    return z;
}

}  // namespace

TEST_CASE("standard map matches the closed form")
{
    StandardMap m(1.2);
    const Vec2 z = eval_forward(m, {0.1, 0.1}, 1);
    CHECK(z.x == doctest::Approx(0.312258714054636684).epsilon(1e-15));
    CHECK(z.y == doctest::Approx(0.212258714054636684).epsilon(1e-15));
    CHECK(eval_forward(m, {0.0, 0.0}, 5) == Vec2{0.0, 0.0});
    const Vec2 w{0.37, -0.21};
    CHECK(eval_forward(m, w, 0) == w);
}

TEST_CASE("forward and inverse compose to the identity")
{
    for (const auto& name : catalogue_names()) {
        const double value = name == "henon_cubic" ? 2.5 : name == "linear_saddle" ? 2.0
                             : name == "pendulum_verlet" ? 0.5 : 1.2;
        const std::string key = name == "henon_cubic" ? "a" : name == "linear_saddle" ? "lambda"
                                : name == "pendulum_verlet" ? "tau" : "k";
        auto m = make_model(name, {{key, value}});
        for (int n = 1; n <= 10; ++n) {
            const Vec2 z{0.005, -0.003};
            const Vec2 back = eval_forward(*m, eval_forward(*m, z, n), -n);
            CHECK(distance(back, z) < 1e-8);
        }
        const auto report = validate_symplectic(*m, 200, Box{{-1, -1}, {1, 1}});
        CHECK(report.max_det_deviation < 1e-9);
        CHECK(report.max_inverse_error < 1e-10);
    }
}

TEST_CASE("symplectic report")
{
    CHECK(validate_symplectic(StandardMap(1.2), 1000).max_det_deviation < 1e-12);
    CHECK(validate_symplectic(PendulumVerletMap(0.3), 1000).max_det_deviation < 1e-9);
    CHECK(validate_symplectic(Stretch(), 10).max_det_deviation == doctest::Approx(1.0));
}

TEST_CASE("escape from the box")
{
    LinearSaddleMap m(3.0);
    CHECK_THROWS_AS(eval_forward(m, {1.0, 0.0}, 5), NumericalError);
}

TEST_CASE("fixed points")
{
    SUBCASE("standard map")
    {
        for (double k : {0.8, 1.2, 2.0}) {
            StandardMap m(k);
            const auto fp = find_fixed_point(m, {0.01, -0.01});
            CHECK(norm(fp.location) < 1e-12);
            const double lambda = (2.0 + k + std::sqrt((2.0 + k) * (2.0 + k) - 4.0)) / 2.0;
            CHECK(fp.lambda == doctest::Approx(lambda).epsilon(1e-13));
            const Mat2 j = m.jacobian(fp.location);
            CHECK(distance(j * fp.unstable_dir, fp.lambda * fp.unstable_dir) < 1e-9);
            CHECK(distance(j * fp.stable_dir, (1.0 / fp.lambda) * fp.stable_dir) < 1e-9);
            CHECK(fp.w_orientation_preserving);
        }
    }
    SUBCASE("pendulum")
    {
        PendulumVerletMap m(0.4);
        const auto fp = find_fixed_point(m, {3.0, 0.1});
        const Vec2 oracle = fd_fixed_point(m, {3.0, 0.1});
        CHECK(distance(fp.location, oracle) < 1e-9);
        CHECK(std::abs(fp.location.x - std::numbers::pi) < 1e-9);
        CHECK(distance(m.forward(fp.location), fp.location) < 1e-12);
    }
    SUBCASE("parabolic")
    {
        StandardMap m(0.0);
        CHECK_THROWS_AS(find_fixed_point(m, {0.0, 0.0}), ConfigError);
    }
    SUBCASE("negative eigenvalues need squaring")
    {
        CubicHenonMap m(-2.5);
        CHECK_THROWS_AS(find_fixed_point(m, {0.0, 0.0}), ConfigError);
        const auto fp = find_fixed_point(*square_map(std::make_shared<CubicHenonMap>(-2.5)),
                                         {0.0, 0.0});
        CHECK(fp.w_orientation_preserving);
        CHECK(fp.lambda > 1.0);
    }
}

TEST_CASE("unknown model")
{
    CHECK_THROWS_AS(make_model("logistic", {}), ConfigError);
    CHECK_THROWS_AS(make_model("standard_map", {}), ConfigError);
}
