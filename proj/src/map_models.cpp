#include "hfh/map_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hfh/error.hpp"

namespace hfh {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double require_param(const std::vector<Parameter>& params, const std::string& model,
                     const std::string& key)
{
    for (const auto& p : params) {
        if (p.name == key) return p.value;
    }
    throw ConfigError("model '" + model + "' requires parameter '" + key + "'");
}

}  // namespace

Vec2 StandardMap::forward(Vec2 z) const
{
    const double p = z.y + k_ / kTwoPi * std::sin(kTwoPi * z.x);
    return {z.x + p, p};
}

Vec2 StandardMap::inverse(Vec2 z) const
{
    const double q = z.x - z.y;
    return {q, z.y - k_ / kTwoPi * std::sin(kTwoPi * q)};
}

Mat2 StandardMap::jacobian(Vec2 z) const
{
    const double s = k_ * std::cos(kTwoPi * z.x);
    return {1.0 + s, 1.0, s, 1.0};
}

Vec2 CubicHenonMap::forward(Vec2 z) const
{
    return {z.y, -z.x + a_ * z.y - z.y * z.y * z.y};
}

Vec2 CubicHenonMap::inverse(Vec2 z) const
{
    return {-z.y + a_ * z.x - z.x * z.x * z.x, z.x};
}

Mat2 CubicHenonMap::jacobian(Vec2 z) const
{
    return {0.0, 1.0, -1.0, a_ - 3.0 * z.y * z.y};
}

Vec2 PendulumVerletMap::forward(Vec2 z) const
{
    const double half = 0.5 * tau_;
    const double p_half = z.y - half * std::sin(z.x);
    const double q = z.x + tau_ * p_half;
    return {q, p_half - half * std::sin(q)};
}

Vec2 PendulumVerletMap::inverse(Vec2 z) const
{
    const double half = 0.5 * tau_;
    const double p_half = z.y + half * std::sin(z.x);
    const double q = z.x - tau_ * p_half;
    return {q, p_half + half * std::sin(q)};
}

Mat2 PendulumVerletMap::jacobian(Vec2 z) const
{
    // Composition of kick(q) -> drift -> kick(q').
    const double half = 0.5 * tau_;
    const Mat2 kick1{1.0, 0.0, -half * std::cos(z.x), 1.0};
    const double p_half = z.y - half * std::sin(z.x);
    const double q = z.x + tau_ * p_half;
    const Mat2 drift{1.0, tau_, 0.0, 1.0};
    const Mat2 kick2{1.0, 0.0, -half * std::cos(q), 1.0};
    return kick2 * drift * kick1;
}

MapPtr make_model(const std::string& name, const std::vector<Parameter>& params)
{
    if (name == "standard_map") {
        return std::make_shared<StandardMap>(require_param(params, name, "k"));
    }
    if (name == "henon_cubic") {
        return std::make_shared<CubicHenonMap>(require_param(params, name, "a"));
    }
    if (name == "pendulum_verlet") {
        return std::make_shared<PendulumVerletMap>(require_param(params, name, "tau"));
    }
    if (name == "linear_saddle") {
        return std::make_shared<LinearSaddleMap>(require_param(params, name, "lambda"));
    }
    throw ConfigError("unknown model '" + name + "'");
}

std::vector<std::string> catalogue_names()
{
    return {"standard_map", "henon_cubic", "pendulum_verlet", "linear_saddle"};
}

MapPtr square_map(MapPtr model)
{
    return std::make_shared<SquaredMap>(std::move(model));
}

Vec2 eval_forward(const MapModel& model, Vec2 z, int n, const Box& box)
{
    const int steps = std::abs(n);
    for (int i = 0; i < steps; ++i) {
        z = n > 0 ? model.forward(z) : model.inverse(z);
        if (!std::isfinite(z.x) || !std::isfinite(z.y) || !box.contains(z)) {
            throw NumericalError("orbit escaped after " + std::to_string(i + 1) + " steps");
        }
    }
    return z;
}

namespace {

Vec2 eigenvector(const Mat2& m, double eigenvalue)
{
    // Two candidate kernel vectors of (M - eigenvalue I); take the better conditioned one.
    const Vec2 v1{m.b, eigenvalue - m.a};
    const Vec2 v2{eigenvalue - m.d, m.c};
    return normalized(norm(v1) >= norm(v2) ? v1 : v2);
}

Vec2 orient(Vec2 v, bool prefer_x)
{
    constexpr double eps = 1e-14;
    const double primary = prefer_x ? v.x : v.y;
    const double secondary = prefer_x ? v.y : v.x;
    if (primary < -eps || (std::abs(primary) <= eps && secondary < 0.0)) return -v;
    return v;
}

}  // namespace

HyperbolicFixedPoint find_fixed_point(const MapModel& model, Vec2 guess,
                                      const FixedPointOptions& options)
{
    Vec2 z = guess;
    bool converged = false;
    for (int step = 0; step < options.max_newton_steps; ++step) {
        const Vec2 residual = model.forward(z) - z;
        if (!std::isfinite(residual.x) || !std::isfinite(residual.y)) break;
        if (norm(residual) < 1e-15 * std::max(1.0, norm(z))) {
            converged = true;
            break;
        }
        Mat2 jac = model.jacobian(z);
        jac.a -= 1.0;
        jac.d -= 1.0;
        if (std::abs(jac.det()) < 1e-300) break;
        const Vec2 delta = jac.inverse() * residual;
        z -= delta;
        if (norm(delta) < 1e-16 * std::max(1.0, norm(z))) {
            converged = norm(model.forward(z) - z) < 1e-12;
            break;
        }
    }
    if (!converged && norm(model.forward(z) - z) >= 1e-12) {
        throw NumericalError("fixed point: no convergence after " +
                             std::to_string(options.max_newton_steps) + " Newton steps");
    }

    const Mat2 jac = model.jacobian(z);
    const double tr = jac.trace();
    const double det = jac.det();
    const double disc = tr * tr - 4.0 * det;
    if (disc <= 0.0) {
        // Complex pair on (or at) the unit circle for an area-preserving map.
        throw ConfigError("fixed point is not hyperbolic (trace " + std::to_string(tr) + ")");
    }
    const double root = std::sqrt(disc);
    // Numerically stable pair: the larger-magnitude root first, the other from the product.
    const double big = tr >= 0.0 ? 0.5 * (tr + root) : 0.5 * (tr - root);
    const double small = det / big;
    const double gap = options.hyperbolicity_gap;
    if (std::abs(std::abs(big) - 1.0) <= gap || std::abs(std::abs(small) - 1.0) <= gap) {
        throw ConfigError("fixed point is not hyperbolic (eigenvalue modulus within " +
                          std::to_string(gap) + " of 1)");
    }

    HyperbolicFixedPoint fp;
    fp.location = z;
    fp.w_orientation_preserving = big > 0.0;
    if (!fp.w_orientation_preserving && !options.allow_orientation_reversing) {
        throw ConfigError("orientation-reversing on branches (negative eigenvalues); square the map");
    }
    fp.lambda = std::abs(big);
    fp.unstable_dir = orient(eigenvector(jac, big), true);
    fp.stable_dir = orient(eigenvector(jac, small), false);
    return fp;
}

SymplecticReport validate_symplectic(const MapModel& model, int samples, const Box& box,
                                     std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(box.lo.x, box.hi.x);
    std::uniform_real_distribution<double> uy(box.lo.y, box.hi.y);
    SymplecticReport report;
    report.samples = samples;
    for (int i = 0; i < samples; ++i) {
        const Vec2 z{ux(rng), uy(rng)};
        report.max_det_deviation =
            std::max(report.max_det_deviation, std::abs(model.jacobian(z).det() - 1.0));
        report.max_inverse_error =
            std::max(report.max_inverse_error, distance(model.inverse(model.forward(z)), z));
    }
    return report;
}

}  // namespace hfh
