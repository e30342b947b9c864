#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hfh/geometry.hpp"

namespace hfh {

struct Parameter {
    std::string name;
    double value = 0.0;
};

/// An invertible, area-preserving analytic map of the plane.
///
/// Implementations are immutable; every member is safe to call concurrently.
class MapModel {
public:
    virtual ~MapModel() = default;

    virtual std::string name() const = 0;
    virtual std::vector<Parameter> parameters() const = 0;

    virtual Vec2 forward(Vec2 z) const = 0;
    virtual Vec2 inverse(Vec2 z) const = 0;
    virtual Mat2 jacobian(Vec2 z) const = 0;

    /// Derivative of the inverse map at z.
    Mat2 inverse_jacobian(Vec2 z) const { return jacobian(inverse(z)).inverse(); }
};

using MapPtr = std::shared_ptr<const MapModel>;

/// q' = q + p', p' = p + k/(2 pi) sin(2 pi q), lifted to the plane.
class StandardMap final : public MapModel {
public:
    explicit StandardMap(double k) : k_(k) {}

    std::string name() const override { return "standard_map"; }
    std::vector<Parameter> parameters() const override { return {{"k", k_}}; }
    Vec2 forward(Vec2 z) const override;
    Vec2 inverse(Vec2 z) const override;
    Mat2 jacobian(Vec2 z) const override;

private:
    double k_;
};

/// Cubic area-preserving Henon-type map (x, y) -> (y, -x + a y - y^3).
/// The origin is a saddle for a > 2 with homoclinic loops around (+-r, +-r), r^2 = a - 2.
class CubicHenonMap final : public MapModel {
public:
    explicit CubicHenonMap(double a) : a_(a) {}

    std::string name() const override { return "henon_cubic"; }
    std::vector<Parameter> parameters() const override { return {{"a", a_}}; }
    Vec2 forward(Vec2 z) const override;
    Vec2 inverse(Vec2 z) const override;
    Mat2 jacobian(Vec2 z) const override;

private:
    double a_;
};

/// One Stormer-Verlet step of length tau for H = p^2/2 - cos q.
class PendulumVerletMap final : public MapModel {
public:
    explicit PendulumVerletMap(double tau) : tau_(tau) {}

    std::string name() const override { return "pendulum_verlet"; }
    std::vector<Parameter> parameters() const override { return {{"tau", tau_}}; }
    Vec2 forward(Vec2 z) const override;
    Vec2 inverse(Vec2 z) const override;
    Mat2 jacobian(Vec2 z) const override;

private:
    double tau_;
};

/// (q, p) -> (lambda q, p / lambda). Its invariant manifolds are the coordinate axes.
class LinearSaddleMap final : public MapModel {
public:
    explicit LinearSaddleMap(double lambda) : lambda_(lambda) {}

    std::string name() const override { return "linear_saddle"; }
    std::vector<Parameter> parameters() const override { return {{"lambda", lambda_}}; }
    Vec2 forward(Vec2 z) const override { return {lambda_ * z.x, z.y / lambda_}; }
    Vec2 inverse(Vec2 z) const override { return {z.x / lambda_, lambda_ * z.y}; }
    Mat2 jacobian(Vec2) const override { return {lambda_, 0.0, 0.0, 1.0 / lambda_}; }

private:
    double lambda_;
};

/// phi o phi. Squaring turns a branch-swapping saddle into a W-orientation preserving one.
class SquaredMap final : public MapModel {
public:
    explicit SquaredMap(MapPtr base) : base_(std::move(base)) {}

    std::string name() const override { return base_->name() + "^2"; }
    std::vector<Parameter> parameters() const override { return base_->parameters(); }
    Vec2 forward(Vec2 z) const override { return base_->forward(base_->forward(z)); }
    Vec2 inverse(Vec2 z) const override { return base_->inverse(base_->inverse(z)); }
    Mat2 jacobian(Vec2 z) const override
    {
        return base_->jacobian(base_->forward(z)) * base_->jacobian(z);
    }

private:
    MapPtr base_;
};

/// Builds a catalogue model by name. Unknown names or missing parameters throw ConfigError.
MapPtr make_model(const std::string& name, const std::vector<Parameter>& params);

/// Names accepted by make_model.
std::vector<std::string> catalogue_names();

MapPtr square_map(MapPtr model);

struct HyperbolicFixedPoint {
    Vec2 location;
    double lambda = 0.0;  ///< unstable eigenvalue, > 1
    Vec2 unstable_dir;    ///< unit, oriented with non-negative x (or y when vertical)
    Vec2 stable_dir;      ///< unit, oriented with non-negative y (or x when horizontal)
    bool w_orientation_preserving = true;
};

/// phi^n(z); n < 0 applies the inverse. Throws NumericalError("orbit escaped") on leaving `box`.
Vec2 eval_forward(const MapModel& model, Vec2 z, int n, const Box& box = {});

struct FixedPointOptions {
    int max_newton_steps = 50;
    double hyperbolicity_gap = 1e-8;
    /// Return orientation-reversing saddles with the flag cleared instead of throwing.
    bool allow_orientation_reversing = false;
};

/// Newton-polished fixed point with eigendata.
/// Errors: "no convergence", "not hyperbolic" (ConfigError), "orientation-reversing on branches"
/// (ConfigError, unless allowed by the options).
HyperbolicFixedPoint find_fixed_point(const MapModel& model, Vec2 guess,
                                      const FixedPointOptions& options = {});

struct SymplecticReport {
    int samples = 0;
    double max_det_deviation = 0.0;
    double max_inverse_error = 0.0;
};

/// Samples uniformly in `box` with a fixed seed and reports max |det D phi - 1| and
/// max |phi^-1(phi(z)) - z|.
SymplecticReport validate_symplectic(const MapModel& model, int samples, const Box& box = {},
                                     std::uint64_t seed = 12345);

}  // namespace hfh
