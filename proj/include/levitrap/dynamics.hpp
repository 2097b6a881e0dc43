#pragma once

// Translational motion of the sphere in a magnetic force field plus gravity, integrated with
// velocity Verlet, and sine fits of the resulting traces.

#include "levitrap/errors.hpp"
#include "levitrap/vec3.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace levitrap {

class ForceModel;
struct TrapResult;

/// Magnetic force as a function of sphere position. Gravity is added by the integrator.
class ForceField {
public:
    virtual ~ForceField() = default;
    virtual Vec3 force(const Vec3& p) const = 0;
    /// Magnetic potential energy (F = -grad U), when the field has one in closed form.
    virtual std::optional<double> potential(const Vec3&) const { return std::nullopt; }
    virtual bool contains(const Vec3& p) const = 0;
    /// Upper bound on the stiffness along any axis, N/m; used for the time-step check.
    virtual double max_stiffness() const = 0;
};

/// F = -k (p - c) + bias, componentwise. With bias = m g z-hat the equilibrium under
/// gravity is exactly c.
class HarmonicForceField final : public ForceField {
public:
    HarmonicForceField(const Vec3& center, const std::array<double, 3>& stiffness, const Vec3& bias = {});

    Vec3 force(const Vec3& p) const override;
    std::optional<double> potential(const Vec3& p) const override;
    bool contains(const Vec3&) const override { return true; }
    double max_stiffness() const override;

    const Vec3& center() const { return center_; }
    const std::array<double, 3>& stiffness() const { return k_; }

private:
    Vec3 center_;
    std::array<double, 3> k_;
    Vec3 bias_;
};

/// Surrogate built from a trap characterization: stiffnesses about the trap centre and a
/// constant lift that balances gravity there.
HarmonicForceField harmonic_surrogate(const TrapResult& trap, double mass, double gravity);

/// Magnetic forces sampled on a regular lattice and interpolated with tricubic Catmull-Rom
/// splines. An axis with a single node is treated as invariant (the lattice is a line or a
/// plane); positions outside the lattice box are not contained.
class LatticeForceField final : public ForceField {
public:
    LatticeForceField(const Vec3& origin, const Vec3& spacing, const std::array<int, 3>& counts,
                      std::vector<Vec3> forces);

    /// Samples `model` at `current` on counts[i] nodes centred on `center` (counts odd).
    static LatticeForceField sample(ForceModel& model, double current, const Vec3& center, const Vec3& spacing,
                                    const std::array<int, 3>& counts);

    Vec3 force(const Vec3& p) const override;
    bool contains(const Vec3& p) const override;
    double max_stiffness() const override;

    const Vec3& origin() const { return origin_; }
    const Vec3& spacing() const { return spacing_; }
    const std::array<int, 3>& counts() const { return n_; }
    const Vec3& node_force(int i, int j, int k) const;

private:
    Vec3 origin_;
    Vec3 spacing_;
    std::array<int, 3> n_;
    std::vector<Vec3> f_;
};

class TrajectoryEscapeError : public NumericalError {
public:
    TrajectoryEscapeError(double time, const Vec3& position);
    double time() const noexcept { return time_; }
    const Vec3& position() const noexcept { return position_; }

private:
    double time_;
    Vec3 position_;
};

struct DynamicsOptions {
    double mass = 0.0;            // kg
    double gravity = 9.81;        // m/s^2 along -z
    double damping_rate = 0.0;    // gamma, 1/s, in v' = F/m - gamma v - g z
    int record_every = 1;
};

struct DynamicsTrace {
    std::vector<double> times;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    std::vector<double> energy;  // kinetic + gravitational + magnetic when available, else empty
    double dt = 0.0;
};

/// Velocity Verlet with the damping applied as exact exponential half-steps around the
/// conservative update. Requires dt <= 1/(50 f_max), f_max from the field's stiffness bound.
/// Throws TrajectoryEscapeError when the sphere leaves the field domain.
DynamicsTrace integrate_motion(const ForceField& field, const Vec3& position, const Vec3& velocity, double dt,
                               double duration, const DynamicsOptions& options);

struct SineFit {
    double frequency = 0.0;        // Hz
    double frequency_error = 0.0;  // 1-sigma from the covariance
    double amplitude = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double residual_rms = 0.0;
};

/// Least squares A sin(2 pi f t + phi) + c on uniformly sampled data. The start value comes
/// from the periodogram peak, refined on a grid, then Levenberg-Marquardt. Throws DomainError
/// with fewer than 10 cycles and NumericalError when the residual exceeds 20 % of A.
SineFit fit_sine(const std::vector<double>& values, double dt);

/// Sine fit of one coordinate (0 = x, 1 = y, 2 = z) of a trace.
SineFit fit_sine_frequency(const DynamicsTrace& trace, int axis);

/// CSV with columns t, x, y, z, vx, vy, vz, E.
std::string trace_csv(const DynamicsTrace& trace);

}  // namespace levitrap
