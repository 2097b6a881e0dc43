#pragma once

// Forces, trap potentials and trap frequencies of the levitated sphere.
//
// The field problem is linear in the coil current, so the magnetic force at a given sphere
// position is I^2 times the force at 1 A. ForceModel caches those unit-current forces by
// position; every analysis in this header goes through it.

#include "levitrap/config.hpp"
#include "levitrap/field_solver.hpp"
#include "levitrap/vec3.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace levitrap {

struct StressOptions {
    double surface_radius = 0.0;  // > 0: one spherical surface of this radius
    // Otherwise the integral is averaged over radii R + [shell_inner, shell_outer] fine cells
    // (midpoint rule). A shell one cell thick cancels most of the cell-periodic error of the
    // interpolated field, which a single surface turns into a position-dependent force ripple.
    double shell_inner = 1.5;
    double shell_outer = 2.5;
    int radial_nodes = 8;
    int polar_nodes = 60;         // Gauss-Legendre in cos(theta)
    int azimuthal_nodes = 128;
};

/// Closed-surface integral of the full Maxwell stress tensor (1/mu0)[(B.n)B - B^2 n / 2]
/// over spheres around `center`. Gravity is not included. Throws DomainError when a
/// surface leaves the grid or touches the ring or the sphere's own voxels.
Vec3 maxwell_stress_force(const FieldSolution& s, const Vec3& center, const StressOptions& opt = {});

class ForceModel {
public:
    explicit ForceModel(const ExperimentConfig& config, std::shared_ptr<const AxisymmetricSource> source = nullptr,
                        FieldSolverOptions options = {});

    /// Magnetic force per A^2 with the sphere centred at p.
    Vec3 unit_force(const Vec3& p);
    Vec3 force(const Vec3& p, double current) { return current * current * unit_force(p); }

    /// B_z at the ring centre per ampere (ring present, sphere absent); computed once.
    double magnet_constant();
    double current_for_field(double bz) { return bz / magnet_constant(); }

    double mass() const { return config_.sphere.mass(); }
    double weight() const { return mass() * config_.ambient.gravity; }
    const ExperimentConfig& config() const { return config_; }
    FieldSolver& solver() { return solver_; }
    /// Field solves performed so far (cache misses).
    int solves() const { return solves_; }
    /// True when the geometry is mirror-symmetric in x, so F(-x) is obtained from F(x).
    bool mirror_x() const { return mirror_x_; }

    StressOptions stress;

private:
    ExperimentConfig config_;
    FieldSolver solver_;
    bool mirror_x_ = false;
    std::optional<double> magnet_constant_;
    std::map<std::array<double, 3>, Vec3> cache_;
    int solves_ = 0;
};

struct ForceMap {
    std::vector<Vec3> positions;
    std::vector<Vec3> forces;  // magnetic only, N
    double current = 0.0;
};

enum class ScanAxis { x, y, z, diagonal };

const char* scan_axis_name(ScanAxis a);

/// Forces at origin + offset * direction for each offset, in scan order. Solver errors are
/// rethrown with the position index prepended.
ForceMap force_map(ForceModel& model, double current, const Vec3& origin, const Vec3& direction,
                   const std::vector<double>& offsets);

struct PotentialProfile {
    ScanAxis axis = ScanAxis::z;
    Vec3 origin;
    Vec3 direction{0.0, 0.0, 1.0};
    std::vector<double> offsets;    // m, increasing
    std::vector<double> potential;  // J, minimum shifted to 0
    std::vector<double> force;      // N, total force along the direction
};

/// Trapezoidal integral of -F.dl along a monotone scan, minimum shifted to zero. `weight`
/// adds gravity (-weight along z) to the magnetic forces.
PotentialProfile trap_potential(const ForceMap& map, ScanAxis axis, const Vec3& direction, double weight = 0.0);

/// k = 2 c2 of the least-squares quadratic through the profile.
double profile_stiffness(const PotentialProfile& p);

double frequency_from_stiffness(double k, double mass);

struct TrapResult {
    double field = 0.0;    // B_z at the ring centre, T
    double current = 0.0;  // A
    Vec3 trap_center;      // equilibrium with gravity
    double center_offset_toward_slit = 0.0;
    std::array<double, 3> stiffness{};  // x, y, z, N/m
    std::array<double, 3> frequency{};  // Hz
    double stiffness_diagonal = 0.0;
    double frequency_diagonal = 0.0;
    Vec3 diagonal_direction;
    // Curvature estimate from the sphere-free field: (1/2pi) sqrt(M/rho d2Bz/dz2).
    double frequency_curvature_estimate = 0.0;
    double sphere_magnetization = 0.0;  // A/m, volume average at the trap centre
    std::vector<PotentialProfile> profiles;  // x, y, z, diagonal
    int field_solves = 0;
    std::vector<std::string> warnings;
};

struct TrapOptions {
    std::optional<Vec3> initial_guess;
    bool diagonal = true;
    bool lateral = true;  // false: only the z stiffness (used by the mesh study)
};

/// Locates the equilibrium (magnetic force balancing gravity) by a safeguarded Broyden
/// iteration to the configured tolerance, then fits 5-point potentials within the
/// configured window. Throws NotConfiningError naming the first unstable axis.
TrapResult trap_characterize(ForceModel& model, double field, const TrapOptions& options = {});
TrapResult trap_characterize(const ExperimentConfig& config, double current);

struct LiftoffResult {
    double field = 0.0;    // T at the ring centre
    double current = 0.0;  // A
    double unit_force_z = 0.0;  // N/A^2 at the start position
};

/// Field at which the magnetic lift at the initial (resting) position equals the weight.
/// Since F_z = I^2 F_z(1 A), the crossing is found in closed form from one solve.
/// Throws NumericalError when it is above the coil's maximum current.
LiftoffResult liftoff_threshold(ForceModel& model);
double liftoff_threshold(const ExperimentConfig& config);

struct DerivedQuantities {
    double mass = 0.0;               // kg
    double volume = 0.0;             // m^3
    double weight = 0.0;             // N
    double magnet_constant = 0.0;    // T/A with the ring
    double coil_only_constant = 0.0; // T/A, bare winding
};

DerivedQuantities derived_quantities(const ExperimentConfig& config);
DerivedQuantities derived_quantities(ForceModel& model);

}  // namespace levitrap
