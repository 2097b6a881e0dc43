#pragma once

// First-order eddy-current losses in the normal-metal parts around the trap and the
// resulting motional Q. The oscillating sphere is a point dipole; its moving field induces
// E = -dA/dt in each conductor without back-reaction.

#include "levitrap/config.hpp"
#include "levitrap/field_solver.hpp"
#include "levitrap/mechanics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace levitrap {

/// sqrt(2 / (omega mu0 mu_r sigma)); +inf for sigma = 0. Throws DomainError for f <= 0,
/// sigma < 0 or mu_r <= 0.
double skin_depth(double conductivity, double frequency, double relative_permeability = 1.0);

struct Voxel {
    Vec3 center;
    double volume = 0.0;
};

/// Octree voxelization of a conductor: cells no larger than max(min_size, refine * distance
/// to `focus`); boundary cells are refined to min_size and then sampled on 4^3 sub-cells.
std::vector<Voxel> voxelize(const ConductorSpec& body, const Vec3& focus, double min_size, double refine);

struct BodyDissipation {
    std::string name;
    double conductivity = 0.0;  // S/m
    double power = 0.0;         // W, cycle average
    double skin_depth = 0.0;    // m
    double thickness = 0.0;     // m, smallest dimension
    std::size_t voxels = 0;
};

struct EddyReport {
    double field = 0.0;      // T
    double frequency = 0.0;  // Hz
    double amplitude = 0.0;  // m
    ScanAxis axis = ScanAxis::z;
    Vec3 moment;             // A m^2
    std::vector<BodyDissipation> bodies;  // conductors, then the sphere itself
    double power = 0.0;                   // W, total
    double energy_loss_per_cycle = 0.0;   // J
    double kinetic_energy = 0.0;          // J, m A^2 omega^2 / 2
    double q = 0.0;                       // 2 pi E_t / dE; +inf when nothing dissipates
    std::vector<std::string> warnings;
};

/// Dissipation for an oscillation of amplitude A along `axis` about the trap centre.
/// `solution` is the field solve with the sphere at the trap centre; it supplies the moment
/// and the applied-field gradient for the sphere's own losses.
EddyReport eddy_dissipation_per_cycle(const ExperimentConfig& config, const TrapResult& trap,
                                      const FieldSolution& solution, double amplitude, ScanAxis axis = ScanAxis::z);

/// Convenience: solves the field at the trap centre through the model's solver.
EddyReport eddy_dissipation_per_cycle(ForceModel& model, const TrapResult& trap, double amplitude,
                                      ScanAxis axis = ScanAxis::z);

struct QSweep {
    std::vector<EddyReport> reports;
    std::optional<double> exponent;        // d ln Q / d ln B, absent with fewer than two fields
    std::optional<double> exponent_error;  // 1-sigma
    static constexpr double published_exponent = -0.5;
};

/// Field -> trap -> dissipation for each B. Throws ValidationError for fields at or above
/// the sphere's saturation (mu0 Ms) or the ring's penetration field.
QSweep q_vs_field_sweep(const ExperimentConfig& config, const std::vector<double>& fields, ScanAxis axis = ScanAxis::z);
QSweep q_vs_field_sweep(ForceModel& model, const std::vector<double>& fields, ScanAxis axis = ScanAxis::z);

/// Power-law exponent of y(x) by least squares in log-log; {slope, 1-sigma}.
std::pair<double, double> power_law_exponent(const std::vector<double>& x, const std::vector<double>& y);

/// Checks a drive field against saturation and the ring's penetration field.
void check_field_guards(const ExperimentConfig& config, double field);

}  // namespace levitrap
