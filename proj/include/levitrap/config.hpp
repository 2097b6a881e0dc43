#pragma once

// Experiment description: sphere, slitted superconductor ring, drive coil, surrounding
// conductors, solver grid and ambient conditions. Everything is SI internally; the text
// format accepts unit suffixes and converts on load.

#include "levitrap/thermal.hpp"
#include "levitrap/vec3.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace levitrap {

struct MaterialProps {
    double density = 5172.0;                  // kg/m^3
    double relative_permeability = 32.0;
    double relative_permittivity = 15.0;
    double conductivity = 1.0;                // S/m
    double saturation_magnetization = 196e3;  // A/m
};

struct SphereSpec {
    double diameter = 0.5e-3;
    MaterialProps material;
    Vec3 initial_position{0.0, 0.0, 0.0};

    double radius() const { return 0.5 * diameter; }
    double volume() const;
    double mass() const;
};

struct PenetrationPoint {
    double temperature = 0.0;  // K
    double field = 0.0;        // T
};

struct SuperconductorRingSpec {
    double inner_diameter = 0.756e-3;
    double outer_diameter = 1.948e-3;
    double height = 1.039e-3;
    double slit_angle = 39.0;     // degrees, full opening
    double slit_azimuth = 90.0;   // degrees from +x; 90 puts the slit on +y
    double center_z = 0.0;
    double penetration_field = 0.9;  // T, used when no table is given
    std::vector<PenetrationPoint> penetration_table;
    double diamagnet_permeability = 1e-4;  // relative permeability standing in for the Meissner state

    bool closed() const { return slit_angle == 0.0; }
    double inner_radius() const { return 0.5 * inner_diameter; }
    double outer_radius() const { return 0.5 * outer_diameter; }
    /// Linear interpolation in the table (clamped), or the scalar value.
    double penetration_field_at(double temperature) const;
    /// Cell-center membership test used for voxelization.
    bool contains(const Vec3& p) const;
};

struct CoilSpec {
    double winding_inner_diameter = 3.1e-3;
    double winding_outer_diameter = 13e-3;
    double height = 1e-3;
    int turns = 475;
    double wire_diameter = 102e-6;
    double center_z = 0.0;
    double max_current = 0.6;  // A
};

enum class ConductorShape { tube, box };

/// A passive conductor for eddy-current losses: an axisymmetric annulus about the z axis
/// or an axis-aligned box.
struct ConductorSpec {
    std::string name;
    ConductorShape shape = ConductorShape::tube;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    Vec3 box_min;
    Vec3 box_max;
    double conductivity = 6.58e9;

    bool contains(const Vec3& p) const;
    double min_thickness() const;
    /// Axis-aligned bounding box.
    std::pair<Vec3, Vec3> bounds() const;
};

/// Rectilinear grid: uniform fine cells inside a box around the hole, geometric
/// growth outside, capped at max_cell.
struct GridSpec {
    double fine_cell = 20e-6;
    double max_cell = 0.4e-3;
    double stretch = 1.2;
    Vec3 fine_half_extent{0.75e-3, 0.75e-3, 1.05e-3};
    Vec3 domain_half_extent{3.0e-3, 3.0e-3, 3.3e-3};
    Vec3 origin{0.0, 0.0, 0.0};
};

struct AmbientSpec {
    double temperature = 4.0;  // K
    double pressure = 2e-4;    // Pa
    double gravity = 9.81;     // m/s^2, acts along -z
};

/// Knobs for the trap, dynamics and dissipation analyses.
struct AnalysisSpec {
    double stiffness_window = 50e-6;      // half-width of the 5-point potential fit
    double root_tolerance = 0.1e-6;       // trap-center localization
    Vec3 diagonal_direction{0.0, 1.0, 1.0};
    double eddy_amplitude = 25e-6;
    int eddy_phase_slots = 100;
    double eddy_voxel = 50e-6;
    double eddy_refine = 0.04;            // voxel size <= refine * distance to the sphere
    double solver_tolerance = 1e-9;
    int solver_max_iterations = 400;
};

struct ExperimentConfig {
    SphereSpec sphere;
    SuperconductorRingSpec ring;
    CoilSpec coil;
    std::vector<ConductorSpec> conductors;
    GridSpec grid;
    AmbientSpec ambient;
    AnalysisSpec analysis;
    thermal::ThermalConfig thermal;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
};

/// Parses the key = value / [section] format. Throws ParseError (with line and key) or
/// ValidationError.
ExperimentConfig load_config(std::string_view text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Canonical SI text; load_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);

/// The published parameter set (YBCO ring), identical to data/table1.cfg.
ExperimentConfig table1_config();

/// Same experiment with the niobium ring.
ExperimentConfig niobium_config();

}  // namespace levitrap
