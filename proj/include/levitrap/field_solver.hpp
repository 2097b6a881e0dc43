#pragma once

// Magnetostatic solve with a reduced scalar potential: B = mu (B_s - grad psi), where B_s
// is the analytic coil field and psi the reaction potential (T m). The discretization is
// cell-centred finite volume on a rectilinear grid; B is stored as the normal component on
// every face, so the discrete divergence per cell equals the linear-solver residual.
//
// Bodies: the permeable sphere (partial-volume face permeabilities) and the slit ring as
// near-zero-permeability voxels standing in for the Meissner state. A closed ring (no slit)
// additionally carries the zero-field-cooled constraint of zero flux through its hole.

#include "levitrap/coil.hpp"
#include "levitrap/config.hpp"
#include "levitrap/grid.hpp"
#include "levitrap/mg_pcg.hpp"
#include "levitrap/vec3.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace levitrap {

struct FieldSolution {
    std::shared_ptr<const RectGrid> grid;
    std::vector<double> b[3];  // total normal flux density per face, T
    std::shared_ptr<const std::vector<double>> unit_source_flux[3];  // source flux per face at 1 A, T m^2
    std::shared_ptr<const std::vector<std::uint8_t>> ring_cells;     // 1 inside the ring
    double current = 0.0;
    std::optional<Vec3> sphere_center;
    double sphere_radius = 0.0;
    double sphere_permeability = 1.0;
    double residual_norm = 0.0;  // relative, of the final linear solve
    int iterations = 0;
    double hole_flux = 0.0;      // Wb through the ring hole (centre plane)
    std::vector<std::string> warnings;

    double face_area(int axis, std::size_t face) const;
    /// Source field normal component on a face, T.
    double source_b(int axis, std::size_t face) const;
};

enum class FieldPart { total, source };

/// Trilinear interpolation of the staggered components. Throws DomainError outside the grid.
Vec3 field_probe(const FieldSolution& s, const Vec3& p, FieldPart part = FieldPart::total);
/// Same, plus gradient (entry (i, j) = dB_i/dx_j) by centred differences of the interpolant.
Vec3 field_probe(const FieldSolution& s, const Vec3& p, Mat3& gradient, FieldPart part = FieldPart::total);

/// max_cell |sum_f B.n A| / (max|B| * cell surface area).
double max_relative_divergence(const FieldSolution& s);
/// Largest |B.n| on ring/vacuum interfaces divided by the largest |B| anywhere.
double max_relative_ring_normal(const FieldSolution& s);

/// Sphere moment from the volume-averaged interior field: m = (mu_r - 1) <B> / (mu0 mu_r) V.
Vec3 sphere_moment(const FieldSolution& s);

/// Cell-centre CSV dump: header comments then x,y,z,Bx,By,Bz in SI.
void write_field_csv(const FieldSolution& s, std::ostream& out);

struct FieldSolverOptions {
    bool include_ring = true;
    bool include_sphere = true;
    int subsamples = 4;  // transverse lines per face direction for sphere partial volumes
};

class FieldSolver {
public:
    /// `source` is the unit-current source; null selects the configured coil.
    FieldSolver(const ExperimentConfig& config, std::shared_ptr<const AxisymmetricSource> source = nullptr,
                FieldSolverOptions options = {});

    /// Solves with the sphere centred at `sphere_center` (or absent). Warm-starts from the
    /// previous solve of this instance.
    FieldSolution solve(std::optional<Vec3> sphere_center, double current);

    const RectGrid& grid() const { return *grid_; }
    const ExperimentConfig& config() const { return config_; }
    const FieldSolverOptions& options() const { return options_; }
    int solve_count() const { return solve_count_; }

private:
    ExperimentConfig config_;
    FieldSolverOptions options_;
    std::shared_ptr<const AxisymmetricSource> source_;
    std::shared_ptr<const RectGrid> grid_;
    std::shared_ptr<const std::vector<double>> flux_[3];
    std::shared_ptr<const std::vector<std::uint8_t>> ring_;
    std::vector<double> base_mu_[3];  // face permeability without the sphere
    std::vector<double> psi_unit_;    // last potential per ampere, for warm starts
    std::vector<double> psi_jump_;    // closed ring: response to a unit potential jump
    std::vector<std::size_t> cut_faces_;
    int solve_count_ = 0;

    void build_source();
    void build_ring();
    void sphere_face_mu(const Vec3& c, std::vector<double> mu[3]) const;
};

/// Convenience: one solve with the sphere at its configured initial position.
FieldSolution solve_magnetostatics(const ExperimentConfig& config, double current);

/// B_z at the ring centre (no sphere, ring present) per ampere.
double magnet_constant(const ExperimentConfig& config);
/// Coil-only value of the same.
double coil_only_magnet_constant(const ExperimentConfig& config);

}  // namespace levitrap
