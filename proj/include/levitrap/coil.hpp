#pragma once

// Coil source field. The winding is a stack of coaxial circular loops; each loop uses the
// closed-form elliptic-integral kernel. For the field solver the azimuthal vector potential
// is tabulated as g(rho, z) = A_phi / rho so face fluxes can be taken as exact edge
// circulations (divergence-free by construction).

#include "levitrap/config.hpp"
#include "levitrap/vec3.hpp"

#include <memory>
#include <vector>

namespace levitrap {

struct Loop {
    double radius = 0.0;
    double z = 0.0;
};

/// Layered layout: round(height / pitch) turns per layer, layers spread evenly over the
/// radial build, a partial last layer centred in z.
std::vector<Loop> coil_loops(const CoilSpec& coil);

/// Complete elliptic integrals K(m), E(m) with parameter m = k^2, by the AGM.
void elliptic_ke(double m, double& k_out, double& e_out);

/// Field of one loop (radius a at height z0, current I). Throws DomainError on the filament.
Vec3 loop_field(double a, double z0, double current, const Vec3& p);

/// A_phi / rho of one loop at (rho, z); finite and even in rho at the axis.
double loop_potential_ratio(double a, double z0, double current, double rho, double z);

/// Biot-Savart field of the whole winding at current I.
Vec3 coil_source_field(const CoilSpec& coil, double current, const Vec3& p);

/// Axisymmetric source with A = g(rho, z) (-y, x, 0). B = curl A.
class AxisymmetricSource {
public:
    virtual ~AxisymmetricSource() = default;
    virtual double g(double rho, double z) const = 0;
    virtual Vec3 field(const Vec3& p) const = 0;
};

/// Uniform axial field B0: g = B0 / 2.
class UniformSource final : public AxisymmetricSource {
public:
    explicit UniformSource(double b0) : b0_(b0) {}
    double g(double, double) const override { return 0.5 * b0_; }
    Vec3 field(const Vec3&) const override { return {0.0, 0.0, b0_}; }

private:
    double b0_;
};

/// Axial gradient: B = (-G x / 2, -G y / 2, B0 + G z); g = B0 / 2 + G z / 2.
class LinearGradientSource final : public AxisymmetricSource {
public:
    LinearGradientSource(double b0, double gradient) : b0_(b0), grad_(gradient) {}
    double g(double, double z) const override { return 0.5 * (b0_ + grad_ * z); }
    Vec3 field(const Vec3& p) const override { return {-0.5 * grad_ * p.x, -0.5 * grad_ * p.y, b0_ + grad_ * p.z}; }

private:
    double b0_;
    double grad_;
};

/// Coil at unit current, g tabulated on a (rho, z) lattice and interpolated with 4-point
/// Lagrange stencils in both directions (mirrored across the axis).
class CoilSource final : public AxisymmetricSource {
public:
    CoilSource(const CoilSpec& coil, double rho_max, double z_min, double z_max, double spacing);
    double g(double rho, double z) const override;
    Vec3 field(const Vec3& p) const override;

private:
    CoilSpec coil_;
    double h_;
    double z0_;
    int nr_;
    int nz_;
    std::vector<double> table_;
};

}  // namespace levitrap
