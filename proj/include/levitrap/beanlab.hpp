#pragma once

// Superconductor characterization from SQUID magnetometry: transition temperature, Bean
// critical-state current densities for a cylinder and a slit ring, pinning force density
// and the penetration field H_pen(T).

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace levitrap::bean {

enum class CurveKind { moment_vs_temperature, moment_vs_field };

enum class Branch { virgin, increasing, decreasing };

struct MagnetometryCurve {
    CurveKind kind = CurveKind::moment_vs_field;
    std::vector<double> abscissa;  // K or T
    std::vector<double> moment;    // A m^2
    std::vector<Branch> branch;    // per point; empty means a single virgin/cooling branch
    double fixed = 0.0;            // the field (T) of an M-T curve or the temperature (K) of an M-H curve

    /// Throws ValidationError for mismatched lengths, non-finite moments or a branch whose
    /// abscissa is not strictly monotone.
    void validate() const;
};

double emu_to_si(double emu);
double si_to_emu(double am2);

/// Reads the CSV schema: '#' header lines "kind = MT|MH", "fixed = <quantity>",
/// "moment_unit = emu|Am2", "abscissa_unit = K|T|mT|Oe", then rows "x, moment[, branch]"
/// with branch one of v (virgin), i (increasing), d (decreasing).
MagnetometryCurve read_curve_csv(const std::filesystem::path& path);
MagnetometryCurve parse_curve_csv(std::string_view text);
std::string write_curve_csv(const MagnetometryCurve& curve);

/// Onset of the transition: intersection of the normal-state baseline (linear fit over the
/// warmest quarter) with the tangent at the steepest point. The slope is a local linear fit
/// over `window` points. Throws NumericalError when no transition stands out of the noise.
double detect_tc(const MagnetometryCurve& mt, int window = 11);

/// J_c = 3 M / a with M = m / V (solid cylinder of radius a).
double jc_cylinder(double moment, double radius, double volume);

/// J_c = 4 M' / (a (1 - a / 3b)) with M' = m' / V' (slit ring as two a x b rectangles).
double jc_slit_ring(double moment, double width, double length, double volume);

struct SlitRingDims {
    double width = 0.0;   // a = (d_out - d_in) / 2
    double length = 0.0;  // b = pi (d_out + d_in) / 4
};
SlitRingDims slit_ring_dims(double inner_diameter, double outer_diameter);

enum class SampleGeometry { cylinder, slit_ring };

struct SampleShape {
    SampleGeometry geometry = SampleGeometry::cylinder;
    double a = 0.0;  // radius (cylinder) or width (ring), m
    double b = 0.0;  // ring length, m
    double volume = 0.0;
};

struct JcSurface {
    std::vector<double> temperatures;         // K
    std::vector<double> fields;               // T
    std::vector<std::vector<double>> jc;      // [temperature][field], A/m^2
    SampleGeometry geometry = SampleGeometry::cylinder;
};

/// Bean J_c from each M-H loop: the irreversible moment is half the width between the
/// decreasing and increasing branches, interpolated onto `fields`. Points above
/// `field_ceiling` (when given) are set to zero to mask high-field artifacts.
JcSurface jc_surface(const std::vector<MagnetometryCurve>& loops, const SampleShape& shape,
                     const std::vector<double>& fields, std::optional<double> field_ceiling = std::nullopt);

/// F_p = J_c B elementwise, N/m^3.
std::vector<std::vector<double>> pinning_force_map(const JcSurface& surface);

struct HpenSample {
    double temperature = 0.0;  // K
    double field = 0.0;        // T
};

/// Field of maximum |moment| on the virgin branch of each M-H curve. Throws
/// ValidationError when a curve has no virgin branch.
std::vector<HpenSample> extract_hpen(const std::vector<MagnetometryCurve>& curves);

struct HpenFit {
    double hpen0 = 0.0;  // T
    double hpen0_error = 0.0;
    double tc = 0.0;     // K
    double tc_error = 0.0;
    double gamma = 0.0;
    double gamma_error = 0.0;
    bool tc_fixed = false;
    double residual_rms = 0.0;  // T
    int iterations = 0;
    std::vector<HpenSample> samples;

    /// H_pen(0) (1 - (T/T_c)^gamma), zero at and above T_c.
    double operator()(double temperature) const;
};

/// Levenberg-Marquardt over (H_pen(0), T_c, gamma), or (H_pen(0), gamma) when `fixed_tc`
/// is given. Needs at least four samples below T_c. Throws NumericalError on non-convergence.
HpenFit fit_hpen_curve(const std::vector<HpenSample>& samples, std::optional<double> fixed_tc = std::nullopt);

/// Bean virgin branch of a slab-like sample with full penetration at `hpen`: |m| grows as
/// H - H^2 / (2 hpen) up to hpen, then relaxes toward the reversible level. Scaled so the
/// peak moment is `peak` (negative, diamagnetic).
MagnetometryCurve synthetic_virgin_curve(double temperature, double hpen, double peak, double field_max, int points);

}  // namespace levitrap::bean
