// End-to-end acceptance run. Prints one detail line per check and one
// "criterion N: PASS|FAIL" line per criterion; exits nonzero if any criterion fails.
// Also writes acceptance_comparison.csv in the working directory.

#include "levitrap/beanlab.hpp"
#include "levitrap/coil.hpp"
#include "levitrap/config.hpp"
#include "levitrap/dissipation.hpp"
#include "levitrap/dynamics.hpp"
#include "levitrap/errors.hpp"
#include "levitrap/field_solver.hpp"
#include "levitrap/mechanics.hpp"
#include "levitrap/ringdown.hpp"
#include "levitrap/sweep.hpp"
#include "levitrap/thermal.hpp"
#include "levitrap/units.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

using namespace levitrap;
using constants::mu0;
using constants::pi;

namespace {

// Pinned tolerances.
constexpr double kSigmaRatioTol = 1e-6;      // criterion 6
constexpr double kLinearityTol = 1e-6;
constexpr double kDivergenceTol = 1e-8;
constexpr double kForcePotentialTol = 0.01;  // RMS, relative
constexpr double kSineFitTol = 0.02;
constexpr double kEnergyDriftTol = 1e-4;     // per 100 cycles, relative to the oscillation energy
constexpr double kMeshTol = 0.05;
constexpr double kSphereTol = 0.02;          // criterion 7
constexpr double kDiamagnetTol = 0.03;
constexpr double kLoopTol = 1e-6;
constexpr double kMagnetConstantTol = 0.15;
constexpr double kHpenFitTol = 1e-3;
constexpr double kCvTol = 0.01;              // criterion 9
constexpr double kT2Tol = 10.0;              // K
constexpr double kDebyeExpTol = 0.05;
constexpr double kRingdownQTol = 0.02;       // criterion 10
constexpr double kFitErrorTol = 1e-3;

constexpr double kNominalField = 37.5e-3;

struct Check {
    int criterion;
    std::string name;
    double value;
    double lo;
    double hi;
    bool gated = true;
    bool pass() const { return !gated || (value >= lo && value <= hi); }
};

std::vector<Check> checks;
std::map<int, std::string> failures;  // criteria that could not be evaluated

void add(int c, std::string name, double v, double lo, double hi, bool gated = true) {
    checks.push_back({c, std::move(name), v, lo, hi, gated});
    const auto& k = checks.back();
    std::printf("  [%d] %-52s %.6g  in [%.6g, %.6g]%s\n", c, k.name.c_str(), v, lo, hi,
                gated ? (k.pass() ? "" : "  <- out of band") : "  (informational)");
    std::fflush(stdout);
}

void rel(int c, const std::string& name, double v, double target, double tol) {
    add(c, name, v, target * (1 - tol), target * (1 + tol));
}

void run(int criterion, const char* what, const std::function<void()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    std::printf("%s\n", what);
    std::fflush(stdout);
    try {
        f();
    } catch (const std::exception& e) {
        failures[criterion] += std::string(what) + ": " + e.what() + "; ";
        std::printf("  [%d] error: %s\n", criterion, e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("  (%.0f s)\n", s);
    std::fflush(stdout);
}

void add_rows(const std::vector<ComparisonRow>& rows, int criterion) {
    for (const auto& r : rows)
        if (r.criterion == criterion) add(r.criterion, r.quantity, r.computed, r.lo, r.hi, r.gated);
}

// 2 mm box around an isolated sphere; the ring is shrunk out of the way and excluded.
ExperimentConfig isolated(double cell, double mu_r) {
    auto c = table1_config();
    c.grid.fine_cell = cell;
    c.grid.domain_half_extent = {2e-3, 2e-3, 2e-3};
    c.grid.fine_half_extent = {0.4e-3, 0.4e-3, 0.4e-3};
    c.ring.outer_diameter = 1.0e-3;
    c.ring.inner_diameter = 0.9e-3;
    c.sphere.material.relative_permeability = mu_r;
    return c;
}

FieldSolution isolated_solve(double cell, double mu_r, double b0) {
    FieldSolverOptions o;
    o.include_ring = false;
    FieldSolver fs(isolated(cell, mu_r), std::make_shared<UniformSource>(b0), o);
    return fs.solve(Vec3{0, 0, 0}, 1.0);
}

double max_face_mismatch(const FieldSolution& a, const FieldSolution& b, double scale) {
    double diff = 0.0;
    double ref = 0.0;
    for (int ax = 0; ax < 3; ++ax)
        for (std::size_t i = 0; i < a.b[ax].size(); ++i) {
            diff = std::max(diff, std::abs(scale * a.b[ax][i] - b.b[ax][i]));
            ref = std::max(ref, std::abs(b.b[ax][i]));
        }
    return diff / ref;
}

const SweepRow* row_at(const SweepResult& s, double field) {
    for (const auto& r : s.rows)
        if (r.ok && std::abs(r.field - field) < 1e-9) return &r;
    return nullptr;
}

}  // namespace

int main() {
    const ExperimentConfig cfg = table1_config();
    ForceModel model(cfg);
    ComparisonInputs cmp;

    // 1-5: sweep over the default fields with Q_z at every point.
    std::optional<SweepResult> sweep;
    run(1, "frequency sweep 12.5-75 mT (default grid)", [&] {
        SweepOptions o;
        o.q_axes = {ScanAxis::z};
        sweep = run_frequency_sweep(model, default_sweep_fields(), o);
        for (const auto& r : sweep->rows) {
            if (r.ok)
                std::printf("  B = %5.1f mT  f = (%.2f, %.2f, %.2f) Hz  f_r = %.2f Hz  Q_z = %.4g\n", r.field * 1e3,
                            r.trap.frequency[0], r.trap.frequency[1], r.trap.frequency[2], r.trap.frequency_diagonal,
                            r.q_for(ScanAxis::z).value_or(std::nan("")));
            else
                std::printf("  B = %5.1f mT  not evaluated: %s\n", r.field * 1e3, r.error.c_str());
        }
        cmp.sweep = *sweep;
        if (const auto* r = row_at(*sweep, kNominalField)) cmp.nominal_trap = r->trap;
    });
    if (!sweep) {
        for (int c : {2, 3, 5}) failures[c] += "sweep failed; ";
    } else if (!cmp.nominal_trap) {
        failures[2] += "no trap at 37.5 mT; ";
        failures[3] += "no trap at 37.5 mT; ";
    }
    run(4, "lift-off threshold", [&] { cmp.liftoff = liftoff_threshold(model); });

    const auto paper_rows = compare_to_paper(cmp);
    for (int c = 1; c <= 5; ++c) add_rows(paper_rows, c);

    // 6: model properties.
    const TrapResult* nominal = cmp.nominal_trap ? &*cmp.nominal_trap : nullptr;
    run(6, "Q proportional to 1/sigma at 50 mT", [&] {
        const SweepRow* r = sweep ? row_at(*sweep, 50e-3) : nullptr;
        if (!r) throw NumericalError("no trap at 50 mT");
        const FieldSolution s = model.solver().solve(r->trap.trap_center, r->trap.current);
        ExperimentConfig c2 = cfg;
        for (auto& c : c2.conductors) c.conductivity *= 2.0;
        const double q1 = eddy_dissipation_per_cycle(cfg, r->trap, s, cfg.analysis.eddy_amplitude).q;
        const double q2 = eddy_dissipation_per_cycle(c2, r->trap, s, cfg.analysis.eddy_amplitude).q;
        add(6, "|Q(sigma) / Q(2 sigma) / 2 - 1|", std::abs(q1 / q2 / 2.0 - 1.0), 0.0, kSigmaRatioTol);
    });
    run(6, "linearity in coil current and discrete divergence", [&] {
        const Vec3 p = nominal ? nominal->trap_center : cfg.sphere.initial_position;
        const double i1 = nominal ? nominal->current : 0.3;
        FieldSolver fs(cfg);
        const FieldSolution a = fs.solve(p, i1);
        FieldSolver fs2(cfg);
        const FieldSolution b = fs2.solve(p, 2.0 * i1);
        add(6, "max |B(2I) - 2 B(I)| / max |B(2I)|", max_face_mismatch(a, b, 2.0), 0.0, kLinearityTol);
        add(6, "max relative div B", max_relative_divergence(a), 0.0, kDivergenceTol);
    });
    run(6, "force = -grad U along a resolved z scan at 37.5 mT", [&] {
        if (!nominal) throw NumericalError("no trap at 37.5 mT");
        // Centred differences of a trapezoidal potential miss -F by h^2 F''/4, so the
        // check needs a scan that resolves the well; the 5-point stiffness profile does not.
        const auto rms_mismatch = [](const PotentialProfile& z) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 1; i + 1 < z.offsets.size(); ++i) {
                const double du = (z.potential[i + 1] - z.potential[i - 1]) / (z.offsets[i + 1] - z.offsets[i - 1]);
                num += (du + z.force[i]) * (du + z.force[i]);
            }
            for (double f : z.force) den += f * f;
            return std::sqrt(num / (z.offsets.size() - 2) / (den / z.offsets.size()));
        };
        const double w = cfg.analysis.stiffness_window;
        std::vector<double> offsets;
        for (int i = -20; i <= 20; ++i) offsets.push_back(w * i / 20.0);
        const auto map = force_map(model, nominal->current, nominal->trap_center, {0, 0, 1}, offsets);
        const auto fine = trap_potential(map, ScanAxis::z, {0, 0, 1}, model.weight());
        add(6, "RMS(-dU/dz - F_z) / RMS(F_z), 41 points", rms_mismatch(fine), 0.0, kForcePotentialTol);
        for (const auto& p : nominal->profiles)
            if (p.axis == ScanAxis::z && p.offsets.size() >= 3)
                add(6, "same on the 5-point stiffness profile", rms_mismatch(p), 0.0, 0.0, false);
    });
    run(6, "curvature frequency vs dynamics sine fit (solver forces, 37.5 mT)", [&] {
        if (!nominal) throw NumericalError("no trap at 37.5 mT");
        const double h = cfg.analysis.stiffness_window / 2.0;
        const auto lattice = LatticeForceField::sample(model, nominal->current, nominal->trap_center, {h, h, h}, {3, 3, 7});
        const double m = model.mass();
        const double fz = nominal->frequency[2];
        const double fmax = std::sqrt(lattice.max_stiffness() / m) / (2 * pi);
        const double dt = std::min(1.0 / (500.0 * fz), 1.0 / (60.0 * fmax));
        DynamicsOptions o;
        o.mass = m;
        o.gravity = cfg.ambient.gravity;
        const Vec3 start = nominal->trap_center + Vec3{0, 0, cfg.analysis.stiffness_window};
        const auto tr = integrate_motion(lattice, start, {}, dt, 40.0 / fz, o);
        const auto fit = fit_sine_frequency(tr, 2);
        std::printf("  trap f_z = %.4f Hz, sine fit = %.4f Hz\n", fz, fit.frequency);
        add(6, "|f_fit / f_curvature - 1|", std::abs(fit.frequency / fz - 1.0), 0.0, kSineFitTol);
    });
    run(6, "undamped energy drift over 100 cycles (harmonic surrogate)", [&] {
        if (!nominal) throw NumericalError("no trap at 37.5 mT");
        const double m = model.mass();
        const auto h = harmonic_surrogate(*nominal, m, cfg.ambient.gravity);
        const double fz = nominal->frequency[2];
        const double fmax = *std::max_element(nominal->frequency.begin(), nominal->frequency.end());
        const double dt = std::min(1.0 / (500.0 * fz), 1.0 / (50.0 * fmax));
        DynamicsOptions o;
        o.mass = m;
        o.gravity = cfg.ambient.gravity;
        const double a = cfg.analysis.eddy_amplitude;
        const auto tr = integrate_motion(h, nominal->trap_center + Vec3{0, 0, a}, {}, dt, 100.0 / fz, o);
        if (tr.energy.empty()) throw NumericalError("no energy trace");
        double drift = 0.0;
        for (double e : tr.energy) drift = std::max(drift, std::abs(e - tr.energy.front()));
        add(6, "max |E - E0| / (k_z A^2 / 2)", drift / (0.5 * nominal->stiffness[2] * a * a), 0.0, kEnergyDriftTol);
    });
    run(6, "mesh halving: f_z at 37.5 mT, 20 um vs 10 um", [&] {
        if (!nominal) throw NumericalError("no trap at 37.5 mT");
        TrapOptions to;
        to.lateral = false;
        to.diagonal = false;
        to.initial_guess = nominal->trap_center;
        ForceModel coarse(cfg);
        const double f20 = trap_characterize(coarse, kNominalField, to).frequency[2];
        ExperimentConfig fine_cfg = cfg;
        fine_cfg.grid.fine_cell = cfg.grid.fine_cell / 2.0;
        ForceModel fine(fine_cfg);
        const double f10 = trap_characterize(fine, kNominalField, to).frequency[2];
        std::printf("  f_z = %.4f Hz (20 um), %.4f Hz (10 um)\n", f20, f10);
        add(6, "|f_z(h/2) / f_z(h) - 1|", std::abs(f10 / f20 - 1.0), 0.0, kMeshTol);
    });

    // 7: analytic oracles.
    run(7, "permeable sphere (mu_r = 32) in a uniform field, 6.25 um cells", [&] {
        const double mu = 32.0, b0 = 1e-3, cell = 6.25e-6;
        const FieldSolution s = isolated_solve(cell, mu, b0);
        const double r = s.sphere_radius;
        const auto& g = *s.grid;
        double sum = 0.0, vol = 0.0;
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) {
                    const Vec3 p = g.cell_center(i, j, k);
                    if (norm(p) >= 0.8 * r) continue;
                    const double v = g.width(0, i) * g.width(1, j) * g.width(2, k);
                    sum += field_probe(s, p).z * v;
                    vol += v;
                }
        rel(7, "interior B / B0", sum / vol / b0, 3.0 * mu / (mu + 2.0), kSphereTol);
    });
    run(7, "near-perfect diamagnetic sphere (mu_r = 1e-4), equatorial enhancement", [&] {
        const double b0 = 1e-3, cell = 6.25e-6;
        const FieldSolution s = isolated_solve(cell, 1e-4, b0);
        const double r = s.sphere_radius;
        std::vector<double> x, y;
        for (double d = r + 4 * cell; d <= 2 * r + 1e-12; d += cell) {
            x.push_back(std::pow(r / d, 3));
            y.push_back(field_probe(s, {d, 0, 0}).z / b0 - 1.0);
        }
        const double beta = slope_through_origin(x, y).first;
        std::printf("  raw B/B0 at R + h: %.4f\n", field_probe(s, {r + cell, 0, 0}).z / b0);
        rel(7, "1 + beta (fit of B0 (1 + beta R^3/r^3))", 1.0 + beta, 1.5, kDiamagnetTol);
    });
    run(7, "single loop on axis", [&] {
        const double a = 2e-3, i = 0.7;
        double worst = 0.0;
        for (double z : {-5e-3, -1e-3, 0.0, 0.3e-3, 2e-3, 1e-2}) {
            const double exact = mu0 * i * a * a / (2.0 * std::pow(a * a + z * z, 1.5));
            worst = std::max(worst, std::abs(loop_field(a, 0.0, i, {0, 0, z}).z / exact - 1.0));
        }
        add(7, "max relative error", worst, 0.0, kLoopTol);
    });
    run(7, "magnet constant", [&] {
        const double k = model.magnet_constant();
        std::printf("  coil only: %.2f mT/A\n", coil_only_magnet_constant(cfg) * 1e3);
        rel(7, "B_z at ring centre per ampere (mT/A)", k * 1e3, 125.0, kMagnetConstantTol);
    });

    // 8: Bean model.
    run(8, "critical current densities and H_pen", [&] {
        cmp.jc_nb = bean::jc_cylinder(1.6e-4, 0.835e-3, 2.28e-9);
        const auto d = bean::slit_ring_dims(0.756e-3, 1.948e-3);
        cmp.jc_ybco = bean::jc_slit_ring(0.89e-3, d.width, d.length, 2.63e-9);
        bean::HpenFit truth;
        truth.hpen0 = 0.122;
        truth.tc = 9.26;
        truth.gamma = 2.13;
        std::vector<bean::HpenSample> s;
        for (double t = 2.0; t <= 9.0 + 1e-9; t += 0.5) s.push_back({t, truth(t)});
        const auto fit = bean::fit_hpen_curve(s);
        add(8, "synthetic fit: |H_pen(0) / 122 mT - 1|", std::abs(fit.hpen0 / truth.hpen0 - 1), 0.0, kHpenFitTol);
        add(8, "synthetic fit: |T_c / 9.26 K - 1|", std::abs(fit.tc / truth.tc - 1), 0.0, kHpenFitTol);
        add(8, "synthetic fit: |gamma / 2.13 - 1|", std::abs(fit.gamma / truth.gamma - 1), 0.0, kHpenFitTol);
        const std::string dir = std::string(LEVITRAP_DATA_DIR) + "/bean/";
        std::vector<bean::MagnetometryCurve> curves;
        for (const char* t : {"2", "3", "4", "4.6", "5", "6", "7", "8", "9"})
            curves.push_back(bean::read_curve_csv(dir + "nb_mh_" + t + "K.csv"));
        cmp.hpen_nb = bean::fit_hpen_curve(bean::extract_hpen(curves));
    });
    {
        ComparisonInputs b;
        b.jc_nb = cmp.jc_nb;
        b.jc_ybco = cmp.jc_ybco;
        b.hpen_nb = cmp.hpen_nb;
        add_rows(compare_to_paper(b), 8);
    }

    // 9: thermal.
    run(9, "Debye heat capacity and heating", [&] {
        const thermal::ThermalConfig tc;
        const double td = tc.debye_temperature, coeff = tc.debye_coefficient;
        rel(9, "C_v(246 K) (J/(kg K))", thermal::debye_heat_capacity(246.0, td, coeff), 556.6, kCvTol);
        rel(9, "C_v(100 T_D) (J/(kg K))", thermal::debye_heat_capacity(100.0 * td, td, coeff), 695.0, kCvTol);
        const double slope =
            std::log(thermal::debye_heat_capacity(10.0, td, coeff) / thermal::debye_heat_capacity(2.0, td, coeff)) /
            std::log(5.0);
        add(9, "low-T exponent d ln C / d ln T (2-10 K)", slope, 3.0 - kDebyeExpTol, 3.0 + kDebyeExpTol);
        const double t2 = thermal::equilibrium_temperature(23.5e-3, tc.sphere_mass, tc.bath_temperature, td, coeff);
        add(9, "T2 for 23.5 mJ (K)", t2, 246.0 - kT2Tol, 246.0 + kT2Tol);
        cmp.thermal = thermal::thermal_budget(tc);
        for (const auto& c : cmp.thermal->comparisons)
            add(9, c.quantity + " computed/published", c.ratio(), 0.0, 0.0, false);
    });

    // 10: ringdown closed loop.
    run(10, "synthetic ring-down, Q = 1000", [&] {
        const double f = 169.3, q = 1000.0, tau = q / (pi * f);
        const auto noisy = synthesize_ringdown(f, tau, 1.0, 0.1, 125e3, 10.0, 1);
        const auto r = analyze_ringdown(noisy, 150.0, 190.0);
        add(10, "|Q / 1000 - 1|, noise 0.1, 125 kHz, 10 s", std::abs(r.q / q - 1.0), 0.0, kRingdownQTol);
        add(10, "spectral resolution (Hz)", power_spectrum(noisy).bin_width, 0.1 - 1e-9, 0.1 + 1e-9);
        cmp.ringdown = r;
        const auto clean = analyze_ringdown(synthesize_ringdown(f, tau, 1.0, 0.0, 125e3, 10.0), 150.0, 190.0);
        add(10, "exponential-fit relative error (clean)", clean.fit_relative_error, 0.0, kFitErrorTol);
        add(10, "|tau / tau_true - 1| (clean)", std::abs(clean.tau / tau - 1.0), 0.0, kFitErrorTol);
        const double inf = std::numeric_limits<double>::infinity();
        auto a = synthesize_ringdown(169.0, inf, 1.0, 0.0, 125e3, 10.0);
        const auto b = synthesize_ringdown(169.3, inf, 1.0, 0.0, 125e3, 10.0);
        for (std::size_t i = 0; i < a.samples.size(); ++i) a.samples[i] += b.samples[i];
        const auto sp = power_spectrum(a);
        const auto bin = [&](double fr) { return static_cast<std::size_t>(std::lround(fr / sp.bin_width)); };
        const double contrast =
            std::min(sp.psd[bin(169.0)] / sp.psd[bin(169.1)], sp.psd[bin(169.3)] / sp.psd[bin(169.2)]);
        add(10, "two modes 0.3 Hz apart: peak / gap bin power", contrast, 10.0, inf);
    });

    // 11: negative controls at the nominal drive.
    run(11, "negative controls", [&] {
        cmp.controls.push_back(permeability_control(cfg, kNominalField));
        cmp.controls.push_back(closed_ring_control(cfg, kNominalField));
        for (const auto& c : cmp.controls)
            std::printf("  %s: %s\n", c.name.c_str(), c.trapped ? "trapped" : c.message.c_str());
    });
    {
        ComparisonInputs c;
        c.controls = cmp.controls;
        add_rows(compare_to_paper(c), 11);
    }
    if (cmp.controls.size() != 2) failures[11] += "controls incomplete; ";

    std::ofstream csv("acceptance_comparison.csv");
    csv << comparison_csv(compare_to_paper(cmp));

    std::printf("\n");
    int failed = 0;
    for (int c = 1; c <= 11; ++c) {
        int n = 0;
        bool ok = !failures.count(c);
        std::string bad;
        for (const auto& k : checks)
            if (k.criterion == c) {
                ++n;
                if (!k.pass()) ok = false, bad += k.name + " = " + std::to_string(k.value) + "; ";
            }
        if (n == 0) ok = false;
        if (failures.count(c)) bad += failures[c];
        std::printf("criterion %d: %s (%d checks)%s%s\n", c, ok ? "PASS" : "FAIL", n, ok ? "" : "  ", bad.c_str());
        failed += ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
