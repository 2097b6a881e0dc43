#include "levitrap/dissipation.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/units.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace levitrap {

using constants::mu0;
using constants::pi;

double skin_depth(double conductivity, double frequency, double relative_permeability) {
    if (!(frequency > 0.0)) throw DomainError("skin depth needs a positive frequency");
    if (!(relative_permeability > 0.0)) throw DomainError("skin depth needs a positive permeability");
    if (conductivity < 0.0) throw DomainError("conductivity must be non-negative");
    if (conductivity == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(2.0 / (2.0 * pi * frequency * mu0 * relative_permeability * conductivity));
}

std::vector<Voxel> voxelize(const ConductorSpec& body, const Vec3& focus, double min_size, double refine) {
    if (!(min_size > 0.0)) throw DomainError("voxel size must be positive");
    const auto [lo, hi] = body.bounds();
    // Start below half the thinnest dimension so no part of the body hides between corners.
    const double h0 = std::max(min_size, 0.5 * body.min_thickness());
    std::array<int, 3> n{};
    Vec3 h;
    for (int a = 0; a < 3; ++a) {
        n[a] = std::max(1, static_cast<int>(std::ceil((hi[a] - lo[a]) / h0)));
        h[a] = (hi[a] - lo[a]) / n[a];
    }
    std::vector<Voxel> out;
    std::function<void(const Vec3&, const Vec3&)> visit = [&](const Vec3& c, const Vec3& size) {
        const double s = std::max({size.x, size.y, size.z});
        const double target = std::max(min_size, refine * norm(c - focus));
        int inside = 0;
        for (int k = 0; k < 8; ++k) {
            const Vec3 p{c.x + ((k & 1) ? 0.5 : -0.5) * size.x, c.y + ((k & 2) ? 0.5 : -0.5) * size.y,
                         c.z + ((k & 4) ? 0.5 : -0.5) * size.z};
            inside += body.contains(p) ? 1 : 0;
        }
        const bool mixed = inside != 0 && inside != 8;
        if (s > target * (1.0 + 1e-9) || (mixed && s > min_size * (1.0 + 1e-9))) {
            for (int k = 0; k < 8; ++k) {
                const Vec3 q{c.x + ((k & 1) ? 0.25 : -0.25) * size.x, c.y + ((k & 2) ? 0.25 : -0.25) * size.y,
                             c.z + ((k & 4) ? 0.25 : -0.25) * size.z};
                visit(q, 0.5 * size);
            }
            return;
        }
        if (!mixed) {
            if (inside == 8) out.push_back({c, size.x * size.y * size.z});
            return;
        }
        // Boundary cell at the minimum size: keep the sub-cells whose centres are inside.
        constexpr int sub = 4;
        const Vec3 hs = size / sub;
        for (int k = 0; k < sub; ++k)
            for (int j = 0; j < sub; ++j)
                for (int i = 0; i < sub; ++i) {
                    const Vec3 q{c.x + (i + 0.5 - 0.5 * sub) * hs.x, c.y + (j + 0.5 - 0.5 * sub) * hs.y,
                                 c.z + (k + 0.5 - 0.5 * sub) * hs.z};
                    if (body.contains(q)) out.push_back({q, hs.x * hs.y * hs.z});
                }
    };
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i)
                visit({lo.x + (i + 0.5) * h.x, lo.y + (j + 0.5) * h.y, lo.z + (k + 0.5) * h.z}, h);
    return out;
}

namespace {

Vec3 axis_direction(const TrapResult& trap, ScanAxis axis) {
    switch (axis) {
        case ScanAxis::x: return {1.0, 0.0, 0.0};
        case ScanAxis::y: return {0.0, 1.0, 0.0};
        case ScanAxis::z: return {0.0, 0.0, 1.0};
        case ScanAxis::diagonal: return normalized(trap.diagonal_direction);
    }
    return {0.0, 0.0, 1.0};
}

double axis_frequency(const TrapResult& trap, ScanAxis axis) {
    switch (axis) {
        case ScanAxis::x: return trap.frequency[0];
        case ScanAxis::y: return trap.frequency[1];
        case ScanAxis::z: return trap.frequency[2];
        case ScanAxis::diagonal: return trap.frequency_diagonal;
    }
    return 0.0;
}

}  // namespace

EddyReport eddy_dissipation_per_cycle(const ExperimentConfig& config, const TrapResult& trap,
                                      const FieldSolution& solution, double amplitude, ScanAxis axis) {
    const double f = axis_frequency(trap, axis);
    if (!(f > 0.0)) throw DomainError(std::string("trap result has no frequency along ") + scan_axis_name(axis));
    if (!(amplitude > 0.0) || amplitude > 0.5 * config.sphere.diameter)
        throw DomainError("oscillation amplitude must lie in (0, d/2]");
    if (!solution.sphere_center) throw DomainError("dissipation needs a field solve with the sphere present");

    const Vec3 c = trap.trap_center;
    const Vec3 e = axis_direction(trap, axis);
    const double w = 2.0 * pi * f;
    const Vec3 m = sphere_moment(solution);
    const int slots = config.analysis.eddy_phase_slots;

    EddyReport r;
    r.field = trap.field;
    r.frequency = f;
    r.amplitude = amplitude;
    r.axis = axis;
    r.moment = m;

    for (const auto& body : config.conductors) {
        BodyDissipation b;
        b.name = body.name;
        b.conductivity = body.conductivity;
        b.thickness = body.min_thickness();
        b.skin_depth = skin_depth(body.conductivity, f);
        if (body.conductivity > 0.0) {
            const auto vox = voxelize(body, c, config.analysis.eddy_voxel, config.analysis.eddy_refine);
            b.voxels = vox.size();
            double sum = 0.0;
            for (int s = 0; s < slots; ++s) {
                const double phase = 2.0 * pi * s / slots;
                const Vec3 r0 = c + amplitude * std::sin(phase) * e;
                const Vec3 v = amplitude * w * std::cos(phase) * e;
                double p = 0.0;
                for (const auto& vx : vox) {
                    // E = -dA/dt for A = mu0/(4 pi) m x R / R^3 with R = x - r0(t).
                    const Vec3 R = vx.center - r0;
                    const double r2 = dot(R, R);
                    const double r3 = r2 * std::sqrt(r2);
                    const Vec3 dR = -v / r3 + (3.0 * dot(R, v) / (r2 * r3)) * R;
                    const Vec3 E = (-mu0 / (4.0 * pi)) * cross(m, dR);
                    p += dot(E, E) * vx.volume;
                }
                sum += p;
            }
            b.power = body.conductivity * sum / slots;
            if (b.skin_depth < 0.5 * b.thickness) {
                r.warnings.push_back("skin depth in '" + body.name + "' (" + std::to_string(b.skin_depth * 1e3) +
                                     " mm) is below half its thickness; first-order losses are overestimated");
            }
        }
        r.power += b.power;
        r.bodies.push_back(b);
    }

    // The sphere sees the applied field change as it moves: dB/dt = (v.grad) B. A uniform
    // dB/dt in a sphere of radius a dissipates 2 pi sigma |dB/dt|^2 a^5 / 15.
    {
        BodyDissipation b;
        b.name = "sphere";
        b.conductivity = config.sphere.material.conductivity;
        b.thickness = config.sphere.diameter;
        b.skin_depth = skin_depth(b.conductivity, f, config.sphere.material.relative_permeability);
        Mat3 g;
        field_probe(solution, c, g);
        Vec3 ge;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) ge[i] += g(i, j) * e[j];
        const double a = config.sphere.radius();
        const double mean_v2 = 0.5 * amplitude * amplitude * w * w;
        b.power = 2.0 * pi * b.conductivity * dot(ge, ge) * mean_v2 * std::pow(a, 5) / 15.0;
        r.power += b.power;
        r.bodies.push_back(b);
    }

    r.energy_loss_per_cycle = r.power / f;
    r.kinetic_energy = 0.5 * config.sphere.mass() * amplitude * amplitude * w * w;
    r.q = r.energy_loss_per_cycle > 0.0 ? 2.0 * pi * r.kinetic_energy / r.energy_loss_per_cycle
                                        : std::numeric_limits<double>::infinity();
    return r;
}

EddyReport eddy_dissipation_per_cycle(ForceModel& model, const TrapResult& trap, double amplitude, ScanAxis axis) {
    const FieldSolution s = model.solver().solve(trap.trap_center, trap.current);
    return eddy_dissipation_per_cycle(model.config(), trap, s, amplitude, axis);
}

void check_field_guards(const ExperimentConfig& config, double field) {
    if (!(field > 0.0)) throw ValidationError("drive field must be positive");
    const double bsat = mu0 * config.sphere.material.saturation_magnetization;
    if (field >= bsat)
        throw ValidationError("drive field " + std::to_string(field) + " T is at or above the sphere's saturation " +
                              std::to_string(bsat) + " T");
    const double hpen = config.ring.penetration_field_at(config.ambient.temperature);
    if (field >= hpen)
        throw ValidationError("drive field " + std::to_string(field) + " T is at or above the ring's penetration field " +
                              std::to_string(hpen) + " T");
}

std::pair<double, double> power_law_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw DomainError("power-law fit needs at least two points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) throw DomainError("power-law fit needs positive data");
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    }
    const double b = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double res = std::log(y[i]) - my - b * (std::log(x[i]) - mx);
        ssr += res * res;
    }
    const double err = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    return {b, err};
}

QSweep q_vs_field_sweep(ForceModel& model, const std::vector<double>& fields, ScanAxis axis) {
    QSweep out;
    TrapOptions opt;
    opt.lateral = axis != ScanAxis::z;
    opt.diagonal = axis == ScanAxis::diagonal;
    for (double b : fields) {
        check_field_guards(model.config(), b);
        const TrapResult trap = trap_characterize(model, b, opt);
        opt.initial_guess = trap.trap_center;
        out.reports.push_back(eddy_dissipation_per_cycle(model, trap, model.config().analysis.eddy_amplitude, axis));
    }
    if (out.reports.size() >= 2) {
        std::vector<double> x;
        std::vector<double> y;
        for (const auto& r : out.reports) {
            if (!std::isfinite(r.q)) return out;
            x.push_back(r.field);
            y.push_back(r.q);
        }
        const auto [slope, err] = power_law_exponent(x, y);
        out.exponent = slope;
        out.exponent_error = err;
    }
    return out;
}

QSweep q_vs_field_sweep(const ExperimentConfig& config, const std::vector<double>& fields, ScanAxis axis) {
    ForceModel model(config);
    return q_vs_field_sweep(model, fields, axis);
}

}  // namespace levitrap
