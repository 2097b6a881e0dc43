#include "levitrap/coil.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/parallel.hpp"
#include "levitrap/units.hpp"

#include <cmath>

namespace levitrap {

using constants::mu0;
using constants::pi;

namespace {

// Below this k^2 the loop kernels switch to their power series, which avoid the
// cancellation in (1 - k^2/2) K - E.
constexpr double kSeriesK2 = 1e-3;

// (1 - k^2/2) K - E = pi k^4 / 32 * S(k^2)
double series_s(double m) { return 1.0 + m * (0.75 + m * (75.0 / 128.0 + m * (245.0 / 512.0))); }
double series_ds(double m) { return 0.75 + m * (75.0 / 64.0 + m * (735.0 / 512.0)); }

}  // namespace

void elliptic_ke(double m, double& k_out, double& e_out) {
    if (!(m >= 0.0 && m < 1.0)) throw DomainError("elliptic parameter must lie in [0, 1)");
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double c2 = m;  // c_n^2
    double sum = 0.5 * c2;
    double pow2 = 0.5;
    for (int it = 0; it < 40; ++it) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        const double cn = 0.5 * (a - b);
        pow2 *= 2.0;
        c2 = cn * cn;
        sum += pow2 * c2;
        a = an;
        b = bn;
        if (std::abs(cn) < 1e-17 * a) break;
    }
    k_out = pi / (2.0 * a);
    e_out = k_out * (1.0 - sum);
}

std::vector<Loop> coil_loops(const CoilSpec& coil) {
    const double pitch = coil.wire_diameter;
    const int per_layer = std::max(1, static_cast<int>(std::lround(coil.height / pitch)));
    const int layers = (coil.turns + per_layer - 1) / per_layer;
    const double r_in = 0.5 * coil.winding_inner_diameter;
    const double build = 0.5 * (coil.winding_outer_diameter - coil.winding_inner_diameter);
    std::vector<Loop> loops;
    loops.reserve(static_cast<std::size_t>(coil.turns));
    int remaining = coil.turns;
    for (int l = 0; l < layers; ++l) {
        const double r = r_in + (l + 0.5) * build / layers;
        const int n = std::min(per_layer, remaining);
        remaining -= n;
        for (int t = 0; t < n; ++t) loops.push_back({r, coil.center_z + (t - 0.5 * (n - 1)) * pitch});
    }
    return loops;
}

double loop_potential_ratio(double a, double z0, double current, double rho, double z) {
    rho = std::abs(rho);
    const double dz = z - z0;
    const double s = (a + rho) * (a + rho) + dz * dz;
    const double m = 4.0 * a * rho / s;
    if (m < kSeriesK2) {
        // A_phi = mu0 I a^2 rho / (4 (a^2+z^2)^{3/2}) at leading order; written in terms of
        // s so the series stays accurate away from the axis too.
        return mu0 * current * a * a / (4.0 * s * std::sqrt(s)) * series_s(m);
    }
    if (m >= 1.0 - 1e-15) throw DomainError("point lies on a coil filament");
    double kk = 0.0;
    double ee = 0.0;
    elliptic_ke(m, kk, ee);
    const double k = std::sqrt(m);
    const double aphi = mu0 * current / (pi * k) * std::sqrt(a / rho) * ((1.0 - 0.5 * m) * kk - ee);
    return aphi / rho;
}

Vec3 loop_field(double a, double z0, double current, const Vec3& p) {
    const double rho = std::hypot(p.x, p.y);
    const double dz = p.z - z0;
    const double s = (a + rho) * (a + rho) + dz * dz;
    const double d2 = (a - rho) * (a - rho) + dz * dz;
    if (d2 <= 1e-18 * a * a) throw DomainError("point lies on a coil filament");
    const double m = 4.0 * a * rho / s;

    double bz = 0.0;
    double brho = 0.0;
    if (rho == 0.0) {
        bz = mu0 * current * a * a / (2.0 * std::pow(a * a + dz * dz, 1.5));
    } else if (m < kSeriesK2) {
        // Differentiate Q = rho A_phi = c rho^2 s^{-3/2} S(m), with m = 4 a rho / s.
        const double c = mu0 * current * a * a / 4.0;
        const double sm = series_s(m);
        const double dsm = series_ds(m);
        const double s32 = s * std::sqrt(s);
        const double dm_drho = m * (1.0 / rho - 2.0 * (a + rho) / s);
        const double dm_dz = -2.0 * dz * m / s;
        // A_phi = c rho s^{-3/2} S
        const double daphi_dz = c * rho * (-1.5 * 2.0 * dz / (s * s32) * sm + dsm * dm_dz / s32);
        const double dq_drho =
            c * (2.0 * rho / s32 * sm - 1.5 * rho * rho * 2.0 * (a + rho) / (s * s32) * sm + rho * rho / s32 * dsm * dm_drho);
        bz = dq_drho / rho;
        brho = -daphi_dz;
    } else {
        double kk = 0.0;
        double ee = 0.0;
        elliptic_ke(m, kk, ee);
        const double pre = mu0 * current / (2.0 * pi * std::sqrt(s));
        bz = pre * (kk + (a * a - rho * rho - dz * dz) / d2 * ee);
        brho = pre * dz / rho * (-kk + (a * a + rho * rho + dz * dz) / d2 * ee);
    }
    if (rho == 0.0) return {0.0, 0.0, bz};
    return {brho * p.x / rho, brho * p.y / rho, bz};
}

Vec3 coil_source_field(const CoilSpec& coil, double current, const Vec3& p) {
    Vec3 b;
    for (const auto& l : coil_loops(coil)) b += loop_field(l.radius, l.z, current, p);
    return b;
}

CoilSource::CoilSource(const CoilSpec& coil, double rho_max, double z_min, double z_max, double spacing)
    : coil_(coil), h_(spacing), z0_(z_min - 2.0 * spacing) {
    nr_ = static_cast<int>(std::ceil(rho_max / h_)) + 3;
    nz_ = static_cast<int>(std::ceil((z_max - z_min) / h_)) + 5;
    table_.assign(static_cast<std::size_t>(nr_) * nz_, 0.0);
    const auto loops = coil_loops(coil);
    parallel_for(static_cast<std::size_t>(nz_), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const double z = z0_ + static_cast<double>(k) * h_;
            for (int i = 0; i < nr_; ++i) {
                const double rho = i * h_;
                double g = 0.0;
                for (const auto& l : loops) {
                    // A lattice point can land on a filament; nudge it by a tiny offset.
                    const double dr = rho - l.radius;
                    const double dz = z - l.z;
                    const double r = (dr * dr + dz * dz < 1e-20) ? rho + 1e-9 : rho;
                    g += loop_potential_ratio(l.radius, l.z, 1.0, r, z);
                }
                table_[k * static_cast<std::size_t>(nr_) + static_cast<std::size_t>(i)] = g;
            }
        }
    });
}

double CoilSource::g(double rho, double z) const {
    rho = std::abs(rho);
    const double u = rho / h_;
    const double v = (z - z0_) / h_;
    int i0 = static_cast<int>(std::floor(u)) - 1;
    int k0 = static_cast<int>(std::floor(v)) - 1;
    if (i0 + 3 >= nr_ || k0 < 0 || k0 + 3 >= nz_) throw DomainError("point outside the tabulated coil potential");
    const double tu = u - (i0 + 1);
    const double tv = v - (k0 + 1);
    auto lagrange = [](double t, double w[4]) {
        // nodes at -1, 0, 1, 2
        w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
        w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
        w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
    };
    double wu[4];
    double wv[4];
    lagrange(tu, wu);
    lagrange(tv, wv);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
        const std::size_t row = static_cast<std::size_t>(k0 + b) * static_cast<std::size_t>(nr_);
        double r = 0.0;
        for (int a = 0; a < 4; ++a) {
            const int ii = std::abs(i0 + a);  // g is even in rho
            r += wu[a] * table_[row + static_cast<std::size_t>(ii)];
        }
        acc += wv[b] * r;
    }
    return acc;
}

Vec3 CoilSource::field(const Vec3& p) const { return coil_source_field(coil_, 1.0, p); }

}  // namespace levitrap
