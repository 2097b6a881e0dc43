#include "levitrap/dynamics.hpp"

#include "levitrap/mechanics.hpp"
#include "levitrap/ringdown.hpp"
#include "levitrap/units.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace levitrap {

using constants::pi;

HarmonicForceField::HarmonicForceField(const Vec3& center, const std::array<double, 3>& stiffness, const Vec3& bias)
    : center_(center), k_(stiffness), bias_(bias) {}

Vec3 HarmonicForceField::force(const Vec3& p) const {
    const Vec3 d = p - center_;
    return Vec3{-k_[0] * d.x, -k_[1] * d.y, -k_[2] * d.z} + bias_;
}

std::optional<double> HarmonicForceField::potential(const Vec3& p) const {
    const Vec3 d = p - center_;
    return 0.5 * (k_[0] * d.x * d.x + k_[1] * d.y * d.y + k_[2] * d.z * d.z) - dot(bias_, d);
}

double HarmonicForceField::max_stiffness() const { return std::max({std::abs(k_[0]), std::abs(k_[1]), std::abs(k_[2])}); }

HarmonicForceField harmonic_surrogate(const TrapResult& trap, double mass, double gravity) {
    return HarmonicForceField(trap.trap_center, trap.stiffness, Vec3{0.0, 0.0, mass * gravity});
}

LatticeForceField::LatticeForceField(const Vec3& origin, const Vec3& spacing, const std::array<int, 3>& counts,
                                     std::vector<Vec3> forces)
    : origin_(origin), spacing_(spacing), n_(counts), f_(std::move(forces)) {
    for (int a = 0; a < 3; ++a) {
        if (n_[a] < 1) throw DomainError("lattice counts must be positive");
        if (n_[a] > 1 && !(spacing_[a] > 0.0)) throw DomainError("lattice spacing must be positive");
    }
    if (f_.size() != static_cast<std::size_t>(n_[0]) * n_[1] * n_[2])
        throw DomainError("lattice force count does not match the node count");
}

LatticeForceField LatticeForceField::sample(ForceModel& model, double current, const Vec3& center, const Vec3& spacing,
                                            const std::array<int, 3>& counts) {
    for (int a = 0; a < 3; ++a)
        if (counts[a] < 1 || counts[a] % 2 == 0) throw DomainError("lattice counts must be odd");
    Vec3 origin;
    for (int a = 0; a < 3; ++a) origin[a] = center[a] - (counts[a] / 2) * spacing[a];
    std::vector<Vec3> forces;
    forces.reserve(static_cast<std::size_t>(counts[0]) * counts[1] * counts[2]);
    for (int k = 0; k < counts[2]; ++k)
        for (int j = 0; j < counts[1]; ++j)
            for (int i = 0; i < counts[0]; ++i) {
                // Offsets from the centre, so nodes on the axes hit the trap-scan cache exactly.
                const Vec3 p{center.x + (i - counts[0] / 2) * spacing.x, center.y + (j - counts[1] / 2) * spacing.y,
                             center.z + (k - counts[2] / 2) * spacing.z};
                try {
                    forces.push_back(model.force(p, current));
                } catch (const ValidationError& e) {
                    throw DomainError("lattice node (" + std::to_string(i) + "," + std::to_string(j) + "," +
                                      std::to_string(k) + "): " + e.what());
                }
            }
    return LatticeForceField(origin, spacing, counts, std::move(forces));
}

const Vec3& LatticeForceField::node_force(int i, int j, int k) const {
    return f_[static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * (j + static_cast<std::size_t>(n_[1]) * k)];
}

bool LatticeForceField::contains(const Vec3& p) const {
    for (int a = 0; a < 3; ++a) {
        if (n_[a] == 1) continue;
        const double u = (p[a] - origin_[a]) / spacing_[a];
        if (u < 0.0 || u > n_[a] - 1) return false;
    }
    return true;
}

Vec3 LatticeForceField::force(const Vec3& p) const {
    // Per axis: base node, four Catmull-Rom weights. Nodes beyond the lattice are linear
    // extrapolations of the two nearest ones, which keeps linear fields exact.
    std::array<int, 3> base{};
    std::array<std::array<double, 4>, 3> w{};
    for (int a = 0; a < 3; ++a) {
        if (n_[a] == 1) {
            w[a] = {0.0, 1.0, 0.0, 0.0};
            continue;
        }
        const double u = std::clamp((p[a] - origin_[a]) / spacing_[a], 0.0, static_cast<double>(n_[a] - 1));
        const int b = std::min(static_cast<int>(u), n_[a] - 2);
        const double t = u - b;
        const double t2 = t * t;
        const double t3 = t2 * t;
        base[a] = b;
        w[a] = {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0), 0.5 * (-3.0 * t3 + 4.0 * t2 + t),
                0.5 * (t3 - t2)};
    }
    auto node = [&](int i, int j, int k) {
        // Linear extrapolation axis by axis.
        const std::array<int, 3> idx{i, j, k};
        Vec3 acc;
        std::array<std::array<int, 2>, 3> src{};
        std::array<std::array<double, 2>, 3> cw{};
        for (int a = 0; a < 3; ++a) {
            const int n = n_[a];
            int v = idx[a];
            if (n == 1) v = 0;
            if (v < 0) {
                src[a] = {0, 1};
                cw[a] = {1.0 - v, static_cast<double>(v)};
            } else if (v > n - 1) {
                src[a] = {n - 1, n - 2};
                cw[a] = {1.0 + (v - (n - 1)), -static_cast<double>(v - (n - 1))};
            } else {
                src[a] = {v, v};
                cw[a] = {1.0, 0.0};
            }
        }
        for (int ci = 0; ci < 2; ++ci)
            for (int cj = 0; cj < 2; ++cj)
                for (int ck = 0; ck < 2; ++ck) {
                    const double c = cw[0][ci] * cw[1][cj] * cw[2][ck];
                    if (c == 0.0) continue;
                    acc += c * node_force(src[0][ci], src[1][cj], src[2][ck]);
                }
        return acc;
    };
    Vec3 out;
    for (int c = 0; c < 4; ++c) {
        if (w[2][c] == 0.0) continue;
        for (int b = 0; b < 4; ++b) {
            if (w[1][b] == 0.0) continue;
            for (int a = 0; a < 4; ++a) {
                if (w[0][a] == 0.0) continue;
                out += w[0][a] * w[1][b] * w[2][c] * node(base[0] + a - 1, base[1] + b - 1, base[2] + c - 1);
            }
        }
    }
    return out;
}

double LatticeForceField::max_stiffness() const {
    double kmax = 0.0;
    for (int k = 0; k < n_[2]; ++k)
        for (int j = 0; j < n_[1]; ++j)
            for (int i = 0; i < n_[0]; ++i) {
                const Vec3& f = node_force(i, j, k);
                if (i + 1 < n_[0]) kmax = std::max(kmax, std::abs(node_force(i + 1, j, k).x - f.x) / spacing_.x);
                if (j + 1 < n_[1]) kmax = std::max(kmax, std::abs(node_force(i, j + 1, k).y - f.y) / spacing_.y);
                if (k + 1 < n_[2]) kmax = std::max(kmax, std::abs(node_force(i, j, k + 1).z - f.z) / spacing_.z);
            }
    return kmax;
}

TrajectoryEscapeError::TrajectoryEscapeError(double time, const Vec3& position)
    : NumericalError("trajectory left the force-field domain at t = " + std::to_string(time) + " s"),
      time_(time),
      position_(position) {}

DynamicsTrace integrate_motion(const ForceField& field, const Vec3& position, const Vec3& velocity, double dt,
                               double duration, const DynamicsOptions& opt) {
    if (!(opt.mass > 0.0)) throw DomainError("mass must be positive");
    if (!(dt > 0.0) || !(duration > 0.0)) throw DomainError("dt and duration must be positive");
    if (opt.damping_rate < 0.0) throw DomainError("damping rate must be non-negative");
    if (opt.record_every < 1) throw DomainError("record_every must be >= 1");
    const double kmax = field.max_stiffness();
    if (kmax > 0.0) {
        const double fmax = std::sqrt(kmax / opt.mass) / (2.0 * pi);
        if (dt > 1.0 / (50.0 * fmax) * (1.0 + 1e-12))
            throw DomainError("time step too large: need dt <= 1/(50 f_max) = " + std::to_string(1.0 / (50.0 * fmax)) +
                              " s");
    }
    if (!field.contains(position)) throw DomainError("initial position is outside the force-field domain");

    const Vec3 g{0.0, 0.0, -opt.gravity};
    const double m = opt.mass;
    const bool with_energy = field.potential(position).has_value();
    auto accel = [&](const Vec3& p) { return field.force(p) / m + g; };
    auto energy = [&](const Vec3& p, const Vec3& v) {
        return 0.5 * m * dot(v, v) + m * opt.gravity * p.z + *field.potential(p);
    };

    DynamicsTrace tr;
    tr.dt = dt * opt.record_every;
    const auto steps = static_cast<long long>(std::llround(duration / dt));
    const auto reserve = static_cast<std::size_t>(steps / opt.record_every + 1);
    tr.times.reserve(reserve);
    tr.positions.reserve(reserve);
    tr.velocities.reserve(reserve);
    Vec3 p = position;
    Vec3 v = velocity;
    auto record = [&](long long n) {
        tr.times.push_back(n * dt);
        tr.positions.push_back(p);
        tr.velocities.push_back(v);
        if (with_energy) tr.energy.push_back(energy(p, v));
    };
    record(0);
    const double damp = std::exp(-0.5 * opt.damping_rate * dt);
    Vec3 a = accel(p);
    for (long long n = 1; n <= steps; ++n) {
        v *= damp;
        v += 0.5 * dt * a;
        p += dt * v;
        if (!field.contains(p)) throw TrajectoryEscapeError(n * dt, p);
        a = accel(p);
        v += 0.5 * dt * a;
        v *= damp;
        if (n % opt.record_every == 0) record(n);
    }
    return tr;
}

namespace {

struct LinearFit {
    double a = 0.0, b = 0.0, c = 0.0, ssr = 0.0;
};

// a sin(w t) + b cos(w t) + c at fixed w, times centred on the record midpoint.
LinearFit linear_fit(const std::vector<double>& y, double dt, double t0, double w) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    double yy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = i * dt - t0;
        const Eigen::Vector3d r(std::sin(w * t), std::cos(w * t), 1.0);
        ata += r * r.transpose();
        aty += r * y[i];
        yy += y[i] * y[i];
    }
    const Eigen::Vector3d x = ata.ldlt().solve(aty);
    LinearFit f{x[0], x[1], x[2], 0.0};
    f.ssr = std::max(0.0, yy - x.dot(aty));
    return f;
}

}  // namespace

SineFit fit_sine(const std::vector<double>& values, double dt) {
    const std::size_t n = values.size();
    if (n < 8 || !(dt > 0.0)) throw DomainError("sine fit needs at least 8 uniformly spaced samples");
    RingdownSignal s;
    s.sample_rate = 1.0 / dt;
    double mean = 0.0;
    for (double v : values) mean += v / n;
    s.samples.reserve(n);
    for (double v : values) s.samples.push_back(v - mean);
    const Spectrum sp = power_spectrum(s);
    std::size_t peak = 1;
    for (std::size_t k = 1; k < sp.psd.size(); ++k)
        if (sp.psd[k] > sp.psd[peak]) peak = k;
    const double duration = n * dt;
    const double t0 = 0.5 * (n - 1) * dt;

    // Grid over +-1 bin around the peak, then Brent on the profiled residual.
    const double df = sp.bin_width;
    double best = std::max(sp.frequency[peak], 0.5 * df);
    double best_ssr = std::numeric_limits<double>::infinity();
    const int grid = 40;
    for (int i = 0; i <= grid; ++i) {
        const double f = sp.frequency[peak] + df * (2.0 * i / grid - 1.0);
        if (f <= 0.0) continue;
        const double r = linear_fit(values, dt, t0, 2.0 * pi * f).ssr;
        if (r < best_ssr) {
            best_ssr = r;
            best = f;
        }
    }
    const double step = 2.0 * df / grid;
    const auto res = boost::math::tools::brent_find_minima(
        [&](double f) { return linear_fit(values, dt, t0, 2.0 * pi * f).ssr; }, std::max(best - step, 1e-3 * df),
        best + step, std::numeric_limits<double>::digits / 2);
    const double f = res.first;
    if (f * duration < 10.0) throw DomainError("sine fit needs at least 10 cycles in the record");
    const double w = 2.0 * pi * f;
    const LinearFit lf = linear_fit(values, dt, t0, w);

    SineFit out;
    out.frequency = f;
    out.amplitude = std::hypot(lf.a, lf.b);
    out.offset = lf.c;
    out.phase = std::remainder(std::atan2(lf.b, lf.a) - w * t0, 2.0 * pi);
    out.residual_rms = std::sqrt(lf.ssr / n);
    if (out.residual_rms > 0.2 * out.amplitude)
        throw NumericalError("sine fit failed: residual " + std::to_string(out.residual_rms) + " exceeds 20 % of amplitude");

    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i * dt - t0;
        const double sn = std::sin(w * t);
        const double cs = std::cos(w * t);
        const Eigen::Vector4d r(sn, cs, 1.0, t * (lf.a * cs - lf.b * sn));
        jtj += r * r.transpose();
    }
    const double sigma2 = lf.ssr / static_cast<double>(n > 4 ? n - 4 : 1);
    const Eigen::Matrix4d cov = sigma2 * jtj.inverse();
    out.frequency_error = std::sqrt(std::max(0.0, cov(3, 3))) / (2.0 * pi);
    return out;
}

SineFit fit_sine_frequency(const DynamicsTrace& trace, int axis) {
    if (axis < 0 || axis > 2) throw DomainError("axis must be 0, 1 or 2");
    std::vector<double> v;
    v.reserve(trace.positions.size());
    for (const auto& p : trace.positions) v.push_back(p[axis]);
    return fit_sine(v, trace.dt);
}

std::string trace_csv(const DynamicsTrace& tr) {
    std::ostringstream o;
    o << std::setprecision(12);
    o << "t,x,y,z,vx,vy,vz,E\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const Vec3& p = tr.positions[i];
        const Vec3& v = tr.velocities[i];
        o << tr.times[i] << ',' << p.x << ',' << p.y << ',' << p.z << ',' << v.x << ',' << v.y << ',' << v.z << ',';
        if (i < tr.energy.size()) o << tr.energy[i];
        o << '\n';
    }
    return o.str();
}

}  // namespace levitrap
