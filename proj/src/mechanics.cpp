#include "levitrap/mechanics.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/units.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace levitrap {

using constants::mu0;
using constants::pi;

namespace {

// Gauss-Legendre nodes on [-1, 1]; Boost tabulates the non-negative half.
template <int N>
void legendre_rule(std::vector<double>& x, std::vector<double>& w) {
    using rule = boost::math::quadrature::gauss<double, N>;
    const auto& a = rule::abscissa();
    const auto& wt = rule::weights();
    x.clear();
    w.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            x.push_back(0.0);
            w.push_back(wt[i]);
            continue;
        }
        x.push_back(a[i]);
        w.push_back(wt[i]);
        x.push_back(-a[i]);
        w.push_back(wt[i]);
    }
}

void polar_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n <= 10) return legendre_rule<10>(x, w);
    if (n <= 20) return legendre_rule<20>(x, w);
    if (n <= 30) return legendre_rule<30>(x, w);
    return legendre_rule<40>(x, w);
}

bool in_ring_cell(const FieldSolution& s, const Vec3& p) {
    if (!s.ring_cells) return false;
    const RectGrid& g = *s.grid;
    return (*s.ring_cells)[g.cell(g.locate(0, p.x), g.locate(1, p.y), g.locate(2, p.z))] != 0;
}

std::array<double, 3> key_of(const Vec3& p) { return {p.x, p.y, p.z}; }

bool slit_mirror_symmetric(const ExperimentConfig& c) {
    if (c.grid.origin.x != 0.0) return false;
    if (c.ring.closed()) return true;
    const double a = std::fmod(std::fmod(c.ring.slit_azimuth, 360.0) + 360.0, 360.0);
    return a == 90.0 || a == 270.0;
}

}  // namespace

Vec3 maxwell_stress_force(const FieldSolution& s, const Vec3& center, const StressOptions& opt) {
    const RectGrid& g = *s.grid;
    const double h = g.width(0, g.locate(0, center.x));
    std::vector<double> radii;
    if (opt.surface_radius > 0.0) {
        radii.push_back(opt.surface_radius);
    } else {
        if (!(opt.shell_outer >= opt.shell_inner) || opt.radial_nodes < 1) throw DomainError("invalid stress shell");
        for (int k = 0; k < opt.radial_nodes; ++k)
            radii.push_back(s.sphere_radius +
                            h * (opt.shell_inner + (opt.shell_outer - opt.shell_inner) * (k + 0.5) / opt.radial_nodes));
    }
    if (s.sphere_center && radii.front() < s.sphere_radius + h) throw DomainError("stress surface cuts the sphere's cells");
    std::vector<double> ct;
    std::vector<double> wt;
    polar_rule(opt.polar_nodes, ct, wt);
    const int nphi = std::max(8, opt.azimuthal_nodes);
    const double dphi = 2.0 * pi / nphi;
    Vec3 f;
    for (double rs : radii) {
        Vec3 fr;
        for (std::size_t a = 0; a < ct.size(); ++a) {
            const double st = std::sqrt(std::max(0.0, 1.0 - ct[a] * ct[a]));
            for (int b = 0; b < nphi; ++b) {
                const double phi = (b + 0.5) * dphi;
                const Vec3 n{st * std::cos(phi), st * std::sin(phi), ct[a]};
                const Vec3 p = center + rs * n;
                if (!g.inside(p)) throw DomainError("stress surface leaves the grid");
                if (in_ring_cell(s, p)) throw DomainError("stress surface intersects the superconductor");
                const Vec3 bv = field_probe(s, p);
                const Vec3 t = (dot(bv, n) * bv - 0.5 * dot(bv, bv) * n) / mu0;
                fr += t * (wt[a] * dphi * rs * rs);
            }
        }
        f += fr / static_cast<double>(radii.size());
    }
    return f;
}

ForceModel::ForceModel(const ExperimentConfig& config, std::shared_ptr<const AxisymmetricSource> source,
                       FieldSolverOptions options)
    : config_(config), solver_(config, std::move(source), options), mirror_x_(slit_mirror_symmetric(config)) {}

Vec3 ForceModel::unit_force(const Vec3& p) {
    Vec3 q = p;
    const bool flip = mirror_x_ && q.x < 0.0;
    if (flip) q.x = -q.x;
    const auto key = key_of(q);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        const FieldSolution s = solver_.solve(q, 1.0);
        ++solves_;
        it = cache_.emplace(key, maxwell_stress_force(s, q, stress)).first;
    }
    Vec3 f = it->second;
    if (flip) f.x = -f.x;
    if (mirror_x_ && q.x == 0.0) f.x = 0.0;
    return f;
}

double ForceModel::magnet_constant() {
    if (!magnet_constant_) {
        const FieldSolution s = solver_.solve(std::nullopt, 1.0);
        magnet_constant_ = field_probe(s, {0.0, 0.0, config_.ring.center_z}).z;
    }
    return *magnet_constant_;
}

const char* scan_axis_name(ScanAxis a) {
    switch (a) {
        case ScanAxis::x: return "x";
        case ScanAxis::y: return "y";
        case ScanAxis::z: return "z";
        case ScanAxis::diagonal: return "diagonal";
    }
    return "?";
}

ForceMap force_map(ForceModel& model, double current, const Vec3& origin, const Vec3& direction,
                   const std::vector<double>& offsets) {
    ForceMap m;
    m.current = current;
    const Vec3 e = normalized(direction);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        const Vec3 p = origin + offsets[i] * e;
        try {
            m.forces.push_back(model.force(p, current));
        } catch (const NumericalError& ex) {
            throw NumericalError("scan point " + std::to_string(i) + ": " + ex.what());
        } catch (const ValidationError& ex) {
            throw DomainError("scan point " + std::to_string(i) + ": " + ex.what());
        }
        m.positions.push_back(p);
    }
    return m;
}

PotentialProfile trap_potential(const ForceMap& map, ScanAxis axis, const Vec3& direction, double weight) {
    if (map.positions.empty()) throw ValidationError("empty force map");
    PotentialProfile p;
    p.axis = axis;
    p.direction = normalized(direction);
    p.origin = map.positions.front();
    const Vec3 gravity{0.0, 0.0, -weight};
    for (std::size_t i = 0; i < map.positions.size(); ++i) {
        const double s = dot(map.positions[i] - p.origin, p.direction);
        if (i > 0 && s <= p.offsets.back()) throw ValidationError("force map scan is not monotone");
        p.offsets.push_back(s);
        p.force.push_back(dot(map.forces[i] + gravity, p.direction));
    }
    p.potential.assign(p.offsets.size(), 0.0);
    for (std::size_t i = 1; i < p.offsets.size(); ++i)
        p.potential[i] = p.potential[i - 1] - 0.5 * (p.force[i] + p.force[i - 1]) * (p.offsets[i] - p.offsets[i - 1]);
    const double umin = *std::min_element(p.potential.begin(), p.potential.end());
    for (double& u : p.potential) u -= umin;
    return p;
}

double profile_stiffness(const PotentialProfile& p) {
    const std::size_t n = p.offsets.size();
    if (n < 3) throw ValidationError("stiffness fit needs at least 3 points");
    // Centre the abscissa for conditioning.
    double mean = 0.0;
    for (double s : p.offsets) mean += s;
    mean /= static_cast<double>(n);
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = p.offsets[i] - mean;
        a(i, 0) = 1.0;
        a(i, 1) = s;
        a(i, 2) = s * s;
        b(i) = p.potential[i];
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    return 2.0 * c(2);
}

double frequency_from_stiffness(double k, double mass) {
    if (k <= 0.0 || mass <= 0.0) return 0.0;
    return std::sqrt(k / mass) / (2.0 * pi);
}

namespace {

// Equilibrium search in the coordinates that are not fixed by symmetry.
Vec3 find_equilibrium(ForceModel& model, double current, Vec3 p, std::vector<std::string>& warnings) {
    const ExperimentConfig& cfg = model.config();
    const double weight = model.weight();
    const double tol = cfg.analysis.root_tolerance;
    const double step = cfg.sphere.diameter / 50.0;
    const double max_move = cfg.sphere.diameter / 5.0;
    std::vector<int> dims;
    if (!model.mirror_x()) dims.push_back(0);
    else p.x = 0.0;
    dims.push_back(1);
    dims.push_back(2);
    const int n = static_cast<int>(dims.size());

    auto residual = [&](const Vec3& q) {
        const Vec3 f = model.force(q, current) + Vec3{0.0, 0.0, -weight};
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r(i) = f[dims[i]];
        return r;
    };

    Eigen::VectorXd r = residual(p);
    Eigen::MatrixXd jac(n, n);
    for (int c = 0; c < n; ++c) {
        Vec3 q = p;
        q[dims[c]] += step;
        jac.col(c) = (residual(q) - r) / step;
    }
    // A restoring trap has a negative-definite force Jacobian on its diagonal.
    static const char* names[3] = {"x", "y", "z"};
    for (int c = n - 1; c >= 0; --c) {
        if (jac(c, c) >= 0.0) throw NotConfiningError(names[dims[c]], -jac(c, c));
    }

    for (int it = 0; it < 40; ++it) {
        Eigen::VectorXd dx = -jac.fullPivLu().solve(r);
        const double len = dx.norm();
        if (!std::isfinite(len)) throw NumericalError("equilibrium search produced a non-finite step");
        if (len > max_move) dx *= max_move / len;
        if (dx.norm() < tol) return p;
        Vec3 q = p;
        for (int i = 0; i < n; ++i) q[dims[i]] += dx(i);
        Eigen::VectorXd rq;
        try {
            rq = residual(q);
        } catch (const DomainError&) {
            // The step left the admissible region; halve it once before giving up.
            dx *= 0.5;
            q = p;
            for (int i = 0; i < n; ++i) q[dims[i]] += dx(i);
            rq = residual(q);
        }
        const Eigen::VectorXd dr = rq - r;
        jac += (dr - jac * dx) * dx.transpose() / dx.squaredNorm();
        p = q;
        r = rq;
    }
    warnings.emplace_back("equilibrium search stopped at the iteration limit");
    return p;
}

}  // namespace

TrapResult trap_characterize(ForceModel& model, double field, const TrapOptions& options) {
    const ExperimentConfig& cfg = model.config();
    const int solves0 = model.solves();
    TrapResult t;
    t.field = field;
    t.current = model.current_for_field(field);
    if (std::abs(t.current) > cfg.coil.max_current) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "field %.4g T needs %.4g A, above the coil limit %.4g A", field, t.current,
                      cfg.coil.max_current);
        throw ValidationError(buf);
    }
    const Vec3 guess = options.initial_guess.value_or(Vec3{0.0, 0.0, cfg.ring.center_z});
    t.trap_center = find_equilibrium(model, t.current, guess, t.warnings);
    const double az = cfg.ring.slit_azimuth * pi / 180.0;
    t.center_offset_toward_slit = t.trap_center.x * std::cos(az) + t.trap_center.y * std::sin(az);

    const double w = cfg.analysis.stiffness_window;
    const std::vector<double> offsets{-w, -0.5 * w, 0.0, 0.5 * w, w};
    const double mass = model.mass();
    auto scan = [&](ScanAxis axis, const Vec3& dir) {
        const ForceMap m = force_map(model, t.current, t.trap_center, dir, offsets);
        PotentialProfile p = trap_potential(m, axis, dir, model.weight());
        p.origin = t.trap_center;
        for (double& s : p.offsets) s += offsets.front();
        return p;
    };
    static const Vec3 unit[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    static const char* names[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        if (!options.lateral && a != 2) continue;
        t.profiles.push_back(scan(static_cast<ScanAxis>(a), unit[a]));
        t.stiffness[a] = profile_stiffness(t.profiles.back());
        t.frequency[a] = frequency_from_stiffness(t.stiffness[a], mass);
    }
    for (int a = 2; a >= 0; --a) {
        if (!options.lateral && a != 2) continue;
        if (t.stiffness[a] <= 0.0) throw NotConfiningError(names[a], t.stiffness[a]);
    }
    if (options.diagonal && options.lateral) {
        t.diagonal_direction = normalized(cfg.analysis.diagonal_direction);
        t.profiles.push_back(scan(ScanAxis::diagonal, t.diagonal_direction));
        t.stiffness_diagonal = profile_stiffness(t.profiles.back());
        t.frequency_diagonal = frequency_from_stiffness(t.stiffness_diagonal, mass);
    }

    // Curvature estimate: magnetization from the solve at the centre, d2Bz/dz2 from the
    // sphere-free field on the same grid.
    {
        FieldSolver& fs = model.solver();
        const FieldSolution with = fs.solve(t.trap_center, t.current);
        const Vec3 m = sphere_moment(with);
        t.sphere_magnetization = norm(m) / cfg.sphere.volume();
        const FieldSolution bare = fs.solve(std::nullopt, t.current);
        const double dz = cfg.sphere.diameter / 10.0;
        const Vec3 c = t.trap_center;
        const double b0 = field_probe(bare, c).z;
        const double bp = field_probe(bare, c + Vec3{0.0, 0.0, dz}).z;
        const double bm = field_probe(bare, c - Vec3{0.0, 0.0, dz}).z;
        const double curv = (bp - 2.0 * b0 + bm) / (dz * dz);
        // A maximum of B_z (negative curvature) confines; the printed form drops the sign.
        const double arg = -t.sphere_magnetization / cfg.sphere.material.density * curv;
        t.frequency_curvature_estimate = arg > 0.0 ? std::sqrt(arg) / (2.0 * pi) : 0.0;
        for (const auto& wmsg : with.warnings) t.warnings.push_back(wmsg);
    }
    t.field_solves = model.solves() - solves0;
    return t;
}

TrapResult trap_characterize(const ExperimentConfig& config, double current) {
    ForceModel model(config);
    return trap_characterize(model, current * model.magnet_constant());
}

LiftoffResult liftoff_threshold(ForceModel& model) {
    const ExperimentConfig& cfg = model.config();
    LiftoffResult r;
    r.unit_force_z = model.unit_force(cfg.sphere.initial_position).z;
    const double weight = model.weight();
    if (weight <= 0.0) return r;
    if (r.unit_force_z <= 0.0) throw NumericalError("no lift-off: the magnetic force at the start position is not upward");
    r.current = std::sqrt(weight / r.unit_force_z);
    r.field = r.current * model.magnet_constant();
    if (r.current > cfg.coil.max_current) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "no lift-off within the coil range: needs %.4g A (limit %.4g A)", r.current,
                      cfg.coil.max_current);
        throw NumericalError(buf);
    }
    return r;
}

double liftoff_threshold(const ExperimentConfig& config) {
    ForceModel model(config);
    return liftoff_threshold(model).field;
}

DerivedQuantities derived_quantities(ForceModel& model) {
    const ExperimentConfig& c = model.config();
    DerivedQuantities d;
    d.mass = c.sphere.mass();
    d.volume = c.sphere.volume();
    d.weight = d.mass * c.ambient.gravity;
    d.magnet_constant = model.magnet_constant();
    d.coil_only_constant = coil_only_magnet_constant(c);
    return d;
}

DerivedQuantities derived_quantities(const ExperimentConfig& config) {
    ForceModel model(config);
    return derived_quantities(model);
}

}  // namespace levitrap
