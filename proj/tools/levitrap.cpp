// levitrap: command-line driver for the trap, sweep, dynamics, ringdown, Bean-model and
// thermal pipelines. Exit status 0 on success, 1 on invalid input, 2 on numerical failure.

#include "levitrap/beanlab.hpp"
#include "levitrap/config.hpp"
#include "levitrap/dissipation.hpp"
#include "levitrap/dynamics.hpp"
#include "levitrap/errors.hpp"
#include "levitrap/field_solver.hpp"
#include "levitrap/mechanics.hpp"
#include "levitrap/parallel.hpp"
#include "levitrap/ringdown.hpp"
#include "levitrap/sweep.hpp"
#include "levitrap/thermal.hpp"
#include "levitrap/units.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace levitrap;

namespace {

struct Globals {
    std::string out;
    int workers = 0;
    std::uint64_t seed = 1;
    std::string config;
    std::vector<std::string> argv;
};

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + p.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

class Run {
public:
    Run(const Globals& g, std::string subcommand, const std::vector<std::string>& inputs) : dir_(g.out) {
        fs::create_directories(dir_);
        std::ostringstream m;
        m << "subcommand = " << subcommand << '\n';
        m << "command = ";
        for (std::size_t i = 0; i < g.argv.size(); ++i) m << (i ? " " : "") << g.argv[i];
        m << '\n';
        m << "config = " << (g.config.empty() ? "(built-in table1)" : g.config) << '\n';
        m << "output_dir = " << dir_.string() << '\n';
        m << "seed = " << g.seed << '\n';
        m << "workers = " << worker_count() << '\n';
        m << "version = " << LEVITRAP_VERSION << '\n';
        if (!g.config.empty()) m << "input." << g.config << " = fnv1a:" << hex(fnv1a(read_file(g.config))) << '\n';
        for (const auto& in : inputs) m << "input." << in << " = fnv1a:" << hex(fnv1a(read_file(in))) << '\n';
        write("manifest.txt", m.str());
    }

    void write(const std::string& name, const std::string& text) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw ValidationError("cannot write '" + (dir_ / name).string() + "'");
        f << text;
        written_.push_back(name);
    }

    void finish() const {
        for (const auto& w : written_) std::cout << "wrote " << (dir_ / w).string() << '\n';
    }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

ExperimentConfig load(const Globals& g) {
    ExperimentConfig c = g.config.empty() ? table1_config() : load_config_file(g.config);
    c.validate();
    return c;
}

/// "12.5, 25, 37.5 mT": a unit on the last item applies to bare items before it.
std::vector<double> parse_list(const std::string& text, Dim dim) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    if (items.empty()) throw ValidationError("empty list '" + text + "'");
    std::string unit;
    const std::string& last = items.back();
    const auto pos = last.find_first_not_of("0123456789.+-eE ");
    if (pos != std::string::npos) unit = last.substr(pos);
    std::vector<double> out;
    for (auto& it : items) {
        const bool bare = it.find_first_not_of("0123456789.+-eE ") == std::string::npos;
        out.push_back(parse_quantity(bare && !unit.empty() ? it + " " + unit : it, dim));
    }
    return out;
}

ScanAxis parse_axis(const std::string& s) {
    if (s == "x") return ScanAxis::x;
    if (s == "y") return ScanAxis::y;
    if (s == "z") return ScanAxis::z;
    if (s == "diagonal" || s == "r") return ScanAxis::diagonal;
    throw ValidationError("unknown axis '" + s + "' (x, y, z, diagonal)");
}

std::string trap_report(const TrapResult& t) {
    std::ostringstream o;
    o << "field_T = " << fmt(t.field) << '\n';
    o << "current_A = " << fmt(t.current) << '\n';
    o << "trap_center_m = " << fmt(t.trap_center.x) << ", " << fmt(t.trap_center.y) << ", " << fmt(t.trap_center.z) << '\n';
    o << "offset_toward_slit_m = " << fmt(t.center_offset_toward_slit) << '\n';
    static const char* ax[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        if (t.stiffness[a] == 0.0) continue;
        o << "stiffness_" << ax[a] << "_N_per_m = " << fmt(t.stiffness[a]) << '\n';
        o << "f_" << ax[a] << "_Hz = " << fmt(t.frequency[a]) << '\n';
    }
    if (t.frequency_diagonal > 0.0) {
        o << "diagonal_direction = " << fmt(t.diagonal_direction.x) << ", " << fmt(t.diagonal_direction.y) << ", "
          << fmt(t.diagonal_direction.z) << '\n';
        o << "f_diagonal_Hz = " << fmt(t.frequency_diagonal) << '\n';
    }
    o << "f_z_curvature_estimate_Hz = " << fmt(t.frequency_curvature_estimate) << '\n';
    o << "sphere_magnetization_A_per_m = " << fmt(t.sphere_magnetization) << '\n';
    o << "field_solves = " << t.field_solves << '\n';
    for (const auto& w : t.warnings) o << "warning = " << w << '\n';
    return o.str();
}

std::string profiles_csv(const TrapResult& t) {
    std::ostringstream o;
    o << "axis,offset_m,potential_J,force_N\n";
    for (const auto& p : t.profiles)
        for (std::size_t i = 0; i < p.offsets.size(); ++i)
            o << scan_axis_name(p.axis) << ',' << fmt(p.offsets[i]) << ',' << fmt(p.potential[i]) << ',' << fmt(p.force[i]) << '\n';
    return o.str();
}

std::string eddy_report(const EddyReport& r) {
    std::ostringstream o;
    o << "mode = " << scan_axis_name(r.axis) << '\n';
    o << "frequency_Hz = " << fmt(r.frequency) << '\n';
    o << "amplitude_m = " << fmt(r.amplitude) << '\n';
    for (const auto& b : r.bodies)
        o << "power." << b.name << "_W = " << fmt(b.power) << "  # skin depth " << fmt(b.skin_depth) << " m\n";
    o << "power_W = " << fmt(r.power) << '\n';
    o << "energy_loss_per_cycle_J = " << fmt(r.energy_loss_per_cycle) << '\n';
    o << "Q = " << fmt(r.q) << '\n';
    for (const auto& w : r.warnings) o << "warning = " << w << '\n';
    return o.str();
}

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
    std::ostringstream o;
    for (const auto& r : rows) {
        char buf[256];
        if (r.gated)
            std::snprintf(buf, sizeof buf, "[%2d] %-46s %12.5g  band [%g, %g]  %s\n", r.criterion, r.quantity.c_str(),
                          r.computed, r.lo, r.hi, r.pass ? "pass" : "FAIL");
        else
            std::snprintf(buf, sizeof buf, "[%2d] %-46s %12.5g  (published %g, not gated)\n", r.criterion,
                          r.quantity.c_str(), r.computed, r.paper);
        o << buf;
    }
    return o.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"levitrap: levitated-sphere trap modelling and analysis"};
    app.require_subcommand(1);
    Globals g;
    for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
    const char* env_out = std::getenv("LEVITRAP_OUT");
    g.out = env_out && *env_out ? env_out : "levitrap_out";
    app.add_option("--out,-o", g.out, "Output directory (default: $LEVITRAP_OUT or ./levitrap_out)");
    app.add_option("--workers,-j", g.workers, "Worker threads (default: hardware concurrency)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", g.seed, "Seed for synthetic signals");
    app.add_option("--config,-c", g.config, "Experiment config (key = value with unit suffixes); default: built-in table1");
    app.footer("Quantities accept unit suffixes (mT, T, Oe, A, mm, um, Hz, kHz, s, emu, ...); bare numbers are SI.");

    // field
    auto* field = app.add_subcommand("field", "Magnetostatic solve: magnet constant, field at a point, optional CSV dump");
    std::string field_b = "37.5 mT";
    std::string field_at;
    std::string field_sphere;
    bool field_dump = false;
    field->add_option("--B", field_b, "Drive field at the ring centre (default 37.5 mT)");
    field->add_option("--at", field_at, "Probe point 'x, y, z' (length units; default ring centre)");
    field->add_option("--sphere", field_sphere, "Sphere centre 'x, y, z'; omit for no sphere");
    field->add_flag("--dump", field_dump, "Write every cell-centre field to field.csv");

    // trap
    auto* trap = app.add_subcommand("trap", "Trap centre, stiffnesses and frequencies at one drive field");
    std::string trap_b = "37.5 mT";
    bool trap_no_lateral = false;
    bool trap_eddy = false;
    trap->add_option("--B", trap_b, "Drive field at the ring centre (default 37.5 mT)");
    trap->add_flag("--z-only", trap_no_lateral, "Only the vertical stiffness");
    trap->add_flag("--eddy", trap_eddy, "Also compute the eddy-current Q of each mode");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Trap frequencies and eddy Q over a list of drive fields");
    std::string sweep_fields = "12.5, 25, 37.5, 50, 62.5, 75 mT";
    std::vector<std::string> sweep_q{"z"};
    bool sweep_no_q = false;
    sweep->add_option("--fields", sweep_fields, "Comma-separated drive fields (default 12.5 ... 75 mT)");
    sweep->add_option("--q-modes", sweep_q, "Modes for eddy Q: x y z diagonal (default z)");
    sweep->add_flag("--no-q", sweep_no_q, "Skip the eddy-current Q");

    // dynamics
    auto* dyn = app.add_subcommand("dynamics", "Integrate the sphere's motion in the trap and fit the oscillation");
    std::string dyn_b = "37.5 mT";
    std::string dyn_amp = "5 um";
    std::string dyn_axis = "z";
    std::string dyn_model = "harmonic";
    double dyn_cycles = 100;
    int dyn_steps = 500;
    std::string dyn_damping = "0";
    int dyn_record = 1;
    dyn->add_option("--B", dyn_b, "Drive field (default 37.5 mT)");
    dyn->add_option("--amplitude", dyn_amp, "Initial displacement from the trap centre (default 5 um)");
    dyn->add_option("--axis", dyn_axis, "Displacement axis: x, y, z (default z)");
    dyn->add_option("--model", dyn_model, "Force model: harmonic (trap surrogate) or lattice (sampled solver forces)")
        ->check(CLI::IsMember({"harmonic", "lattice"}));
    dyn->add_option("--cycles", dyn_cycles, "Duration in periods of the displaced mode (default 100)");
    dyn->add_option("--steps-per-period", dyn_steps, "Time steps per period of the fastest mode (>= 50, default 500)");
    dyn->add_option("--damping", dyn_damping, "Velocity damping rate gamma, 1/s (default 0)");
    dyn->add_option("--record-every", dyn_record, "Keep every n-th step in trajectory.csv");

    // ringdown
    auto* ring = app.add_subcommand("ringdown", "Quality factor from a ring-down record or a synthetic signal");
    std::string rd_csv;
    std::string rd_raw;
    std::string rd_rate = "125 kHz";
    double rd_scale = 1.0;
    std::string rd_band;
    bool rd_synth = false;
    std::string rd_f = "169 Hz";
    double rd_q = 1000.0;
    double rd_noise = 0.0;
    std::string rd_duration = "10 s";
    std::string rd_method = "analytic";
    ring->add_option("--csv", rd_csv, "Single-column CSV record");
    ring->add_option("--int16", rd_raw, "Raw little-endian int16 record");
    ring->add_option("--rate", rd_rate, "Sample rate (default 125 kHz)");
    ring->add_option("--scale", rd_scale, "Scale for int16 samples");
    ring->add_option("--band", rd_band, "Search and filter band 'lo, hi' (default +-10 % around --f for synthetics)");
    ring->add_flag("--synthetic", rd_synth, "Analyse a seeded synthetic ring-down instead of a file");
    ring->add_option("--f", rd_f, "Synthetic frequency (default 169 Hz)");
    ring->add_option("--q", rd_q, "Synthetic Q = pi f tau (default 1000)");
    ring->add_option("--noise", rd_noise, "Synthetic noise rms relative to the amplitude (default 0)");
    ring->add_option("--duration", rd_duration, "Synthetic record length (default 10 s)");
    ring->add_option("--method", rd_method, "Envelope: analytic or peaks")->check(CLI::IsMember({"analytic", "peaks"}));

    // bean
    auto* bean = app.add_subcommand("bean", "Bean critical-state analysis: J_c, T_c, H_pen(T)");
    std::string bn_geom = "cylinder";
    std::string bn_moment, bn_radius, bn_width, bn_length, bn_inner, bn_outer, bn_volume;
    std::string bn_mt;
    std::vector<std::string> bn_mh;
    std::string bn_fixed_tc;
    std::string bn_fields = "0, 10, 20, 50, 100, 150, 200, 250, 300 mT";
    std::string bn_ceiling;
    bean->add_option("--geometry", bn_geom, "cylinder or slit-ring")->check(CLI::IsMember({"cylinder", "slit-ring"}));
    bean->add_option("--moment", bn_moment, "Irreversible moment for a single J_c value (A m^2 or emu)");
    bean->add_option("--radius", bn_radius, "Cylinder radius");
    bean->add_option("--width", bn_width, "Slit-ring width a");
    bean->add_option("--length", bn_length, "Slit-ring length b");
    bean->add_option("--inner", bn_inner, "Slit-ring inner diameter (sets a and b with --outer)");
    bean->add_option("--outer", bn_outer, "Slit-ring outer diameter");
    bean->add_option("--volume", bn_volume, "Sample volume (m^3)");
    bean->add_option("--mt", bn_mt, "M-T curve CSV: onset T_c");
    bean->add_option("--mh", bn_mh, "M-H curve CSVs: H_pen(T) fit, and J_c/F_p maps when loops are present");
    bean->add_option("--fixed-tc", bn_fixed_tc, "Hold T_c fixed in the H_pen fit (K)");
    bean->add_option("--fields", bn_fields, "Field grid of the J_c map");
    bean->add_option("--ceiling", bn_ceiling, "Zero J_c above this field");

    // thermal
    auto* therm = app.add_subcommand("thermal", "Optical heating budget of the sphere");
    std::string th_energy_max = "50e-3";
    therm->add_option("--curve-max", th_energy_max, "Largest deposited energy of the T2 curve, J (default 0.05)");

    // compare
    auto* cmp = app.add_subcommand("compare", "Full comparison table against the published targets (slow)");
    std::string cmp_bean = "data/bean";
    bool cmp_no_controls = false;
    cmp->add_option("--bean-data", cmp_bean, "Directory of nb_mh_*K.csv curves (default data/bean)");
    cmp->add_flag("--no-controls", cmp_no_controls, "Skip the negative controls");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (g.workers > 0) set_worker_count(g.workers);

        if (field->parsed()) {
            const ExperimentConfig cfg = load(g);
            Run run(g, "field", {});
            FieldSolver solver(cfg);
            const double mc = magnet_constant(cfg);
            const double current = parse_quantity(field_b, Dim::field) / mc;
            if (std::abs(current) > cfg.coil.max_current) throw ValidationError("drive above the coil current limit");
            std::optional<Vec3> sphere;
            if (!field_sphere.empty()) sphere = parse_vec3(field_sphere, Dim::length);
            const FieldSolution s = solver.solve(sphere, current);
            const Vec3 at = field_at.empty() ? Vec3{0.0, 0.0, cfg.ring.center_z} : parse_vec3(field_at, Dim::length);
            const Vec3 b = field_probe(s, at);
            std::ostringstream o;
            o << "magnet_constant_T_per_A = " << fmt(mc) << '\n';
            o << "coil_only_constant_T_per_A = " << fmt(coil_only_magnet_constant(cfg)) << '\n';
            o << "current_A = " << fmt(current) << '\n';
            o << "probe_m = " << fmt(at.x) << ", " << fmt(at.y) << ", " << fmt(at.z) << '\n';
            o << "B_T = " << fmt(b.x) << ", " << fmt(b.y) << ", " << fmt(b.z) << '\n';
            o << "hole_flux_Wb = " << fmt(s.hole_flux) << '\n';
            o << "solver_iterations = " << s.iterations << '\n';
            o << "solver_residual = " << fmt(s.residual_norm) << '\n';
            o << "max_relative_divergence = " << fmt(max_relative_divergence(s)) << '\n';
            o << "max_relative_ring_normal = " << fmt(max_relative_ring_normal(s)) << '\n';
            if (sphere) {
                const Vec3 m = sphere_moment(s);
                o << "sphere_moment_Am2 = " << fmt(m.x) << ", " << fmt(m.y) << ", " << fmt(m.z) << '\n';
                o << "force_N = ";
                const Vec3 f = maxwell_stress_force(s, *sphere);
                o << fmt(f.x) << ", " << fmt(f.y) << ", " << fmt(f.z) << '\n';
            }
            for (const auto& w : s.warnings) o << "warning = " << w << '\n';
            run.write("field.txt", o.str());
            if (field_dump) {
                std::ostringstream d;
                write_field_csv(s, d);
                run.write("field.csv", d.str());
            }
            std::cout << o.str();
            run.finish();
        } else if (trap->parsed()) {
            const ExperimentConfig cfg = load(g);
            Run run(g, "trap", {});
            ForceModel model(cfg);
            const double b = parse_quantity(trap_b, Dim::field);
            check_field_guards(cfg, b);
            TrapOptions opt;
            opt.lateral = !trap_no_lateral;
            opt.diagonal = !trap_no_lateral;
            const TrapResult t = trap_characterize(model, b, opt);
            std::string report = trap_report(t);
            if (trap_eddy) {
                const FieldSolution s = model.solver().solve(t.trap_center, t.current);
                std::vector<ScanAxis> modes{ScanAxis::z};
                if (opt.lateral) modes = {ScanAxis::x, ScanAxis::y, ScanAxis::z, ScanAxis::diagonal};
                for (ScanAxis a : modes) {
                    const EddyReport e = eddy_dissipation_per_cycle(cfg, t, s, cfg.analysis.eddy_amplitude, a);
                    report += "Q_" + std::string(scan_axis_name(a)) + " = " + fmt(e.q) + '\n';
                    run.write(std::string("eddy_") + scan_axis_name(a) + ".txt", eddy_report(e));
                }
            }
            run.write("trap.txt", report);
            run.write("profiles.csv", profiles_csv(t));
            std::cout << report;
            run.finish();
        } else if (sweep->parsed()) {
            const ExperimentConfig cfg = load(g);
            Run run(g, "sweep", {});
            SweepOptions opt;
            if (!sweep_no_q)
                for (const auto& m : sweep_q) opt.q_axes.push_back(parse_axis(m));
            const SweepResult r = run_frequency_sweep(cfg, parse_list(sweep_fields, Dim::field), opt);
            const auto table = compare_to_paper(r);
            run.write("sweep.csv", sweep_csv(r));
            run.write("frequency.svg", frequency_svg(r));
            if (!opt.q_axes.empty()) run.write("q.svg", q_svg(r));
            run.write("comparison.csv", comparison_csv(table));
            std::cout << sweep_csv(r) << comparison_text(table);
            run.finish();
        } else if (dyn->parsed()) {
            const ExperimentConfig cfg = load(g);
            Run run(g, "dynamics", {});
            ForceModel model(cfg);
            const double b = parse_quantity(dyn_b, Dim::field);
            check_field_guards(cfg, b);
            const int axis = static_cast<int>(parse_axis(dyn_axis));
            if (axis > 2) throw ValidationError("dynamics displaces along x, y or z");
            if (dyn_steps < 50) throw ValidationError("--steps-per-period must be at least 50");
            const TrapResult t = trap_characterize(model, b);
            const double amp = parse_quantity(dyn_amp, Dim::length);
            std::unique_ptr<ForceField> ff;
            if (dyn_model == "harmonic") {
                ff = std::make_unique<HarmonicForceField>(harmonic_surrogate(t, model.mass(), cfg.ambient.gravity));
            } else {
                const double h = 0.5 * cfg.analysis.stiffness_window;
                std::array<int, 3> counts{3, 3, 3};
                counts[axis] = 2 * static_cast<int>(std::ceil(std::abs(amp) / h)) + 3;
                ff = std::make_unique<LatticeForceField>(
                    LatticeForceField::sample(model, t.current, t.trap_center, {h, h, h}, counts));
            }
            const double fmax = std::sqrt(ff->max_stiffness() / model.mass()) / (2.0 * constants::pi);
            const double dt = 1.0 / (dyn_steps * fmax);
            const double duration = dyn_cycles / t.frequency[axis];
            Vec3 start = t.trap_center;
            start[axis] += amp;
            DynamicsOptions o;
            o.mass = model.mass();
            o.gravity = cfg.ambient.gravity;
            o.damping_rate = parse_quantity(dyn_damping, Dim::frequency);
            o.record_every = dyn_record;
            const DynamicsTrace tr = integrate_motion(*ff, start, {}, dt, duration, o);
            const SineFit fit = fit_sine_frequency(tr, axis);
            std::ostringstream rep;
            rep << "model = " << dyn_model << '\n';
            rep << "dt_s = " << fmt(dt) << '\n';
            rep << "steps = " << static_cast<long>(std::llround(duration / dt)) << '\n';
            rep << "trap_frequency_Hz = " << fmt(t.frequency[axis]) << '\n';
            rep << "fit_frequency_Hz = " << fmt(fit.frequency) << " +- " << fmt(fit.frequency_error) << '\n';
            rep << "fit_amplitude_m = " << fmt(fit.amplitude) << '\n';
            rep << "relative_difference = " << fmt(fit.frequency / t.frequency[axis] - 1.0) << '\n';
            if (!tr.energy.empty())
                rep << "energy_drift_relative = " << fmt((tr.energy.back() - tr.energy.front()) / std::abs(tr.energy.front())) << '\n';
            run.write("dynamics.txt", rep.str());
            run.write("trajectory.csv", trace_csv(tr));
            std::cout << rep.str();
            run.finish();
        } else if (ring->parsed()) {
            std::vector<std::string> inputs;
            if (!rd_csv.empty()) inputs.push_back(rd_csv);
            if (!rd_raw.empty()) inputs.push_back(rd_raw);
            if (inputs.size() + (rd_synth ? 1 : 0) != 1)
                throw ValidationError("give exactly one of --csv, --int16, --synthetic");
            Run run(g, "ringdown", inputs);
            const double rate = parse_quantity(rd_rate, Dim::frequency);
            RingdownSignal s;
            double lo = 0.0;
            double hi = 0.0;
            if (!rd_band.empty()) {
                const auto band = parse_list(rd_band, Dim::frequency);
                if (band.size() != 2) throw ValidationError("--band needs two frequencies");
                lo = band[0];
                hi = band[1];
            }
            if (rd_synth) {
                const double f = parse_quantity(rd_f, Dim::frequency);
                const double tau = rd_q / (constants::pi * f);
                s = synthesize_ringdown(f, tau, 1.0, rd_noise, rate, parse_quantity(rd_duration, Dim::time), g.seed);
                if (rd_band.empty()) lo = 0.9 * f, hi = 1.1 * f;
            } else {
                if (rd_band.empty()) throw ValidationError("--band is required for recorded data");
                s = !rd_csv.empty() ? read_ringdown_csv(rd_csv, rate) : read_ringdown_int16(rd_raw, rate, rd_scale);
            }
            const RingdownResult r = analyze_ringdown(
                s, lo, hi, rd_method == "peaks" ? EnvelopeMethod::peaks : EnvelopeMethod::analytic);
            std::ostringstream o;
            o << "frequency_Hz = " << fmt(r.frequency) << '\n';
            o << "resolution_Hz = " << fmt(r.resolution) << '\n';
            o << "tau_s = " << fmt(r.tau) << " +- " << fmt(r.tau_error) << '\n';
            o << "fit_relative_error = " << fmt(r.fit_relative_error) << '\n';
            o << "Q = " << fmt(r.q) << '\n';
            o << "Q_printed_form_per_s2 = " << fmt(r.q_paper_literal) << '\n';
            run.write("ringdown.txt", o.str());
            const Spectrum sp = power_spectrum(s);
            std::ostringstream c;
            c << "f_Hz,psd\n";
            for (std::size_t i = 0; i < sp.frequency.size(); ++i)
                if (sp.frequency[i] >= lo && sp.frequency[i] <= hi) c << fmt(sp.frequency[i]) << ',' << fmt(sp.psd[i]) << '\n';
            run.write("spectrum.csv", c.str());
            std::cout << o.str();
            run.finish();
        } else if (bean->parsed()) {
            std::vector<std::string> inputs = bn_mh;
            if (!bn_mt.empty()) inputs.insert(inputs.begin(), bn_mt);
            Run run(g, "bean", inputs);
            bean::SampleShape shape;
            shape.geometry = bn_geom == "cylinder" ? bean::SampleGeometry::cylinder : bean::SampleGeometry::slit_ring;
            if (!bn_volume.empty()) shape.volume = parse_quantity(bn_volume, Dim::volume);
            if (shape.geometry == bean::SampleGeometry::cylinder) {
                if (!bn_radius.empty()) shape.a = parse_quantity(bn_radius, Dim::length);
            } else if (!bn_inner.empty() || !bn_outer.empty()) {
                const auto d = bean::slit_ring_dims(parse_quantity(bn_inner, Dim::length), parse_quantity(bn_outer, Dim::length));
                shape.a = d.width;
                shape.b = d.length;
            } else {
                if (!bn_width.empty()) shape.a = parse_quantity(bn_width, Dim::length);
                if (!bn_length.empty()) shape.b = parse_quantity(bn_length, Dim::length);
            }
            std::ostringstream o;
            bool did = false;
            if (!bn_moment.empty()) {
                const double m = parse_quantity(bn_moment, Dim::moment);
                const double jc = shape.geometry == bean::SampleGeometry::cylinder
                                      ? bean::jc_cylinder(m, shape.a, shape.volume)
                                      : bean::jc_slit_ring(m, shape.a, shape.b, shape.volume);
                o << "geometry = " << bn_geom << '\n';
                if (shape.geometry == bean::SampleGeometry::slit_ring)
                    o << "width_m = " << fmt(shape.a) << "\nlength_m = " << fmt(shape.b) << '\n';
                o << "Jc_A_per_m2 = " << fmt(jc) << '\n';
                did = true;
            }
            if (!bn_mt.empty()) {
                o << "Tc_K = " << fmt(bean::detect_tc(bean::read_curve_csv(bn_mt))) << '\n';
                did = true;
            }
            if (!bn_mh.empty()) {
                std::vector<bean::MagnetometryCurve> curves;
                for (const auto& p : bn_mh) curves.push_back(bean::read_curve_csv(p));
                const auto samples = bean::extract_hpen(curves);
                std::ostringstream hc;
                hc << "T_K,Hpen_T\n";
                for (const auto& s : samples) hc << fmt(s.temperature) << ',' << fmt(s.field) << '\n';
                run.write("hpen.csv", hc.str());
                std::optional<double> fixed;
                if (!bn_fixed_tc.empty()) fixed = parse_quantity(bn_fixed_tc, Dim::temperature);
                if (samples.size() >= 4) {
                    const auto fit = bean::fit_hpen_curve(samples, fixed);
                    o << "Hpen0_T = " << fmt(fit.hpen0) << " +- " << fmt(fit.hpen0_error) << '\n';
                    o << "Tc_fit_K = " << fmt(fit.tc) << " +- " << fmt(fit.tc_error) << (fit.tc_fixed ? " (fixed)" : "") << '\n';
                    o << "gamma = " << fmt(fit.gamma) << " +- " << fmt(fit.gamma_error) << '\n';
                    o << "fit_residual_rms_T = " << fmt(fit.residual_rms) << '\n';
                }
                bool loops = true;
                for (const auto& c : curves) {
                    bool inc = false, dec = false;
                    for (auto b : c.branch) inc |= b == bean::Branch::increasing, dec |= b == bean::Branch::decreasing;
                    loops = loops && inc && dec;
                }
                if (loops && shape.a > 0.0 && shape.volume > 0.0) {
                    std::optional<double> ceiling;
                    if (!bn_ceiling.empty()) ceiling = parse_quantity(bn_ceiling, Dim::field);
                    const auto surf = bean::jc_surface(curves, shape, parse_list(bn_fields, Dim::field), ceiling);
                    const auto fp = bean::pinning_force_map(surf);
                    std::ostringstream jc, pf;
                    jc << "T_K";
                    pf << "T_K";
                    for (double b : surf.fields) jc << ",B=" << fmt(b), pf << ",B=" << fmt(b);
                    jc << '\n';
                    pf << '\n';
                    for (std::size_t i = 0; i < surf.temperatures.size(); ++i) {
                        jc << fmt(surf.temperatures[i]);
                        pf << fmt(surf.temperatures[i]);
                        for (std::size_t j = 0; j < surf.fields.size(); ++j)
                            jc << ',' << fmt(surf.jc[i][j]), pf << ',' << fmt(fp[i][j]);
                        jc << '\n';
                        pf << '\n';
                    }
                    run.write("jc.csv", jc.str());
                    run.write("pinning_force.csv", pf.str());
                }
                did = true;
            }
            if (!did) throw ValidationError("nothing to do: give --moment, --mt or --mh");
            run.write("bean.txt", o.str());
            std::cout << o.str();
            run.finish();
        } else if (therm->parsed()) {
            const ExperimentConfig cfg = load(g);
            Run run(g, "thermal", {});
            const auto& t = cfg.thermal;
            const thermal::ThermalReport r = thermal::thermal_budget(t);
            std::ostringstream o;
            o << "intercepted_power_W = " << fmt(r.intercepted_power) << '\n';
            o << "absorbed_power_W = " << fmt(r.absorbed_power) << '\n';
            o << "deposited_energy_J = " << fmt(r.deposited_energy) << '\n';
            o << "equilibrium_temperature_K = " << fmt(r.equilibrium_temperature) << '\n';
            o << "heat_capacity_at_T2_J_per_kgK = " << fmt(r.heat_capacity_at_t2) << '\n';
            o << "conduction_capacity_W = " << fmt(r.conduction_capacity) << '\n';
            o << "radiative_power_W = " << fmt(r.radiative_power) << '\n';
            o << "gas_conduction_W = " << fmt(r.gas_conduction) << '\n';
            for (const auto& c : r.comparisons)
                o << "published." << c.quantity << " = " << fmt(c.paper) << "  # computed " << fmt(c.computed)
                  << ", ratio " << fmt(c.ratio()) << '\n';
            run.write("thermal.txt", o.str());
            std::ostringstream c;
            c << "deposited_energy_J,T2_K\n";
            const double emax = std::stod(th_energy_max);
            for (int i = 0; i <= 100; ++i) {
                const double e = emax * i / 100.0;
                c << fmt(e) << ','
                  << fmt(thermal::equilibrium_temperature(e, t.sphere_mass, t.bath_temperature, t.debye_temperature,
                                                          t.debye_coefficient))
                  << '\n';
            }
            run.write("t2_curve.csv", c.str());
            std::cout << o.str();
            run.finish();
        } else if (cmp->parsed()) {
            const ExperimentConfig cfg = load(g);
            std::vector<std::string> inputs;
            std::vector<bean::MagnetometryCurve> nb;
            if (fs::is_directory(cmp_bean))
                for (const auto& e : fs::directory_iterator(cmp_bean)) {
                    const std::string n = e.path().filename().string();
                    if (n.rfind("nb_mh_", 0) == 0 && e.path().extension() == ".csv") inputs.push_back(e.path().string());
                }
            std::sort(inputs.begin(), inputs.end());
            Run run(g, "compare", inputs);
            for (const auto& p : inputs) nb.push_back(bean::read_curve_csv(p));

            ComparisonInputs in;
            ForceModel model(cfg);
            SweepOptions opt;
            opt.q_axes = {ScanAxis::z};
            in.sweep = run_frequency_sweep(model, default_sweep_fields(), opt);
            in.liftoff = liftoff_threshold(model);
            in.thermal = thermal::thermal_budget(cfg.thermal);
            in.jc_nb = bean::jc_cylinder(1.6e-4, 0.835e-3, 2.28e-9);
            in.jc_ybco = bean::jc_slit_ring(0.89e-3, 0.596e-3, 2.1237e-3, 2.63e-9);
            if (nb.size() >= 4) in.hpen_nb = bean::fit_hpen_curve(bean::extract_hpen(nb));
            const double f = 169.0;
            const RingdownSignal s = synthesize_ringdown(f, 1000.0 / (constants::pi * f), 1.0, 0.0, 125e3, 10.0, g.seed);
            in.ringdown = analyze_ringdown(s, 0.9 * f, 1.1 * f);
            if (!cmp_no_controls) {
                in.controls.push_back(permeability_control(cfg, 37.5e-3));
                in.controls.push_back(closed_ring_control(cfg, 37.5e-3));
            }
            const auto table = compare_to_paper(in);
            run.write("sweep.csv", sweep_csv(*in.sweep));
            run.write("frequency.svg", frequency_svg(*in.sweep));
            run.write("q.svg", q_svg(*in.sweep));
            run.write("comparison.csv", comparison_csv(table));
            std::cout << comparison_text(table);
            run.finish();
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
