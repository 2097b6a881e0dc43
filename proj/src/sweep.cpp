#include "levitrap/sweep.hpp"

#include "levitrap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace levitrap {

std::vector<double> default_sweep_fields() { return {12.5e-3, 25e-3, 37.5e-3, 50e-3, 62.5e-3, 75e-3}; }

std::optional<double> SweepRow::q_for(ScanAxis axis) const {
    for (const auto& [a, q] : this->q)
        if (a == axis) return q;
    return std::nullopt;
}

std::pair<double, double> slope_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n == 0 || y.size() != n) throw DomainError("slope fit needs matching, non-empty data");
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    if (!(sxx > 0.0)) throw DomainError("slope fit needs a non-zero abscissa");
    const double s = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) ssr += (y[i] - s * x[i]) * (y[i] - s * x[i]);
    const double err = n > 1 ? std::sqrt(ssr / (n - 1) / sxx) : 0.0;
    return {s, err};
}

SweepResult run_frequency_sweep(ForceModel& model, const std::vector<double>& fields, const SweepOptions& options) {
    for (ScanAxis a : options.q_axes) {
        if (a != ScanAxis::z && !options.lateral) throw DomainError("lateral Q needs the lateral scans");
        if (a == ScanAxis::diagonal && !options.diagonal) throw DomainError("diagonal Q needs the diagonal scan");
    }
    std::vector<double> sorted = fields;
    std::sort(sorted.begin(), sorted.end());

    SweepResult out;
    TrapOptions topt;
    topt.lateral = options.lateral;
    topt.diagonal = options.diagonal;
    const ExperimentConfig& cfg = model.config();
    for (double b : sorted) {
        SweepRow row;
        row.field = b;
        try {
            check_field_guards(cfg, b);
            row.trap = trap_characterize(model, b, topt);
            topt.initial_guess = row.trap.trap_center;
            if (!options.q_axes.empty()) {
                const FieldSolution s = model.solver().solve(row.trap.trap_center, row.trap.current);
                for (ScanAxis a : options.q_axes)
                    row.q.emplace_back(a, eddy_dissipation_per_cycle(cfg, row.trap, s, cfg.analysis.eddy_amplitude, a).q);
            }
            row.ok = true;
            if (options.lateral && options.diagonal) {
                const auto& f = row.trap.frequency;
                row.ordering_ok = f[2] <= row.trap.frequency_diagonal && row.trap.frequency_diagonal <= f[1];
            }
        } catch (const ValidationError& e) {
            row.error = e.what();
        } catch (const NumericalError& e) {
            row.error = e.what();
        }
        out.rows.push_back(std::move(row));
    }

    std::vector<double> bs;
    std::vector<double> fz;
    std::vector<double> qb;
    std::vector<double> qz;
    bool all_ordered = options.lateral && options.diagonal;
    for (const auto& r : out.rows) {
        if (!r.ok) continue;
        bs.push_back(r.field);
        fz.push_back(r.trap.frequency[2]);
        all_ordered = all_ordered && r.ordering_ok;
        if (auto q = r.q_for(ScanAxis::z); q && std::isfinite(*q) && *q > 0.0) {
            qb.push_back(r.field);
            qz.push_back(*q);
        }
    }
    out.ordering_ok = all_ordered && !bs.empty();
    if (bs.size() >= 4) {
        const auto [s, e] = slope_through_origin(bs, fz);
        out.slope = s;
        out.slope_error = e;
    }
    if (qz.size() >= 2) {
        const auto [p, e] = power_law_exponent(qb, qz);
        out.q_exponent = p;
        out.q_exponent_error = e;
        out.q_monotone = true;
        for (std::size_t i = 1; i < qz.size(); ++i) out.q_monotone = out.q_monotone && qz[i] < qz[i - 1];
    }
    return out;
}

SweepResult run_frequency_sweep(const ExperimentConfig& config, const std::vector<double>& fields,
                                const SweepOptions& options) {
    ForceModel model(config);
    return run_frequency_sweep(model, fields, options);
}

namespace {

std::string num(double v, const char* fmt = "%.6g") {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

}  // namespace

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream o;
    o << "B_mT,status,I_A,fx_Hz,fy_Hz,fz_Hz,fr_Hz,z_center_um,offset_um,Q_x,Q_y,Q_z,Q_diag\n";
    for (const auto& row : r.rows) {
        o << num(row.field * 1e3) << ',';
        if (!row.ok) {
            std::string msg = row.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            o << "\"" << msg << "\",,,,,,,,,,,\n";
            continue;
        }
        const auto& t = row.trap;
        o << "ok," << num(t.current) << ',' << num(t.frequency[0]) << ',' << num(t.frequency[1]) << ','
          << num(t.frequency[2]) << ',' << num(t.frequency_diagonal) << ',' << num(t.trap_center.z * 1e6) << ','
          << num(t.center_offset_toward_slit * 1e6) << ',' << opt_num(row.q_for(ScanAxis::x)) << ','
          << opt_num(row.q_for(ScanAxis::y)) << ',' << opt_num(row.q_for(ScanAxis::z)) << ','
          << opt_num(row.q_for(ScanAxis::diagonal)) << '\n';
    }
    if (r.slope) o << "# slope_fz_Hz_per_mT = " << num(*r.slope * 1e-3) << " +- " << num(*r.slope_error * 1e-3) << '\n';
    if (r.q_exponent) o << "# q_exponent = " << num(*r.q_exponent) << " +- " << num(*r.q_exponent_error) << '\n';
    return o.str();
}

namespace {

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
    bool line = false;  // polyline instead of markers
};

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, bool log_y) {
    constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(y) || (log_y && y <= 0.0)) continue;
            const double yy = log_y ? std::log10(y) : y;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, yy);
            y1 = std::max(y1, yy);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!log_y) y0 = std::min(0.0, y0);
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    const double py = 0.05 * (y1 - y0);
    y0 -= log_y ? py : 0.0;
    y1 += py;
    x0 = std::min(0.0, x0);
    auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double y) { return H - B - ((log_y ? std::log10(y) : y) - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double x = x0 + (x1 - x0) * i / 5;
        o << "<text x=\"" << num(sx(x), "%.1f") << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << num(x, "%.4g") << "</text>\n";
        const double yy = y0 + (y1 - y0) * i / 5;
        const double yv = log_y ? std::pow(10.0, yy) : yy;
        o << "<text x=\"" << L - 6 << "\" y=\"" << num(sy(yv) + 4, "%.1f") << "\" text-anchor=\"end\">" << num(yv, "%.3g") << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    int legend = 0;
    for (const auto& s : series) {
        if (s.line && s.points.size() >= 2) {
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-dasharray=\"6 4\" points=\"";
            for (auto [x, y] : s.points) o << num(sx(x), "%.1f") << ',' << num(sy(y), "%.1f") << ' ';
            o << "\"/>\n";
        } else {
            for (auto [x, y] : s.points) {
                if (!std::isfinite(y) || (log_y && y <= 0.0)) continue;
                o << "<circle cx=\"" << num(sx(x), "%.1f") << "\" cy=\"" << num(sy(y), "%.1f") << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
            }
        }
        const double ly = T + 8 + 16 * legend++;
        o << "<rect x=\"" << L + 12 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>";
        o << "<text x=\"" << L + 28 << "\" y=\"" << ly + 1 << "\">" << s.label << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace

std::string frequency_svg(const SweepResult& r) {
    Series fx{"f_x", "#1f77b4", {}, false}, fy{"f_y", "#2ca02c", {}, false}, fz{"f_z", "#d62728", {}, false},
        fr{"f_r (diagonal)", "#9467bd", {}, false}, pub{"5.6 Hz/mT", "#555555", {}, true};
    double bmax = 0.0;
    for (const auto& row : r.rows) {
        bmax = std::max(bmax, row.field * 1e3);
        if (!row.ok) continue;
        const double b = row.field * 1e3;
        if (row.trap.frequency[0] > 0) fx.points.emplace_back(b, row.trap.frequency[0]);
        if (row.trap.frequency[1] > 0) fy.points.emplace_back(b, row.trap.frequency[1]);
        fz.points.emplace_back(b, row.trap.frequency[2]);
        if (row.trap.frequency_diagonal > 0) fr.points.emplace_back(b, row.trap.frequency_diagonal);
    }
    pub.points = {{0.0, 0.0}, {bmax, SweepResult::published_slope * bmax * 1e-3}};
    return svg_plot("Trap frequency vs drive field", "B (mT)", "f (Hz)", {fx, fy, fz, fr, pub}, false);
}

std::string q_svg(const SweepResult& r) {
    Series q{"Q_z (eddy)", "#d62728", {}, false};
    for (const auto& row : r.rows)
        if (auto v = row.q_for(ScanAxis::z); row.ok && v) q.points.emplace_back(row.field * 1e3, *v);
    return svg_plot("Eddy-current Q vs drive field", "B (mT)", "Q", {q}, true);
}

NegativeControl permeability_control(const ExperimentConfig& config, double field) {
    NegativeControl c;
    c.name = "sphere mu_r = 1";
    ExperimentConfig cfg = config;
    cfg.sphere.material.relative_permeability = 1.0;
    ForceModel nominal(config);
    ForceModel model(cfg);
    c.nominal_magnet_constant = nominal.magnet_constant();
    c.magnet_constant = model.magnet_constant();
    const double current = field / c.nominal_magnet_constant;
    try {
        c.nominal_liftoff_current = liftoff_threshold(nominal).current;
    } catch (const NumericalError&) {
    }
    try {
        c.liftoff_current = liftoff_threshold(model).current;
    } catch (const NumericalError& e) {
        c.message = e.what();
    }
    try {
        TrapOptions opt;
        opt.diagonal = false;
        c.trap = trap_characterize(model, current * c.magnet_constant, opt);
        c.trapped = true;
    } catch (const NumericalError& e) {
        c.message = e.what();
    } catch (const ValidationError& e) {
        c.message = e.what();
    }
    return c;
}

NegativeControl closed_ring_control(const ExperimentConfig& config, double field) {
    NegativeControl c;
    c.name = "closed ring";
    ExperimentConfig cfg = config;
    cfg.ring.slit_angle = 0.0;
    ForceModel nominal(config);
    ForceModel model(cfg);
    c.nominal_magnet_constant = nominal.magnet_constant();
    c.magnet_constant = model.magnet_constant();
    const double current = field / c.nominal_magnet_constant;
    try {
        c.nominal_liftoff_current = liftoff_threshold(nominal).current;
    } catch (const NumericalError&) {
    }
    try {
        c.liftoff_current = liftoff_threshold(model).current;
    } catch (const NumericalError& e) {
        c.message = e.what();
    }
    try {
        if (!(std::abs(c.magnet_constant) > 0.0)) throw NumericalError("no field at the ring centre");
        TrapOptions opt;
        opt.diagonal = false;
        c.trap = trap_characterize(model, current * c.magnet_constant, opt);
        c.trapped = true;
    } catch (const NumericalError& e) {
        c.message = e.what();
    } catch (const ValidationError& e) {
        c.message = e.what();
    }
    return c;
}

namespace {

ComparisonRow row(int criterion, std::string q, double computed, double paper, double lo, double hi, bool gated = true) {
    ComparisonRow r;
    r.criterion = criterion;
    r.quantity = std::move(q);
    r.computed = computed;
    r.paper = paper;
    r.lo = lo;
    r.hi = hi;
    r.gated = gated;
    r.pass = !gated || (computed >= lo && computed <= hi);
    return r;
}

const TrapResult* trap_at(const ComparisonInputs& in, double field) {
    if (in.nominal_trap) return &*in.nominal_trap;
    if (in.sweep)
        for (const auto& r : in.sweep->rows)
            if (r.ok && std::abs(r.field - field) < 1e-9) return &r.trap;
    return nullptr;
}

}  // namespace

std::vector<ComparisonRow> compare_to_paper(const ComparisonInputs& in) {
    std::vector<ComparisonRow> out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (in.sweep) {
        const auto& s = *in.sweep;
        const double p = SweepResult::published_slope * 1e-3;
        out.push_back(row(1, "f_z slope (Hz/mT)", s.slope ? *s.slope * 1e-3 : nan, p, 0.8 * p, 1.2 * p));
        std::size_t ok = 0;
        std::size_t ordered = 0;
        for (const auto& r : s.rows)
            if (r.ok) ++ok, ordered += r.ordering_ok ? 1 : 0;
        out.push_back(row(2, "rows with f_z <= f_r <= f_y (fraction)", ok ? double(ordered) / ok : nan, 1.0, 1.0, 1.0));
    }
    if (const TrapResult* t = trap_at(in, 37.5e-3)) {
        const double fz = t->frequency[2];
        out.push_back(row(2, "f_y / f_z at 37.5 mT", t->frequency[1] / fz, 1.6, 1.45, 1.75));
        out.push_back(row(2, "f_x / f_z at 37.5 mT", t->frequency[0] / fz, 1.5, 1.35, 1.65));
        out.push_back(row(3, "trap offset toward slit (um)", t->center_offset_toward_slit * 1e6, 20.0, 5.0, 60.0));
    }
    if (in.liftoff) out.push_back(row(4, "lift-off threshold (mT)", in.liftoff->field * 1e3, 7.5, 3.75, 15.0));
    if (in.eddy_50mT) out.push_back(row(5, "eddy Q_z at 50 mT", in.eddy_50mT->q, 1e3, 2e2, 2e4));
    if (in.sweep) {
        const auto& s = *in.sweep;
        if (!in.eddy_50mT)
            for (const auto& r : s.rows)
                if (auto q = r.q_for(ScanAxis::z); r.ok && q && std::abs(r.field - 50e-3) < 1e-9)
                    out.push_back(row(5, "eddy Q_z at 50 mT", *q, 1e3, 2e2, 2e4));
        if (s.q_exponent) {
            out.push_back(row(5, "Q_z decreasing with B (1 = yes)", s.q_monotone ? 1.0 : 0.0, 1.0, 1.0, 1.0));
            out.push_back(row(5, "Q(B) exponent", *s.q_exponent, SweepResult::published_q_exponent, nan, nan, false));
        }
    }
    if (in.jc_nb) out.push_back(row(8, "J_c Nb (A/m^2)", *in.jc_nb, 2.5e8, 0.95 * 2.5e8, 1.05 * 2.5e8));
    if (in.jc_ybco) out.push_back(row(8, "J_c YBCO (A/m^2)", *in.jc_ybco, 2.5e9, 0.95 * 2.5e9, 1.05 * 2.5e9));
    if (in.hpen_nb) out.push_back(row(8, "H_pen(0) Nb (mT)", in.hpen_nb->hpen0 * 1e3, 122.0, 101.0, 143.0));
    if (in.thermal)
        for (const auto& c : in.thermal->comparisons)
            out.push_back(row(9, c.quantity + " (computed/published)", c.ratio(), 1.0, nan, nan, false));
    if (in.ringdown)
        out.push_back(row(10, "ringdown Q relative error", std::abs(in.ringdown->q / in.ringdown_q_true - 1.0), 0.0, 0.0, 0.02));
    for (const auto& c : in.controls) {
        out.push_back(row(11, c.name + ": confining trap (1 = yes)", c.trapped ? 1.0 : 0.0, 0.0, 0.0, 0.0));
        if (c.name == "closed ring") {
            out.push_back(row(11, "closed ring: hole field / slit ring", c.magnet_constant / c.nominal_magnet_constant, 0.0, -0.5, 0.5));
            const double ratio = c.liftoff_current && c.nominal_liftoff_current
                                     ? *c.liftoff_current / *c.nominal_liftoff_current
                                     : std::numeric_limits<double>::infinity();
            out.push_back(row(11, "closed ring: lift-off current / slit ring", ratio, 0.0, 1.0 + 1e-9,
                              std::numeric_limits<double>::infinity()));
        }
    }
    return out;
}

std::vector<ComparisonRow> compare_to_paper(const SweepResult& sweep) {
    ComparisonInputs in;
    in.sweep = sweep;
    return compare_to_paper(in);
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream o;
    o << "criterion,quantity,computed,published,lo,hi,gated,pass\n";
    for (const auto& r : rows) {
        o << r.criterion << ",\"" << r.quantity << "\"," << num(r.computed) << ',' << (r.paper != 0.0 ? num(r.paper) : "")
          << ',' << (std::isnan(r.lo) ? "" : num(r.lo)) << ',' << (std::isnan(r.hi) ? "" : num(r.hi)) << ','
          << (r.gated ? "yes" : "no") << ',' << (r.pass ? "pass" : "FAIL") << '\n';
    }
    return o.str();
}

}  // namespace levitrap
