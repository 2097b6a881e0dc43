#include "levitrap/beanlab.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/units.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace levitrap::bean {

using constants::pi;

void MagnetometryCurve::validate() const {
    if (abscissa.size() != moment.size()) throw ValidationError("abscissa and moment lengths differ");
    if (!branch.empty() && branch.size() != moment.size()) throw ValidationError("branch flags and moment lengths differ");
    if (abscissa.size() < 2) throw ValidationError("curve needs at least two points");
    for (std::size_t i = 0; i < moment.size(); ++i) {
        if (!std::isfinite(moment[i]) || !std::isfinite(abscissa[i])) throw ValidationError("non-finite curve value");
    }
    // Each run of equal branch flags must be strictly monotone in the abscissa.
    std::size_t start = 0;
    for (std::size_t i = 1; i <= abscissa.size(); ++i) {
        const bool end = i == abscissa.size() || (!branch.empty() && branch[i] != branch[start]);
        if (!end) continue;
        if (i - start >= 2) {
            const double dir = abscissa[start + 1] - abscissa[start];
            for (std::size_t j = start + 1; j < i; ++j) {
                const double d = abscissa[j] - abscissa[j - 1];
                if (d == 0.0 || (d > 0.0) != (dir > 0.0))
                    throw ValidationError("abscissa is not strictly monotone within a branch (point " +
                                          std::to_string(j) + ")");
            }
        }
        start = i;
    }
}

double emu_to_si(double emu) { return emu / 1000.0; }
double si_to_emu(double am2) { return am2 * 1000.0; }

namespace {

double unit_scale(const std::string& unit, Dim dim) {
    if (unit == "SI" || unit.empty()) return 1.0;
    return parse_quantity("1 " + unit, dim);
}

Branch parse_branch(const std::string& s, int line) {
    if (s == "v" || s == "virgin" || s == "0") return Branch::virgin;
    if (s == "i" || s == "inc" || s == "increasing" || s == "1") return Branch::increasing;
    if (s == "d" || s == "dec" || s == "decreasing" || s == "2") return Branch::decreasing;
    throw ParseError("unknown branch flag '" + s + "'", line);
}

const char* branch_code(Branch b) {
    switch (b) {
        case Branch::virgin: return "v";
        case Branch::increasing: return "i";
        case Branch::decreasing: return "d";
    }
    return "v";
}

// Least-squares line through (x, y) over [i0, i1).
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t i0,
                                   std::size_t i1) {
    const double n = static_cast<double>(i1 - i0);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    return {my - slope * mx, slope};
}

// Sorted (abscissa, moment) pairs of the points whose flag is in `want`.
std::vector<std::pair<double, double>> branch_points(const MagnetometryCurve& c, std::initializer_list<Branch> want) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < c.moment.size(); ++i) {
        const Branch b = c.branch.empty() ? Branch::virgin : c.branch[i];
        if (std::find(want.begin(), want.end(), b) != want.end()) out.emplace_back(c.abscissa[i], c.moment[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<double> interpolate(const std::vector<std::pair<double, double>>& pts, double x) {
    if (pts.size() < 2 || x < pts.front().first || x > pts.back().first) return std::nullopt;
    auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(x, -std::numeric_limits<double>::infinity()));
    if (it == pts.begin()) return it->second;
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    if (x1 == x0) return y1;
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

}  // namespace

MagnetometryCurve parse_curve_csv(std::string_view text) {
    MagnetometryCurve c;
    std::map<std::string, std::string> header;
    std::vector<std::string> branches;
    std::istringstream in{std::string(text)};
    std::string line;
    int ln = 0;
    std::vector<double> x;
    std::vector<double> m;
    while (std::getline(in, line)) {
        ++ln;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string body = trim(t.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos) header[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(t);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(trim(col));
        if (cols.size() < 2 || cols.size() > 3) throw ParseError("expected 2 or 3 columns", ln);
        double a = 0.0;
        double b = 0.0;
        try {
            std::size_t p1 = 0;
            std::size_t p2 = 0;
            a = std::stod(cols[0], &p1);
            b = std::stod(cols[1], &p2);
            if (p1 != cols[0].size() || p2 != cols[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            if (x.empty() && branches.empty()) continue;  // column-title row
            throw ParseError("not a number in '" + t + "'", ln);
        }
        x.push_back(a);
        m.push_back(b);
        branches.push_back(cols.size() == 3 ? cols[2] : "");
    }
    const std::string kind = header.count("kind") ? header["kind"] : "MH";
    if (kind == "MT" || kind == "M-T") {
        c.kind = CurveKind::moment_vs_temperature;
    } else if (kind == "MH" || kind == "M-H") {
        c.kind = CurveKind::moment_vs_field;
    } else {
        throw ParseError("kind must be MT or MH", 0, "kind");
    }
    const bool mt = c.kind == CurveKind::moment_vs_temperature;
    const double xs = unit_scale(header.count("abscissa_unit") ? header["abscissa_unit"] : (mt ? "K" : "T"),
                                 mt ? Dim::temperature : Dim::field);
    const double ms = unit_scale(header.count("moment_unit") ? header["moment_unit"] : "SI", Dim::moment);
    if (header.count("fixed")) c.fixed = parse_quantity(header["fixed"], mt ? Dim::field : Dim::temperature);
    for (std::size_t i = 0; i < x.size(); ++i) {
        c.abscissa.push_back(x[i] * xs);
        c.moment.push_back(m[i] * ms);
    }
    const bool any_flag = std::any_of(branches.begin(), branches.end(), [](const auto& s) { return !s.empty(); });
    if (any_flag) {
        int row = 0;
        for (const auto& s : branches) c.branch.push_back(parse_branch(s, ++row));
    }
    c.validate();
    return c;
}

MagnetometryCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_curve_csv(ss.str());
}

std::string write_curve_csv(const MagnetometryCurve& c) {
    const bool mt = c.kind == CurveKind::moment_vs_temperature;
    std::ostringstream o;
    o << std::setprecision(12);
    o << "# kind = " << (mt ? "MT" : "MH") << "\n";
    o << "# fixed = " << c.fixed << (mt ? " T" : " K") << "\n";
    o << "# moment_unit = Am2\n# abscissa_unit = " << (mt ? "K" : "T") << "\n";
    for (std::size_t i = 0; i < c.moment.size(); ++i) {
        o << c.abscissa[i] << ',' << c.moment[i];
        if (!c.branch.empty()) o << ',' << branch_code(c.branch[i]);
        o << '\n';
    }
    return o.str();
}

double detect_tc(const MagnetometryCurve& mt, int window) {
    mt.validate();
    if (mt.kind != CurveKind::moment_vs_temperature) throw DomainError("detect_tc needs a moment-vs-temperature curve");
    if (window < 3) throw DomainError("slope window must be at least 3 points");
    std::vector<std::size_t> order(mt.abscissa.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return mt.abscissa[a] < mt.abscissa[b]; });
    std::vector<double> t;
    std::vector<double> m;
    for (auto i : order) {
        t.push_back(mt.abscissa[i]);
        m.push_back(mt.moment[i]);
    }
    const std::size_t n = t.size();
    const auto w = static_cast<std::size_t>(window);
    if (n < 2 * w) throw NumericalError("too few points to locate a transition");

    // Normal-state baseline over the warmest quarter.
    const std::size_t q = std::max<std::size_t>(w, n / 4);
    const auto [b0, b1] = line_fit(t, m, n - q, n);
    double noise = 0.0;
    for (std::size_t i = n - q; i < n; ++i) noise += std::pow(m[i] - b0 - b1 * t[i], 2) / q;
    noise = std::sqrt(noise);
    double cold = 0.0;
    for (std::size_t i = 0; i < q; ++i) cold += (m[i] - b0 - b1 * t[i]) / q;
    double scale = 0.0;
    for (double v : m) scale = std::max(scale, std::abs(v));
    if (std::abs(cold) <= 10.0 * noise || std::abs(cold) <= 1e-9 * scale)
        throw NumericalError("no transition found: the cold end does not depart from the normal-state baseline");

    // Steepest local slope below the baseline window.
    double best = 0.0;
    double at_t = 0.0;
    double at_m = 0.0;
    for (std::size_t i = 0; i + w <= n - q; ++i) {
        const auto [c0, c1] = line_fit(t, m, i, i + w);
        // The transition moves the moment toward the baseline on warming.
        if (c1 * cold < 0.0 && std::abs(c1) > best) {
            best = std::abs(c1);
            double mt_ = 0.0;
            for (std::size_t j = i; j < i + w; ++j) mt_ += t[j] / w;
            at_t = mt_;
            at_m = c0 + c1 * mt_;
        }
    }
    if (best == 0.0) throw NumericalError("no transition found: no slope toward the baseline");
    const double s = cold < 0.0 ? best : -best;
    return (b0 - at_m + s * at_t) / (s - b1);
}

double jc_cylinder(double moment, double radius, double volume) {
    if (!(radius > 0.0) || !(volume > 0.0)) throw DomainError("cylinder radius and volume must be positive");
    return 3.0 * (moment / volume) / radius;
}

double jc_slit_ring(double moment, double width, double length, double volume) {
    if (!(volume > 0.0)) throw DomainError("ring volume must be positive");
    if (!(width > 0.0)) throw DomainError("ring width must be positive (a -> 0 has no finite J_c)");
    if (!(width < length)) throw DomainError("slit-ring model needs width a < length b");
    return 4.0 * (moment / volume) / (width * (1.0 - width / (3.0 * length)));
}

SlitRingDims slit_ring_dims(double inner_diameter, double outer_diameter) {
    if (!(outer_diameter > inner_diameter) || inner_diameter < 0.0) throw DomainError("need d_out > d_in >= 0");
    return {(outer_diameter - inner_diameter) / 2.0, pi * (outer_diameter + inner_diameter) / 4.0};
}

JcSurface jc_surface(const std::vector<MagnetometryCurve>& loops, const SampleShape& shape,
                     const std::vector<double>& fields, std::optional<double> field_ceiling) {
    JcSurface s;
    s.geometry = shape.geometry;
    s.fields = fields;
    std::vector<const MagnetometryCurve*> sorted;
    for (const auto& c : loops) {
        if (c.kind != CurveKind::moment_vs_field) throw DomainError("J_c surface needs M-H loops");
        c.validate();
        sorted.push_back(&c);
    }
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->fixed < b->fixed; });
    for (const auto* c : sorted) {
        auto up = branch_points(*c, {Branch::increasing});
        if (up.size() < 2) up = branch_points(*c, {Branch::virgin});
        const auto down = branch_points(*c, {Branch::decreasing});
        if (down.size() < 2) throw ValidationError("M-H loop at " + std::to_string(c->fixed) + " K has no decreasing branch");
        std::vector<double> row;
        for (double b : fields) {
            const auto mu = interpolate(up, b);
            const auto md = interpolate(down, b);
            double jc = 0.0;
            if (mu && md && !(field_ceiling && b > *field_ceiling)) {
                const double mirr = 0.5 * std::abs(*md - *mu);
                jc = shape.geometry == SampleGeometry::cylinder ? jc_cylinder(mirr, shape.a, shape.volume)
                                                                : jc_slit_ring(mirr, shape.a, shape.b, shape.volume);
            }
            row.push_back(jc);
        }
        s.temperatures.push_back(c->fixed);
        s.jc.push_back(std::move(row));
    }
    return s;
}

std::vector<std::vector<double>> pinning_force_map(const JcSurface& surface) {
    std::vector<std::vector<double>> fp = surface.jc;
    for (auto& row : fp)
        for (std::size_t j = 0; j < row.size(); ++j) row[j] *= surface.fields[j];
    return fp;
}

std::vector<HpenSample> extract_hpen(const std::vector<MagnetometryCurve>& curves) {
    std::vector<HpenSample> out;
    for (const auto& c : curves) {
        if (c.kind != CurveKind::moment_vs_field) throw DomainError("H_pen extraction needs M-H curves");
        c.validate();
        const auto virgin = branch_points(c, {Branch::virgin});
        if (virgin.empty()) throw ValidationError("curve at " + std::to_string(c.fixed) + " K has no virgin branch");
        auto best = virgin.front();
        for (const auto& p : virgin)
            if (std::abs(p.second) > std::abs(best.second)) best = p;
        out.push_back({c.fixed, std::abs(best.first)});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.temperature < b.temperature; });
    return out;
}

double HpenFit::operator()(double temperature) const {
    if (temperature >= tc) return 0.0;
    return hpen0 * (1.0 - std::pow(temperature / tc, gamma));
}

namespace {

struct HpenFunctor : Eigen::DenseFunctor<double> {
    const std::vector<HpenSample>& s;
    std::optional<double> tc_fixed;

    HpenFunctor(const std::vector<HpenSample>& samples, std::optional<double> tc)
        : DenseFunctor(tc ? 2 : 3, static_cast<int>(samples.size())), s(samples), tc_fixed(tc) {}

    double tc_of(const InputType& x) const { return tc_fixed ? *tc_fixed : x[2]; }

    int operator()(const InputType& x, ValueType& f) const {
        const double tc = tc_of(x);
        for (std::size_t i = 0; i < s.size(); ++i)
            f[static_cast<Eigen::Index>(i)] = x[0] * (1.0 - std::pow(s[i].temperature / tc, x[1])) - s[i].field;
        return 0;
    }

    int df(const InputType& x, JacobianType& j) const {
        const double tc = tc_of(x);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const double ratio = s[i].temperature / tc;
            const double u = ratio > 0.0 ? std::pow(ratio, x[1]) : 0.0;
            j(r, 0) = 1.0 - u;
            j(r, 1) = ratio > 0.0 ? -x[0] * u * std::log(ratio) : 0.0;
            if (!tc_fixed) j(r, 2) = x[0] * u * x[1] / tc;
        }
        return 0;
    }
};

}  // namespace

HpenFit fit_hpen_curve(const std::vector<HpenSample>& samples, std::optional<double> fixed_tc) {
    double tmax_pos = 0.0;
    double hmax = 0.0;
    std::optional<double> tzero;
    for (const auto& p : samples) {
        if (p.temperature < 0.0 || !std::isfinite(p.field)) throw DomainError("invalid H_pen sample");
        if (p.field > 0.0) {
            tmax_pos = std::max(tmax_pos, p.temperature);
            hmax = std::max(hmax, p.field);
        } else if (!tzero || p.temperature < *tzero) {
            tzero = p.temperature;
        }
    }
    const double tc0 = fixed_tc ? *fixed_tc : (tzero ? *tzero : 1.1 * tmax_pos);
    const auto below = std::count_if(samples.begin(), samples.end(), [&](const auto& p) { return p.temperature < tc0; });
    if (below < 4) throw DomainError("H_pen fit needs at least four samples below T_c");

    HpenFunctor fn(samples, fixed_tc);
    Eigen::VectorXd x(fixed_tc ? 2 : 3);
    x[0] = 1.05 * hmax;
    x[1] = 2.0;
    if (!fixed_tc) x[2] = tc0;
    Eigen::LevenbergMarquardt<HpenFunctor> lm(fn);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setMaxfev(4000);
    const auto status = lm.minimize(x);
    using namespace Eigen::LevenbergMarquardtSpace;
    if (status == TooManyFunctionEvaluation || status == ImproperInputParameters || !x.allFinite() || x[1] <= 0.0)
        throw NumericalError("H_pen fit did not converge (status " + std::to_string(static_cast<int>(status)) +
                             ", H0 = " + std::to_string(x[0]) + " T, gamma = " + std::to_string(x[1]) + ")");

    HpenFit out;
    out.hpen0 = x[0];
    out.gamma = x[1];
    out.tc = fixed_tc ? *fixed_tc : x[2];
    out.tc_fixed = fixed_tc.has_value();
    out.iterations = static_cast<int>(lm.iterations());
    out.samples = samples;

    Eigen::VectorXd f(samples.size());
    fn(x, f);
    Eigen::MatrixXd j(samples.size(), x.size());
    fn.df(x, j);
    const double ssr = f.squaredNorm();
    const auto dof = static_cast<double>(samples.size()) - static_cast<double>(x.size());
    out.residual_rms = std::sqrt(ssr / samples.size());
    if (dof > 0.0) {
        const Eigen::MatrixXd cov = (ssr / dof) * (j.transpose() * j).inverse();
        out.hpen0_error = std::sqrt(std::max(0.0, cov(0, 0)));
        out.gamma_error = std::sqrt(std::max(0.0, cov(1, 1)));
        if (!fixed_tc) out.tc_error = std::sqrt(std::max(0.0, cov(2, 2)));
    }
    return out;
}

MagnetometryCurve synthetic_virgin_curve(double temperature, double hpen, double peak, double field_max, int points) {
    if (!(hpen > 0.0) || !(field_max > 0.0) || points < 2) throw DomainError("invalid synthetic curve parameters");
    MagnetometryCurve c;
    c.kind = CurveKind::moment_vs_field;
    c.fixed = temperature;
    constexpr double reversible = 0.3;
    for (int i = 0; i < points; ++i) {
        const double h = field_max * i / (points - 1);
        double shape = 0.0;
        if (h <= hpen) {
            const double u = h / hpen;
            shape = 2.0 * u - u * u;
        } else {
            shape = reversible + (1.0 - reversible) * std::exp(-(h - hpen) / hpen);
        }
        c.abscissa.push_back(h);
        c.moment.push_back(peak * shape);
        c.branch.push_back(Branch::virgin);
    }
    return c;
}

}  // namespace levitrap::bean
