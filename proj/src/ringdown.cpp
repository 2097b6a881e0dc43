#include "levitrap/ringdown.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/units.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace levitrap {

using constants::pi;

namespace {

using cplx = std::complex<double>;

// Forward real FFT, N/2 + 1 bins.
std::vector<cplx> rfft(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> in(x);
    std::vector<cplx> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    return out;
}

std::vector<cplx> ifft(std::vector<cplx> x) {
    const int n = static_cast<int>(x.size());
    std::vector<cplx> out(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(x.data()), reinterpret_cast<fftw_complex*>(out.data()),
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

void sos_filter(const std::array<double, 5>& c, std::vector<double>& x) {
    // Transposed direct form II.
    double z1 = 0.0;
    double z2 = 0.0;
    for (double& v : x) {
        const double y = c[0] * v + z1;
        z1 = c[1] * v - c[3] * y + z2;
        z2 = c[2] * v - c[4] * y;
        v = y;
    }
}

cplx section_response(const std::array<double, 5>& c, cplx z) {
    const cplx zi = 1.0 / z;
    return (c[0] + c[1] * zi + c[2] * zi * zi) / (1.0 + c[3] * zi + c[4] * zi * zi);
}

}  // namespace

RingdownSignal synthesize_ringdown(double f, double tau, double amplitude, double noise_rms, double sample_rate,
                                   double duration, std::uint64_t seed, double phase) {
    if (!(sample_rate > 0.0) || !(duration > 0.0)) throw DomainError("sample rate and duration must be positive");
    if (f < 0.0 || f >= 0.5 * sample_rate) throw DomainError("frequency aliases: f must lie below the Nyquist frequency");
    if (!(tau > 0.0)) throw DomainError("decay time must be positive");
    RingdownSignal s;
    s.sample_rate = sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
    s.samples.resize(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_rms > 0.0 ? noise_rms : 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i / sample_rate;
        const double env = std::isinf(tau) ? amplitude : amplitude * std::exp(-t / tau);
        s.samples[i] = env * std::sin(2.0 * pi * f * t + phase) + (noise_rms > 0.0 ? noise(rng) : 0.0);
    }
    return s;
}

Spectrum power_spectrum(const RingdownSignal& s) {
    if (s.samples.empty()) throw DomainError("empty signal");
    const std::size_t n = s.samples.size();
    const auto x = rfft(s.samples);
    Spectrum out;
    out.bin_width = s.sample_rate / static_cast<double>(n);
    const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n) * out.bin_width);
    out.frequency.resize(x.size());
    out.psd.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        out.frequency[k] = k * out.bin_width;
        const bool single = k == 0 || (n % 2 == 0 && k == n / 2);
        out.psd[k] = (single ? 1.0 : 2.0) * std::norm(x[k]) * norm;
    }
    return out;
}

double spectral_peak(const Spectrum& s, double f_lo, double f_hi) {
    std::size_t best = 0;
    double pmax = -1.0;
    for (std::size_t k = 0; k < s.psd.size(); ++k) {
        if (s.frequency[k] < f_lo || s.frequency[k] > f_hi) continue;
        if (s.psd[k] > pmax) {
            pmax = s.psd[k];
            best = k;
        }
    }
    if (pmax < 0.0) throw DomainError("no spectral bins inside the requested band");
    if (best == 0 || best + 1 >= s.psd.size()) return s.frequency[best];
    const double a = std::log(std::max(s.psd[best - 1], 1e-300));
    const double b = std::log(std::max(s.psd[best], 1e-300));
    const double c = std::log(std::max(s.psd[best + 1], 1e-300));
    const double den = a - 2.0 * b + c;
    const double shift = den < 0.0 ? 0.5 * (a - c) / den : 0.0;
    return s.frequency[best] + std::clamp(shift, -0.5, 0.5) * s.bin_width;
}

BandPass design_band_pass(double f_lo, double f_hi, double sample_rate, int order) {
    if (!(f_lo > 0.0 && f_lo < f_hi && f_hi < 0.5 * sample_rate))
        throw DomainError("invalid band: need 0 < f_lo < f_hi < Nyquist");
    if (order < 2 || order % 2 != 0) throw DomainError("band-pass prototype order must be even and >= 2");
    const double fs2 = 2.0 * sample_rate;
    // Pre-warped analog band edges.
    const double wl = fs2 * std::tan(pi * f_lo / sample_rate);
    const double wh = fs2 * std::tan(pi * f_hi / sample_rate);
    const double bw = wh - wl;
    const double w0sq = wl * wh;
    BandPass bp;
    for (int k = 0; k < order / 2; ++k) {
        // Upper-half-plane Butterworth pole; its conjugate produces the conjugate sections.
        const cplx p = std::polar(1.0, pi * (2.0 * k + order + 1) / (2.0 * order));
        const cplx disc = std::sqrt(p * p * bw * bw - 4.0 * w0sq);
        for (const cplx s : {0.5 * (p * bw + disc), 0.5 * (p * bw - disc)}) {
            const cplx z = (fs2 + s) / (fs2 - s);
            // Zeros at z = +1 and z = -1: numerator 1 - z^-2.
            bp.sections.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
        }
    }
    // Unit gain at the band centre.
    const double wc = 2.0 * std::atan(std::sqrt(w0sq) / fs2);
    cplx h = 1.0;
    for (const auto& c : bp.sections) h *= section_response(c, std::polar(1.0, wc));
    const double g = 1.0 / std::abs(h);
    for (int i = 0; i < 3; ++i) bp.sections.front()[i] *= g;
    return bp;
}

RingdownSignal band_pass(const RingdownSignal& s, double f_lo, double f_hi, int order) {
    const BandPass bp = design_band_pass(f_lo, f_hi, s.sample_rate, order);
    const std::size_t n = s.samples.size();
    if (n < 3) throw DomainError("signal too short to filter");
    // Several filter time constants of odd-reflected padding keep edge transients out.
    const auto want = static_cast<std::size_t>(std::ceil(6.0 * s.sample_rate / (f_hi - f_lo)));
    const std::size_t pad = std::min(n - 1, want);
    std::vector<double> x(n + 2 * pad);
    const double x0 = s.samples.front();
    const double xn = s.samples.back();
    for (std::size_t i = 0; i < pad; ++i) x[i] = 2.0 * x0 - s.samples[pad - i];
    std::copy(s.samples.begin(), s.samples.end(), x.begin() + static_cast<std::ptrdiff_t>(pad));
    for (std::size_t i = 0; i < pad; ++i) x[pad + n + i] = 2.0 * xn - s.samples[n - 2 - i];
    for (const auto& c : bp.sections) sos_filter(c, x);
    std::reverse(x.begin(), x.end());
    for (const auto& c : bp.sections) sos_filter(c, x);
    std::reverse(x.begin(), x.end());
    RingdownSignal out;
    out.sample_rate = s.sample_rate;
    out.samples.assign(x.begin() + static_cast<std::ptrdiff_t>(pad), x.begin() + static_cast<std::ptrdiff_t>(pad + n));
    return out;
}

std::vector<double> analytic_envelope(const RingdownSignal& s) {
    const std::size_t n = s.samples.size();
    if (n == 0) return {};
    const auto half = rfft(s.samples);
    std::vector<cplx> z(n, 0.0);
    z[0] = half[0];
    const std::size_t top = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
    for (std::size_t k = 1; k < top; ++k) z[k] = 2.0 * half[k];
    if (n % 2 == 0) z[n / 2] = half[n / 2];
    const auto a = ifft(std::move(z));
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(a[i]);
    return env;
}

std::vector<std::pair<double, double>> cycle_peaks(const RingdownSignal& s) {
    std::vector<std::pair<double, double>> out;
    const auto& x = s.samples;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        const bool cross = i == x.size() || (x[i] >= 0.0) != (x[i - 1] >= 0.0);
        if (!cross) continue;
        // Skip the partial half cycles at both ends.
        if (start > 0 && i < x.size()) {
            std::size_t m = start;
            for (std::size_t j = start; j < i; ++j)
                if (std::abs(x[j]) > std::abs(x[m])) m = j;
            double t = static_cast<double>(m);
            double v = std::abs(x[m]);
            if (m > start && m + 1 < i) {
                const double a = std::abs(x[m - 1]);
                const double c = std::abs(x[m + 1]);
                const double den = a - 2.0 * v + c;
                if (den < 0.0) {
                    const double d = 0.5 * (a - c) / den;
                    t += d;
                    v -= 0.25 * (a - c) * d;
                }
            }
            out.emplace_back(t / s.sample_rate, v);
        }
        start = i;
    }
    return out;
}

EnvelopeFit envelope_tau(const RingdownSignal& s, EnvelopeMethod method, double floor_fraction) {
    std::vector<double> t;
    std::vector<double> e;
    const std::size_t n = s.samples.size();
    if (method == EnvelopeMethod::analytic) {
        const auto env = analytic_envelope(s);
        const std::size_t i0 = n / 20;
        const std::size_t i1 = n - n / 20;
        for (std::size_t i = i0; i < i1; ++i) {
            t.push_back(i / s.sample_rate);
            e.push_back(env[i]);
        }
    } else {
        for (const auto& [tp, v] : cycle_peaks(s)) {
            t.push_back(tp);
            e.push_back(v);
        }
    }
    if (t.size() < 20) throw NumericalError("too few envelope points for a decay fit");
    const double e0 = e.front();
    std::size_t m = 0;
    while (m < e.size() && e[m] >= floor_fraction * e0 && e[m] > 0.0) ++m;
    if (m < 20) throw NumericalError("envelope falls below the fit floor almost immediately");
    // ln e = a + b t
    double st = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        st += t[i];
        sy += std::log(e[i]);
    }
    const double tm = st / m;
    const double ym = sy / m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dt = t[i] - tm;
        sxx += dt * dt;
        sxy += dt * (std::log(e[i]) - ym);
    }
    const double b = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = std::log(e[i]) - (ym + b * (t[i] - tm));
        ssr += r * r;
    }
    const double span = t[m - 1] - t[0];
    if (b >= 0.0 || -b * span < 0.01) throw NumericalError("non-decaying signal: less than 1 % decay over the record");
    EnvelopeFit f;
    f.points = m;
    f.tau = -1.0 / b;
    const double sb = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
    f.tau_error = sb / (b * b);
    f.relative_error = sb / -b;
    f.residual_rms = std::sqrt(ssr / m);
    return f;
}

QualityFactor q_from_ringdown(double f, double tau) {
    if (!(f > 0.0) || !(tau > 0.0)) throw DomainError("Q needs positive frequency and decay time");
    QualityFactor q;
    if (std::isinf(tau)) {
        q.q = std::numeric_limits<double>::infinity();
        q.paper_literal = 0.0;
        return q;
    }
    q.q = pi * f * tau;
    q.paper_literal = 2.0 * pi * f / tau;
    return q;
}

RingdownResult analyze_ringdown(const RingdownSignal& s, double f_lo, double f_hi, EnvelopeMethod method) {
    RingdownResult r;
    const Spectrum sp = power_spectrum(s);
    r.frequency = spectral_peak(sp, f_lo, f_hi);
    r.resolution = sp.bin_width;
    const RingdownSignal filtered = band_pass(s, f_lo, f_hi);
    const EnvelopeFit fit = envelope_tau(filtered, method);
    r.tau = fit.tau;
    r.tau_error = fit.tau_error;
    r.fit_relative_error = fit.relative_error;
    const QualityFactor q = q_from_ringdown(r.frequency, r.tau);
    r.q = q.q;
    r.q_paper_literal = q.paper_literal;
    return r;
}

RingdownSignal read_ringdown_csv(const std::filesystem::path& path, double sample_rate) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    RingdownSignal s;
    s.sample_rate = sample_rate;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ss(t);
        double v = 0.0;
        if (!(ss >> v)) throw ParseError("not a number: " + t, ln);
        s.samples.push_back(v);
    }
    if (s.samples.empty()) throw ParseError("no samples in " + path.string());
    return s;
}

RingdownSignal read_ringdown_int16(const std::filesystem::path& path, double sample_rate, double scale) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    RingdownSignal s;
    s.sample_rate = sample_rate;
    unsigned char b[2];
    while (in.read(reinterpret_cast<char*>(b), 2)) {
        const auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(b[0] | (b[1] << 8)));
        s.samples.push_back(scale * v);
    }
    return s;
}

}  // namespace levitrap
