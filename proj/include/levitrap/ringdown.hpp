#pragma once

// Ringdown analysis of a detector record: periodogram, zero-phase Butterworth band-pass,
// envelope decay fit and the resulting quality factor. synthesize_ringdown produces the
// seeded test signals the pipeline is validated against.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace levitrap {

struct RingdownSignal {
    std::vector<double> samples;
    double sample_rate = 0.0;  // Hz

    double duration() const { return sample_rate > 0.0 ? samples.size() / sample_rate : 0.0; }
};

/// A exp(-t/tau) sin(2 pi f t + phase) + Gaussian noise (seeded). tau may be +inf.
/// Throws DomainError when f is at or above the Nyquist frequency.
RingdownSignal synthesize_ringdown(double f, double tau, double amplitude, double noise_rms, double sample_rate,
                                   double duration, std::uint64_t seed = 1, double phase = 0.0);

struct Spectrum {
    std::vector<double> frequency;  // Hz, bin centres k / duration
    std::vector<double> psd;        // one-sided, units^2 / Hz; sum(psd) * bin_width = mean(x^2)
    double bin_width = 0.0;
};

/// One-sided periodogram (rectangular window, no averaging).
Spectrum power_spectrum(const RingdownSignal& s);

/// Strongest bin in [f_lo, f_hi] refined by a parabola through log PSD of its neighbours.
double spectral_peak(const Spectrum& s, double f_lo, double f_hi);

struct BandPass {
    // Second-order sections b0 b1 b2 a1 a2 (a0 = 1).
    std::vector<std::array<double, 5>> sections;
};

/// Digital Butterworth band-pass of the given (even) prototype order via the bilinear
/// transform, normalized to unit gain at the geometric band centre.
BandPass design_band_pass(double f_lo, double f_hi, double sample_rate, int order = 4);

/// Zero-phase (forward-backward) band-pass with odd-reflection padding at both ends.
/// Throws DomainError unless 0 < f_lo < f_hi < Nyquist.
RingdownSignal band_pass(const RingdownSignal& s, double f_lo, double f_hi, int order = 4);

/// |analytic signal| by the FFT (Hilbert transform).
std::vector<double> analytic_envelope(const RingdownSignal& s);

/// Local maxima of |x|, one per half cycle, as (time, value) pairs.
std::vector<std::pair<double, double>> cycle_peaks(const RingdownSignal& s);

enum class EnvelopeMethod { analytic, peaks };

struct EnvelopeFit {
    double tau = 0.0;             // s
    double tau_error = 0.0;       // 1-sigma from the regression
    double relative_error = 0.0;  // tau_error / tau
    double residual_rms = 0.0;    // of log envelope
    std::size_t points = 0;
};

/// Log-linear least squares of the envelope. The fit uses the span between 5 % and 95 % of
/// the record and stops where the envelope falls below `floor_fraction` of its start value.
/// Throws NumericalError ("non-decaying") when the record shows less than 1 % decay.
EnvelopeFit envelope_tau(const RingdownSignal& s, EnvelopeMethod method = EnvelopeMethod::analytic,
                         double floor_fraction = 0.05);

struct QualityFactor {
    double q = 0.0;              // pi f tau (amplitude ring-down convention)
    double paper_literal = 0.0;  // 2 pi f / tau, the printed expression, in 1/s^2
};

/// Throws DomainError for non-positive inputs; tau = +inf gives q = +inf.
QualityFactor q_from_ringdown(double f, double tau);

struct RingdownResult {
    double frequency = 0.0;   // Hz
    double resolution = 0.0;  // Hz, 1 / duration
    double tau = 0.0;
    double tau_error = 0.0;
    double fit_relative_error = 0.0;
    double q = 0.0;
    double q_paper_literal = 0.0;
};

/// Full pipeline: spectral peak in [f_lo, f_hi], band-pass, envelope fit, Q.
RingdownResult analyze_ringdown(const RingdownSignal& s, double f_lo, double f_hi,
                                EnvelopeMethod method = EnvelopeMethod::analytic);

/// Single-column CSV (optional '#' header lines) at the given rate.
RingdownSignal read_ringdown_csv(const std::filesystem::path& path, double sample_rate);
/// Raw little-endian int16 samples scaled by `scale`.
RingdownSignal read_ringdown_int16(const std::filesystem::path& path, double sample_rate, double scale = 1.0);

}  // namespace levitrap
