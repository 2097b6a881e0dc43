#include "levitrap/errors.hpp"
#include "levitrap/ringdown.hpp"
#include "levitrap/units.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace levitrap;
using constants::pi;

namespace {

double band_gain(const BandPass& bp, double f, double fs) {
    const std::complex<double> z1 = std::polar(1.0, -2 * pi * f / fs);
    std::complex<double> h = 1.0;
    for (const auto& s : bp.sections)
        h *= (s[0] + s[1] * z1 + s[2] * z1 * z1) / (1.0 + s[3] * z1 + s[4] * z1 * z1);
    return std::abs(h);
}

}  // namespace

TEST_CASE("synthetic ring-down recovers tau and Q") {
    const double f = 169.3, q = 1000.0, tau = q / (pi * f);
    const auto s = synthesize_ringdown(f, tau, 1.0, 0.0, 20e3, 10.0);
    for (auto m : {EnvelopeMethod::analytic, EnvelopeMethod::peaks}) {
        const auto r = analyze_ringdown(s, 150, 190, m);
        CHECK(r.frequency == doctest::Approx(f).epsilon(1e-4));
        CHECK(r.tau == doctest::Approx(tau).epsilon(1e-3));
        CHECK(r.fit_relative_error < 1e-3);
        CHECK(r.q == doctest::Approx(q).epsilon(1e-3));
        CHECK(r.resolution == doctest::Approx(0.1));
    }
}

TEST_CASE("Q conventions") {
    const auto q = q_from_ringdown(169.0, 2.0);
    CHECK(q.q == doctest::Approx(pi * 169.0 * 2.0).epsilon(1e-15));
    CHECK(q.paper_literal == doctest::Approx(2 * pi * 169.0 / 2.0).epsilon(1e-15));
    CHECK(std::isinf(q_from_ringdown(169.0, std::numeric_limits<double>::infinity()).q));
    CHECK_THROWS_AS(q_from_ringdown(-1.0, 2.0), DomainError);
}

TEST_CASE("periodogram normalization and resolution") {
    const auto s = synthesize_ringdown(50.0, std::numeric_limits<double>::infinity(), 2.0, 0.0, 1000.0, 10.0);
    const auto sp = power_spectrum(s);
    double total = 0.0;
    for (double p : sp.psd) total += p * sp.bin_width;
    double ms = 0.0;
    for (double x : s.samples) ms += x * x / s.samples.size();
    CHECK(total == doctest::Approx(ms).epsilon(1e-9));
    CHECK(sp.bin_width == doctest::Approx(0.1));
    CHECK(spectral_peak(sp, 40, 60) == doctest::Approx(50.0).epsilon(1e-5));
}

TEST_CASE("two modes 0.3 Hz apart are resolved") {
    const double inf = std::numeric_limits<double>::infinity();
    auto a = synthesize_ringdown(169.0, inf, 1.0, 0.0, 20e3, 10.0);
    const auto b = synthesize_ringdown(169.3, inf, 1.0, 0.0, 20e3, 10.0);
    for (std::size_t i = 0; i < a.samples.size(); ++i) a.samples[i] += b.samples[i];
    const auto sp = power_spectrum(a);
    const auto bin = [&](double f) { return static_cast<std::size_t>(std::lround(f / sp.bin_width)); };
    CHECK(sp.psd[bin(169.0)] > 10 * sp.psd[bin(169.1)]);
    CHECK(sp.psd[bin(169.3)] > 10 * sp.psd[bin(169.2)]);
}

TEST_CASE("band-pass design") {
    const double fs = 20e3;
    const auto bp = design_band_pass(150, 190, fs, 4);
    CHECK(bp.sections.size() == 4);
    const double centre = std::sqrt(150.0 * 190.0);
    CHECK(band_gain(bp, centre, fs) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(band_gain(bp, 150, fs) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
    CHECK(band_gain(bp, 190, fs) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
    CHECK(band_gain(bp, 380, fs) < 1e-3);
    CHECK_THROWS_AS(band_pass(synthesize_ringdown(10, 1, 1, 0, fs, 1), 190, 150), DomainError);
}

TEST_CASE("out-of-band tone is strongly attenuated by the zero-phase filter") {
    const auto t = synthesize_ringdown(380, std::numeric_limits<double>::infinity(), 1.0, 0.0, 20e3, 10.0);
    const auto y = band_pass(t, 150, 190);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 20000; i + 20000 < y.samples.size(); ++i) {
        a += t.samples[i] * t.samples[i];
        b += y.samples[i] * y.samples[i];
    }
    CHECK(10 * std::log10(a / b) > 100.0);
}

TEST_CASE("analytic envelope of a steady tone is flat") {
    const auto t = synthesize_ringdown(100, std::numeric_limits<double>::infinity(), 1.5, 0.0, 10e3, 2.0);
    const auto e = analytic_envelope(t);
    for (std::size_t i = e.size() / 10; i < 9 * e.size() / 10; ++i) CHECK(e[i] == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("non-decaying input is refused") {
    const auto t = synthesize_ringdown(380, std::numeric_limits<double>::infinity(), 1.0, 0.0, 20e3, 10.0);
    CHECK_THROWS_AS(analyze_ringdown(t, 350, 400), NumericalError);
}

TEST_CASE("Nyquist guard") {
    CHECK_THROWS_AS(synthesize_ringdown(600, 1.0, 1.0, 0.0, 1000.0, 1.0), DomainError);
}

TEST_CASE("noisy ring-down at 125 kHz, 10 seeds") {
    const double f = 169.0, tau = 1000.0 / (pi * f);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = synthesize_ringdown(f, tau, 1.0, 0.1, 125e3, 10.0, seed);
        worst = std::max(worst, std::abs(analyze_ringdown(s, 150, 190).tau / tau - 1.0));
    }
    CHECK(worst < 0.02);
}

TEST_CASE("record readers") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto csv = dir / "levitrap_ringdown_test.csv";
    {
        std::ofstream o(csv);
        o << "# header\n0.5\n-0.25\n1e-3\n";
    }
    const auto s = read_ringdown_csv(csv, 1000.0);
    REQUIRE(s.samples.size() == 3);
    CHECK(s.samples[1] == -0.25);
    CHECK(s.sample_rate == 1000.0);
    const auto raw = dir / "levitrap_ringdown_test.bin";
    {
        std::ofstream o(raw, std::ios::binary);
        const unsigned char bytes[] = {0x01, 0x00, 0xff, 0xff, 0x00, 0x80};
        o.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
    }
    const auto r = read_ringdown_int16(raw, 10.0, 0.5);
    REQUIRE(r.samples.size() == 3);
    CHECK(r.samples[0] == 0.5);
    CHECK(r.samples[1] == -0.5);
    CHECK(r.samples[2] == -16384.0);
    std::filesystem::remove(csv);
    std::filesystem::remove(raw);
}
