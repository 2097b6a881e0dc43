#include "levitrap/dynamics.hpp"
#include "levitrap/units.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace levitrap;
using constants::pi;

namespace {

constexpr double kMass = 3.385e-7;
const std::array<double, 3> kStiff{0.675, 0.456, 0.0577};

double freq(double k) { return std::sqrt(k / kMass) / (2 * pi); }

double stable_dt(double period) { return std::min(period / 500.0, 1.0 / (50.0 * freq(kStiff[0]))); }

class ZeroField final : public ForceField {
public:
    Vec3 force(const Vec3&) const override { return {}; }
    std::optional<double> potential(const Vec3&) const override { return 0.0; }
    bool contains(const Vec3&) const override { return true; }
    double max_stiffness() const override { return 1e-6; }
};

class BoxField final : public ForceField {
public:
    Vec3 force(const Vec3&) const override { return {}; }
    bool contains(const Vec3& p) const override { return std::abs(p.z) < 1e-3; }
    double max_stiffness() const override { return 1e-6; }
};

}  // namespace

TEST_CASE("harmonic oscillator: period and energy over 100 cycles") {
    HarmonicForceField h({0, 0, 0}, kStiff, {0, 0, kMass * 9.81});
    const double f0 = freq(kStiff[2]);
    const double period = 1.0 / f0;
    DynamicsOptions o;
    o.mass = kMass;
    const auto tr = integrate_motion(h, {0, 0, 25e-6}, {}, stable_dt(period), 100 * period, o);
    REQUIRE(!tr.energy.empty());
    double drift = 0.0;
    for (double e : tr.energy) drift = std::max(drift, std::abs(e - tr.energy.front()));
    CHECK(drift / std::abs(tr.energy.front()) < 1e-4);
    const auto fit = fit_sine_frequency(tr, 2);
    CHECK(fit.frequency == doctest::Approx(f0).epsilon(1e-4));
    CHECK(fit.amplitude == doctest::Approx(25e-6).epsilon(1e-3));
}

TEST_CASE("free flight is uniform motion") {
    ZeroField z;
    DynamicsOptions o;
    o.mass = 1e-6;
    o.gravity = 0.0;
    const Vec3 v{1e-3, -2e-3, 0.5e-3};
    const auto tr = integrate_motion(z, {}, v, 1e-4, 0.1, o);
    const Vec3 end = tr.positions.back();
    const double t = tr.times.back();
    CHECK(end.x == doctest::Approx(v.x * t).epsilon(1e-12));
    CHECK(end.y == doctest::Approx(v.y * t).epsilon(1e-12));
    CHECK(end.z == doctest::Approx(v.z * t).epsilon(1e-12));
}

TEST_CASE("damped envelope decays as exp(-gamma t / 2)") {
    HarmonicForceField h({0, 0, 0}, kStiff, {0, 0, kMass * 9.81});
    DynamicsOptions o;
    o.mass = kMass;
    o.damping_rate = 2.0;
    const double period = 1.0 / freq(kStiff[2]);
    const auto tr = integrate_motion(h, {0, 0, 25e-6}, {}, stable_dt(period), 3.0, o);
    // Peak of |z| over the last two periods, compared at the centre of that window.
    const std::size_t n = tr.times.size();
    const auto window = static_cast<std::size_t>(2.0 * period / tr.dt);
    double peak = 0.0;
    double t_peak = 0.0;
    for (std::size_t i = n - window; i < n; ++i)
        if (std::abs(tr.positions[i].z) > peak) peak = std::abs(tr.positions[i].z), t_peak = tr.times[i];
    CHECK(peak / 25e-6 == doctest::Approx(std::exp(-0.5 * o.damping_rate * t_peak)).epsilon(0.01));
}

TEST_CASE("time step above 1/(50 f_max) is rejected") {
    HarmonicForceField h({0, 0, 0}, kStiff);
    DynamicsOptions o;
    o.mass = kMass;
    o.gravity = 0.0;
    CHECK_THROWS_AS(integrate_motion(h, {}, {}, 1.0 / (40.0 * freq(kStiff[0])), 0.1, o), DomainError);
}

TEST_CASE("leaving the field domain raises an escape error with its time") {
    BoxField b;
    DynamicsOptions o;
    o.mass = 1e-6;
    o.gravity = 0.0;
    try {
        integrate_motion(b, {}, {0, 0, 1.0}, 1e-5, 1.0, o);
        FAIL("expected an escape");
    } catch (const TrajectoryEscapeError& e) {
        CHECK(e.time() == doctest::Approx(1e-3).epsilon(0.02));
        CHECK(e.position().z >= 1e-3);
    }
}

TEST_CASE("lattice interpolation is exact for a linear force field") {
    const Vec3 c{1e-6, -2e-6, -70e-6};
    HarmonicForceField h(c, kStiff, {0, 0, 3e-6});
    const Vec3 sp{25e-6, 25e-6, 25e-6};
    const std::array<int, 3> counts{3, 3, 7};
    std::vector<Vec3> f;
    const Vec3 origin = c - Vec3{sp.x, sp.y, 3 * sp.z};
    for (int k = 0; k < counts[2]; ++k)
        for (int j = 0; j < counts[1]; ++j)
            for (int i = 0; i < counts[0]; ++i) f.push_back(h.force(origin + Vec3{i * sp.x, j * sp.y, k * sp.z}));
    LatticeForceField lat(origin, sp, counts, f);
    for (const Vec3 d : {Vec3{3e-6, -7e-6, 11e-6}, Vec3{-20e-6, 15e-6, -60e-6}, Vec3{0, 0, 0}}) {
        const Vec3 p = c + d;
        REQUIRE(lat.contains(p));
        CHECK(norm(lat.force(p) - h.force(p)) < 1e-12 * norm(h.force(p)) + 1e-18);
    }
    CHECK_FALSE(lat.contains(c + Vec3{0, 0, 100e-6}));
    CHECK(lat.max_stiffness() >= kStiff[0] * 0.999);
}

TEST_CASE("sine fit") {
    const double fs = 125e3;
    SUBCASE("clean 169 Hz") {
        std::vector<double> v;
        for (int i = 0; i < fs * 0.1; ++i) v.push_back(std::sin(2 * pi * 169.0 * i / fs + 0.4) + 0.2);
        const auto fit = fit_sine(v, 1.0 / fs);
        CHECK(fit.frequency == doctest::Approx(169.0).epsilon(1e-6));
        CHECK(fit.offset == doctest::Approx(0.2).epsilon(1e-6));
        CHECK(std::abs(fit.amplitude) == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("10 % white noise, 100 seeds") {
        double worst = 0.0;
        for (int seed = 0; seed < 100; ++seed) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> n(0.0, 0.1);
            std::vector<double> v;
            for (int i = 0; i < fs * 0.1; ++i) v.push_back(std::sin(2 * pi * 169.0 * i / fs + 0.3) + n(rng));
            worst = std::max(worst, std::abs(fit_sine(v, 1.0 / fs).frequency / 169.0 - 1.0));
        }
        CHECK(worst < 1e-3);
    }
    SUBCASE("too few cycles") {
        std::vector<double> v;
        for (int i = 0; i < 1000; ++i) v.push_back(std::sin(2 * pi * 5.0 * i / 1000.0));
        CHECK_THROWS_AS(fit_sine(v, 1e-3), DomainError);
    }
    SUBCASE("pure noise fails the residual check") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> n(0.0, 1.0);
        std::vector<double> v;
        for (int i = 0; i < 20000; ++i) v.push_back(n(rng));
        CHECK_THROWS(fit_sine(v, 1e-4));
    }
}
