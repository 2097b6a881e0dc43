#include "levitrap/errors.hpp"
#include "levitrap/mechanics.hpp"
#include "levitrap/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace levitrap;

namespace {

ForceMap harmonic_map(double k, double z0, double bias, int n, double h) {
    ForceMap m;
    for (int i = 0; i < n; ++i) {
        const double z = z0 + (i - n / 2) * h;
        m.positions.push_back({0.0, 0.0, z});
        m.forces.push_back({0.0, 0.0, -k * (z - z0) + bias});
    }
    return m;
}

}  // namespace

TEST_CASE("linear restoring force gives the quadratic potential") {
    const double k = 0.05;
    const auto m = harmonic_map(k, -70e-6, 0.0, 5, 25e-6);
    const auto p = trap_potential(m, ScanAxis::z, {0, 0, 1});
    for (std::size_t i = 0; i < p.offsets.size(); ++i) {
        const double s = p.offsets[i] - p.offsets[2];
        CHECK(p.potential[i] == doctest::Approx(0.5 * k * s * s).epsilon(1e-12));
    }
    CHECK(profile_stiffness(p) == doctest::Approx(k).epsilon(1e-10));
}

TEST_CASE("gravity enters the scan as a constant force") {
    const double k = 0.05, w = 3.3e-6;
    // Magnetic force balances the weight at z0, so the total potential still has its minimum there.
    const auto m = harmonic_map(k, 0.0, w, 7, 10e-6);
    const auto p = trap_potential(m, ScanAxis::z, {0, 0, 1}, w);
    CHECK(p.potential[3] == doctest::Approx(0.0).epsilon(1e-18));
    CHECK(profile_stiffness(p) == doctest::Approx(k).epsilon(1e-10));
}

TEST_CASE("trap frequency from stiffness") {
    const double k = 0.0577, m = 3.385e-7;
    CHECK(frequency_from_stiffness(k, m) == doctest::Approx(std::sqrt(k / m) / (2 * constants::pi)).epsilon(1e-15));
    CHECK(frequency_from_stiffness(-1.0, m) == 0.0);
}

TEST_CASE("non-monotone scans are rejected") {
    ForceMap m;
    m.positions = {{0, 0, 0}, {0, 0, 1e-6}, {0, 0, 0.5e-6}};
    m.forces.resize(3);
    CHECK_THROWS_AS(trap_potential(m, ScanAxis::z, {0, 0, 1}), ValidationError);
}

TEST_CASE("force model: mirror symmetry, I^2 scaling and lift-off monotonicity") {
    const auto c = table1_config();
    ForceModel model(c);
    REQUIRE(model.mirror_x());
    const Vec3 p{20e-6, 0.0, -60e-6};
    const Vec3 f = model.unit_force(p);
    const Vec3 g = model.unit_force({-p.x, p.y, p.z});
    CHECK(g.x == -f.x);
    CHECK(g.y == f.y);
    CHECK(g.z == f.z);
    CHECK(model.force(p, 0.3).z == doctest::Approx(0.09 * f.z).epsilon(1e-15));
    CHECK(model.solves() == 1);

    const auto base = liftoff_threshold(model);
    CHECK(base.field > 0.0);

    auto heavy = c;
    heavy.sphere.material.density *= 2.0;
    ForceModel hm(heavy);
    const auto h = liftoff_threshold(hm);
    CHECK(h.field > base.field);
    // Same geometry, so the unit force is identical and the threshold scales as sqrt(weight).
    CHECK(h.field == doctest::Approx(std::sqrt(2.0) * base.field).epsilon(1e-9));

    auto weightless = c;
    weightless.ambient.gravity = 0.0;
    ForceModel wm(weightless);
    CHECK(liftoff_threshold(wm).field == 0.0);
}
