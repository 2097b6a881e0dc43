#include "levitrap/coil.hpp"
#include "levitrap/errors.hpp"
#include "levitrap/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace levitrap;
using constants::mu0;
using constants::pi;

namespace {

// Direct Biot-Savart sum over a polygon with n sides.
Vec3 biot_savart_loop(double a, double z0, double current, const Vec3& p, int n = 20000) {
    Vec3 b;
    for (int i = 0; i < n; ++i) {
        const double t0 = 2.0 * pi * i / n;
        const double t1 = 2.0 * pi * (i + 1) / n;
        const Vec3 s0{a * std::cos(t0), a * std::sin(t0), z0};
        const Vec3 s1{a * std::cos(t1), a * std::sin(t1), z0};
        const Vec3 dl = s1 - s0;
        const Vec3 r = p - 0.5 * (s0 + s1);
        const double rn = norm(r);
        b += (mu0 * current / (4.0 * pi)) * cross(dl, r) / (rn * rn * rn);
    }
    return b;
}

}  // namespace

TEST_CASE("complete elliptic integrals") {
    double k = 0.0, e = 0.0;
    elliptic_ke(0.0, k, e);
    CHECK(k == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(e == doctest::Approx(pi / 2).epsilon(1e-14));
    elliptic_ke(0.5, k, e);
    CHECK(k == doctest::Approx(1.8540746773013719).epsilon(1e-13));
    CHECK(e == doctest::Approx(1.3506438810476755).epsilon(1e-13));
}

TEST_CASE("single loop on the axis matches the closed form to 1e-6") {
    const double a = 2e-3;
    const double i = 0.7;
    for (double z : {0.0, 0.5e-3, -1.3e-3, 4e-3}) {
        const double exact = mu0 * i * a * a / (2.0 * std::pow(a * a + z * z, 1.5));
        const Vec3 b = loop_field(a, 0.0, i, {0.0, 0.0, z});
        CHECK(b.z == doctest::Approx(exact).epsilon(1e-6));
        CHECK(std::abs(b.x) < 1e-12 * exact);
    }
}

TEST_CASE("off-axis loop field agrees with a direct Biot-Savart sum") {
    const double a = 1.5e-3;
    for (const Vec3 p : {Vec3{0.7e-3, 0.2e-3, 0.4e-3}, Vec3{2.5e-3, -1e-3, -0.3e-3}, Vec3{0.1e-3, 0.0, 1.5e-3}}) {
        const Vec3 b = loop_field(a, 0.2e-3, 1.0, p);
        const Vec3 ref = biot_savart_loop(a, 0.2e-3, 1.0, p);
        CHECK(norm(b - ref) < 1e-6 * norm(ref));
    }
}

TEST_CASE("loop field is divergence free") {
    const Vec3 p{0.6e-3, 0.3e-3, 0.25e-3};
    const double h = 1e-7;
    double div = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
        Vec3 e;
        e[ax] = h;
        div += (loop_field(1e-3, 0.0, 1.0, p + e)[ax] - loop_field(1e-3, 0.0, 1.0, p - e)[ax]) / (2 * h);
    }
    CHECK(std::abs(div) < 1e-6 * norm(loop_field(1e-3, 0.0, 1.0, p)) / 1e-3);
}

TEST_CASE("coil field is the sum of its loops") {
    CoilSpec c;
    const auto loops = coil_loops(c);
    CHECK(loops.size() == static_cast<std::size_t>(c.turns));
    const Vec3 p{0.3e-3, -0.2e-3, 0.4e-3};
    Vec3 sum;
    for (const auto& l : loops) sum += loop_field(l.radius, l.z, 0.3, p);
    CHECK(norm(coil_source_field(c, 0.3, p) - sum) < 1e-12 * norm(sum));
    for (const auto& l : loops) {
        CHECK(l.radius >= 0.5 * c.winding_inner_diameter);
        CHECK(l.radius <= 0.5 * c.winding_outer_diameter);
        CHECK(std::abs(l.z - c.center_z) <= 0.5 * c.height);
    }
}

TEST_CASE("tabulated coil source matches the direct sum") {
    CoilSpec c;
    CoilSource src(c, 3e-3, -3e-3, 3e-3, 10e-6);
    for (const Vec3 p : {Vec3{0.0, 0.0, 0.0}, Vec3{0.4e-3, 0.1e-3, -0.3e-3}, Vec3{-1e-3, 0.5e-3, 0.8e-3}}) {
        const Vec3 ref = coil_source_field(c, 1.0, p);
        CHECK(norm(src.field(p) - ref) < 1e-5 * norm(ref));
    }
}

TEST_CASE("the filament itself is rejected") {
    CHECK_THROWS_AS(loop_field(1e-3, 0.0, 1.0, {1e-3, 0.0, 0.0}), DomainError);
}
