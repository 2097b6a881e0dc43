#include "levitrap/dissipation.hpp"
#include "levitrap/errors.hpp"
#include "levitrap/units.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>

using namespace levitrap;
using constants::mu0;
using constants::pi;

TEST_CASE("skin depth") {
    const double s = 6.58e9, f = 200.0;
    CHECK(skin_depth(s, f) == doctest::Approx(1.0 / std::sqrt(pi * f * mu0 * s)).epsilon(1e-14));
    CHECK(skin_depth(s, f, 4.0) == doctest::Approx(0.5 * skin_depth(s, f)).epsilon(1e-14));
    CHECK(std::isinf(skin_depth(0.0, f)));
    CHECK_THROWS_AS(skin_depth(s, 0.0), DomainError);
    CHECK_THROWS_AS(skin_depth(-1.0, f), DomainError);
}

TEST_CASE("voxelized volumes") {
    ConductorSpec tube;
    tube.shape = ConductorShape::tube;
    tube.inner_radius = 1.137e-3;
    tube.outer_radius = 1.55e-3;
    tube.z_min = -1e-3;
    tube.z_max = 2e-3;
    double v = 0.0;
    for (const auto& x : voxelize(tube, {0, 0, 0}, 50e-6, 0.04)) v += x.volume;
    const double exact = pi * (tube.outer_radius * tube.outer_radius - tube.inner_radius * tube.inner_radius) * 3e-3;
    CHECK(v == doctest::Approx(exact).epsilon(2e-3));

    ConductorSpec box;
    box.shape = ConductorShape::box;
    box.box_min = {-2e-3, -1e-3, -3e-3};
    box.box_max = {2e-3, 1.5e-3, -2.5e-3};
    v = 0.0;
    for (const auto& x : voxelize(box, {0, 0, 0}, 50e-6, 0.04)) v += x.volume;
    CHECK(v == doctest::Approx(4e-3 * 2.5e-3 * 0.5e-3).epsilon(1e-9));
}

TEST_CASE("eddy losses of an axial oscillation inside a tube") {
    auto c = table1_config();
    c.grid.fine_cell = 25e-6;
    c.grid.domain_half_extent = {2e-3, 2e-3, 2e-3};
    c.grid.fine_half_extent = {0.4e-3, 0.4e-3, 0.4e-3};
    c.ring.outer_diameter = 1.0e-3;
    c.ring.inner_diameter = 0.9e-3;
    c.sphere.material.conductivity = 0.0;
    ConductorSpec tube;
    tube.name = "tube";
    tube.inner_radius = 1.0e-3;
    tube.outer_radius = 1.2e-3;
    tube.z_min = -1e-3;
    tube.z_max = 1.5e-3;
    tube.conductivity = 1e8;
    c.conductors = {tube};

    FieldSolverOptions o;
    o.include_ring = false;
    FieldSolver fs(c, std::make_shared<UniformSource>(10e-3), o);
    const auto sol = fs.solve(Vec3{0, 0, 0}, 1.0);

    TrapResult trap;
    trap.field = 10e-3;
    trap.frequency = {0.0, 0.0, 100.0};
    const double amp = 5e-6;
    const auto r = eddy_dissipation_per_cycle(c, trap, sol, amp, ScanAxis::z);
    const double m = r.moment.z;
    REQUIRE(m > 0.0);

    // On-axis dipole moving along z: E_phi = (mu0 m / 4 pi) v 3 rho (z - z0) / R^5.
    const double w = 2 * pi * 100.0;
    const double k = mu0 * m / (4 * pi);
    auto inner = [&](double rho) {
        return boost::math::quadrature::gauss<double, 30>::integrate(
            [&](double z) {
                const double r2 = rho * rho + z * z;
                return 9.0 * rho * rho * z * z / std::pow(r2, 5) * 2 * pi * rho;
            },
            tube.z_min, tube.z_max);
    };
    const double integral =
        boost::math::quadrature::gauss<double, 30>::integrate(inner, tube.inner_radius, tube.outer_radius);
    const double expected = tube.conductivity * k * k * 0.5 * amp * amp * w * w * integral;
    CHECK(r.power == doctest::Approx(expected).epsilon(5e-3));
    CHECK(r.q == doctest::Approx(2 * pi * r.kinetic_energy / (r.power / 100.0)).epsilon(1e-12));

    SUBCASE("Q scales as 1/sigma") {
        auto c2 = c;
        c2.conductors[0].conductivity *= 2.0;
        const auto r2 = eddy_dissipation_per_cycle(c2, trap, sol, amp, ScanAxis::z);
        CHECK(r.q / r2.q == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("Q is amplitude independent at first order") {
        const auto r2 = eddy_dissipation_per_cycle(c, trap, sol, 2 * amp, ScanAxis::z);
        CHECK(r2.q == doctest::Approx(r.q).epsilon(1e-3));
    }
    SUBCASE("no conductors, no loss") {
        auto c2 = c;
        c2.conductors.clear();
        CHECK(std::isinf(eddy_dissipation_per_cycle(c2, trap, sol, amp, ScanAxis::z).q));
    }
    SUBCASE("thick conductors are flagged") {
        auto c2 = c;
        c2.conductors[0].conductivity = 1e12;
        CHECK_FALSE(eddy_dissipation_per_cycle(c2, trap, sol, amp, ScanAxis::z).warnings.empty());
    }
    SUBCASE("amplitude beyond the sphere radius is rejected") {
        CHECK_THROWS_AS(eddy_dissipation_per_cycle(c, trap, sol, 1e-3, ScanAxis::z), DomainError);
    }
}

TEST_CASE("power-law exponent") {
    const std::vector<double> x{1, 2, 4, 8};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
    const auto [p, e] = power_law_exponent(x, y);
    CHECK(p == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(e < 1e-10);
}

TEST_CASE("drive field guards") {
    const auto c = table1_config();
    CHECK_NOTHROW(check_field_guards(c, 50e-3));
    CHECK_THROWS_AS(check_field_guards(c, 0.3), ValidationError);  // above mu0 Ms
    const auto nb = niobium_config();
    CHECK_THROWS_AS(check_field_guards(nb, 0.12), ValidationError);  // above the Nb penetration field at 4 K
}
