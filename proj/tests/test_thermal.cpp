#include "levitrap/errors.hpp"
#include "levitrap/thermal.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace levitrap::thermal;

TEST_CASE("Debye heat capacity") {
    const double td = 531.0, coeff = 2085.0;
    CHECK(debye_heat_capacity(246.0, td, coeff) == doctest::Approx(556.6).epsilon(0.01));
    // High-temperature limit: the integral tends to x^3 / 3.
    CHECK(debye_heat_capacity(1e5, td, coeff) == doctest::Approx(coeff / 3.0).epsilon(0.01));
    // Low-temperature law: C ~ T^3, with the integral tending to 4 pi^4 / 15.
    const double x = std::log(10.0 / 2.0);
    const double slope = std::log(debye_heat_capacity(10.0, td, coeff) / debye_heat_capacity(2.0, td, coeff)) / x;
    CHECK(slope == doctest::Approx(3.0).epsilon(0.05 / 3.0));
    const double pi = 3.14159265358979323846;
    CHECK(debye_integral(500.0) == doctest::Approx(4 * std::pow(pi, 4) / 15).epsilon(1e-10));
    double prev = 0.0;
    for (double t = 1.0; t < 600.0; t *= 1.5) {
        const double c = debye_heat_capacity(t, td, coeff);
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("Debye integral small-x series") {
    // x^4 e^x / (e^x - 1)^2 ~ x^2 near 0, so the integral ~ x^3 / 3.
    CHECK(debye_integral(1e-3) == doctest::Approx(1e-9 / 3.0).epsilon(1e-6));
}

TEST_CASE("equilibrium temperature inverts the heating energy") {
    const double m = 0.339e-6, td = 531.0, coeff = 2085.0;
    const double t2 = equilibrium_temperature(23.5e-3, m, 4.0, td, coeff);
    CHECK(t2 == doctest::Approx(246.0).epsilon(10.0 / 246.0));
    CHECK(heating_energy(4.0, t2, m, td, coeff) == doctest::Approx(23.5e-3).epsilon(1e-6));
    CHECK(equilibrium_temperature(0.0, m, 4.0, td, coeff) == 4.0);
    const double de = 1e-12;
    const double small = equilibrium_temperature(de, m, 4.0, td, coeff);
    CHECK(small - 4.0 == doctest::Approx(de / (m * debye_heat_capacity(4.0, td, coeff))).epsilon(0.01));
}

TEST_CASE("optical chain limits") {
    CHECK(intercepted_power(5e-3, 0.9e-3, 1e-9) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(intercepted_power(5e-3, 0.9e-3, 0.5e-3) <= 5e-3);
    const double big = intercepted_power(5e-3, 0.9e-3, 1.0);
    CHECK(intercepted_power(5e-3, 0.9e-3, 2.0) == doctest::Approx(big).epsilon(1e-9));
    CHECK(absorbed_power(2.8e-3, 1.0, 1e5, 0.5e-3) == 0.0);
    CHECK(absorbed_power(2.8e-3, 0.17, 0.0, 0.5e-3) == 0.0);
    CHECK(absorbed_power(2.8e-3, 0.17, 1e5, 0.5e-3) == doctest::Approx(0.83 * 2.8e-3).epsilon(1e-12));
    CHECK_THROWS_AS(intercepted_power(5e-3, 0.0, 0.5e-3), levitrap::DomainError);
}

TEST_CASE("heat paths vanish at the bath temperature and grow with T2") {
    ThermalConfig c;
    const auto r0 = heat_path_report(c, c.bath_temperature);
    CHECK(r0.conduction_capacity == 0.0);
    CHECK(r0.radiative_power == 0.0);
    CHECK(r0.gas_conduction == 0.0);
    double pc = 0.0, pr = 0.0, pg = 0.0;
    for (double t : {5.0, 50.0, 246.0}) {
        const auto r = heat_path_report(c, t);
        CHECK(r.conduction_capacity > pc);
        CHECK(r.radiative_power > pr);
        CHECK(r.gas_conduction > pg);
        pc = r.conduction_capacity;
        pr = r.radiative_power;
        pg = r.gas_conduction;
    }
}

TEST_CASE("budget carries the published comparisons") {
    const auto r = thermal_budget(ThermalConfig{});
    CHECK(r.intercepted_power <= 5e-3);
    CHECK(r.equilibrium_temperature >= 4.0);
    CHECK(r.comparisons.size() >= 6);
    for (const auto& c : r.comparisons) {
        CHECK(c.paper > 0.0);
        CHECK(std::isfinite(c.ratio()));
    }
}
