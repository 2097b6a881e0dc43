#include "levitrap/beanlab.hpp"
#include "levitrap/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

using namespace levitrap;
using namespace levitrap::bean;

TEST_CASE("closed-form critical current densities with the published inputs") {
    CHECK(jc_cylinder(1.6e-4, 0.835e-3, 2.28e-9) == doctest::Approx(2.5e8).epsilon(0.05));
    const auto d = slit_ring_dims(0.756e-3, 1.948e-3);
    CHECK(d.width == doctest::Approx(0.596e-3).epsilon(1e-12));
    CHECK(d.length == doctest::Approx(3.14159265358979 * (0.756e-3 + 1.948e-3) / 4).epsilon(1e-12));
    CHECK(jc_slit_ring(0.89e-3, d.width, d.length, 2.63e-9) == doctest::Approx(2.5e9).epsilon(0.05));
}

TEST_CASE("J_c homogeneity") {
    const double m = 1.6e-4, a = 0.835e-3, v = 2.28e-9;
    CHECK(jc_cylinder(2 * m, a, v) == doctest::Approx(2 * jc_cylinder(m, a, v)).epsilon(1e-12));
    CHECK(jc_cylinder(m, 3 * a, v) == doctest::Approx(jc_cylinder(m, a, v) / 3).epsilon(1e-12));
    const double w = 0.6e-3, b = 2.1e-3;
    CHECK(jc_slit_ring(2 * m, w, b, v) == doctest::Approx(2 * jc_slit_ring(m, w, b, v)).epsilon(1e-12));
    CHECK(jc_slit_ring(m, 3 * w, 3 * b, v) == doctest::Approx(jc_slit_ring(m, w, b, v) / 3).epsilon(1e-12));
    CHECK_THROWS_AS(jc_slit_ring(m, b, b, v), DomainError);
    CHECK_THROWS_AS(jc_slit_ring(m, 0.0, b, v), DomainError);
}

TEST_CASE("emu conversion round-trips") {
    for (double x : {0.16, 1e-7, 3.3}) {
        CHECK(si_to_emu(emu_to_si(x)) == x);
        CHECK(emu_to_si(x) == doctest::Approx(x * 1e-3).epsilon(1e-15));
    }
}

TEST_CASE("H_pen(T) fit recovers noiseless synthetic parameters") {
    for (double gamma : {1.5, 2.13, 3.0}) {
        HpenFit truth;
        truth.hpen0 = 0.122;
        truth.tc = 9.26;
        truth.gamma = gamma;
        std::vector<HpenSample> s;
        for (double t = 2.0; t <= 9.0; t += 0.5) s.push_back({t, truth(t)});
        const auto fit = fit_hpen_curve(s);
        CHECK(fit.hpen0 == doctest::Approx(0.122).epsilon(1e-3));
        CHECK(fit.tc == doctest::Approx(9.26).epsilon(1e-3));
        CHECK(fit.gamma == doctest::Approx(gamma).epsilon(1e-3));
        const auto fixed = fit_hpen_curve(s, 9.26);
        CHECK(fixed.tc_fixed);
        CHECK(fixed.gamma == doctest::Approx(gamma).epsilon(1e-3));
    }
    HpenFit f;
    f.hpen0 = 0.1;
    f.tc = 9.0;
    f.gamma = 2.0;
    CHECK(f(9.0) == 0.0);
    CHECK(f(12.0) == 0.0);
    CHECK_THROWS(fit_hpen_curve({{2, 0.1}, {3, 0.09}, {4, 0.08}}));
}

TEST_CASE("H_pen extraction from virgin branches") {
    std::vector<MagnetometryCurve> curves;
    for (double t : {2.0, 4.0, 6.0})
        curves.push_back(synthetic_virgin_curve(t, 0.1 - 0.01 * t, -1e-4, 0.3, 301));
    auto s = extract_hpen(curves);
    REQUIRE(s.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s[i].temperature == curves[i].fixed);
        CHECK(std::abs(s[i].field - (0.1 - 0.01 * curves[i].fixed)) <= 1e-3);
    }
    // Sign of the moment does not matter.
    for (auto& c : curves)
        for (double& m : c.moment) m = -m;
    const auto flipped = extract_hpen(curves);
    for (std::size_t i = 0; i < 3; ++i) CHECK(flipped[i].field == s[i].field);

    MagnetometryCurve loop = curves[0];
    loop.branch.assign(loop.moment.size(), Branch::increasing);
    CHECK_THROWS_AS(extract_hpen({loop}), ValidationError);
}

TEST_CASE("transition onset") {
    const double tc = 9.26;
    double worst = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0.0, 0.01);
        MagnetometryCurve mt;
        mt.kind = CurveKind::moment_vs_temperature;
        for (double t = 2.0; t <= 12.0 + 1e-9; t += 0.05) {
            mt.abscissa.push_back(t);
            mt.moment.push_back((t < tc ? -(1.0 - std::pow(t / tc, 4)) : 0.0) + n(rng));
        }
        worst = std::max(worst, std::abs(detect_tc(mt) - tc));
    }
    CHECK(worst < 0.1);

    MagnetometryCurve flat;
    flat.kind = CurveKind::moment_vs_temperature;
    for (double t = 2.0; t <= 12.0; t += 0.1) {
        flat.abscissa.push_back(t);
        flat.moment.push_back(1e-6);
    }
    CHECK_THROWS_AS(detect_tc(flat), NumericalError);
}

TEST_CASE("J_c surface from loops is half the branch width") {
    MagnetometryCurve c;
    c.fixed = 4.0;
    const double mirr = 2e-5;
    for (int i = 0; i <= 10; ++i) c.abscissa.push_back(0.01 * i), c.moment.push_back(-mirr), c.branch.push_back(Branch::virgin);
    for (int i = 10; i >= -10; --i) c.abscissa.push_back(0.01 * i), c.moment.push_back(mirr - 1e-4 * i), c.branch.push_back(Branch::decreasing);
    for (int i = -10; i <= 10; ++i) c.abscissa.push_back(0.01 * i), c.moment.push_back(-mirr - 1e-4 * i), c.branch.push_back(Branch::increasing);
    SampleShape shape{SampleGeometry::cylinder, 0.835e-3, 0.0, 2.28e-9};
    const auto s = jc_surface({c}, shape, {0.0, 0.05, 0.1});
    for (double j : s.jc[0]) CHECK(j == doctest::Approx(jc_cylinder(mirr, shape.a, shape.volume)).epsilon(1e-12));
    const auto fp = pinning_force_map(s);
    CHECK(fp[0][2] == doctest::Approx(s.jc[0][2] * 0.1).epsilon(1e-12));
    const auto masked = jc_surface({c}, shape, {0.0, 0.05, 0.1}, 0.07);
    CHECK(masked.jc[0][2] == 0.0);
    CHECK(masked.jc[0][1] > 0.0);
}

TEST_CASE("CSV schema round trip") {
    const std::string text =
        "# kind = MH\n# fixed = 4.6 K\n# moment_unit = emu\n# abscissa_unit = mT\n"
        "H,m,branch\n0,0,v\n10,-0.05,v\n20,-0.08,v\n20,0.07,d\n0,0.02,d\n";
    const auto c = parse_curve_csv(text);
    CHECK(c.kind == CurveKind::moment_vs_field);
    CHECK(c.fixed == doctest::Approx(4.6));
    REQUIRE(c.abscissa.size() == 5);
    CHECK(c.abscissa[1] == doctest::Approx(0.01));
    CHECK(c.moment[2] == doctest::Approx(-0.08e-3));
    CHECK(c.branch[3] == Branch::decreasing);
    const auto again = parse_curve_csv(write_curve_csv(c));
    REQUIRE(again.moment.size() == c.moment.size());
    for (std::size_t i = 0; i < c.moment.size(); ++i) {
        CHECK(again.abscissa[i] == doctest::Approx(c.abscissa[i]).epsilon(1e-11));
        CHECK(again.moment[i] == doctest::Approx(c.moment[i]).epsilon(1e-11));
    }
    CHECK(again.branch == c.branch);
    CHECK(again.fixed == doctest::Approx(c.fixed));
    CHECK_THROWS_AS(parse_curve_csv("# kind = MH\n0,1\n1,abc\n"), ParseError);
    CHECK_THROWS_AS(parse_curve_csv("# kind = MH\n0,1,v\n0,2,v\n"), ValidationError);
}

TEST_CASE("reconstructed Nb data yields the published H_pen(0) band") {
    const std::string dir = std::string(LEVITRAP_DATA_DIR) + "/bean/";
    std::vector<MagnetometryCurve> curves;
    for (const char* t : {"2", "3", "4", "4.6", "5", "6", "7", "8", "9"})
        curves.push_back(read_curve_csv(dir + "nb_mh_" + t + "K.csv"));
    const auto fit = fit_hpen_curve(extract_hpen(curves));
    CHECK(fit.hpen0 >= 0.101);
    CHECK(fit.hpen0 <= 0.143);
    const auto mt = read_curve_csv(dir + "nb_mt.csv");
    CHECK(detect_tc(mt) == doctest::Approx(9.26).epsilon(0.01));
}
