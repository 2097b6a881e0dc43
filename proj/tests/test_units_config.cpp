#include "levitrap/config.hpp"
#include "levitrap/errors.hpp"
#include "levitrap/units.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace levitrap;

TEST_CASE("quantities convert to SI") {
    CHECK(parse_quantity("20 um", Dim::length) == 20e-6);
    CHECK(parse_quantity("37.5mT", Dim::field) == 37.5e-3);
    CHECK(parse_quantity("5 Oe", Dim::field) == doctest::Approx(5e-4).epsilon(1e-15));
    CHECK(parse_quantity("0.16 emu", Dim::moment) == doctest::Approx(1.6e-4).epsilon(1e-15));
    CHECK(parse_quantity("125 kHz", Dim::frequency) == 125e3);
    CHECK(parse_quantity("0.25", Dim::length) == 0.25);
}

TEST_CASE("wrong or unknown units are rejected") {
    CHECK_THROWS_AS(parse_quantity("3 mT", Dim::length), ParseError);
    CHECK_THROWS_AS(parse_quantity("3 furlong", Dim::length), ParseError);
    CHECK_THROWS_AS(parse_quantity("abc", Dim::length), ParseError);
}

TEST_CASE("a unit on the last vector component applies to bare ones") {
    const Vec3 v = parse_vec3("10, 10, -3 mm", Dim::length);
    CHECK(v.x == 10e-3);
    CHECK(v.y == 10e-3);
    CHECK(v.z == -3e-3);
    const Vec3 w = parse_vec3("1 mm, 2 um, 3", Dim::length);
    CHECK(w.x == 1e-3);
    CHECK(w.y == 2e-6);
    CHECK(w.z == 3.0);
}

TEST_CASE("serialized configs round-trip exactly") {
    for (const auto& c : {table1_config(), niobium_config()}) {
        const std::string text = serialize_config(c);
        CHECK(serialize_config(load_config(text)) == text);
    }
}

TEST_CASE("shipped config files equal the built-in parameter sets") {
    const std::string dir = LEVITRAP_DATA_DIR;
    CHECK(serialize_config(load_config_file(dir + "/table1.cfg")) == serialize_config(table1_config()));
    CHECK(serialize_config(load_config_file(dir + "/nb.cfg")) == serialize_config(niobium_config()));
}

TEST_CASE("derived sphere quantities") {
    const auto c = table1_config();
    const double r = 0.25e-3;
    CHECK(c.sphere.volume() == doctest::Approx(4.0 / 3.0 * constants::pi * r * r * r).epsilon(1e-12));
    CHECK(c.sphere.mass() == doctest::Approx(c.sphere.volume() * 5172.0).epsilon(1e-12));
}

TEST_CASE("parse errors carry the line number and key") {
    try {
        load_config("[sphere]\ndiameter = 0.5 mm\ndensity = 12 mT\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.key() == "density");
    }
}

TEST_CASE("geometry invariants are validated") {
    auto c = table1_config();
    c.ring.inner_diameter = c.ring.outer_diameter;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = table1_config();
    c.sphere.diameter = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = table1_config();
    c.thermal.reflectivity = 1.5;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("penetration table is interpolated and clamped") {
    const auto nb = niobium_config();
    CHECK(nb.ring.penetration_field_at(2.0) == doctest::Approx(0.116));
    CHECK(nb.ring.penetration_field_at(1.0) == doctest::Approx(0.116));
    CHECK(nb.ring.penetration_field_at(4.6) == doctest::Approx(0.094));
    CHECK(nb.ring.penetration_field_at(3.3) == doctest::Approx(0.116 + (0.094 - 0.116) * 1.3 / 2.6));
    CHECK(nb.ring.penetration_field_at(10.0) == doctest::Approx(0.0));
}

TEST_CASE("slit ring membership") {
    const auto c = table1_config();
    const double rmid = 0.5 * (c.ring.inner_radius() + c.ring.outer_radius());
    CHECK(c.ring.contains({rmid, 0.0, 0.0}));
    CHECK(c.ring.contains({-rmid, 0.0, 0.0}));
    CHECK_FALSE(c.ring.contains({0.0, rmid, 0.0}));  // slit on +y
    CHECK(c.ring.contains({0.0, -rmid, 0.0}));
    CHECK_FALSE(c.ring.contains({0.0, 0.0, 0.0}));
    CHECK_FALSE(c.ring.contains({rmid, 0.0, c.ring.height}));
}
