#include "levitrap/units.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/vec3.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace levitrap {

namespace {

struct UnitEntry {
    std::string_view suffix;
    double factor;
    Dim dim;
};

// clang-format off
constexpr std::array kUnits{
    UnitEntry{"m", 1.0, Dim::length},        UnitEntry{"cm", 1e-2, Dim::length},
    UnitEntry{"mm", 1e-3, Dim::length},      UnitEntry{"um", 1e-6, Dim::length},
    UnitEntry{"nm", 1e-9, Dim::length},
    UnitEntry{"m2", 1.0, Dim::area},         UnitEntry{"mm2", 1e-6, Dim::area},
    UnitEntry{"m3", 1.0, Dim::volume},       UnitEntry{"mm3", 1e-9, Dim::volume},
    UnitEntry{"T", 1.0, Dim::field},         UnitEntry{"mT", 1e-3, Dim::field},
    UnitEntry{"uT", 1e-6, Dim::field},       UnitEntry{"Oe", 1e-4, Dim::field},
    UnitEntry{"T/A", 1.0, Dim::field_per_current}, UnitEntry{"mT/A", 1e-3, Dim::field_per_current},
    UnitEntry{"A", 1.0, Dim::current},       UnitEntry{"mA", 1e-3, Dim::current},
    UnitEntry{"kg/m3", 1.0, Dim::density},   UnitEntry{"g/cm3", 1e3, Dim::density},
    UnitEntry{"S/m", 1.0, Dim::conductivity},
    UnitEntry{"A/m", 1.0, Dim::magnetization}, UnitEntry{"kA/m", 1e3, Dim::magnetization},
    UnitEntry{"Am2", 1.0, Dim::moment},      UnitEntry{"A.m2", 1.0, Dim::moment},
    UnitEntry{"emu", 1e-3, Dim::moment},
    UnitEntry{"deg", 1.0, Dim::angle},
    UnitEntry{"K", 1.0, Dim::temperature},
    UnitEntry{"Pa", 1.0, Dim::pressure},     UnitEntry{"mbar", 100.0, Dim::pressure},
    UnitEntry{"m/s2", 1.0, Dim::acceleration},
    UnitEntry{"s", 1.0, Dim::time},          UnitEntry{"ms", 1e-3, Dim::time},
    UnitEntry{"us", 1e-6, Dim::time},
    UnitEntry{"Hz", 1.0, Dim::frequency},    UnitEntry{"kHz", 1e3, Dim::frequency},
    UnitEntry{"W", 1.0, Dim::power},         UnitEntry{"mW", 1e-3, Dim::power},
    UnitEntry{"uW", 1e-6, Dim::power},
    UnitEntry{"J", 1.0, Dim::energy},        UnitEntry{"mJ", 1e-3, Dim::energy},
    UnitEntry{"kg", 1.0, Dim::mass},         UnitEntry{"mg", 1e-6, Dim::mass},
    UnitEntry{"1/m", 1.0, Dim::inverse_length}, UnitEntry{"1/cm", 1e2, Dim::inverse_length},
    UnitEntry{"W/mK", 1.0, Dim::thermal_conductivity},
    UnitEntry{"J/kgK", 1.0, Dim::specific_heat},
    UnitEntry{"A/m2", 1.0, Dim::current_density},
};
// clang-format on

// value * factor, done in decimal when the factor is a power of ten so that "20 um"
// parses to exactly the same double as 20e-6.
double scaled(std::string_view number, double value, double factor) {
    const double k = std::round(std::log10(factor));
    if (std::pow(10.0, k) != factor) return value * factor;
    std::string mant(number);
    long exp10 = static_cast<long>(k);
    const auto e = mant.find_first_of("eE");
    if (e != std::string::npos) {
        exp10 += std::stol(mant.substr(e + 1));
        mant.resize(e);
    }
    const std::string joined = mant + "e" + std::to_string(exp10);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(joined.data(), joined.data() + joined.size(), out);
    if (ec != std::errc() || ptr != joined.data() + joined.size()) return value * factor;
    return out;
}

}  // namespace

std::string_view dim_name(Dim d) {
    switch (d) {
        case Dim::dimensionless: return "dimensionless";
        case Dim::length: return "length";
        case Dim::area: return "area";
        case Dim::volume: return "volume";
        case Dim::field: return "magnetic flux density";
        case Dim::field_per_current: return "field per current";
        case Dim::current: return "current";
        case Dim::density: return "density";
        case Dim::conductivity: return "conductivity";
        case Dim::magnetization: return "magnetization";
        case Dim::moment: return "magnetic moment";
        case Dim::angle: return "angle";
        case Dim::temperature: return "temperature";
        case Dim::pressure: return "pressure";
        case Dim::acceleration: return "acceleration";
        case Dim::time: return "time";
        case Dim::frequency: return "frequency";
        case Dim::power: return "power";
        case Dim::energy: return "energy";
        case Dim::mass: return "mass";
        case Dim::inverse_length: return "inverse length";
        case Dim::thermal_conductivity: return "thermal conductivity";
        case Dim::specific_heat: return "specific heat";
        case Dim::current_density: return "current density";
    }
    return "?";
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_quantity(std::string_view text, Dim expected) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError("empty value where a " + std::string(dim_name(expected)) + " was expected");

    double value = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc()) throw ParseError("not a number: '" + t + "'");

    const std::string suffix = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
    if (suffix.empty()) return value;

    for (const auto& u : kUnits) {
        if (u.suffix == suffix) {
            if (u.dim != expected) {
                throw ParseError("unit '" + suffix + "' is a " + std::string(dim_name(u.dim)) + ", expected " +
                                 std::string(dim_name(expected)));
            }
            return scaled(std::string_view(first, static_cast<std::size_t>(ptr - first)), value, u.factor);
        }
    }
    throw ParseError("unknown unit suffix '" + suffix + "'");
}

Vec3 parse_vec3(std::string_view text, Dim expected) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3) throw ParseError("expected three comma-separated components");
    // "1, 2, 3 mm": a unit on the last component applies to bare leading ones.
    auto suffix_of = [](const std::string& p) {
        const std::string t = trim(p);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        return ec == std::errc() ? trim(std::string_view(ptr, static_cast<std::size_t>(t.data() + t.size() - ptr)))
                                 : std::string();
    };
    const std::string unit = suffix_of(parts[2]);
    if (!unit.empty()) {
        for (int i = 0; i < 2; ++i)
            if (suffix_of(parts[i]).empty()) parts[i] = trim(parts[i]) + " " + unit;
    }
    return {parse_quantity(parts[0], expected), parse_quantity(parts[1], expected),
            parse_quantity(parts[2], expected)};
}

}  // namespace levitrap
