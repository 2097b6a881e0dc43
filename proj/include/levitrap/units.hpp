#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace levitrap {

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double mu0 = 4.0e-7 * pi;          // H/m
inline constexpr double stefan_boltzmann = 5.67e-8;  // W/(m^2 K^4), value used in the heat budget
inline constexpr double emu_to_am2 = 1.0e-3;         // 1 emu = 1e-3 A m^2
}  // namespace constants

/// Physical dimension expected for a parsed quantity.
enum class Dim {
    dimensionless,
    length,
    area,
    volume,
    field,          // tesla
    field_per_current,
    current,
    density,
    conductivity,
    magnetization,  // A/m
    moment,         // A m^2
    angle,          // stored in degrees
    temperature,
    pressure,
    acceleration,
    time,
    frequency,
    power,
    energy,
    mass,
    inverse_length,
    thermal_conductivity,
    specific_heat,
    current_density,
};

std::string_view dim_name(Dim d);

/// Parses "<number>[ ]<suffix>" into SI (degrees for angles). A bare number is taken as SI.
/// Throws ParseError on an unknown suffix or a suffix of the wrong dimension.
double parse_quantity(std::string_view text, Dim expected);

/// Splits "a, b, c" and parses each component.
struct Vec3;
Vec3 parse_vec3(std::string_view text, Dim expected);

std::string trim(std::string_view s);

}  // namespace levitrap
