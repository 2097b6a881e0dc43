#pragma once

// Optical-heating budget of the levitated sphere: intercepted and absorbed laser power,
// Debye heat capacity, the equilibrium temperature reached by a deposited energy, and
// the three heat-path estimates (conduction through the sphere, radiation, rarefied gas).
//
// The printed closed forms are evaluated as written; each report carries the published
// value next to the computed one so the ratio can be inspected.

#include <string>
#include <vector>

namespace levitrap::thermal {

struct ThermalConfig {
    double laser_power = 5e-3;            // W
    double beam_diameter = 0.9e-3;        // m
    double reflectivity = 0.17;
    double absorption_coefficient = 1e5;  // 1/m (10^3 cm^-1)
    double exposure_time = 10.0;          // s
    double debye_temperature = 531.0;     // K
    double debye_coefficient = 2085.0;    // J/(kg K)
    double thermal_conductivity = 10.5;   // W/(m K) at the bath temperature
    double emissivity_sphere = 0.9;
    double emissivity_env = 0.9;
    double area_sphere = 7.85e-7;         // m^2
    double area_env = 1.3e-4;             // m^2
    double stefan_boltzmann = 5.67e-8;    // W/(m^2 K^4)
    double bath_temperature = 4.0;        // K
    double gas_pressure = 2e-3;           // Pa, the value used in the gas-conduction estimate
    double sphere_diameter = 0.5e-3;      // m
    double sphere_mass = 0.339e-6;        // kg

    void validate() const;
};

/// Fraction of a Gaussian beam's power that falls on a sphere of diameter d,
/// with the line-integral normalization used in the heat budget.
double intercepted_power(double laser_power, double beam_diameter, double sphere_diameter);

/// (1 - R)(1 - exp(-alpha d)) * intercepted.
double absorbed_power(double intercepted, double reflectivity, double absorption_coefficient,
                      double sphere_diameter);

/// Debye integral  int_0^x  t^4 e^t / (e^t - 1)^2 dt.
double debye_integral(double x);

/// coeff * (T/T_D)^3 * debye_integral(T_D/T), in J/(kg K).
double debye_heat_capacity(double temperature, double debye_temperature, double coefficient);

/// m * int_{T1}^{T2} C_v dT.
double heating_energy(double t1, double t2, double mass, double debye_temperature, double coefficient);

/// Inverse of heating_energy in T2. Throws NumericalError when no bracket below 10*T_D exists.
double equilibrium_temperature(double deposited_energy, double mass, double t1, double debye_temperature,
                               double coefficient);

struct PaperValue {
    std::string quantity;
    double computed = 0.0;
    double paper = 0.0;
    double ratio() const { return paper != 0.0 ? computed / paper : 0.0; }
};

struct ThermalReport {
    double intercepted_power = 0.0;   // W
    double absorbed_power = 0.0;      // W
    double deposited_energy = 0.0;    // J
    double equilibrium_temperature = 0.0;  // K
    double heat_capacity_at_t2 = 0.0;      // J/(kg K)
    double conduction_capacity = 0.0;      // W; thermal_budget quotes it for T2 = T1 + 1 K
    double radiative_power = 0.0;          // W
    double gas_conduction = 0.0;           // W
    double emissivity_factor = 0.0;
    std::vector<PaperValue> comparisons;
};

/// Sphere conduction estimate kappa * pi (d/2)^2 / d * (T2 - T1).
double conduction_capacity(double kappa, double diameter, double t1, double t2);

/// Effective emissivity factor for two grey surfaces.
double emissivity_factor(double eps1, double eps2, double area_sphere, double area_env);

double radiative_power(const ThermalConfig& cfg, double t2);

double gas_conduction_power(const ThermalConfig& cfg, double t2);

/// Heat-path estimates at sphere temperature t2 (no optical chain).
ThermalReport heat_path_report(const ThermalConfig& cfg, double t2);

/// Full chain: intercepted -> absorbed -> deposited -> T2 -> heat paths, with published comparisons.
ThermalReport thermal_budget(const ThermalConfig& cfg);

}  // namespace levitrap::thermal
