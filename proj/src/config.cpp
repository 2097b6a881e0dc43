#include "levitrap/config.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace levitrap {

using constants::pi;

double SphereSpec::volume() const { return pi * diameter * diameter * diameter / 6.0; }

double SphereSpec::mass() const { return material.density * volume(); }

double SuperconductorRingSpec::penetration_field_at(double temperature) const {
    if (penetration_table.empty()) return penetration_field;
    const auto& t = penetration_table;
    if (temperature <= t.front().temperature) return t.front().field;
    if (temperature >= t.back().temperature) return t.back().field;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (temperature <= t[i].temperature) {
            const double w = (temperature - t[i - 1].temperature) / (t[i].temperature - t[i - 1].temperature);
            return t[i - 1].field + w * (t[i].field - t[i - 1].field);
        }
    }
    return t.back().field;
}

bool SuperconductorRingSpec::contains(const Vec3& p) const {
    if (std::abs(p.z - center_z) > 0.5 * height) return false;
    const double rho = std::hypot(p.x, p.y);
    if (rho < inner_radius() || rho > outer_radius()) return false;
    if (slit_angle <= 0.0) return true;
    const double az = std::atan2(p.y, p.x) * 180.0 / pi;
    double diff = std::fmod(az - slit_azimuth + 540.0, 360.0) - 180.0;
    return std::abs(diff) > 0.5 * slit_angle;
}

bool ConductorSpec::contains(const Vec3& p) const {
    if (shape == ConductorShape::box) {
        return p.x >= box_min.x && p.x <= box_max.x && p.y >= box_min.y && p.y <= box_max.y && p.z >= box_min.z &&
               p.z <= box_max.z;
    }
    if (p.z < z_min || p.z > z_max) return false;
    const double rho = std::hypot(p.x, p.y);
    return rho >= inner_radius && rho <= outer_radius;
}

double ConductorSpec::min_thickness() const {
    if (shape == ConductorShape::box) {
        return std::min({box_max.x - box_min.x, box_max.y - box_min.y, box_max.z - box_min.z});
    }
    return std::min(outer_radius - inner_radius, z_max - z_min);
}

std::pair<Vec3, Vec3> ConductorSpec::bounds() const {
    if (shape == ConductorShape::box) return {box_min, box_max};
    return {{-outer_radius, -outer_radius, z_min}, {outer_radius, outer_radius, z_max}};
}

void thermal::ThermalConfig::validate() const {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) throw ValidationError("reflectivity must lie in [0, 1]");
    if (!(laser_power >= 0.0)) throw ValidationError("laser power must be non-negative");
    if (!(beam_diameter > 0.0)) throw ValidationError("beam diameter must be positive");
    if (!(absorption_coefficient >= 0.0)) throw ValidationError("absorption coefficient must be non-negative");
    if (!(debye_temperature > 0.0)) throw ValidationError("Debye temperature must be positive");
    if (!(debye_coefficient > 0.0)) throw ValidationError("Debye coefficient must be positive");
    if (!(bath_temperature > 0.0)) throw ValidationError("bath temperature must be positive");
    if (!(area_sphere > 0.0 && area_env > 0.0)) throw ValidationError("areas must be positive");
    if (!(sphere_mass > 0.0 && sphere_diameter > 0.0)) throw ValidationError("sphere mass and diameter must be positive");
    if (!(gas_pressure >= 0.0)) throw ValidationError("gas pressure must be non-negative");
}

void ExperimentConfig::validate() const {
    const auto& s = sphere;
    if (!(s.diameter > 0.0)) throw ValidationError("diameter must be positive");
    if (!(s.material.density > 0.0)) throw ValidationError("density must be positive");
    if (!(s.material.relative_permeability > 0.0)) throw ValidationError("relative permeability must be positive");
    if (!(s.material.conductivity >= 0.0)) throw ValidationError("conductivity must be non-negative");
    if (!(s.material.saturation_magnetization >= 0.0))
        throw ValidationError("saturation magnetization must be non-negative");

    const auto& r = ring;
    if (!(r.inner_diameter > 0.0)) throw ValidationError("ring inner diameter must be positive");
    if (!(r.inner_diameter < r.outer_diameter)) throw ValidationError("ring inner diameter must be below outer diameter");
    if (!(r.height > 0.0)) throw ValidationError("ring height must be positive");
    if (!(r.slit_angle >= 0.0 && r.slit_angle < 360.0)) throw ValidationError("slit angle must lie in [0, 360)");
    if (!(r.diamagnet_permeability > 0.0 && r.diamagnet_permeability < 1.0))
        throw ValidationError("diamagnet permeability must lie in (0, 1)");
    for (std::size_t i = 1; i < r.penetration_table.size(); ++i) {
        if (!(r.penetration_table[i].temperature > r.penetration_table[i - 1].temperature))
            throw ValidationError("penetration table temperatures must increase");
    }
    if (!(s.diameter < r.inner_diameter)) throw ValidationError("sphere does not fit inside the ring hole");

    const auto& c = coil;
    if (c.turns < 1) throw ValidationError("coil turns must be at least 1");
    if (!(c.wire_diameter > 0.0)) throw ValidationError("coil wire diameter must be positive");
    if (!(c.winding_inner_diameter > 0.0 && c.winding_inner_diameter < c.winding_outer_diameter))
        throw ValidationError("coil winding diameters must satisfy 0 < inner < outer");
    if (!(c.height > 0.0)) throw ValidationError("coil height must be positive");
    if (!(c.max_current > 0.0)) throw ValidationError("coil max current must be positive");

    for (const auto& k : conductors) {
        if (!(k.conductivity >= 0.0)) throw ValidationError("conductor '" + k.name + "' conductivity must be non-negative");
        if (!(k.min_thickness() > 0.0)) throw ValidationError("conductor '" + k.name + "' has non-positive thickness");
    }

    const auto& g = grid;
    if (!(g.fine_cell > 0.0)) throw ValidationError("grid cell size must be positive");
    if (g.fine_cell > s.diameter / 20.0 * (1.0 + 1e-12))
        throw ValidationError("fine cell size must not exceed d/20");
    if (!(g.max_cell >= g.fine_cell)) throw ValidationError("grid max cell must be at least the fine cell");
    if (!(g.stretch >= 1.0 && g.stretch <= 2.0)) throw ValidationError("grid stretch must lie in [1, 2]");
    for (int a = 0; a < 3; ++a) {
        if (!(g.fine_half_extent[a] > 0.0 && g.fine_half_extent[a] <= g.domain_half_extent[a]))
            throw ValidationError("grid fine region must be non-empty and inside the domain");
    }
    // Bodies in the field solve: the ring and the sphere (anywhere inside the hole).
    const double margin = s.diameter;
    const double ring_r = r.outer_radius() + margin;
    if (std::abs(g.origin.x) + ring_r > g.domain_half_extent.x || std::abs(g.origin.y) + ring_r > g.domain_half_extent.y)
        throw ValidationError("grid must enclose the ring with a one-diameter margin (x/y)");
    const double zlo = r.center_z - 0.5 * r.height - margin;
    const double zhi = r.center_z + 0.5 * r.height + margin;
    if (zlo < g.origin.z - g.domain_half_extent.z || zhi > g.origin.z + g.domain_half_extent.z)
        throw ValidationError("grid must enclose the ring with a one-diameter margin (z)");

    if (!(ambient.temperature > 0.0)) throw ValidationError("ambient temperature must be positive");
    if (!(ambient.pressure >= 0.0)) throw ValidationError("ambient pressure must be non-negative");

    const auto& an = analysis;
    if (!(an.stiffness_window > 0.0)) throw ValidationError("stiffness window must be positive");
    if (!(an.root_tolerance > 0.0)) throw ValidationError("root tolerance must be positive");
    if (!(norm(an.diagonal_direction) > 0.0)) throw ValidationError("diagonal direction must be non-zero");
    if (an.eddy_phase_slots < 4) throw ValidationError("eddy phase slots must be at least 4");
    if (!(an.eddy_voxel > 0.0)) throw ValidationError("eddy voxel must be positive");
    if (!(an.solver_tolerance > 0.0 && an.solver_tolerance < 1e-2)) throw ValidationError("solver tolerance out of range");
    if (an.solver_max_iterations < 1) throw ValidationError("solver max iterations must be positive");

    thermal.validate();
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct KeySpec {
    Setter set;
    bool required = false;
};

template <class F>
Setter scalar(F&& field_ref, Dim dim) {
    return [field_ref, dim](ExperimentConfig& c, const std::string& v) { field_ref(c) = parse_quantity(v, dim); };
}

template <class F>
Setter vector3(F&& field_ref, Dim dim) {
    return [field_ref, dim](ExperimentConfig& c, const std::string& v) { field_ref(c) = parse_vec3(v, dim); };
}

std::map<std::string, KeySpec> key_table() {
    std::map<std::string, KeySpec> t;
    // clang-format off
    t["sphere.diameter"] = {scalar([](ExperimentConfig& c) -> double& { return c.sphere.diameter; }, Dim::length), true};
    t["sphere.density"] = {scalar([](ExperimentConfig& c) -> double& { return c.sphere.material.density; }, Dim::density), true};
    t["sphere.relative_permeability"] = {scalar([](ExperimentConfig& c) -> double& { return c.sphere.material.relative_permeability; }, Dim::dimensionless), true};
    t["sphere.relative_permittivity"] = {scalar([](ExperimentConfig& c) -> double& { return c.sphere.material.relative_permittivity; }, Dim::dimensionless)};
    t["sphere.conductivity"] = {scalar([](ExperimentConfig& c) -> double& { return c.sphere.material.conductivity; }, Dim::conductivity)};
    t["sphere.saturation_magnetization"] = {scalar([](ExperimentConfig& c) -> double& { return c.sphere.material.saturation_magnetization; }, Dim::magnetization)};
    t["sphere.initial_position"] = {vector3([](ExperimentConfig& c) -> Vec3& { return c.sphere.initial_position; }, Dim::length)};

    t["ring.inner_diameter"] = {scalar([](ExperimentConfig& c) -> double& { return c.ring.inner_diameter; }, Dim::length), true};
    t["ring.outer_diameter"] = {scalar([](ExperimentConfig& c) -> double& { return c.ring.outer_diameter; }, Dim::length), true};
    t["ring.height"] = {scalar([](ExperimentConfig& c) -> double& { return c.ring.height; }, Dim::length), true};
    t["ring.slit_angle"] = {scalar([](ExperimentConfig& c) -> double& { return c.ring.slit_angle; }, Dim::angle), true};
    t["ring.slit_azimuth"] = {scalar([](ExperimentConfig& c) -> double& { return c.ring.slit_azimuth; }, Dim::angle)};
    t["ring.center_z"] = {scalar([](ExperimentConfig& c) -> double& { return c.ring.center_z; }, Dim::length)};
    t["ring.penetration_field"] = {scalar([](ExperimentConfig& c) -> double& { return c.ring.penetration_field; }, Dim::field)};
    t["ring.diamagnet_permeability"] = {scalar([](ExperimentConfig& c) -> double& { return c.ring.diamagnet_permeability; }, Dim::dimensionless)};
    t["ring.penetration_table"] = {[](ExperimentConfig& c, const std::string& v) {
        c.ring.penetration_table.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw ParseError("penetration table entries are T:H pairs");
            c.ring.penetration_table.push_back({parse_quantity(item.substr(0, colon), Dim::temperature),
                                                parse_quantity(item.substr(colon + 1), Dim::field)});
        }
    }};

    t["coil.winding_inner_diameter"] = {scalar([](ExperimentConfig& c) -> double& { return c.coil.winding_inner_diameter; }, Dim::length), true};
    t["coil.winding_outer_diameter"] = {scalar([](ExperimentConfig& c) -> double& { return c.coil.winding_outer_diameter; }, Dim::length), true};
    t["coil.height"] = {scalar([](ExperimentConfig& c) -> double& { return c.coil.height; }, Dim::length), true};
    t["coil.turns"] = {[](ExperimentConfig& c, const std::string& v) {
        const double n = parse_quantity(v, Dim::dimensionless);
        if (n != std::floor(n)) throw ParseError("turns must be an integer");
        c.coil.turns = static_cast<int>(n);
    }, true};
    t["coil.wire_diameter"] = {scalar([](ExperimentConfig& c) -> double& { return c.coil.wire_diameter; }, Dim::length), true};
    t["coil.center_z"] = {scalar([](ExperimentConfig& c) -> double& { return c.coil.center_z; }, Dim::length)};
    t["coil.max_current"] = {scalar([](ExperimentConfig& c) -> double& { return c.coil.max_current; }, Dim::current)};

    t["grid.fine_cell"] = {scalar([](ExperimentConfig& c) -> double& { return c.grid.fine_cell; }, Dim::length)};
    t["grid.max_cell"] = {scalar([](ExperimentConfig& c) -> double& { return c.grid.max_cell; }, Dim::length)};
    t["grid.stretch"] = {scalar([](ExperimentConfig& c) -> double& { return c.grid.stretch; }, Dim::dimensionless)};
    t["grid.fine_half_extent"] = {vector3([](ExperimentConfig& c) -> Vec3& { return c.grid.fine_half_extent; }, Dim::length)};
    t["grid.domain_half_extent"] = {vector3([](ExperimentConfig& c) -> Vec3& { return c.grid.domain_half_extent; }, Dim::length)};
    t["grid.origin"] = {vector3([](ExperimentConfig& c) -> Vec3& { return c.grid.origin; }, Dim::length)};

    t["ambient.temperature"] = {scalar([](ExperimentConfig& c) -> double& { return c.ambient.temperature; }, Dim::temperature)};
    t["ambient.pressure"] = {scalar([](ExperimentConfig& c) -> double& { return c.ambient.pressure; }, Dim::pressure)};
    t["ambient.gravity"] = {scalar([](ExperimentConfig& c) -> double& { return c.ambient.gravity; }, Dim::acceleration)};

    t["analysis.stiffness_window"] = {scalar([](ExperimentConfig& c) -> double& { return c.analysis.stiffness_window; }, Dim::length)};
    t["analysis.root_tolerance"] = {scalar([](ExperimentConfig& c) -> double& { return c.analysis.root_tolerance; }, Dim::length)};
    t["analysis.diagonal_direction"] = {vector3([](ExperimentConfig& c) -> Vec3& { return c.analysis.diagonal_direction; }, Dim::dimensionless)};
    t["analysis.eddy_amplitude"] = {scalar([](ExperimentConfig& c) -> double& { return c.analysis.eddy_amplitude; }, Dim::length)};
    t["analysis.eddy_phase_slots"] = {[](ExperimentConfig& c, const std::string& v) {
        c.analysis.eddy_phase_slots = static_cast<int>(parse_quantity(v, Dim::dimensionless));
    }};
    t["analysis.eddy_voxel"] = {scalar([](ExperimentConfig& c) -> double& { return c.analysis.eddy_voxel; }, Dim::length)};
    t["analysis.eddy_refine"] = {scalar([](ExperimentConfig& c) -> double& { return c.analysis.eddy_refine; }, Dim::dimensionless)};
    t["analysis.solver_tolerance"] = {scalar([](ExperimentConfig& c) -> double& { return c.analysis.solver_tolerance; }, Dim::dimensionless)};
    t["analysis.solver_max_iterations"] = {[](ExperimentConfig& c, const std::string& v) {
        c.analysis.solver_max_iterations = static_cast<int>(parse_quantity(v, Dim::dimensionless));
    }};

    t["thermal.laser_power"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.laser_power; }, Dim::power)};
    t["thermal.beam_diameter"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.beam_diameter; }, Dim::length)};
    t["thermal.reflectivity"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.reflectivity; }, Dim::dimensionless)};
    t["thermal.absorption_coefficient"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.absorption_coefficient; }, Dim::inverse_length)};
    t["thermal.exposure_time"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.exposure_time; }, Dim::time)};
    t["thermal.debye_temperature"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.debye_temperature; }, Dim::temperature)};
    t["thermal.debye_coefficient"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.debye_coefficient; }, Dim::specific_heat)};
    t["thermal.thermal_conductivity"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.thermal_conductivity; }, Dim::thermal_conductivity)};
    t["thermal.emissivity_sphere"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.emissivity_sphere; }, Dim::dimensionless)};
    t["thermal.emissivity_env"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.emissivity_env; }, Dim::dimensionless)};
    t["thermal.area_sphere"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.area_sphere; }, Dim::area)};
    t["thermal.area_env"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.area_env; }, Dim::area)};
    t["thermal.bath_temperature"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.bath_temperature; }, Dim::temperature)};
    t["thermal.gas_pressure"] = {scalar([](ExperimentConfig& c) -> double& { return c.thermal.gas_pressure; }, Dim::pressure)};
    // clang-format on
    return t;
}

void apply_conductor_key(ConductorSpec& k, const std::string& key, const std::string& value) {
    if (key == "shape") {
        const std::string v = trim(value);
        if (v == "tube") k.shape = ConductorShape::tube;
        else if (v == "box") k.shape = ConductorShape::box;
        else throw ParseError("conductor shape must be 'tube' or 'box'");
    } else if (key == "inner_radius") {
        k.inner_radius = parse_quantity(value, Dim::length);
    } else if (key == "outer_radius") {
        k.outer_radius = parse_quantity(value, Dim::length);
    } else if (key == "inner_diameter") {
        k.inner_radius = 0.5 * parse_quantity(value, Dim::length);
    } else if (key == "outer_diameter") {
        k.outer_radius = 0.5 * parse_quantity(value, Dim::length);
    } else if (key == "z_min") {
        k.z_min = parse_quantity(value, Dim::length);
    } else if (key == "z_max") {
        k.z_max = parse_quantity(value, Dim::length);
    } else if (key == "min") {
        k.box_min = parse_vec3(value, Dim::length);
    } else if (key == "max") {
        k.box_max = parse_vec3(value, Dim::length);
    } else if (key == "conductivity") {
        k.conductivity = parse_quantity(value, Dim::conductivity);
    } else {
        throw ParseError("unknown conductor key");
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x) + ", " + fmt(v.y) + ", " + fmt(v.z); }

}  // namespace

ExperimentConfig load_config(std::string_view text) {
    ExperimentConfig cfg = table1_config();
    cfg.conductors.clear();
    const auto table = key_table();
    std::map<std::string, bool> seen;

    std::string section;
    ConductorSpec* conductor = nullptr;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no);
            const std::string inner = trim(line.substr(1, line.size() - 2));
            const auto space = inner.find(' ');
            const std::string head = space == std::string::npos ? inner : inner.substr(0, space);
            if (head == "conductor") {
                if (space == std::string::npos) throw ParseError("conductor section needs a name", line_no);
                cfg.conductors.push_back({});
                conductor = &cfg.conductors.back();
                conductor->name = trim(inner.substr(space + 1));
                section = "conductor";
            } else {
                static const char* known[] = {"sphere", "ring", "coil", "grid", "ambient", "analysis", "thermal"};
                if (std::find(std::begin(known), std::end(known), head) == std::end(known) ||
                    space != std::string::npos)
                    throw ParseError("unknown section '" + inner + "'", line_no);
                section = head;
                conductor = nullptr;
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ParseError("key outside of any section", line_no, key);

        try {
            if (section == "conductor") {
                apply_conductor_key(*conductor, key, value);
                continue;
            }
            const std::string full = section + "." + key;
            const auto it = table.find(full);
            if (it == table.end()) throw ParseError("unknown key");
            it->second.set(cfg, value);
            seen[full] = true;
        } catch (const ParseError& e) {
            if (e.line() > 0) throw;
            throw ParseError(e.what(), line_no, key);
        }
    }

    for (const auto& [name, spec] : table) {
        if (spec.required && !seen.count(name)) throw ParseError("required key missing", 0, name);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "[sphere]\n"
      << "diameter = " << fmt(c.sphere.diameter) << "\n"
      << "density = " << fmt(c.sphere.material.density) << "\n"
      << "relative_permeability = " << fmt(c.sphere.material.relative_permeability) << "\n"
      << "relative_permittivity = " << fmt(c.sphere.material.relative_permittivity) << "\n"
      << "conductivity = " << fmt(c.sphere.material.conductivity) << "\n"
      << "saturation_magnetization = " << fmt(c.sphere.material.saturation_magnetization) << "\n"
      << "initial_position = " << fmt(c.sphere.initial_position) << "\n\n";
    o << "[ring]\n"
      << "inner_diameter = " << fmt(c.ring.inner_diameter) << "\n"
      << "outer_diameter = " << fmt(c.ring.outer_diameter) << "\n"
      << "height = " << fmt(c.ring.height) << "\n"
      << "slit_angle = " << fmt(c.ring.slit_angle) << "\n"
      << "slit_azimuth = " << fmt(c.ring.slit_azimuth) << "\n"
      << "center_z = " << fmt(c.ring.center_z) << "\n"
      << "penetration_field = " << fmt(c.ring.penetration_field) << "\n"
      << "diamagnet_permeability = " << fmt(c.ring.diamagnet_permeability) << "\n";
    if (!c.ring.penetration_table.empty()) {
        o << "penetration_table = ";
        for (std::size_t i = 0; i < c.ring.penetration_table.size(); ++i) {
            if (i) o << ", ";
            o << fmt(c.ring.penetration_table[i].temperature) << ":" << fmt(c.ring.penetration_table[i].field);
        }
        o << "\n";
    }
    o << "\n[coil]\n"
      << "winding_inner_diameter = " << fmt(c.coil.winding_inner_diameter) << "\n"
      << "winding_outer_diameter = " << fmt(c.coil.winding_outer_diameter) << "\n"
      << "height = " << fmt(c.coil.height) << "\n"
      << "turns = " << c.coil.turns << "\n"
      << "wire_diameter = " << fmt(c.coil.wire_diameter) << "\n"
      << "center_z = " << fmt(c.coil.center_z) << "\n"
      << "max_current = " << fmt(c.coil.max_current) << "\n";
    for (const auto& k : c.conductors) {
        o << "\n[conductor " << k.name << "]\n";
        if (k.shape == ConductorShape::tube) {
            o << "shape = tube\n"
              << "inner_radius = " << fmt(k.inner_radius) << "\n"
              << "outer_radius = " << fmt(k.outer_radius) << "\n"
              << "z_min = " << fmt(k.z_min) << "\n"
              << "z_max = " << fmt(k.z_max) << "\n";
        } else {
            o << "shape = box\n"
              << "min = " << fmt(k.box_min) << "\n"
              << "max = " << fmt(k.box_max) << "\n";
        }
        o << "conductivity = " << fmt(k.conductivity) << "\n";
    }
    o << "\n[grid]\n"
      << "fine_cell = " << fmt(c.grid.fine_cell) << "\n"
      << "max_cell = " << fmt(c.grid.max_cell) << "\n"
      << "stretch = " << fmt(c.grid.stretch) << "\n"
      << "fine_half_extent = " << fmt(c.grid.fine_half_extent) << "\n"
      << "domain_half_extent = " << fmt(c.grid.domain_half_extent) << "\n"
      << "origin = " << fmt(c.grid.origin) << "\n";
    o << "\n[ambient]\n"
      << "temperature = " << fmt(c.ambient.temperature) << "\n"
      << "pressure = " << fmt(c.ambient.pressure) << "\n"
      << "gravity = " << fmt(c.ambient.gravity) << "\n";
    const auto& a = c.analysis;
    o << "\n[analysis]\n"
      << "stiffness_window = " << fmt(a.stiffness_window) << "\n"
      << "root_tolerance = " << fmt(a.root_tolerance) << "\n"
      << "diagonal_direction = " << fmt(a.diagonal_direction) << "\n"
      << "eddy_amplitude = " << fmt(a.eddy_amplitude) << "\n"
      << "eddy_phase_slots = " << a.eddy_phase_slots << "\n"
      << "eddy_voxel = " << fmt(a.eddy_voxel) << "\n"
      << "eddy_refine = " << fmt(a.eddy_refine) << "\n"
      << "solver_tolerance = " << fmt(a.solver_tolerance) << "\n"
      << "solver_max_iterations = " << a.solver_max_iterations << "\n";
    const auto& t = c.thermal;
    o << "\n[thermal]\n"
      << "laser_power = " << fmt(t.laser_power) << "\n"
      << "beam_diameter = " << fmt(t.beam_diameter) << "\n"
      << "reflectivity = " << fmt(t.reflectivity) << "\n"
      << "absorption_coefficient = " << fmt(t.absorption_coefficient) << "\n"
      << "exposure_time = " << fmt(t.exposure_time) << "\n"
      << "debye_temperature = " << fmt(t.debye_temperature) << "\n"
      << "debye_coefficient = " << fmt(t.debye_coefficient) << "\n"
      << "thermal_conductivity = " << fmt(t.thermal_conductivity) << "\n"
      << "emissivity_sphere = " << fmt(t.emissivity_sphere) << "\n"
      << "emissivity_env = " << fmt(t.emissivity_env) << "\n"
      << "area_sphere = " << fmt(t.area_sphere) << "\n"
      << "area_env = " << fmt(t.area_env) << "\n"
      << "bath_temperature = " << fmt(t.bath_temperature) << "\n"
      << "gas_pressure = " << fmt(t.gas_pressure) << "\n";
    return o.str();
}

ExperimentConfig table1_config() {
    ExperimentConfig c;
    // Bobbin: a tube filling the gap between the bore and the winding, plus two
    // 0.5 mm flanges out to 14 mm diameter; the copper lid sits on top, a base
    // plate below.
    ConductorSpec tube;
    tube.name = "bobbin_tube";
    tube.inner_radius = 0.5 * 2.274e-3;
    tube.outer_radius = 0.5 * 3.1e-3;
    tube.z_min = -1.0e-3;
    tube.z_max = 1.0e-3;

    ConductorSpec top = tube;
    top.name = "bobbin_flange_top";
    top.inner_radius = 0.5 * 3.1e-3;
    top.outer_radius = 7.0e-3;
    top.z_min = 0.5e-3;
    top.z_max = 1.0e-3;

    ConductorSpec bottom = top;
    bottom.name = "bobbin_flange_bottom";
    bottom.z_min = -1.0e-3;
    bottom.z_max = -0.5e-3;

    ConductorSpec lid = tube;
    lid.name = "lid";
    lid.inner_radius = 3.0e-3;
    lid.outer_radius = 7.0e-3;
    lid.z_min = 1.0e-3;
    lid.z_max = 2.0e-3;

    ConductorSpec base;
    base.name = "base_plate";
    base.shape = ConductorShape::box;
    base.box_min = {-10e-3, -10e-3, -3.0e-3};
    base.box_max = {10e-3, 10e-3, -1.0e-3};

    c.conductors = {tube, top, bottom, lid, base};
    c.sphere.initial_position = {0.0, 0.0, c.ring.center_z - 0.5 * c.ring.height + c.sphere.radius()};
    return c;
}

ExperimentConfig niobium_config() {
    ExperimentConfig c = table1_config();
    c.ring.inner_diameter = 0.758e-3;
    c.ring.outer_diameter = 1.684e-3;
    c.ring.height = 1.029e-3;
    c.ring.slit_angle = 42.0;
    c.ring.penetration_field = 0.094;
    c.ring.penetration_table = {{2.0, 0.116}, {4.6, 0.094}, {9.26, 0.0}};
    c.sphere.initial_position = {0.0, 0.0, c.ring.center_z - 0.5 * c.ring.height + c.sphere.radius()};
    return c;
}

}  // namespace levitrap
