#pragma once

// Tensor-product rectilinear grid with cell-centred unknowns and staggered face fields.

#include "levitrap/config.hpp"
#include "levitrap/vec3.hpp"

#include <cstddef>
#include <vector>

namespace levitrap {

struct RectGrid {
    std::vector<double> node[3];  // cell boundaries per axis, strictly increasing
    int n[3] = {0, 0, 0};         // cells per axis

    std::size_t cells() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
    std::size_t cell(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(n[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n[1]) * k);
    }
    /// Number of faces normal to `axis` (one extra layer along that axis).
    std::size_t faces(int axis) const {
        std::size_t c = 1;
        for (int a = 0; a < 3; ++a) c *= static_cast<std::size_t>(n[a] + (a == axis ? 1 : 0));
        return c;
    }
    /// Face normal to `axis`; the index along `axis` is a node index, the others cell indices.
    std::size_t face(int axis, int i, int j, int k) const {
        const std::size_t mx = static_cast<std::size_t>(n[0] + (axis == 0));
        const std::size_t my = static_cast<std::size_t>(n[1] + (axis == 1));
        return static_cast<std::size_t>(i) + mx * (static_cast<std::size_t>(j) + my * static_cast<std::size_t>(k));
    }
    double center(int axis, int i) const { return 0.5 * (node[axis][i] + node[axis][i + 1]); }
    double width(int axis, int i) const { return node[axis][i + 1] - node[axis][i]; }
    Vec3 cell_center(int i, int j, int k) const { return {center(0, i), center(1, j), center(2, k)}; }
    Vec3 lower() const { return {node[0].front(), node[1].front(), node[2].front()}; }
    Vec3 upper() const { return {node[0].back(), node[1].back(), node[2].back()}; }
    bool inside(const Vec3& p) const;
    /// Index of the cell containing coordinate x along axis (clamped to the grid).
    int locate(int axis, double x) const;
    double min_width() const;
};

/// Uniform fine cells across [origin - fine, origin + fine], geometric growth outward
/// capped at max_cell, until the domain half-extent is covered. Symmetric about origin.
RectGrid make_grid(const GridSpec& spec);

}  // namespace levitrap
