#include "levitrap/grid.hpp"

#include "levitrap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace levitrap {

bool RectGrid::inside(const Vec3& p) const {
    for (int a = 0; a < 3; ++a) {
        if (p[a] < node[a].front() || p[a] > node[a].back()) return false;
    }
    return true;
}

int RectGrid::locate(int axis, double x) const {
    const auto& v = node[axis];
    auto it = std::upper_bound(v.begin(), v.end(), x);
    int i = static_cast<int>(it - v.begin()) - 1;
    return std::clamp(i, 0, n[axis] - 1);
}

double RectGrid::min_width() const {
    double w = 1e300;
    for (int a = 0; a < 3; ++a) {
        for (int i = 0; i < n[a]; ++i) w = std::min(w, width(a, i));
    }
    return w;
}

RectGrid make_grid(const GridSpec& spec) {
    RectGrid g;
    for (int a = 0; a < 3; ++a) {
        const double h = spec.fine_cell;
        const int half_fine = std::max(1, static_cast<int>(std::lround(spec.fine_half_extent[a] / h)));
        std::vector<double> right;  // offsets >= 0 from the origin
        for (int i = 0; i <= half_fine; ++i) right.push_back(i * h);
        double w = h;
        while (right.back() < spec.domain_half_extent[a] - 1e-12 * h) {
            w = std::min(w * spec.stretch, spec.max_cell);
            right.push_back(right.back() + w);
        }
        auto& v = g.node[a];
        v.clear();
        for (std::size_t i = right.size(); i-- > 1;) v.push_back(spec.origin[a] - right[i]);
        for (double r : right) v.push_back(spec.origin[a] + r);
        g.n[a] = static_cast<int>(v.size()) - 1;
    }
    if (g.cells() > 60'000'000) throw ValidationError("grid too large (more than 6e7 cells)");
    return g;
}

}  // namespace levitrap
