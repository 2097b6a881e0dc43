#include "levitrap/field_solver.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/parallel.hpp"
#include "levitrap/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace levitrap {

using constants::mu0;

namespace {

constexpr int kTransverse[3][2] = {{1, 2}, {0, 2}, {0, 1}};

// Face index decomposition for axis-normal faces.
struct FaceIdx {
    int i, j, k;
};

FaceIdx unpack_face(const RectGrid& g, int axis, std::size_t f) {
    const std::size_t mx = static_cast<std::size_t>(g.n[0] + (axis == 0));
    const std::size_t my = static_cast<std::size_t>(g.n[1] + (axis == 1));
    FaceIdx r;
    r.i = static_cast<int>(f % mx);
    r.j = static_cast<int>((f / mx) % my);
    r.k = static_cast<int>(f / (mx * my));
    return r;
}

double face_area_of(const RectGrid& g, int axis, const int idx[3]) {
    const int u = kTransverse[axis][0];
    const int v = kTransverse[axis][1];
    return g.width(u, idx[u]) * g.width(v, idx[v]);
}

// Distance between the centres of the two cells sharing an interior face.
double face_span(const RectGrid& g, int axis, int node) { return g.center(axis, node) - g.center(axis, node - 1); }

// Coordinate bracket for interpolation: nodes (staggered axis) or centres.
void bracket(const RectGrid& g, int axis, bool on_nodes, double x, int& i0, double& t) {
    if (on_nodes) {
        i0 = g.locate(axis, x);
        t = (x - g.node[axis][i0]) / g.width(axis, i0);
        return;
    }
    const int n = g.n[axis];
    if (n == 1 || x <= g.center(axis, 0)) {
        i0 = 0;
        t = 0.0;
        if (n == 1) return;
        return;
    }
    if (x >= g.center(axis, n - 1)) {
        i0 = n - 2;
        t = 1.0;
        return;
    }
    int c = g.locate(axis, x);
    if (x < g.center(axis, c)) --c;
    i0 = c;
    t = (x - g.center(axis, c)) / (g.center(axis, c + 1) - g.center(axis, c));
}

double interpolate_component(const FieldSolution& s, int axis, const Vec3& p, FieldPart part) {
    const RectGrid& g = *s.grid;
    int i0[3];
    double t[3];
    for (int d = 0; d < 3; ++d) bracket(g, d, d == axis, p[d], i0[d], t[d]);
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) {
        int idx[3];
        double w = 1.0;
        for (int d = 0; d < 3; ++d) {
            const int bit = (c >> d) & 1;
            const int lim = g.n[d] + (d == axis ? 1 : 0);
            idx[d] = std::min(i0[d] + bit, lim - 1);
            w *= bit ? t[d] : 1.0 - t[d];
        }
        if (w == 0.0) continue;
        const std::size_t f = g.face(axis, idx[0], idx[1], idx[2]);
        acc += w * (part == FieldPart::total ? s.b[axis][f] : s.source_b(axis, f));
    }
    return acc;
}

}  // namespace

double FieldSolution::face_area(int axis, std::size_t face) const {
    const FaceIdx fi = unpack_face(*grid, axis, face);
    const int idx[3] = {fi.i, fi.j, fi.k};
    return face_area_of(*grid, axis, idx);
}

double FieldSolution::source_b(int axis, std::size_t face) const {
    return current * (*unit_source_flux[axis])[face] / face_area(axis, face);
}

Vec3 field_probe(const FieldSolution& s, const Vec3& p, FieldPart part) {
    if (!s.grid->inside(p)) throw DomainError("probe point outside the grid");
    return {interpolate_component(s, 0, p, part), interpolate_component(s, 1, p, part),
            interpolate_component(s, 2, p, part)};
}

Vec3 field_probe(const FieldSolution& s, const Vec3& p, Mat3& gradient, FieldPart part) {
    const Vec3 b = field_probe(s, p, part);
    const RectGrid& g = *s.grid;
    for (int d = 0; d < 3; ++d) {
        const double h = 0.25 * g.width(d, g.locate(d, p[d]));
        Vec3 lo = p;
        Vec3 hi = p;
        lo[d] = std::max(p[d] - h, g.node[d].front());
        hi[d] = std::min(p[d] + h, g.node[d].back());
        const Vec3 bl = field_probe(s, lo, part);
        const Vec3 bh = field_probe(s, hi, part);
        for (int c = 0; c < 3; ++c) gradient(c, d) = (bh[c] - bl[c]) / (hi[d] - lo[d]);
    }
    return b;
}

double max_relative_divergence(const FieldSolution& s) {
    const RectGrid& g = *s.grid;
    double bmax = 0.0;
    for (int a = 0; a < 3; ++a)
        for (double v : s.b[a]) bmax = std::max(bmax, std::abs(v));
    if (bmax == 0.0) return 0.0;
    double worst = 0.0;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const double ax = g.width(1, j) * g.width(2, k);
                const double ay = g.width(0, i) * g.width(2, k);
                const double az = g.width(0, i) * g.width(1, j);
                const double flux = (s.b[0][g.face(0, i + 1, j, k)] - s.b[0][g.face(0, i, j, k)]) * ax +
                                    (s.b[1][g.face(1, i, j + 1, k)] - s.b[1][g.face(1, i, j, k)]) * ay +
                                    (s.b[2][g.face(2, i, j, k + 1)] - s.b[2][g.face(2, i, j, k)]) * az;
                worst = std::max(worst, std::abs(flux) / (bmax * 2.0 * (ax + ay + az)));
            }
    return worst;
}

double max_relative_ring_normal(const FieldSolution& s) {
    const RectGrid& g = *s.grid;
    const auto& ring = *s.ring_cells;
    double bmax = 0.0;
    for (int a = 0; a < 3; ++a)
        for (double v : s.b[a]) bmax = std::max(bmax, std::abs(v));
    if (bmax == 0.0) return 0.0;
    double worst = 0.0;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const std::size_t c = g.cell(i, j, k);
                if (!ring[c]) continue;
                const int idx[3] = {i, j, k};
                for (int a = 0; a < 3; ++a) {
                    for (int side = 0; side < 2; ++side) {
                        int nb[3] = {i, j, k};
                        nb[a] += side ? 1 : -1;
                        if (nb[a] < 0 || nb[a] >= g.n[a]) continue;
                        if (ring[g.cell(nb[0], nb[1], nb[2])]) continue;
                        int f[3] = {idx[0], idx[1], idx[2]};
                        f[a] += side;
                        worst = std::max(worst, std::abs(s.b[a][g.face(a, f[0], f[1], f[2])]) / bmax);
                    }
                }
            }
    return worst;
}

Vec3 sphere_moment(const FieldSolution& s) {
    if (!s.sphere_center) return {};
    const RectGrid& g = *s.grid;
    const Vec3 c = *s.sphere_center;
    const double r = s.sphere_radius;
    int lo[3];
    int hi[3];
    for (int a = 0; a < 3; ++a) {
        lo[a] = g.locate(a, c[a] - r);
        hi[a] = g.locate(a, c[a] + r);
    }
    Vec3 sum;
    double vol = 0.0;
    for (int k = lo[2]; k <= hi[2]; ++k)
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int i = lo[0]; i <= hi[0]; ++i) {
                const Vec3 p = g.cell_center(i, j, k);
                if (norm(p - c) >= r) continue;
                const double v = g.width(0, i) * g.width(1, j) * g.width(2, k);
                const Vec3 b{0.5 * (s.b[0][g.face(0, i, j, k)] + s.b[0][g.face(0, i + 1, j, k)]),
                             0.5 * (s.b[1][g.face(1, i, j, k)] + s.b[1][g.face(1, i, j + 1, k)]),
                             0.5 * (s.b[2][g.face(2, i, j, k)] + s.b[2][g.face(2, i, j, k + 1)])};
                sum += b * v;
                vol += v;
            }
    if (vol == 0.0) return {};
    const double mur = s.sphere_permeability;
    const double v_exact = 4.0 / 3.0 * constants::pi * r * r * r;
    return sum / vol * ((mur - 1.0) / (mu0 * mur) * v_exact);
}

void write_field_csv(const FieldSolution& s, std::ostream& out) {
    const RectGrid& g = *s.grid;
    char buf[256];
    out << "# grid " << g.n[0] << " " << g.n[1] << " " << g.n[2] << "\n";
    std::snprintf(buf, sizeof buf, "# current_A %.17g\n# relative_residual %.6e\n", s.current, s.residual_norm);
    out << buf << "x,y,z,Bx,By,Bz\n";
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const Vec3 p = g.cell_center(i, j, k);
                const double bx = 0.5 * (s.b[0][g.face(0, i, j, k)] + s.b[0][g.face(0, i + 1, j, k)]);
                const double by = 0.5 * (s.b[1][g.face(1, i, j, k)] + s.b[1][g.face(1, i, j + 1, k)]);
                const double bz = 0.5 * (s.b[2][g.face(2, i, j, k)] + s.b[2][g.face(2, i, j, k + 1)]);
                std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.9e,%.9e,%.9e,%.9e\n", p.x, p.y, p.z, bx, by, bz);
                out << buf;
            }
}

FieldSolver::FieldSolver(const ExperimentConfig& config, std::shared_ptr<const AxisymmetricSource> source,
                         FieldSolverOptions options)
    : config_(config), options_(options), source_(std::move(source)) {
    config_.validate();
    grid_ = std::make_shared<RectGrid>(make_grid(config_.grid));
    if (!source_) {
        const RectGrid& g = *grid_;
        const double rx = std::max(std::abs(g.node[0].front()), std::abs(g.node[0].back()));
        const double ry = std::max(std::abs(g.node[1].front()), std::abs(g.node[1].back()));
        source_ = std::make_shared<CoilSource>(config_.coil, std::hypot(rx, ry), g.node[2].front(), g.node[2].back(),
                                               20e-6);
    }
    build_source();
    build_ring();
}

void FieldSolver::build_source() {
    const RectGrid& g = *grid_;
    const int nx = g.n[0];
    const int ny = g.n[1];
    const int nz = g.n[2];
    static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const AxisymmetricSource& src = *source_;

    // Circulation of A = g (-y, x, 0) along x-edges (Lx) and y-edges (Ly).
    std::vector<double> lx(static_cast<std::size_t>(nx) * (ny + 1) * (nz + 1));
    std::vector<double> ly(static_cast<std::size_t>(nx + 1) * ny * (nz + 1));
    parallel_for(static_cast<std::size_t>(nz + 1), [&](std::size_t kb, std::size_t ke) {
        for (std::size_t k = kb; k < ke; ++k) {
            const double z = g.node[2][k];
            for (int j = 0; j <= ny; ++j) {
                const double y = g.node[1][j];
                for (int i = 0; i < nx; ++i) {
                    const double xm = g.center(0, i);
                    const double hw = 0.5 * g.width(0, i);
                    double s = 0.0;
                    for (int q = 0; q < 3; ++q) {
                        const double x = xm + hw * gx[q];
                        s += gw[q] * (-y) * src.g(std::hypot(x, y), z);
                    }
                    lx[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny + 1) * k)] = s * hw;
                }
            }
            for (int j = 0; j < ny; ++j) {
                const double ym = g.center(1, j);
                const double hw = 0.5 * g.width(1, j);
                for (int i = 0; i <= nx; ++i) {
                    const double x = g.node[0][i];
                    double s = 0.0;
                    for (int q = 0; q < 3; ++q) {
                        const double y = ym + hw * gx[q];
                        s += gw[q] * x * src.g(std::hypot(x, y), z);
                    }
                    ly[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx + 1) * (j + static_cast<std::size_t>(ny) * k)] = s * hw;
                }
            }
        }
    });
    auto LX = [&](int i, int j, int k) {
        return lx[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny + 1) * k)];
    };
    auto LY = [&](int i, int j, int k) {
        return ly[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx + 1) * (j + static_cast<std::size_t>(ny) * k)];
    };

    auto fx = std::make_shared<std::vector<double>>(g.faces(0));
    auto fy = std::make_shared<std::vector<double>>(g.faces(1));
    auto fz = std::make_shared<std::vector<double>>(g.faces(2));
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i <= nx; ++i) (*fx)[g.face(0, i, j, k)] = LY(i, j, k) - LY(i, j, k + 1);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i < nx; ++i) (*fy)[g.face(1, i, j, k)] = LX(i, j, k + 1) - LX(i, j, k);
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                (*fz)[g.face(2, i, j, k)] = LY(i + 1, j, k) - LY(i, j, k) - LX(i, j + 1, k) + LX(i, j, k);
    flux_[0] = fx;
    flux_[1] = fy;
    flux_[2] = fz;
}

void FieldSolver::build_ring() {
    const RectGrid& g = *grid_;
    const auto& ring = config_.ring;
    auto tags = std::make_shared<std::vector<std::uint8_t>>(g.cells(), 0);
    if (options_.include_ring) {
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i)
                    if (ring.contains(g.cell_center(i, j, k))) (*tags)[g.cell(i, j, k)] = 1;
    }
    ring_ = tags;
    const double mu_min = ring.diamagnet_permeability;
    for (int a = 0; a < 3; ++a) {
        base_mu_[a].assign(g.faces(a), 1.0);
        int lim[3] = {g.n[0], g.n[1], g.n[2]};
        for (int k = 0; k < lim[2]; ++k)
            for (int j = 0; j < lim[1]; ++j)
                for (int i = 0; i < lim[0]; ++i) {
                    int idx[3] = {i, j, k};
                    if (idx[a] == 0) continue;
                    int lo[3] = {i, j, k};
                    lo[a] -= 1;
                    const bool r1 = (*tags)[g.cell(lo[0], lo[1], lo[2])];
                    const bool r2 = (*tags)[g.cell(i, j, k)];
                    if (!r1 && !r2) continue;
                    const double h1 = g.width(a, idx[a] - 1);
                    const double h2 = g.width(a, idx[a]);
                    const double m1 = r1 ? mu_min : 1.0;
                    const double m2 = r2 ? mu_min : 1.0;
                    base_mu_[a][g.face(a, i, j, k)] = (h1 + h2) / (h1 / m1 + h2 / m2);
                }
    }

    cut_faces_.clear();
    if (options_.include_ring && ring.closed()) {
        // Cut surface: the z-node plane nearest the ring mid-plane, out to the outer radius.
        const auto& zn = g.node[2];
        int kc = 1;
        for (int k = 1; k < g.n[2]; ++k)
            if (std::abs(zn[k] - ring.center_z) < std::abs(zn[kc] - ring.center_z)) kc = k;
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                if (std::hypot(g.center(0, i), g.center(1, j)) < ring.outer_radius())
                    cut_faces_.push_back(g.face(2, i, j, kc));
    }
}

void FieldSolver::sphere_face_mu(const Vec3& c, std::vector<double> mu[3]) const {
    const RectGrid& g = *grid_;
    const double r = config_.sphere.radius();
    const double mus = config_.sphere.material.relative_permeability;
    const double mu_min = config_.ring.diamagnet_permeability;
    const auto& tags = *ring_;
    const int ns = std::max(1, options_.subsamples);
    int lo[3];
    int hi[3];
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0, g.locate(a, c[a] - r) - 1);
        hi[a] = std::min(g.n[a] - 1, g.locate(a, c[a] + r) + 1);
    }
    for (int a = 0; a < 3; ++a) {
        const int u = kTransverse[a][0];
        const int v = kTransverse[a][1];
        for (int k = lo[2]; k <= hi[2]; ++k)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int i = lo[0]; i <= hi[0]; ++i) {
                    int idx[3] = {i, j, k};
                    if (idx[a] == 0) continue;  // face at node idx[a] between cells idx[a]-1 and idx[a]
                    int lc[3] = {i, j, k};
                    lc[a] -= 1;
                    const double x1 = g.center(a, idx[a] - 1);
                    const double x2 = g.center(a, idx[a]);
                    const double xf = g.node[a][idx[a]];
                    const double m1 = tags[g.cell(lc[0], lc[1], lc[2])] ? mu_min : 1.0;
                    const double m2 = tags[g.cell(i, j, k)] ? mu_min : 1.0;
                    const double u0 = g.node[u][idx[u]];
                    const double du = g.width(u, idx[u]);
                    const double v0 = g.node[v][idx[v]];
                    const double dv = g.width(v, idx[v]);
                    double conductance = 0.0;
                    double inside = 0.0;
                    for (int su = 0; su < ns; ++su)
                        for (int sv = 0; sv < ns; ++sv) {
                            const double pu = u0 + (su + 0.5) * du / ns - c[u];
                            const double pv = v0 + (sv + 0.5) * dv / ns - c[v];
                            const double d2 = r * r - pu * pu - pv * pv;
                            double in1 = 0.0;
                            double in2 = 0.0;
                            if (d2 > 0.0) {
                                const double h = std::sqrt(d2);
                                const double s0 = c[a] - h;
                                const double s1 = c[a] + h;
                                in1 = std::max(0.0, std::min(s1, xf) - std::max(s0, x1));
                                in2 = std::max(0.0, std::min(s1, x2) - std::max(s0, xf));
                            }
                            inside += in1 + in2;
                            const double res = (xf - x1 - in1) / m1 + in1 / mus + (x2 - xf - in2) / m2 + in2 / mus;
                            conductance += (x2 - x1) / res;
                        }
                    if (inside == 0.0) continue;
                    const std::size_t f = g.face(a, i, j, k);
                    // Series along each normal line, parallel across the lines.
                    mu[a][f] = conductance / (ns * ns);
                }
    }
}

FieldSolution FieldSolver::solve(std::optional<Vec3> sphere_center, double current) {
    const RectGrid& g = *grid_;
    const std::size_t ncell = g.cells();
    const bool with_sphere = sphere_center.has_value() && options_.include_sphere;
    if (with_sphere) {
        const double r = config_.sphere.radius();
        for (int a = 0; a < 3; ++a) {
            if ((*sphere_center)[a] - r <= g.node[a].front() || (*sphere_center)[a] + r >= g.node[a].back())
                throw DomainError("sphere extends outside the grid");
        }
        if (options_.include_ring) {
            // The sphere may not overlap the ring voxels.
            const Vec3 c = *sphere_center;
            const double r2 = r * r;
            for (int k = g.locate(2, c.z - r); k <= g.locate(2, c.z + r); ++k)
                for (int j = g.locate(1, c.y - r); j <= g.locate(1, c.y + r); ++j)
                    for (int i = g.locate(0, c.x - r); i <= g.locate(0, c.x + r); ++i) {
                        if (!(*ring_)[g.cell(i, j, k)]) continue;
                        Vec3 q;
                        for (int a = 0; a < 3; ++a) {
                            const int id = a == 0 ? i : (a == 1 ? j : k);
                            q[a] = std::clamp(c[a], g.node[a][id], g.node[a][id + 1]);
                        }
                        if (dot(q - c, q - c) < r2) throw DomainError("sphere overlaps the superconductor");
                    }
        }
    }

    std::vector<double> mu[3] = {base_mu_[0], base_mu_[1], base_mu_[2]};
    if (with_sphere) sphere_face_mu(*sphere_center, mu);

    Stencil7 st;
    for (int a = 0; a < 3; ++a) {
        st.n[a] = g.n[a];
        for (int i = 0; i < g.n[a]; ++i) st.h[a].push_back(g.width(a, i));
    }
    for (int a = 0; a < 3; ++a) {
        st.t[a].assign(g.faces(a), 0.0);
        for (int k = 0; k < g.n[2] + (a == 2); ++k)
            for (int j = 0; j < g.n[1] + (a == 1); ++j)
                for (int i = 0; i < g.n[0] + (a == 0); ++i) {
                    const int idx[3] = {i, j, k};
                    if (idx[a] == 0 || idx[a] == g.n[a]) continue;
                    const std::size_t f = g.face(a, i, j, k);
                    st.t[a][f] = mu[a][f] * face_area_of(g, a, idx) / face_span(g, a, idx[a]);
                }
    }

    std::vector<double> rhs(ncell, 0.0);
    const std::size_t stride[3] = {1, static_cast<std::size_t>(g.n[0]), static_cast<std::size_t>(g.n[0]) * g.n[1]};
    for (int a = 0; a < 3; ++a) {
        for (int k = 0; k < g.n[2] + (a == 2); ++k)
            for (int j = 0; j < g.n[1] + (a == 1); ++j)
                for (int i = 0; i < g.n[0] + (a == 0); ++i) {
                    const int idx[3] = {i, j, k};
                    if (idx[a] == 0 || idx[a] == g.n[a]) continue;
                    const std::size_t f = g.face(a, i, j, k);
                    const double m = mu[a][f];
                    if (m == 1.0) continue;
                    const double q = (m - 1.0) * (*flux_[a])[f] * current;
                    const std::size_t c2 = g.cell(i, j, k);
                    const std::size_t c1 = c2 - stride[a];
                    rhs[c1] -= q;
                    rhs[c2] += q;
                }
    }

    MultigridPCG::Options mo;
    mo.tolerance = config_.analysis.solver_tolerance;
    mo.max_iterations = config_.analysis.solver_max_iterations;
    MultigridPCG pcg(mo);
    pcg.setup(st);

    std::vector<double> psi(ncell, 0.0);
    if (psi_unit_.size() == ncell) {
        for (std::size_t c = 0; c < ncell; ++c) psi[c] = psi_unit_[c] * current;
    }
    SolveStats stats = pcg.solve(rhs, psi);
    ++solve_count_;
    if (!stats.converged) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "field solve did not converge: relative residual %.3e after %d iterations",
                      stats.relative_residual, stats.iterations);
        throw NumericalError(buf);
    }
    if (current != 0.0) {
        psi_unit_ = psi;
        for (double& v : psi_unit_) v /= current;
    }

    FieldSolution sol;
    sol.grid = grid_;
    for (int a = 0; a < 3; ++a) sol.unit_source_flux[a] = flux_[a];
    sol.ring_cells = ring_;
    sol.current = current;
    if (with_sphere) sol.sphere_center = sphere_center;
    sol.sphere_radius = config_.sphere.radius();
    sol.sphere_permeability = config_.sphere.material.relative_permeability;
    sol.residual_norm = stats.relative_residual;
    sol.iterations = stats.iterations;

    // Closed ring: superpose the unit-jump response so that no flux threads the hole.
    double jump = 0.0;
    std::vector<double> jump_face(cut_faces_.size(), 0.0);
    auto face_b = [&](int a, std::size_t f, const int idx[3], const std::vector<double>& p, double src_scale,
                      double jmp) {
        const double area = face_area_of(g, a, idx);
        const double bs = src_scale * (*flux_[a])[f] / area;
        if (idx[a] == 0 || idx[a] == g.n[a]) return bs;
        const std::size_t c2 = g.cell(idx[0], idx[1], idx[2]);
        const std::size_t c1 = c2 - stride[a];
        return mu[a][f] * (bs - (p[c2] - p[c1] - jmp) / face_span(g, a, idx[a]));
    };
    if (!cut_faces_.empty()) {
        std::vector<double> rhs1(ncell, 0.0);
        for (std::size_t f : cut_faces_) {
            const FaceIdx fi = unpack_face(g, 2, f);
            const int idx[3] = {fi.i, fi.j, fi.k};
            const double t = st.t[2][f];
            const std::size_t c2 = g.cell(fi.i, fi.j, fi.k);
            rhs1[c2 - stride[2]] -= t;
            rhs1[c2] += t;
            (void)idx;
        }
        if (psi_jump_.size() != ncell) psi_jump_.assign(ncell, 0.0);
        SolveStats s1 = pcg.solve(rhs1, psi_jump_);
        ++solve_count_;
        if (!s1.converged) throw NumericalError("closed-ring jump solve did not converge");
        double phi0 = 0.0;
        double phi1 = 0.0;
        for (std::size_t f : cut_faces_) {
            const FaceIdx fi = unpack_face(g, 2, f);
            const int idx[3] = {fi.i, fi.j, fi.k};
            const std::size_t c2 = g.cell(fi.i, fi.j, fi.k);
            if ((*ring_)[c2] || (*ring_)[c2 - stride[2]]) continue;
            const double area = face_area_of(g, 2, idx);
            phi0 += face_b(2, f, idx, psi, current, 0.0) * area;
            phi1 += face_b(2, f, idx, psi_jump_, 0.0, 1.0) * area;
        }
        jump = -phi0 / phi1;
        for (std::size_t c = 0; c < ncell; ++c) psi[c] += jump * psi_jump_[c];
    }

    for (int a = 0; a < 3; ++a) {
        sol.b[a].assign(g.faces(a), 0.0);
        for (int k = 0; k < g.n[2] + (a == 2); ++k)
            for (int j = 0; j < g.n[1] + (a == 1); ++j)
                for (int i = 0; i < g.n[0] + (a == 0); ++i) {
                    const int idx[3] = {i, j, k};
                    sol.b[a][g.face(a, i, j, k)] = face_b(a, g.face(a, i, j, k), idx, psi, current, 0.0);
                }
    }
    for (std::size_t f : cut_faces_) {
        const FaceIdx fi = unpack_face(g, 2, f);
        const int idx[3] = {fi.i, fi.j, fi.k};
        sol.b[2][f] = face_b(2, f, idx, psi, current, jump);
    }

    // Hole flux through the ring mid-plane (informational; zero by construction when closed).
    if (options_.include_ring) {
        const auto& ring = config_.ring;
        const auto& zn = g.node[2];
        int kc = 1;
        for (int k = 1; k < g.n[2]; ++k)
            if (std::abs(zn[k] - ring.center_z) < std::abs(zn[kc] - ring.center_z)) kc = k;
        double phi = 0.0;
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                if (std::hypot(g.center(0, i), g.center(1, j)) >= ring.outer_radius()) continue;
                const std::size_t c2 = g.cell(i, j, kc);
                if ((*ring_)[c2] || (*ring_)[c2 - stride[2]]) continue;
                phi += sol.b[2][g.face(2, i, j, kc)] * g.width(0, i) * g.width(1, j);
            }
        sol.hole_flux = phi;
    }

    // Validity guards, reported as warnings.
    const Vec3 probe_at = with_sphere ? *sphere_center : Vec3{0.0, 0.0, config_.ring.center_z};
    const double b_applied = std::abs(current) * norm(source_->field(probe_at));
    char buf[200];
    const double b_sat = mu0 * config_.sphere.material.saturation_magnetization;
    if (with_sphere && b_applied >= b_sat) {
        std::snprintf(buf, sizeof buf, "applied field %.4g T exceeds the sphere saturation field %.4g T", b_applied, b_sat);
        sol.warnings.emplace_back(buf);
    }
    const double b_pen = config_.ring.penetration_field_at(config_.ambient.temperature);
    if (options_.include_ring && b_applied >= b_pen) {
        std::snprintf(buf, sizeof buf, "applied field %.4g T exceeds the ring penetration field %.4g T", b_applied, b_pen);
        sol.warnings.emplace_back(buf);
    }
    return sol;
}

FieldSolution solve_magnetostatics(const ExperimentConfig& config, double current) {
    FieldSolver solver(config);
    return solver.solve(config.sphere.initial_position, current);
}

double magnet_constant(const ExperimentConfig& config) {
    FieldSolver solver(config);
    const FieldSolution s = solver.solve(std::nullopt, 1.0);
    return field_probe(s, {0.0, 0.0, config.ring.center_z}).z;
}

double coil_only_magnet_constant(const ExperimentConfig& config) {
    return coil_source_field(config.coil, 1.0, {0.0, 0.0, config.ring.center_z}).z;
}

}  // namespace levitrap
