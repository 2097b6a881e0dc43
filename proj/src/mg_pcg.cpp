#include "levitrap/mg_pcg.hpp"

#include "levitrap/errors.hpp"
#include "levitrap/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace levitrap {

namespace {

inline std::size_t face_index(const int n[3], int axis, int i, int j, int k) {
    const std::size_t mx = static_cast<std::size_t>(n[0] + (axis == 0));
    const std::size_t my = static_cast<std::size_t>(n[1] + (axis == 1));
    return static_cast<std::size_t>(i) + mx * (static_cast<std::size_t>(j) + my * static_cast<std::size_t>(k));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return parallel_sum(a.size(), [&](std::size_t s, std::size_t e) {
        double acc = 0.0;
        for (std::size_t i = s; i < e; ++i) acc += a[i] * b[i];
        return acc;
    });
}

void remove_mean(std::vector<double>& v) {
    const double s = parallel_sum(v.size(), [&](std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t i = b; i < e; ++i) acc += v[i];
        return acc;
    });
    const double m = s / static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

}  // namespace

void Stencil7::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const int nx = n[0];
    const int ny = n[1];
    const int nz = n[2];
    y.resize(cells());
    const std::size_t sy = static_cast<std::size_t>(nx);
    const std::size_t sz = static_cast<std::size_t>(nx) * ny;
    parallel_for(static_cast<std::size_t>(nz), [&](std::size_t kb, std::size_t ke) {
        for (int k = static_cast<int>(kb); k < static_cast<int>(ke); ++k) {
            for (int j = 0; j < ny; ++j) {
                const std::size_t row = sy * j + sz * k;
                const std::size_t fx = face_index(n, 0, 0, j, k);
                const std::size_t fy0 = face_index(n, 1, 0, j, k);
                const std::size_t fy1 = face_index(n, 1, 0, j + 1, k);
                const std::size_t fz0 = face_index(n, 2, 0, j, k);
                const std::size_t fz1 = face_index(n, 2, 0, j, k + 1);
                for (int i = 0; i < nx; ++i) {
                    const std::size_t c = row + i;
                    const double xc = x[c];
                    double s = 0.0;
                    if (i > 0) s += t[0][fx + i] * (xc - x[c - 1]);
                    if (i < nx - 1) s += t[0][fx + i + 1] * (xc - x[c + 1]);
                    if (j > 0) s += t[1][fy0 + i] * (xc - x[c - sy]);
                    if (j < ny - 1) s += t[1][fy1 + i] * (xc - x[c + sy]);
                    if (k > 0) s += t[2][fz0 + i] * (xc - x[c - sz]);
                    if (k < nz - 1) s += t[2][fz1 + i] * (xc - x[c + sz]);
                    y[c] = s;
                }
            }
        }
    });
}

struct MultigridPCG::Level {
    Stencil7 a;
    std::vector<double> diag;
    std::vector<int> parent[3];  // fine index -> index on the next coarser level
    mutable std::vector<double> x, b, r;

    void smooth(const std::vector<double>& rhs, std::vector<double>& u, int color) const {
        const int nx = a.n[0];
        const int ny = a.n[1];
        const int nz = a.n[2];
        const std::size_t sy = static_cast<std::size_t>(nx);
        const std::size_t sz = static_cast<std::size_t>(nx) * ny;
        const auto& n = a.n;
        parallel_for(static_cast<std::size_t>(nz), [&](std::size_t kb, std::size_t ke) {
            for (int k = static_cast<int>(kb); k < static_cast<int>(ke); ++k) {
                for (int j = 0; j < ny; ++j) {
                    const std::size_t row = sy * j + sz * k;
                    const std::size_t fx = face_index(n, 0, 0, j, k);
                    const std::size_t fy0 = face_index(n, 1, 0, j, k);
                    const std::size_t fy1 = face_index(n, 1, 0, j + 1, k);
                    const std::size_t fz0 = face_index(n, 2, 0, j, k);
                    const std::size_t fz1 = face_index(n, 2, 0, j, k + 1);
                    for (int i = (j + k + color) & 1; i < nx; i += 2) {
                        const std::size_t c = row + i;
                        double s = rhs[c];
                        if (i > 0) s += a.t[0][fx + i] * u[c - 1];
                        if (i < nx - 1) s += a.t[0][fx + i + 1] * u[c + 1];
                        if (j > 0) s += a.t[1][fy0 + i] * u[c - sy];
                        if (j < ny - 1) s += a.t[1][fy1 + i] * u[c + sy];
                        if (k > 0) s += a.t[2][fz0 + i] * u[c - sz];
                        if (k < nz - 1) s += a.t[2][fz1 + i] * u[c + sz];
                        u[c] = diag[c] > 0.0 ? s / diag[c] : 0.0;
                    }
                }
            }
        });
    }
};

MultigridPCG::MultigridPCG() = default;
MultigridPCG::MultigridPCG(Options opt) : opt_(opt) {}
MultigridPCG::~MultigridPCG() = default;

void MultigridPCG::setup(const Stencil7& fine) {
    levels_.clear();
    auto make_level = [](Stencil7 a) {
        auto lv = std::make_unique<Level>();
        lv->a = std::move(a);
        const auto& n = lv->a.n;
        const std::size_t cells = lv->a.cells();
        lv->diag.assign(cells, 0.0);
        for (int k = 0; k < n[2]; ++k)
            for (int j = 0; j < n[1]; ++j)
                for (int i = 0; i < n[0]; ++i) {
                    const std::size_t c = static_cast<std::size_t>(i) + static_cast<std::size_t>(n[0]) * (j + static_cast<std::size_t>(n[1]) * k);
                    lv->diag[c] = lv->a.t[0][face_index(n, 0, i, j, k)] + lv->a.t[0][face_index(n, 0, i + 1, j, k)] +
                                  lv->a.t[1][face_index(n, 1, i, j, k)] + lv->a.t[1][face_index(n, 1, i, j + 1, k)] +
                                  lv->a.t[2][face_index(n, 2, i, j, k)] + lv->a.t[2][face_index(n, 2, i, j, k + 1)];
                }
        lv->x.assign(cells, 0.0);
        lv->b.assign(cells, 0.0);
        lv->r.assign(cells, 0.0);
        return lv;
    };

    levels_.push_back(make_level(fine));
    for (int d = 0; d < 3; ++d) {
        if (levels_.back()->a.h[d].empty()) levels_.back()->a.h[d].assign(static_cast<std::size_t>(fine.n[d]), 1.0);
    }
    double hmin = 1e300;
    for (int d = 0; d < 3; ++d)
        for (double w : levels_.back()->a.h[d]) hmin = std::min(hmin, w);

    for (int level = 1; levels_.back()->a.cells() > opt_.coarsest_cells; ++level) {
        Level& fl = *levels_.back();
        const Stencil7& f = fl.a;
        const double target = 1.05 * hmin * std::ldexp(1.0, level);
        Stencil7 c;
        std::vector<int> first[3];  // coarse index -> first fine child
        bool reduced = false;
        for (int d = 0; d < 3; ++d) {
            auto& par = fl.parent[d];
            par.assign(static_cast<std::size_t>(f.n[d]), 0);
            int nc = 0;
            for (int i = 0; i < f.n[d];) {
                first[d].push_back(i);
                c.h[d].push_back(f.h[d][i]);
                par[i] = nc;
                if (i + 1 < f.n[d] && f.h[d][i] + f.h[d][i + 1] <= target) {
                    par[i + 1] = nc;
                    c.h[d].back() += f.h[d][i + 1];
                    i += 2;
                    reduced = true;
                } else {
                    i += 1;
                }
                ++nc;
            }
            first[d].push_back(f.n[d]);
            c.n[d] = nc;
        }
        if (!reduced) {
            if (f.cells() > 20 * opt_.coarsest_cells) throw NumericalError("multigrid coarsening stalled");
            for (int d = 0; d < 3; ++d) fl.parent[d].clear();
            break;
        }
        for (int axis = 0; axis < 3; ++axis) {
            std::size_t count = 1;
            for (int d = 0; d < 3; ++d) count *= static_cast<std::size_t>(c.n[d] + (d == axis));
            c.t[axis].assign(count, 0.0);
            for (int K = 0; K < c.n[2] + (axis == 2); ++K)
                for (int J = 0; J < c.n[1] + (axis == 1); ++J)
                    for (int I = 0; I < c.n[0] + (axis == 0); ++I) {
                        const int idx[3] = {I, J, K};
                        if (idx[axis] == 0 || idx[axis] == c.n[axis]) continue;  // boundary
                        int lo[3];
                        int hi[3];
                        for (int d = 0; d < 3; ++d) {
                            if (d == axis) {
                                lo[d] = hi[d] = first[d][idx[d]];
                            } else {
                                lo[d] = first[d][idx[d]];
                                hi[d] = first[d][idx[d] + 1] - 1;
                            }
                        }
                        double s = 0.0;
                        for (int k = lo[2]; k <= hi[2]; ++k)
                            for (int j = lo[1]; j <= hi[1]; ++j)
                                for (int i = lo[0]; i <= hi[0]; ++i) s += f.t[axis][face_index(f.n, axis, i, j, k)];
                        c.t[axis][face_index(c.n, axis, I, J, K)] = opt_.coarse_scale * s;
                    }
        }
        levels_.push_back(make_level(std::move(c)));
    }

    // Dense factorization of the coarsest operator plus a rank-one shift on the constants.
    const Level& lc = *levels_.back();
    const std::size_t nc = lc.a.cells();
    coarse_n_ = nc;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(nc));
    std::vector<double> e(nc, 0.0);
    std::vector<double> col;
    double mean_diag = 0.0;
    for (std::size_t c = 0; c < nc; ++c) mean_diag += lc.diag[c];
    mean_diag /= static_cast<double>(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        e[c] = 1.0;
        lc.a.apply(e, col);
        for (std::size_t r = 0; r < nc; ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
        e[c] = 0.0;
    }
    m.array() += mean_diag / static_cast<double>(nc);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NumericalError("coarse-grid factorization failed");
    Eigen::MatrixXd lmat = llt.matrixL();
    coarse_factor_.assign(lmat.data(), lmat.data() + lmat.size());  // column-major L
}

void MultigridPCG::coarse_solve(const std::vector<double>& b, std::vector<double>& x) const {
    const std::size_t n = coarse_n_;
    x.assign(b.begin(), b.end());
    // L is column-major: L(r, c) = f[c * n + r]
    const auto& f = coarse_factor_;
    for (std::size_t r = 0; r < n; ++r) {
        double s = x[r];
        for (std::size_t c = 0; c < r; ++c) s -= f[c * n + r] * x[c];
        x[r] = s / f[r * n + r];
    }
    for (std::size_t r = n; r-- > 0;) {
        double s = x[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= f[r * n + c] * x[c];
        x[r] = s / f[r * n + r];
    }
}

void MultigridPCG::vcycle(std::size_t l, const std::vector<double>& b, std::vector<double>& x) const {
    const Level& lv = *levels_[l];
    if (l + 1 == levels_.size()) {
        coarse_solve(b, x);
        return;
    }
    std::fill(x.begin(), x.end(), 0.0);
    for (int s = 0; s < opt_.smoothing_steps; ++s) {
        lv.smooth(b, x, 0);
        lv.smooth(b, x, 1);
    }
    lv.a.apply(x, lv.r);
    for (std::size_t c = 0; c < lv.r.size(); ++c) lv.r[c] = b[c] - lv.r[c];

    const Level& cl = *levels_[l + 1];
    const int* fn = lv.a.n;
    const int* cn = cl.a.n;
    const auto& pi = lv.parent[0];
    const auto& pj = lv.parent[1];
    const auto& pk = lv.parent[2];
    std::fill(cl.b.begin(), cl.b.end(), 0.0);
    for (int k = 0; k < fn[2]; ++k)
        for (int j = 0; j < fn[1]; ++j) {
            const std::size_t frow = static_cast<std::size_t>(fn[0]) * (j + static_cast<std::size_t>(fn[1]) * k);
            const std::size_t crow = static_cast<std::size_t>(cn[0]) * (pj[j] + static_cast<std::size_t>(cn[1]) * pk[k]);
            for (int i = 0; i < fn[0]; ++i) cl.b[crow + pi[i]] += lv.r[frow + i];
        }
    vcycle(l + 1, cl.b, cl.x);
    for (int k = 0; k < fn[2]; ++k)
        for (int j = 0; j < fn[1]; ++j) {
            const std::size_t frow = static_cast<std::size_t>(fn[0]) * (j + static_cast<std::size_t>(fn[1]) * k);
            const std::size_t crow = static_cast<std::size_t>(cn[0]) * (pj[j] + static_cast<std::size_t>(cn[1]) * pk[k]);
            for (int i = 0; i < fn[0]; ++i) x[frow + i] += cl.x[crow + pi[i]];
        }
    for (int s = 0; s < opt_.smoothing_steps; ++s) {
        lv.smooth(b, x, 1);
        lv.smooth(b, x, 0);
    }
}

SolveStats MultigridPCG::solve(const std::vector<double>& b, std::vector<double>& x) const {
    if (levels_.empty()) throw NumericalError("solver used before setup");
    const Stencil7& a = levels_.front()->a;
    const std::size_t n = a.cells();
    if (b.size() != n) throw NumericalError("right-hand side has the wrong size");
    if (x.size() != n) x.assign(n, 0.0);

    SolveStats st;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        st.converged = true;
        return st;
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    auto true_residual = [&] {
        a.apply(x, q);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        remove_mean(r);
        return std::sqrt(dot(r, r)) / bnorm;
    };

    double rel = true_residual();
    bool stalled = false;
    while (!stalled && st.iterations < opt_.max_iterations && rel > opt_.tolerance) {
        vcycle(0, r, z);
        remove_mean(z);
        p = z;
        double rz = dot(r, z);
        while (st.iterations < opt_.max_iterations) {
            a.apply(p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) {
                stalled = true;
                break;
            }
            const double alpha = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            ++st.iterations;
            rel = std::sqrt(dot(r, r)) / bnorm;
            if (rel <= opt_.tolerance) break;
            vcycle(0, r, z);
            remove_mean(z);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        rel = true_residual();  // restart from the true residual if the recursion drifted
    }
    remove_mean(x);
    st.relative_residual = rel;
    st.converged = rel <= opt_.tolerance;
    return st;
}

}  // namespace levitrap
