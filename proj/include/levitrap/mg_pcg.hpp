#pragma once

// Conjugate gradients for the 7-point, cell-centred, pure-Neumann operator
//   (A x)_c = sum_f T_f (x_c - x_nb)
// preconditioned by one symmetric multigrid V-cycle: piecewise-constant aggregation,
// Galerkin coarse operators, red-black Gauss-Seidel, dense Cholesky at the bottom.
// Aggregation is per axis and follows the cell widths (pairs merge only while the merged
// width stays near the level's target size), so strongly stretched cells are coarsened
// in the other directions first. That keeps the V-cycle effective on graded grids.

#include <cstddef>
#include <memory>
#include <vector>

namespace levitrap {

struct Stencil7 {
    int n[3] = {0, 0, 0};
    // Face transmissibilities, indexed like RectGrid::face(axis, ...). Boundary faces are 0.
    std::vector<double> t[3];
    // Cell widths per axis, used only to steer coarsening; empty means uniform.
    std::vector<double> h[3];

    std::size_t cells() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;  // ||b - A x|| / ||b||, recomputed at exit
    bool converged = false;
};

class MultigridPCG {
public:
    struct Options {
        double tolerance = 1e-9;
        int max_iterations = 400;
        int smoothing_steps = 2;
        double coarse_scale = 1.0;  // multiplies Galerkin coarse transmissibilities
        std::size_t coarsest_cells = 600;
    };

    MultigridPCG();
    explicit MultigridPCG(Options opt);
    ~MultigridPCG();

    /// Builds the hierarchy for `a` (the stencil is copied).
    void setup(const Stencil7& a);
    /// Solves A x = b; x holds the initial guess. The right-hand side must sum to zero.
    SolveStats solve(const std::vector<double>& b, std::vector<double>& x) const;

private:
    struct Level;
    Options opt_;
    std::vector<std::unique_ptr<Level>> levels_;
    std::vector<double> coarse_factor_;  // dense Cholesky factor, row-major
    std::size_t coarse_n_ = 0;

    void vcycle(std::size_t l, const std::vector<double>& b, std::vector<double>& x) const;
    void coarse_solve(const std::vector<double>& b, std::vector<double>& x) const;
};

}  // namespace levitrap
