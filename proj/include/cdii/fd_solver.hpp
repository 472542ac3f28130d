#pragma once

#include "cdii/grid.hpp"

#include <functional>

namespace cdii {

/// 5-point finite-difference discretization of -div(gamma grad u) = -g with
/// Dirichlet data eliminated into the right-hand side. Off-diagonal matrix
/// entries are -coupling; couplings are shared between the two incident
/// nodes, so symmetry holds structurally. Boundary rows are identity rows.
struct LinearSystem {
    int nx = 0;
    int ny = 0;
    std::vector<double> diag;       // per node
    std::vector<double> coupling_x; // edge (i,j)-(i+1,j), size (nx-1)*ny
    std::vector<double> coupling_y; // edge (i,j)-(i,j+1), size nx*(ny-1)
    std::vector<double> rhs;

    double cx(int i, int j) const { return coupling_x[static_cast<std::size_t>(j) * (nx - 1) + i]; }
    double cy(int i, int j) const { return coupling_y[static_cast<std::size_t>(j) * nx + i]; }

    /// y = A x.
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

using BoundaryFn = std::function<double(double, double)>;
using SourceFn = std::function<double(double, double)>;

/// Assembles the conservative-flux discretization of div(gamma grad u) = g
/// with u = f on the boundary. The flux coefficient on each edge uses the
/// harmonic mean of gamma at the two endpoint nodes. Throws if gamma is not
/// strictly positive everywhere, naming the node.
LinearSystem assemble(const GridField& gamma, const BoundaryFn& f, const SourceFn& g = nullptr);

/// Unpreconditioned conjugate gradients down to a relative residual of tol
/// (verified against the recomputed true residual). Boundary values are
/// re-imposed exactly on the returned field. Throws on non-convergence,
/// reporting the final residual.
GridField solve_cg(const LinearSystem& system, double tol = 1e-10, int max_iter = 0);

/// a(i,j) = gamma * |grad u| with central differences at interior nodes and
/// one-sided second-order differences on the boundary.
GridField current_magnitude(const GridField& gamma, const GridField& u);

} // namespace cdii
