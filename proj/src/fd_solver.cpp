#include "cdii/fd_solver.hpp"

#include <cmath>
#include <string>

namespace cdii {

void LinearSystem::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(x.size(), 0.0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            double acc = diag[k] * x[k];
            if (i > 0) {
                acc -= cx(i - 1, j) * x[k - 1];
            }
            if (i + 1 < nx) {
                acc -= cx(i, j) * x[k + 1];
            }
            if (j > 0) {
                acc -= cy(i, j - 1) * x[k - static_cast<std::size_t>(nx)];
            }
            if (j + 1 < ny) {
                acc -= cy(i, j) * x[k + static_cast<std::size_t>(nx)];
            }
            y[k] = acc;
        }
    }
}

namespace {

bool is_boundary(int i, int j, int nx, int ny) {
    return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
}

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

} // namespace

LinearSystem assemble(const GridField& gamma, const BoundaryFn& f, const SourceFn& g) {
    const int nx = gamma.nx;
    const int ny = gamma.ny;
    if (nx < 3 || ny < 3) {
        throw ConfigError("grid must be at least 3x3 nodes");
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!(gamma.at(i, j) > 0.0)) {
                throw NumericError("conductivity is not positive at node (" + std::to_string(i) +
                                   ", " + std::to_string(j) + "): " + std::to_string(gamma.at(i, j)));
            }
        }
    }

    const double hx = 1.0 / (nx - 1);
    const double hy = 1.0 / (ny - 1);
    const double ax = 1.0 / (hx * hx);
    const double ay = 1.0 / (hy * hy);

    LinearSystem s;
    s.nx = nx;
    s.ny = ny;
    s.diag.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    s.rhs.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    s.coupling_x.assign(static_cast<std::size_t>(nx - 1) * ny, 0.0);
    s.coupling_y.assign(static_cast<std::size_t>(nx) * (ny - 1), 0.0);

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            s.coupling_x[static_cast<std::size_t>(j) * (nx - 1) + i] =
                ax * harmonic_mean(gamma.at(i, j), gamma.at(i + 1, j));
        }
    }
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            s.coupling_y[static_cast<std::size_t>(j) * nx + i] =
                ay * harmonic_mean(gamma.at(i, j), gamma.at(i, j + 1));
        }
    }

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            if (is_boundary(i, j, nx, ny)) {
                continue;
            }
            const double cw = s.cx(i - 1, j);
            const double ce = s.cx(i, j);
            const double cs = s.cy(i, j - 1);
            const double cn = s.cy(i, j);
            s.diag[k] = cw + ce + cs + cn;
            s.rhs[k] = g ? -g(gamma.x_of(i), gamma.y_of(j)) : 0.0;
            // Couplings into Dirichlet nodes move to the right-hand side.
            if (i - 1 == 0) {
                s.rhs[k] += cw * f(gamma.x_of(0), gamma.y_of(j));
            }
            if (i + 1 == nx - 1) {
                s.rhs[k] += ce * f(gamma.x_of(nx - 1), gamma.y_of(j));
            }
            if (j - 1 == 0) {
                s.rhs[k] += cs * f(gamma.x_of(i), gamma.y_of(0));
            }
            if (j + 1 == ny - 1) {
                s.rhs[k] += cn * f(gamma.x_of(i), gamma.y_of(ny - 1));
            }
        }
    }

    // Identity rows for the boundary; their couplings are zeroed so that the
    // eliminated system stays symmetric.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!is_boundary(i, j, nx, ny)) {
                continue;
            }
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            s.diag[k] = 1.0;
            s.rhs[k] = f(gamma.x_of(i), gamma.y_of(j));
            if (i > 0) {
                s.coupling_x[static_cast<std::size_t>(j) * (nx - 1) + (i - 1)] = 0.0;
            }
            if (i + 1 < nx) {
                s.coupling_x[static_cast<std::size_t>(j) * (nx - 1) + i] = 0.0;
            }
            if (j > 0) {
                s.coupling_y[static_cast<std::size_t>(j - 1) * nx + i] = 0.0;
            }
            if (j + 1 < ny) {
                s.coupling_y[static_cast<std::size_t>(j) * nx + i] = 0.0;
            }
        }
    }

    return s;
}

GridField solve_cg(const LinearSystem& system, double tol, int max_iter) {
    const std::size_t n = system.rhs.size();
    if (max_iter <= 0) {
        max_iter = static_cast<int>(10 * n);
    }

    double b_norm = 0.0;
    for (double v : system.rhs) {
        b_norm += v * v;
    }
    b_norm = std::sqrt(b_norm);
    if (b_norm == 0.0) {
        b_norm = 1.0;
    }

    // Start from the boundary data so the identity rows are satisfied exactly
    // from the first iterate on.
    std::vector<double> x = system.rhs;
    for (int j = 1; j + 1 < system.ny; ++j) {
        for (int i = 1; i + 1 < system.nx; ++i) {
            x[static_cast<std::size_t>(j) * system.nx + i] = 0.0;
        }
    }

    std::vector<double> r(n), p(n), ap(n);
    system.apply(x, ap);
    for (std::size_t k = 0; k < n; ++k) {
        r[k] = system.rhs[k] - ap[k];
    }
    p = r;
    double rr = 0.0;
    for (double v : r) {
        rr += v * v;
    }

    const double target = tol * b_norm;
    int iter = 0;
    while (iter < max_iter) {
        if (std::sqrt(rr) <= target) {
            // Guard against accumulated drift of the recurrence residual.
            system.apply(x, ap);
            double true_rr = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                r[k] = system.rhs[k] - ap[k];
                true_rr += r[k] * r[k];
            }
            if (std::sqrt(true_rr) <= target) {
                break;
            }
            p = r;
            rr = true_rr;
        }
        system.apply(p, ap);
        double pap = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            pap += p[k] * ap[k];
        }
        if (pap <= 0.0) {
            throw NumericError("conjugate gradients: matrix is not positive definite (pAp = " +
                               std::to_string(pap) + ")");
        }
        const double alpha = rr / pap;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
        }
        double rr_next = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            r[k] -= alpha * ap[k];
            rr_next += r[k] * r[k];
        }
        const double beta = rr_next / rr;
        for (std::size_t k = 0; k < n; ++k) {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_next;
        ++iter;
    }
    if (iter >= max_iter && std::sqrt(rr) > target) {
        throw NumericError("conjugate gradients did not converge in " + std::to_string(max_iter) +
                           " iterations; relative residual " + std::to_string(std::sqrt(rr) / b_norm));
    }

    GridField u(system.nx, system.ny);
    u.values = std::move(x);
    // Re-impose the Dirichlet data exactly.
    for (int j = 0; j < system.ny; ++j) {
        for (int i = 0; i < system.nx; ++i) {
            if (is_boundary(i, j, system.nx, system.ny)) {
                u.at(i, j) = system.rhs[static_cast<std::size_t>(j) * system.nx + i];
            }
        }
    }
    return u;
}

GridField current_magnitude(const GridField& gamma, const GridField& u) {
    if (gamma.nx != u.nx || gamma.ny != u.ny) {
        throw ConfigError("current_magnitude: gamma and u grids differ in shape");
    }
    const int nx = u.nx;
    const int ny = u.ny;
    const double hx = 1.0 / (nx - 1);
    const double hy = 1.0 / (ny - 1);
    GridField a(nx, ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double ux;
            if (i == 0) {
                ux = (-3.0 * u.at(0, j) + 4.0 * u.at(1, j) - u.at(2, j)) / (2.0 * hx);
            } else if (i == nx - 1) {
                ux = (3.0 * u.at(nx - 1, j) - 4.0 * u.at(nx - 2, j) + u.at(nx - 3, j)) / (2.0 * hx);
            } else {
                ux = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * hx);
            }
            double uy;
            if (j == 0) {
                uy = (-3.0 * u.at(i, 0) + 4.0 * u.at(i, 1) - u.at(i, 2)) / (2.0 * hy);
            } else if (j == ny - 1) {
                uy = (3.0 * u.at(i, ny - 1) - 4.0 * u.at(i, ny - 2) + u.at(i, ny - 3)) / (2.0 * hy);
            } else {
                uy = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * hy);
            }
            a.at(i, j) = gamma.at(i, j) * std::sqrt(ux * ux + uy * uy);
        }
    }
    return a;
}

} // namespace cdii
