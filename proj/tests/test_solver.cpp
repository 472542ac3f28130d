#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdii/fd_solver.hpp"
#include "cdii/rng.hpp"

#include <cmath>
#include <numbers>

using namespace cdii;

namespace {

constexpr double kPi = std::numbers::pi;

double max_node_error(const GridField& u, const std::function<double(double, double)>& exact) {
    double worst = 0.0;
    for (int j = 0; j < u.ny; ++j) {
        for (int i = 0; i < u.nx; ++i) {
            worst = std::max(worst, std::abs(u.at(i, j) - exact(u.x_of(i), u.y_of(j))));
        }
    }
    return worst;
}

double l2_error(const GridField& u, const std::function<double(double, double)>& exact) {
    double acc = 0.0;
    const double cell = 1.0 / ((u.nx - 1) * static_cast<double>(u.ny - 1));
    for (int j = 0; j < u.ny; ++j) {
        for (int i = 0; i < u.nx; ++i) {
            const double wx = (i == 0 || i == u.nx - 1) ? 0.5 : 1.0;
            const double wy = (j == 0 || j == u.ny - 1) ? 0.5 : 1.0;
            const double d = u.at(i, j) - exact(u.x_of(i), u.y_of(j));
            acc += wx * wy * d * d;
        }
    }
    return std::sqrt(acc * cell);
}

} // namespace

TEST_CASE("constant-coefficient assembly reduces to the 5-point laplacian") {
    const int n = 9;
    const double inv_h2 = (n - 1.0) * (n - 1.0);
    const GridField ones = tabulate(n, n, [](double, double) { return 1.0; });
    const LinearSystem s1 = assemble(ones, [](double, double y) { return y; });
    CHECK(s1.diag[4 * n + 4] == doctest::Approx(4.0 * inv_h2).epsilon(1e-15));
    CHECK(s1.cx(3, 4) == doctest::Approx(inv_h2).epsilon(1e-15)); // off-diagonal entry is -cx

    const GridField twos = tabulate(n, n, [](double, double) { return 2.0; });
    const LinearSystem s2 = assemble(twos, [](double, double y) { return y; });
    for (int j = 1; j + 1 < n; ++j) {
        for (int i = 1; i + 1 < n; ++i) {
            CHECK(s2.diag[j * n + i] == doctest::Approx(2.0 * s1.diag[j * n + i]).epsilon(1e-15));
        }
    }
    CHECK(s2.cx(4, 4) == doctest::Approx(2.0 * s1.cx(4, 4)).epsilon(1e-15));
}

TEST_CASE("edge coefficients use the harmonic mean") {
    const int n = 5;
    const double inv_h2 = (n - 1.0) * (n - 1.0);
    // gamma = 1 on the left half, 3 on the right half of the x-axis
    const GridField g = tabulate(n, n, [](double x, double) { return x < 0.5 ? 1.0 : 3.0; });
    const LinearSystem s = assemble(g, [](double, double y) { return y; });
    // edge between x = 0.25 (gamma 1) and x = 0.5 (gamma 3)
    CHECK(s.cx(1, 2) == doctest::Approx(1.5 * inv_h2).epsilon(1e-15));
}

TEST_CASE("nonpositive conductivity is rejected with the node") {
    GridField g = tabulate(5, 5, [](double, double) { return 1.0; });
    g.at(2, 3) = 0.0;
    try {
        assemble(g, [](double, double y) { return y; });
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("(2, 3)") != std::string::npos);
    }
}

TEST_CASE("linear boundary data is reproduced exactly") {
    const GridField ones = tabulate(65, 65, [](double, double) { return 1.0; });
    const auto f = [](double, double y) { return y; };
    const GridField u = solve_cg(assemble(ones, f), 1e-13);
    CHECK(max_node_error(u, [](double, double y) { return y; }) <= 1e-9);

    // constant conductivity cancels out of the homogeneous problem
    const GridField fives = tabulate(65, 65, [](double, double) { return 5.0; });
    const GridField u5 = solve_cg(assemble(fives, f), 1e-13);
    CHECK(max_node_error(u5, [](double, double y) { return y; }) <= 1e-9);
}

TEST_CASE("manufactured solution converges at second order") {
    const auto gamma_fn = [](double x, double) { return 1.0 + x; };
    const auto exact = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
    // div((1+x) grad u*) = pi cos(pi x) sin(pi y) - 2 pi^2 (1+x) u*
    const auto source = [&](double x, double y) {
        return kPi * std::cos(kPi * x) * std::sin(kPi * y) -
               2.0 * kPi * kPi * (1.0 + x) * exact(x, y);
    };

    std::vector<double> errors;
    for (const int n : {33, 65, 129}) {
        const GridField gamma = tabulate(n, n, gamma_fn);
        const GridField u = solve_cg(assemble(gamma, exact, source), 1e-12);
        errors.push_back(l2_error(u, exact));
    }
    CHECK(errors[1] < errors[0]);
    CHECK(errors[2] < errors[1]);
    const double order = std::log2(errors[1] / errors[2]);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
}

TEST_CASE("discrete maximum principle for the homogeneous problem") {
    Rng rng(81);
    const GridField gamma = tabulate(33, 33, [&](double x, double y) {
        return 0.5 + x + 0.3 * std::sin(5.0 * y) + 0.1 * std::cos(7.0 * x * y);
    });
    const auto f = [](double x, double y) { return std::sin(3.0 * x) + 0.5 * std::cos(2.0 * y); };
    double fmin = 1e300;
    double fmax = -1e300;
    for (int k = 0; k < 33; ++k) {
        const double t = k / 32.0;
        for (const auto& [x, y] : {std::pair{t, 0.0}, {t, 1.0}, {0.0, t}, {1.0, t}}) {
            fmin = std::min(fmin, f(x, y));
            fmax = std::max(fmax, f(x, y));
        }
    }
    const GridField u = solve_cg(assemble(gamma, f), 1e-11);
    for (double v : u.values) {
        CHECK(v >= fmin - 1e-9);
        CHECK(v <= fmax + 1e-9);
    }
}

TEST_CASE("solver is deterministic") {
    const auto run = [] {
        const GridField gamma = tabulate(33, 33, [](double x, double y) { return 1.0 + x * y; });
        return solve_cg(assemble(gamma, [](double, double y) { return y; }), 1e-11).values;
    };
    CHECK(run() == run());
}

TEST_CASE("non-convergence raises with the residual") {
    const GridField ones = tabulate(33, 33, [](double, double) { return 1.0; });
    const auto f = [](double x, double y) { return std::sin(7.0 * x) * y; };
    CHECK_THROWS_AS(solve_cg(assemble(ones, f), 1e-13, 3), NumericError);
}

TEST_CASE("current magnitude basics") {
    const int n = 17;
    const GridField ones = tabulate(n, n, [](double, double) { return 1.0; });
    const GridField uy = tabulate(n, n, [](double, double y) { return y; });
    const GridField a1 = current_magnitude(ones, uy);
    for (double v : a1.values) {
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }

    const GridField twos = tabulate(n, n, [](double, double) { return 2.0; });
    const GridField a2 = current_magnitude(twos, uy);
    for (double v : a2.values) {
        CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    }

    const GridField uc = tabulate(n, n, [](double, double) { return 0.75; });
    const GridField a0 = current_magnitude(ones, uc);
    for (double v : a0.values) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("bilinear interpolation") {
    const GridField uy = tabulate(9, 9, [](double, double y) { return y; });
    CHECK(interpolate(uy, 0.3, 0.77) == doctest::Approx(0.77).epsilon(1e-15));

    GridField cell(2, 2);
    cell.at(0, 0) = 0.0;
    cell.at(1, 0) = 0.0;
    cell.at(0, 1) = 0.0;
    cell.at(1, 1) = 4.0;
    CHECK(interpolate(cell, 0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-15));

    const GridField c = tabulate(5, 5, [](double, double) { return 3.25; });
    CHECK(interpolate(c, 0.123, 0.987) == 3.25);
    CHECK(interpolate(c, 1.0, 1.0) == 3.25);

    CHECK_THROWS_AS(interpolate(c, -0.01, 0.5), NumericError);
    CHECK_THROWS_AS(interpolate(c, 0.5, 1.01), NumericError);
}
