#pragma once

#include "cdii/common.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cdii {

/// Scalar field on a uniform grid over the unit square, boundary included.
/// Node (i, j) sits at (x, y) = (i/(nx-1), j/(ny-1)); storage is
/// values[j * nx + i], which makes x the fastest-varying index in the CSV
/// serialization.
struct GridField {
    int nx = 0;
    int ny = 0;
    std::vector<double> values;

    GridField() = default;
    GridField(int nx_, int ny_, double fill = 0.0)
        : nx(nx_), ny(ny_), values(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), fill) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
    double x_of(int i) const { return static_cast<double>(i) / (nx - 1); }
    double y_of(int j) const { return static_cast<double>(j) / (ny - 1); }
};

/// Evaluates a closed-form function at every node.
template <typename F> GridField tabulate(int nx, int ny, F&& f) {
    GridField g(nx, ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            g.at(i, j) = f(g.x_of(i), g.y_of(j));
        }
    }
    return g;
}

/// Bilinear interpolation; exact for bilinear fields. Throws on points
/// outside the closed unit square.
double interpolate(const GridField& field, double x, double y);

/// Writes `x,y,value` rows, x fastest-varying, 17 significant digits.
void write_grid_csv(const GridField& field, const std::filesystem::path& path);
GridField read_grid_csv(const std::filesystem::path& path);

/// printf("%.17g") — round-trips any finite double exactly.
std::string format_g17(double v);

} // namespace cdii
