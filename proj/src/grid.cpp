#include "cdii/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cdii {

double interpolate(const GridField& field, double x, double y) {
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
        throw NumericError("interpolation point (" + std::to_string(x) + ", " + std::to_string(y) +
                           ") outside the unit square");
    }
    const double fx = x * (field.nx - 1);
    const double fy = y * (field.ny - 1);
    const int i = std::min(static_cast<int>(fx), field.nx - 2);
    const int j = std::min(static_cast<int>(fy), field.ny - 2);
    const double tx = fx - i;
    const double ty = fy - j;
    const double v00 = field.at(i, j);
    const double v10 = field.at(i + 1, j);
    const double v01 = field.at(i, j + 1);
    const double v11 = field.at(i + 1, j + 1);
    return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_grid_csv(const GridField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "x,y,value\n";
    for (int j = 0; j < field.ny; ++j) {
        for (int i = 0; i < field.nx; ++i) {
            out << format_g17(field.x_of(i)) << ',' << format_g17(field.y_of(j)) << ','
                << format_g17(field.at(i, j)) << '\n';
        }
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

GridField read_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,y,value", 0) != 0) {
        throw IoError("bad grid CSV header in " + path.string());
    }
    std::vector<double> xs, ys, vs;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        double row[3];
        for (double& r : row) {
            if (!std::getline(ss, tok, ',')) {
                throw IoError("short row in " + path.string());
            }
            r = std::strtod(tok.c_str(), nullptr);
        }
        xs.push_back(row[0]);
        ys.push_back(row[1]);
        vs.push_back(row[2]);
    }
    // x fastest-varying: nx = number of samples until y changes.
    std::size_t nx = 1;
    while (nx < ys.size() && ys[nx] == ys[0]) {
        ++nx;
    }
    if (nx == 0 || vs.size() % nx != 0) {
        throw IoError("inconsistent grid shape in " + path.string());
    }
    GridField g;
    g.nx = static_cast<int>(nx);
    g.ny = static_cast<int>(vs.size() / nx);
    if (g.nx < 2 || g.ny < 2) {
        throw IoError("grid in " + path.string() + " is too small");
    }
    g.values = std::move(vs);
    return g;
}

} // namespace cdii
