#pragma once

#include "cdii/conductivity.hpp"
#include "cdii/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace cdii {

struct NoiseSpec {
    enum class Kind { Additive, Multiplicative };

    Kind kind = Kind::Multiplicative;
    double level = 0.0; // sigma for additive, delta for multiplicative
    std::uint64_t seed = 0;

    static Kind kind_from_name(const std::string& name);
    std::string kind_name() const;
};

/// Interior observations (X_i, Y_i) of the current-density magnitude plus
/// boundary trace samples (Xbar_i, f_i), together with the generation
/// provenance. Interior and boundary counts are equal.
struct Dataset {
    std::vector<Vec2> interior_x;
    std::vector<double> interior_y;
    std::vector<Vec2> boundary_x;
    std::vector<double> boundary_f;

    NoiseSpec noise;
    std::string example;
    int grid_res = 0;
    double gamma_floor = 0.0;
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(interior_x.size()); }
};

/// n i.i.d. uniform points strictly inside the unit square (stream layout
/// per point: x then y).
std::vector<Vec2> sample_interior(int n, std::uint64_t seed);

/// n i.i.d. uniform points on the perimeter: one of the four edges with
/// probability 1/4 (bottom, right, top, left in draw order), then uniform
/// along it.
std::vector<Vec2> sample_boundary(int n, std::uint64_t seed);

/// Additive: a + level * draw.  Multiplicative: a * (1 + level * draw).
double apply_noise(double a_true, const NoiseSpec& spec, double draw);

/// Dataset plus the ground-truth grids it was manufactured from.
struct DatasetBundle {
    Dataset data;
    GridField gamma_true;
    GridField u_true;
    GridField a_true;
};

/// Manufactures a synthetic dataset: evaluates the ground-truth conductivity
/// on a grid_res x grid_res grid (clamped from below by gamma_floor so the
/// forward problem stays elliptic), solves the forward problem with boundary
/// data f(x, y) = y, forms a = gamma |grad u|, samples interior points with
/// noisy interpolated observations and boundary points with exact traces.
/// Point sampling streams derive from `seed`; noise draws from `noise.seed`.
DatasetBundle build_dataset(const ExampleId& id, int n, const NoiseSpec& noise, int grid_res,
                            std::uint64_t seed, double gamma_floor = 0.1, double solver_tol = 1e-10);

/// interior.csv / boundary.csv / provenance.json, all values with 17
/// significant digits so that the round trip is lossless.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

} // namespace cdii
