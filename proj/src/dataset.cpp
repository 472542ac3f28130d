#include "cdii/dataset.hpp"

#include "cdii/fd_solver.hpp"
#include "cdii/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cdii {

namespace {

// Fixed sub-stream tags; part of the documented generator layout.
constexpr std::uint64_t kInteriorStream = 1;
constexpr std::uint64_t kBoundaryStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

} // namespace

NoiseSpec::Kind NoiseSpec::kind_from_name(const std::string& name) {
    if (name == "additive") {
        return Kind::Additive;
    }
    if (name == "multiplicative") {
        return Kind::Multiplicative;
    }
    throw ConfigError("unknown noise kind \"" + name + "\"; expected additive or multiplicative");
}

std::string NoiseSpec::kind_name() const {
    return kind == Kind::Additive ? "additive" : "multiplicative";
}

std::vector<Vec2> sample_interior(int n, std::uint64_t seed) {
    if (n < 1) {
        throw ConfigError("sample_interior: n must be >= 1");
    }
    Rng rng(derive_seed(seed, kInteriorStream));
    std::vector<Vec2> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
        p[0] = rng.uniform01();
        p[1] = rng.uniform01();
    }
    return pts;
}

std::vector<Vec2> sample_boundary(int n, std::uint64_t seed) {
    if (n < 1) {
        throw ConfigError("sample_boundary: n must be >= 1");
    }
    Rng rng(derive_seed(seed, kBoundaryStream));
    std::vector<Vec2> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
        const int edge = std::min(3, static_cast<int>(rng.uniform01() * 4.0));
        const double t = rng.uniform01();
        switch (edge) {
        case 0:
            p = {t, 0.0};
            break;
        case 1:
            p = {1.0, t};
            break;
        case 2:
            p = {t, 1.0};
            break;
        default:
            p = {0.0, t};
            break;
        }
    }
    return pts;
}

double apply_noise(double a_true, const NoiseSpec& spec, double draw) {
    if (spec.kind == NoiseSpec::Kind::Additive) {
        return a_true + spec.level * draw;
    }
    return a_true * (1.0 + spec.level * draw);
}

DatasetBundle build_dataset(const ExampleId& id, int n, const NoiseSpec& noise, int grid_res,
                            std::uint64_t seed, double gamma_floor, double solver_tol) {
    if (n < 1) {
        throw ConfigError("build_dataset: n must be >= 1");
    }
    if (grid_res < 33) {
        throw ConfigError("build_dataset: grid_res must be >= 33");
    }

    DatasetBundle out;
    out.gamma_true = tabulate(grid_res, grid_res, [&](double x, double y) {
        const double g = eval_conductivity(id, x, y);
        return std::max(g, gamma_floor);
    });

    const auto trace = [](double, double y) { return y; };
    const LinearSystem system = assemble(out.gamma_true, trace);
    out.u_true = solve_cg(system, solver_tol);
    out.a_true = current_magnitude(out.gamma_true, out.u_true);

    Dataset& d = out.data;
    d.noise = noise;
    d.example = id.name();
    d.grid_res = grid_res;
    d.gamma_floor = gamma_floor;
    d.seed = seed;
    d.interior_x = sample_interior(n, seed);
    d.boundary_x = sample_boundary(n, seed);

    Rng noise_rng(derive_seed(noise.seed, kNoiseStream));
    d.interior_y.resize(d.interior_x.size());
    for (std::size_t i = 0; i < d.interior_x.size(); ++i) {
        const double a = interpolate(out.a_true, d.interior_x[i][0], d.interior_x[i][1]);
        d.interior_y[i] = apply_noise(a, noise, noise_rng.gaussian());
    }
    d.boundary_f.resize(d.boundary_x.size());
    for (std::size_t i = 0; i < d.boundary_x.size(); ++i) {
        d.boundary_f[i] = d.boundary_x[i][1];
    }
    return out;
}

namespace {

void write_point_csv(const std::filesystem::path& path, const char* header,
                     const std::vector<Vec2>& xs, const std::vector<double>& vs) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << header << '\n';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << format_g17(xs[i][0]) << ',' << format_g17(xs[i][1]) << ',' << format_g17(vs[i]) << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void read_point_csv(const std::filesystem::path& path, const std::string& header,
                    std::vector<Vec2>& xs, std::vector<double>& vs) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != header) {
        throw IoError(path.string() + ":1: expected header \"" + header + "\"");
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        double row[3];
        for (double& r : row) {
            if (!std::getline(ss, tok, ',')) {
                throw IoError(path.string() + ":" + std::to_string(line_no) + ": short row");
            }
            r = std::strtod(tok.c_str(), nullptr);
        }
        xs.push_back({row[0], row[1]});
        vs.push_back(row[2]);
    }
}

} // namespace

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_point_csv(dir / "interior.csv", "x,y,a_obs", data.interior_x, data.interior_y);
    write_point_csv(dir / "boundary.csv", "x,y,f", data.boundary_x, data.boundary_f);

    nlohmann::json prov;
    prov["example"] = data.example;
    prov["n"] = data.n();
    prov["noise"] = {{"kind", data.noise.kind_name()}, {"level", data.noise.level}, {"seed", data.noise.seed}};
    prov["grid_res"] = data.grid_res;
    prov["gamma_floor"] = data.gamma_floor;
    prov["seed"] = data.seed;
    std::ofstream out(dir / "provenance.json");
    if (!out) {
        throw IoError("cannot open " + (dir / "provenance.json").string() + " for writing");
    }
    out << prov.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& dir) {
    Dataset d;
    read_point_csv(dir / "interior.csv", "x,y,a_obs", d.interior_x, d.interior_y);
    read_point_csv(dir / "boundary.csv", "x,y,f", d.boundary_x, d.boundary_f);
    if (d.interior_x.size() != d.boundary_x.size()) {
        throw IoError("dataset in " + dir.string() + " has mismatched interior/boundary counts");
    }

    std::ifstream in(dir / "provenance.json");
    if (!in) {
        throw IoError("cannot open " + (dir / "provenance.json").string());
    }
    nlohmann::json prov;
    try {
        in >> prov;
    } catch (const nlohmann::json::exception& e) {
        throw IoError((dir / "provenance.json").string() + ": " + e.what());
    }
    d.example = prov.at("example").get<std::string>();
    d.noise.kind = NoiseSpec::kind_from_name(prov.at("noise").at("kind").get<std::string>());
    d.noise.level = prov.at("noise").at("level").get<double>();
    d.noise.seed = prov.at("noise").at("seed").get<std::uint64_t>();
    d.grid_res = prov.at("grid_res").get<int>();
    d.gamma_floor = prov.at("gamma_floor").get<double>();
    d.seed = prov.at("seed").get<std::uint64_t>();
    return d;
}

} // namespace cdii
