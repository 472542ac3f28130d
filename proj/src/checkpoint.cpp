#include "cdii/checkpoint.hpp"

#include "cdii/grid.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace cdii {

namespace {

void write_weights_csv(const MlpWeights& w, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "value\n";
    for (const double v : w.flatten()) {
        out << format_g17(v) << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

MlpWeights read_weights_csv(const std::vector<int>& widths, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "value") {
        throw IoError(path.string() + ":1: expected header \"value\"");
    }
    std::vector<double> flat;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        flat.push_back(std::strtod(line.c_str(), nullptr));
    }
    MlpWeights w = init_xavier(widths, 0); // shape template; values overwritten
    if (flat.size() != w.param_count()) {
        throw IoError(path.string() + ": expected " + std::to_string(w.param_count()) +
                      " values for widths, got " + std::to_string(flat.size()));
    }
    w.unflatten(flat);
    return w;
}

} // namespace

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir,
                      const std::string& name) {
    std::filesystem::create_directories(dir);
    write_weights_csv(ckpt.gamma, dir / (name + "_gamma.csv"));
    write_weights_csv(ckpt.u, dir / (name + "_u.csv"));

    nlohmann::json sidecar;
    sidecar["widths_gamma"] = ckpt.gamma.widths;
    sidecar["widths_u"] = ckpt.u.widths;
    sidecar["seed"] = ckpt.seed;
    sidecar["epoch"] = ckpt.epoch;
    std::ofstream out(dir / (name + ".json"));
    if (!out) {
        throw IoError("cannot open " + (dir / (name + ".json")).string() + " for writing");
    }
    out << sidecar.dump(2) << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& dir, const std::string& name) {
    std::ifstream in(dir / (name + ".json"));
    if (!in) {
        throw IoError("cannot open " + (dir / (name + ".json")).string());
    }
    nlohmann::json sidecar;
    try {
        in >> sidecar;
    } catch (const nlohmann::json::exception& e) {
        throw IoError((dir / (name + ".json")).string() + ": " + e.what());
    }
    Checkpoint ckpt;
    const auto widths_gamma = sidecar.at("widths_gamma").get<std::vector<int>>();
    const auto widths_u = sidecar.at("widths_u").get<std::vector<int>>();
    ckpt.seed = sidecar.at("seed").get<std::uint64_t>();
    ckpt.epoch = sidecar.at("epoch").get<int>();
    ckpt.gamma = read_weights_csv(widths_gamma, dir / (name + "_gamma.csv"));
    ckpt.u = read_weights_csv(widths_u, dir / (name + "_u.csv"));
    return ckpt;
}

} // namespace cdii
