#pragma once

#include "cdii/mlp.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace cdii {

/// A checkpoint `name` in `dir` consists of three files:
///   name_gamma.csv, name_u.csv — header "value", then one weight per line
///     (layer-major: each layer's weight matrix row-major, then its biases),
///     printed with 17 significant digits so the round trip is bit-exact;
///   name.json — sidecar with widths of both networks, the seed and the
///     epoch the checkpoint was taken at.
struct Checkpoint {
    MlpWeights gamma;
    MlpWeights u;
    std::uint64_t seed = 0;
    int epoch = 0;
};

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir,
                      const std::string& name);
Checkpoint read_checkpoint(const std::filesystem::path& dir, const std::string& name);

} // namespace cdii
