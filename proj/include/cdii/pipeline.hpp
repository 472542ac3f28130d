#pragma once

#include "cdii/config.hpp"
#include "cdii/report.hpp"
#include "cdii/sizing.hpp"

#include <filesystem>
#include <string>

namespace cdii {

/// Orchestration behind the CLI subcommands; each function is callable
/// in-process (the acceptance suite drives them directly).

/// Writes interior.csv, boundary.csv, provenance.json, the ground-truth
/// grids gamma_true.csv / u_true.csv / a_true.csv and the materialized
/// config echo into out_dir.
void cmd_generate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Reads a dataset from data_dir, trains, writes loss_history.csv plus
/// ckpt_0 and ckpt_{epochs} into out_dir. Returns the final checkpoint name.
std::string cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
                      const std::filesystem::path& out_dir);

/// Loads a checkpoint (validated against the config widths) and the
/// ground-truth grids, writes metrics.json and the reconstruction grids.
EvalReport cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
                        const std::string& checkpoint_name, const std::filesystem::path& out_dir);

SizingOutput cmd_size(double n, int d, int s, double mu);

/// generate + train + evaluate in one output directory.
EvalReport cmd_full(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

} // namespace cdii
