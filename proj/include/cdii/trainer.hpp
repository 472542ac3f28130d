#pragma once

#include "cdii/dataset.hpp"
#include "cdii/loss.hpp"
#include "cdii/mlp.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace cdii {

/// Everything the mini-batch ADAM loop needs. steps_per_epoch = 0 means one
/// full pass over the data per epoch (ceil(n / batch_size) steps); setting it
/// to a smaller count draws only that many freshly permuted batches per
/// epoch, in which case the visit-every-index-per-epoch property no longer
/// applies.
struct TrainConfig {
    int epochs = 5000;
    int batch_size = 512;
    int steps_per_epoch = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    std::uint64_t seed = 0;
    RegularizerSpec reg;
    std::vector<int> widths_gamma{2, 32, 32, 32, 1};
    std::vector<int> widths_u{2, 32, 32, 32, 1};
    double gamma_output_shift = 1.0;
    int log_every = 100;
    int checkpoint_every = 0;
    LossWeights loss_weights;
    int threads = 1;

    void validate() const;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;
};

/// Standard ADAM with bias correction. Throws on a non-finite gradient,
/// naming the parameter index.
void adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grads,
               const TrainConfig& config);

/// Seeded random permutation of 0..n-1 chopped into consecutive chunks of
/// batch_size (last chunk may be short).
std::vector<std::vector<int>> make_batches(int n, int batch_size, std::uint64_t epoch_seed);

struct HistoryRow {
    int epoch = 0;
    LossValues loss;
    double wall_seconds = 0.0;
};

struct TrainResult {
    MlpWeights gamma;
    MlpWeights u;
    std::vector<HistoryRow> history;
};

/// Runs the coupled minimization: every step rebuilds tapes for its batch,
/// backpropagates the total loss and updates both networks' parameters with
/// one shared ADAM instance. History rows are evaluated on a fixed probe
/// batch (the first batch_size samples in dataset order) at epoch 0 and
/// every log_every epochs. Fully deterministic in (dataset, config) when
/// config.threads == 1. If checkpoint_dir is nonempty, writes ckpt_0,
/// ckpt_{epochs}, periodic ckpt_{e} when checkpoint_every > 0, and the last
/// state on abort.
TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const std::filesystem::path& checkpoint_dir = {});

/// Header: epoch,misfit,regularizer,pde_residual,boundary,total.
void write_history_csv(const std::vector<HistoryRow>& history, const std::filesystem::path& path);
std::vector<HistoryRow> read_history_csv(const std::filesystem::path& path);

} // namespace cdii
