#include "cdii/trainer.hpp"

#include "cdii/checkpoint.hpp"
#include "cdii/grid.hpp"
#include "cdii/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cdii {

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw ConfigError("train.epochs must be >= 1");
    }
    if (batch_size < 1) {
        throw ConfigError("train.batch_size must be >= 1");
    }
    if (steps_per_epoch < 0) {
        throw ConfigError("train.steps_per_epoch must be >= 0 (0 = full pass)");
    }
    if (!(lr >= 0.0)) {
        throw ConfigError("train.lr must be >= 0");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("train.beta1 and train.beta2 must lie in [0, 1)");
    }
    if (!(eps_adam > 0.0)) {
        throw ConfigError("train.eps_adam must be > 0");
    }
    if (log_every < 1) {
        throw ConfigError("train.log_every must be >= 1");
    }
    if (checkpoint_every < 0) {
        throw ConfigError("train.checkpoint_every must be >= 0");
    }
    if (threads < 1) {
        throw ConfigError("threads must be >= 1");
    }
    if (!(reg.alpha >= 0.0)) {
        throw ConfigError("reg.alpha must be >= 0");
    }
    if (reg.kind == RegularizerSpec::Kind::TvHuber && !(reg.zeta > 0.0)) {
        throw ConfigError("reg.zeta must be > 0");
    }
}

void adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grads,
               const TrainConfig& config) {
    if (params.size() != grads.size()) {
        throw ConfigError("adam_step: parameter and gradient sizes differ");
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.t = 0;
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw NumericError("non-finite gradient at parameter index " + std::to_string(i));
        }
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps_adam);
        if (!(std::isfinite(state.v[i]) && std::isfinite(state.m[i]) && std::isfinite(params[i]))) {
            throw NumericError("optimizer state overflow at parameter index " + std::to_string(i));
        }
    }
}

std::vector<std::vector<int>> make_batches(int n, int batch_size, std::uint64_t epoch_seed) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(epoch_seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = std::min(i, static_cast<int>(rng.uniform01() * (i + 1)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    std::vector<std::vector<int>> batches;
    for (int start = 0; start < n; start += batch_size) {
        const int end = std::min(n, start + batch_size);
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

namespace {

struct BatchBuffers {
    std::vector<Vec2> xs;
    std::vector<double> ys;

    void gather(const std::vector<Vec2>& all_x, const std::vector<double>& all_y,
                const std::vector<int>& idx) {
        xs.resize(idx.size());
        ys.resize(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            xs[k] = all_x[static_cast<std::size_t>(idx[k])];
            ys[k] = all_y[static_cast<std::size_t>(idx[k])];
        }
    }
};

LossValues probe_loss(const Dataset& data, const MlpWeights& gamma_w, const MlpWeights& u_w,
                      const TrainConfig& config) {
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                                data.interior_x.size());
    const BatchResult r = batch_loss_grad(
        gamma_w, config.gamma_output_shift, u_w, std::span(data.interior_x).first(m),
        std::span(data.interior_y).first(m), std::span(data.boundary_x).first(m),
        std::span(data.boundary_f).first(m), config.reg, config.loss_weights, false, config.threads);
    return r.values;
}

} // namespace

TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const std::filesystem::path& checkpoint_dir) {
    config.validate();
    if (dataset.interior_x.empty() || dataset.boundary_x.empty()) {
        throw ConfigError("train: dataset is empty");
    }
    const int n = dataset.n();

    MlpWeights gamma_w = init_xavier(config.widths_gamma, derive_seed(config.seed, 11));
    MlpWeights u_w = init_xavier(config.widths_u, derive_seed(config.seed, 12));
    const std::size_t pg = gamma_w.param_count();

    std::vector<double> params = gamma_w.flatten();
    {
        const std::vector<double> fu = u_w.flatten();
        params.insert(params.end(), fu.begin(), fu.end());
    }
    AdamState adam;

    const auto emit_checkpoint = [&](int epoch, const std::string& name) {
        if (checkpoint_dir.empty()) {
            return;
        }
        write_checkpoint(Checkpoint{gamma_w, u_w, config.seed, epoch}, checkpoint_dir, name);
    };

    TrainResult result;
    const auto t_start = std::chrono::steady_clock::now();
    const auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };
    const auto log_row = [&](int epoch) {
        HistoryRow row;
        row.epoch = epoch;
        row.loss = probe_loss(dataset, gamma_w, u_w, config);
        row.wall_seconds = elapsed();
        result.history.push_back(row);
    };

    emit_checkpoint(0, "ckpt_0");
    log_row(0);

    BatchBuffers interior;
    BatchBuffers boundary;
    std::vector<double> grads(params.size());
    int epoch = 0;
    try {
        for (epoch = 1; epoch <= config.epochs; ++epoch) {
            const std::uint64_t epoch_seed =
                derive_seed(derive_seed(config.seed, 0xEB0C), static_cast<std::uint64_t>(epoch));
            const auto interior_batches =
                make_batches(n, config.batch_size, derive_seed(epoch_seed, 0));
            const auto boundary_batches =
                make_batches(n, config.batch_size, derive_seed(epoch_seed, 1));
            std::size_t steps = interior_batches.size();
            if (config.steps_per_epoch > 0) {
                steps = std::min<std::size_t>(steps, static_cast<std::size_t>(config.steps_per_epoch));
            }

            for (std::size_t s = 0; s < steps; ++s) {
                interior.gather(dataset.interior_x, dataset.interior_y, interior_batches[s]);
                boundary.gather(dataset.boundary_x, dataset.boundary_f,
                                boundary_batches[s % boundary_batches.size()]);
                const BatchResult batch = batch_loss_grad(
                    gamma_w, config.gamma_output_shift, u_w, interior.xs, interior.ys, boundary.xs,
                    boundary.ys, config.reg, config.loss_weights, true, config.threads);
                std::copy(batch.grad_gamma.begin(), batch.grad_gamma.end(), grads.begin());
                std::copy(batch.grad_u.begin(), batch.grad_u.end(),
                          grads.begin() + static_cast<std::ptrdiff_t>(pg));
                adam_step(adam, params, grads, config);
                gamma_w.unflatten(params); // params prefix view
                std::vector<double> u_flat(params.begin() + static_cast<std::ptrdiff_t>(pg),
                                           params.end());
                u_w.unflatten(u_flat);
            }

            if (epoch % config.log_every == 0) {
                log_row(epoch);
            }
            if (config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0 &&
                epoch != config.epochs) {
                emit_checkpoint(epoch, "ckpt_" + std::to_string(epoch));
            }
        }
    } catch (const NumericError& e) {
        emit_checkpoint(epoch, "ckpt_abort_" + std::to_string(epoch));
        throw NumericError("training aborted at epoch " + std::to_string(epoch) + ": " + e.what());
    }

    emit_checkpoint(config.epochs, "ckpt_" + std::to_string(config.epochs));
    result.gamma = std::move(gamma_w);
    result.u = std::move(u_w);
    return result;
}

void write_history_csv(const std::vector<HistoryRow>& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "epoch,misfit,regularizer,pde_residual,boundary,total\n";
    for (const HistoryRow& row : history) {
        out << row.epoch << ',' << format_g17(row.loss.misfit) << ','
            << format_g17(row.loss.regularizer) << ',' << format_g17(row.loss.pde_residual) << ','
            << format_g17(row.loss.boundary) << ',' << format_g17(row.loss.total) << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

std::vector<HistoryRow> read_history_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "epoch,misfit,regularizer,pde_residual,boundary,total") {
        throw IoError(path.string() + ":1: bad history header");
    }
    std::vector<HistoryRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) {
            vals.push_back(std::strtod(tok.c_str(), nullptr));
        }
        if (vals.size() != 6) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 6 columns");
        }
        HistoryRow row;
        row.epoch = static_cast<int>(vals[0]);
        row.loss.misfit = vals[1];
        row.loss.regularizer = vals[2];
        row.loss.pde_residual = vals[3];
        row.loss.boundary = vals[4];
        row.loss.total = vals[5];
        rows.push_back(row);
    }
    return rows;
}

} // namespace cdii
