#pragma once

#include "cdii/grid.hpp"
#include "cdii/mlp.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace cdii {

/// Network values at every node of a resolution x resolution grid (no tape).
GridField evaluate_on_grid(const MlpWeights& w, double output_shift, int resolution);

/// ||truth - pred||_2 / ||truth||_2 with trapezoidal grid quadrature.
/// Throws if the truth norm vanishes or the shapes differ.
double relative_l2_error(const GridField& pred, const GridField& truth);

/// Recovered data field a_hat = gamma_hat * |grad u_hat| from network jets
/// (reporting path: no magnitude regularization).
GridField recovered_data_field(const MlpWeights& gamma_w, double gamma_shift,
                               const MlpWeights& u_w, int resolution);

struct EvalReport {
    double err_gamma = 0.0;
    double err_u = 0.0;
    double err_a = 0.0;
    GridField gamma_hat, u_hat, a_hat;
    GridField err_gamma_field, err_u_field;
    nlohmann::json config_echo;
};

/// Dense-grid reconstruction and relative errors against the ground-truth
/// grids (interpolated to the evaluation resolution when it differs).
EvalReport evaluate_networks(const MlpWeights& gamma_w, double gamma_shift, const MlpWeights& u_w,
                             const GridField& gamma_true, const GridField& u_true,
                             const GridField& a_true, int resolution);

/// metrics.json plus CSV grids for gamma_hat, u_hat, a_hat and the pointwise
/// absolute-error fields.
void write_report(const EvalReport& report, const std::filesystem::path& out_dir);

} // namespace cdii
