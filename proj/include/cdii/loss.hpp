#pragma once

#include "cdii/mlp.hpp"
#include "cdii/tape.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cdii {

struct RegularizerSpec {
    enum class Kind { None, L2, TvHuber };

    Kind kind = Kind::None;
    double alpha = 0.0;
    double zeta = 1e-3; // Huber threshold, TvHuber only

    static Kind kind_from_name(const std::string& name);
    std::string kind_name() const;
};

/// Fixed knobs of the empirical risk. lambda_pde and lambda_bc default to 1
/// (the plain unweighted sum); eps_mag keeps
/// |grad u| = sqrt(ux^2 + uy^2 + eps_mag) differentiable near a flat start
/// and is set to 0 on reporting paths.
struct LossWeights {
    double lambda_pde = 1.0;
    double lambda_bc = 1.0;
    double eps_mag = 1e-12;
};

/// The four components of the empirical risk, detached to plain values, plus
/// the tape node of the total for backpropagation.
/// total = misfit + alpha * regularizer + pde_residual + boundary at the
/// default unit lambda weights.
struct LossBreakdown {
    double misfit = 0.0;
    double regularizer = 0.0;
    double pde_residual = 0.0;
    double boundary = 0.0;
    double total = 0.0;
    Expr root;
};

/// The loss is written against jet/value providers rather than networks, so
/// tests can substitute exact or grid-interpolated fields.
using JetFn = std::function<SpatialJet(Tape&, const Vec2&)>;
using ValFn = std::function<Expr(Tape&, const Vec2&)>;

/// Network-backed providers. output_shift is added to the network output
/// (used for the conductivity net, default 1.0 in training configs).
JetFn make_network_jet_fn(const MlpParams& params, double output_shift = 0.0);
ValFn make_network_val_fn(const MlpParams& params, double output_shift = 0.0);

/// (1/n) sum_i (Y_i - gamma(X_i) |grad u|(X_i))^2.
Expr data_misfit(Tape& tape, std::span<const Vec2> xs, std::span<const double> ys,
                 const JetFn& gamma, const JetFn& u, double eps_mag = 1e-12);

/// (1/n) sum_i (grad gamma . grad u + gamma laplace u)^2(X_i).
Expr pde_residual(Tape& tape, std::span<const Vec2> xs, const JetFn& gamma, const JetFn& u);

/// (1/n) sum_i (u(Xbar_i) - f_i)^2.
Expr boundary_misfit(Tape& tape, std::span<const Vec2> xs, std::span<const double> fs,
                     const ValFn& u);

/// Monte-Carlo estimate of the regularization functional on the interior
/// batch: mean of gamma^2 for L2, mean of huber(|grad gamma|) for TvHuber.
Expr regularizer(Tape& tape, std::span<const Vec2> xs, const JetFn& gamma,
                 const RegularizerSpec& spec);

/// Huber-smoothed absolute value: t for t >= zeta, t^2/(2 zeta) + zeta/2
/// below; continuous with matching slope 1 at the knee.
double huber(double t, double zeta);

/// Assembles the full empirical risk as one tape expression, building each
/// sample's jets exactly once. Component sums run in ascending sample order.
LossBreakdown total_loss(Tape& tape, std::span<const Vec2> interior_x,
                         std::span<const double> interior_y, std::span<const Vec2> boundary_x,
                         std::span<const double> boundary_f, const JetFn& gamma, const JetFn& u_jet,
                         const ValFn& u_val, const RegularizerSpec& reg,
                         const LossWeights& weights = {});

/// Loss values without the root node (no tape provided by the caller).
struct LossValues {
    double misfit = 0.0;
    double regularizer = 0.0;
    double pde_residual = 0.0;
    double boundary = 0.0;
    double total = 0.0;
};

struct BatchResult {
    LossValues values;
    std::vector<double> grad_gamma; // flattened layer-major order
    std::vector<double> grad_u;
};

/// Scratch buffers recycled across steps.
struct BatchWorkspace {
    Tape tape;
    std::vector<double> adjoint;
};

/// Evaluation path used by the trainer: every sample gets a private tape
/// (parameters bound at its head), gradients and component sums are merged
/// in ascending sample order, so single-threaded results are bitwise
/// reproducible. With threads > 1 the batch is split into contiguous index
/// ranges merged in range order; results are reproducible for a fixed thread
/// count but may differ in the last bits from the single-threaded reference.
/// Component values match total_loss() exactly.
BatchResult batch_loss_grad(const MlpWeights& gamma_w, double gamma_shift, const MlpWeights& u_w,
                            std::span<const Vec2> interior_x, std::span<const double> interior_y,
                            std::span<const Vec2> boundary_x, std::span<const double> boundary_f,
                            const RegularizerSpec& reg, const LossWeights& weights, bool want_grad,
                            int threads = 1);

} // namespace cdii
