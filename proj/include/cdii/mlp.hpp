#pragma once

#include "cdii/common.hpp"
#include "cdii/tape.hpp"

#include <cstdint>
#include <vector>

namespace cdii {

/// Weight storage of a tanh multilayer perceptron. widths = (N_0, ..., N_{D+1})
/// with N_0 = 2 and N_{D+1} = 1; layer l applies x -> A_l x + b_l followed by
/// tanh on every layer except the last, which stays linear. Storage is
/// layer-major with row-major weight matrices; the same ordering is used for
/// the flattened parameter vector and for checkpoints.
struct MlpWeights {
    std::vector<int> widths;
    std::vector<std::vector<double>> weights; // per layer, N_{l+1} x N_l row-major
    std::vector<std::vector<double>> biases;  // per layer, N_{l+1}

    int num_layers() const { return static_cast<int>(widths.size()) - 1; }
    int depth() const { return static_cast<int>(widths.size()) - 2; }
    std::size_t param_count() const;

    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& flat);
};

/// Xavier uniform initialization: each weight of layer l is drawn uniformly
/// on +-sqrt(6 / (N_l + N_{l+1})), biases start at zero. Deterministic in the
/// seed.
MlpWeights init_xavier(const std::vector<int>& widths, std::uint64_t seed);

/// Tape-bound view of an MLP: every weight and bias registered as a
/// trainable tape variable. Rebuilt whenever the tape is rebuilt.
struct MlpParams {
    std::vector<int> widths;
    std::vector<std::vector<Expr>> weights;
    std::vector<std::vector<Expr>> biases;
};

MlpParams bind(Tape& tape, const MlpWeights& w);

/// Scalar network output as a tape expression.
Expr forward(const MlpParams& params, Tape& tape, const Vec2& x);

/// Value, spatial gradient, and spatial Hessian of the network output at x,
/// all as tape expressions, so that one reverse sweep yields parameter
/// gradients of any entry. The Hessian is symmetric by construction:
/// hess(p, q) and hess(q, p) are the same node.
struct SpatialJet {
    Expr val;
    std::array<Expr, 2> grad;
    Expr hxx, hxy, hyy;

    Expr hess(int p, int q) const {
        if (p == 0 && q == 0) {
            return hxx;
        }
        if (p == 1 && q == 1) {
            return hyy;
        }
        return hxy;
    }
    Expr laplacian() const { return hxx + hyy; }
};

SpatialJet forward_jet(const MlpParams& params, Tape& tape, const Vec2& x);

/// Cheaper jet evaluations for loss assembly. Each kept component is built
/// by exactly the same operation sequence as in forward_jet, so values agree
/// bitwise; only unused chains are omitted.
struct GradJet {
    Expr val;
    std::array<Expr, 2> grad;
};

/// Gradient plus the two diagonal Hessian entries (what the divergence-form
/// residual consumes; the mixed derivative is not propagated).
struct DiagJet {
    Expr val;
    std::array<Expr, 2> grad;
    Expr hxx, hyy;
};

GradJet forward_jet_grad(const MlpParams& params, Tape& tape, const Vec2& x);
DiagJet forward_jet_diag(const MlpParams& params, Tape& tape, const Vec2& x);

/// Tape-free evaluation used by reporting paths and as a cross-check.
double eval_value(const MlpWeights& w, const Vec2& x);

struct JetValue {
    double val = 0.0;
    std::array<double, 2> grad{0.0, 0.0};
    double hxx = 0.0, hxy = 0.0, hyy = 0.0;
};

JetValue eval_jet(const MlpWeights& w, const Vec2& x);

} // namespace cdii
