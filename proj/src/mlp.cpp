#include "cdii/mlp.hpp"

#include "cdii/rng.hpp"

#include <cmath>
#include <string>

namespace cdii {

namespace {

void check_widths(const std::vector<int>& widths) {
    if (widths.size() < 2) {
        throw ConfigError("widths must contain at least an input and an output layer");
    }
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (widths[i] <= 0) {
            throw ConfigError("widths[" + std::to_string(i) + "] must be positive, got " +
                              std::to_string(widths[i]));
        }
    }
}

} // namespace

std::size_t MlpWeights::param_count() const {
    std::size_t n = 0;
    for (int l = 0; l + 1 < static_cast<int>(widths.size()); ++l) {
        n += static_cast<std::size_t>(widths[l]) * static_cast<std::size_t>(widths[l + 1]);
        n += static_cast<std::size_t>(widths[l + 1]);
    }
    return n;
}

std::vector<double> MlpWeights::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (std::size_t l = 0; l < weights.size(); ++l) {
        flat.insert(flat.end(), weights[l].begin(), weights[l].end());
        flat.insert(flat.end(), biases[l].begin(), biases[l].end());
    }
    return flat;
}

void MlpWeights::unflatten(const std::vector<double>& flat) {
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (double& w : weights[l]) {
            w = flat[k++];
        }
        for (double& b : biases[l]) {
            b = flat[k++];
        }
    }
}

MlpWeights init_xavier(const std::vector<int>& widths, std::uint64_t seed) {
    check_widths(widths);
    MlpWeights w;
    w.widths = widths;
    Rng rng(derive_seed(seed, 0x1417));
    for (int l = 0; l + 1 < static_cast<int>(widths.size()); ++l) {
        const int n_in = widths[static_cast<std::size_t>(l)];
        const int n_out = widths[static_cast<std::size_t>(l) + 1];
        const double bound = std::sqrt(6.0 / (n_in + n_out));
        std::vector<double> layer(static_cast<std::size_t>(n_in) * static_cast<std::size_t>(n_out));
        for (double& v : layer) {
            v = rng.uniform(-bound, bound);
        }
        w.weights.push_back(std::move(layer));
        w.biases.emplace_back(static_cast<std::size_t>(n_out), 0.0);
    }
    return w;
}

MlpParams bind(Tape& tape, const MlpWeights& w) {
    MlpParams p;
    p.widths = w.widths;
    p.weights.resize(w.weights.size());
    p.biases.resize(w.biases.size());
    for (std::size_t l = 0; l < w.weights.size(); ++l) {
        p.weights[l].reserve(w.weights[l].size());
        for (double v : w.weights[l]) {
            p.weights[l].push_back(wrap(tape, tape.variable(v)));
        }
        p.biases[l].reserve(w.biases[l].size());
        for (double v : w.biases[l]) {
            p.biases[l].push_back(wrap(tape, tape.variable(v)));
        }
    }
    return p;
}

Expr forward(const MlpParams& params, Tape& tape, const Vec2& x) {
    const int layers = static_cast<int>(params.widths.size()) - 1;
    std::vector<Expr> z{wrap(tape, tape.constant(x[0])), wrap(tape, tape.constant(x[1]))};
    for (int l = 0; l < layers; ++l) {
        const int n_in = params.widths[static_cast<std::size_t>(l)];
        const int n_out = params.widths[static_cast<std::size_t>(l) + 1];
        const auto& W = params.weights[static_cast<std::size_t>(l)];
        const auto& b = params.biases[static_cast<std::size_t>(l)];
        std::vector<Expr> s;
        s.reserve(static_cast<std::size_t>(n_out));
        for (int j = 0; j < n_out; ++j) {
            Expr acc = b[static_cast<std::size_t>(j)];
            for (int i = 0; i < n_in; ++i) {
                acc = acc + W[static_cast<std::size_t>(j * n_in + i)] * z[static_cast<std::size_t>(i)];
            }
            s.push_back(l + 1 < layers ? tanh(acc) : acc);
        }
        z = std::move(s);
    }
    return z[0];
}

namespace {

struct JetExpr {
    Expr val, gx, gy, hxx, hxy, hyy;
};

enum class JetOrder { Grad, Diag, Full };

// Propagates (value, gradient, Hessian) layer by layer: the affine map acts
// linearly on every jet component; the tanh step composes with
// rho' = 1 - rho^2 and rho'' = -2 rho (1 - rho^2). Lower orders run the
// identical operation sequence on the components they keep.
template <JetOrder Order>
JetExpr propagate_jet(const MlpParams& params, Tape& tape, const Vec2& x) {
    constexpr bool kDiag = Order != JetOrder::Grad;
    constexpr bool kMixed = Order == JetOrder::Full;

    const Expr one = wrap(tape, tape.constant(1.0));
    const Expr zero = wrap(tape, tape.constant(0.0));
    const Expr minus_two = kDiag ? wrap(tape, tape.constant(-2.0)) : Expr{};

    const int layers = static_cast<int>(params.widths.size()) - 1;
    std::vector<JetExpr> z(2);
    z[0] = JetExpr{wrap(tape, tape.constant(x[0])), one, zero, zero, zero, zero};
    z[1] = JetExpr{wrap(tape, tape.constant(x[1])), zero, one, zero, zero, zero};

    for (int l = 0; l < layers; ++l) {
        const int n_in = params.widths[static_cast<std::size_t>(l)];
        const int n_out = params.widths[static_cast<std::size_t>(l) + 1];
        const auto& W = params.weights[static_cast<std::size_t>(l)];
        const auto& b = params.biases[static_cast<std::size_t>(l)];
        std::vector<JetExpr> next(static_cast<std::size_t>(n_out));
        for (int j = 0; j < n_out; ++j) {
            JetExpr s{b[static_cast<std::size_t>(j)], zero, zero, zero, zero, zero};
            for (int i = 0; i < n_in; ++i) {
                const Expr w = W[static_cast<std::size_t>(j * n_in + i)];
                const JetExpr& in = z[static_cast<std::size_t>(i)];
                s.val = s.val + w * in.val;
                s.gx = s.gx + w * in.gx;
                s.gy = s.gy + w * in.gy;
                if constexpr (kDiag) {
                    s.hxx = s.hxx + w * in.hxx;
                }
                if constexpr (kMixed) {
                    s.hxy = s.hxy + w * in.hxy;
                }
                if constexpr (kDiag) {
                    s.hyy = s.hyy + w * in.hyy;
                }
            }
            if (l + 1 < layers) {
                const Expr t = tanh(s.val);
                const Expr dp = one - square(t);
                JetExpr a;
                a.val = t;
                a.gx = dp * s.gx;
                a.gy = dp * s.gy;
                if constexpr (kDiag) {
                    const Expr ddp = minus_two * t * dp;
                    a.hxx = ddp * s.gx * s.gx + dp * s.hxx;
                    if constexpr (kMixed) {
                        a.hxy = ddp * s.gx * s.gy + dp * s.hxy;
                    }
                    a.hyy = ddp * s.gy * s.gy + dp * s.hyy;
                }
                next[static_cast<std::size_t>(j)] = a;
            } else {
                next[static_cast<std::size_t>(j)] = s;
            }
        }
        z = std::move(next);
    }
    return z[0];
}

} // namespace

SpatialJet forward_jet(const MlpParams& params, Tape& tape, const Vec2& x) {
    const JetExpr out = propagate_jet<JetOrder::Full>(params, tape, x);
    return SpatialJet{out.val, {out.gx, out.gy}, out.hxx, out.hxy, out.hyy};
}

GradJet forward_jet_grad(const MlpParams& params, Tape& tape, const Vec2& x) {
    const JetExpr out = propagate_jet<JetOrder::Grad>(params, tape, x);
    return GradJet{out.val, {out.gx, out.gy}};
}

DiagJet forward_jet_diag(const MlpParams& params, Tape& tape, const Vec2& x) {
    const JetExpr out = propagate_jet<JetOrder::Diag>(params, tape, x);
    return DiagJet{out.val, {out.gx, out.gy}, out.hxx, out.hyy};
}

double eval_value(const MlpWeights& w, const Vec2& x) {
    const int layers = w.num_layers();
    std::vector<double> z{x[0], x[1]};
    for (int l = 0; l < layers; ++l) {
        const int n_in = w.widths[static_cast<std::size_t>(l)];
        const int n_out = w.widths[static_cast<std::size_t>(l) + 1];
        std::vector<double> s(static_cast<std::size_t>(n_out));
        for (int j = 0; j < n_out; ++j) {
            double acc = w.biases[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
            for (int i = 0; i < n_in; ++i) {
                acc += w.weights[static_cast<std::size_t>(l)][static_cast<std::size_t>(j * n_in + i)] *
                       z[static_cast<std::size_t>(i)];
            }
            s[static_cast<std::size_t>(j)] = l + 1 < layers ? std::tanh(acc) : acc;
        }
        z = std::move(s);
    }
    return z[0];
}

JetValue eval_jet(const MlpWeights& w, const Vec2& x) {
    struct J {
        double val, gx, gy, hxx, hxy, hyy;
    };
    const int layers = w.num_layers();
    std::vector<J> z(2);
    z[0] = J{x[0], 1.0, 0.0, 0.0, 0.0, 0.0};
    z[1] = J{x[1], 0.0, 1.0, 0.0, 0.0, 0.0};
    for (int l = 0; l < layers; ++l) {
        const int n_in = w.widths[static_cast<std::size_t>(l)];
        const int n_out = w.widths[static_cast<std::size_t>(l) + 1];
        const auto& W = w.weights[static_cast<std::size_t>(l)];
        const auto& b = w.biases[static_cast<std::size_t>(l)];
        std::vector<J> next(static_cast<std::size_t>(n_out));
        for (int j = 0; j < n_out; ++j) {
            J s{b[static_cast<std::size_t>(j)], 0.0, 0.0, 0.0, 0.0, 0.0};
            for (int i = 0; i < n_in; ++i) {
                const double wij = W[static_cast<std::size_t>(j * n_in + i)];
                const J& in = z[static_cast<std::size_t>(i)];
                s.val += wij * in.val;
                s.gx += wij * in.gx;
                s.gy += wij * in.gy;
                s.hxx += wij * in.hxx;
                s.hxy += wij * in.hxy;
                s.hyy += wij * in.hyy;
            }
            if (l + 1 < layers) {
                const double t = std::tanh(s.val);
                const double dp = 1.0 - t * t;
                const double ddp = -2.0 * t * dp;
                next[static_cast<std::size_t>(j)] =
                    J{t,
                      dp * s.gx,
                      dp * s.gy,
                      ddp * s.gx * s.gx + dp * s.hxx,
                      ddp * s.gx * s.gy + dp * s.hxy,
                      ddp * s.gy * s.gy + dp * s.hyy};
            } else {
                next[static_cast<std::size_t>(j)] = s;
            }
        }
        z = std::move(next);
    }
    JetValue out;
    out.val = z[0].val;
    out.grad = {z[0].gx, z[0].gy};
    out.hxx = z[0].hxx;
    out.hxy = z[0].hxy;
    out.hyy = z[0].hyy;
    return out;
}

} // namespace cdii
