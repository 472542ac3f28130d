#include "cdii/loss.hpp"

#include <cmath>
#include <thread>

namespace cdii {

RegularizerSpec::Kind RegularizerSpec::kind_from_name(const std::string& name) {
    if (name == "none") {
        return Kind::None;
    }
    if (name == "l2") {
        return Kind::L2;
    }
    if (name == "tv_huber") {
        return Kind::TvHuber;
    }
    throw ConfigError("unknown regularizer \"" + name + "\"; expected none, l2 or tv_huber");
}

std::string RegularizerSpec::kind_name() const {
    switch (kind) {
    case Kind::None:
        return "none";
    case Kind::L2:
        return "l2";
    case Kind::TvHuber:
        return "tv_huber";
    }
    return "?";
}

double huber(double t, double zeta) {
    return t >= zeta ? t : t * t / (2.0 * zeta) + zeta / 2.0;
}

JetFn make_network_jet_fn(const MlpParams& params, double output_shift) {
    return [&params, output_shift](Tape& tape, const Vec2& x) {
        SpatialJet jet = forward_jet(params, tape, x);
        if (output_shift != 0.0) {
            jet.val = jet.val + wrap(tape, tape.constant(output_shift));
        }
        return jet;
    };
}

ValFn make_network_val_fn(const MlpParams& params, double output_shift) {
    return [&params, output_shift](Tape& tape, const Vec2& x) {
        Expr v = forward(params, tape, x);
        if (output_shift != 0.0) {
            v = v + wrap(tape, tape.constant(output_shift));
        }
        return v;
    };
}

namespace {

// Term builders are shared between the single-tape assembly and the sharded
// batch path, so both produce identical arithmetic.
Expr misfit_term(Tape& tape, Expr gamma_val, Expr ugx, Expr ugy, double y, double eps_mag) {
    const Expr mag = sqrt(square(ugx) + square(ugy) + wrap(tape, tape.constant(eps_mag)));
    const Expr pred = gamma_val * mag;
    return square(wrap(tape, tape.constant(y)) - pred);
}

Expr misfit_term(Tape& tape, const SpatialJet& gj, const SpatialJet& uj, double y, double eps_mag) {
    return misfit_term(tape, gj.val, uj.grad[0], uj.grad[1], y, eps_mag);
}

Expr residual_term(Expr gval, Expr ggx, Expr ggy, Expr ugx, Expr ugy, Expr uhxx, Expr uhyy) {
    const Expr r = ggx * ugx + ggy * ugy + gval * (uhxx + uhyy);
    return square(r);
}

Expr residual_term(const SpatialJet& gj, const SpatialJet& uj) {
    return residual_term(gj.val, gj.grad[0], gj.grad[1], uj.grad[0], uj.grad[1], uj.hxx, uj.hyy);
}

Expr reg_term(Tape& tape, Expr gval, Expr ggx, Expr ggy, const RegularizerSpec& spec) {
    switch (spec.kind) {
    case RegularizerSpec::Kind::None:
        return wrap(tape, tape.constant(0.0));
    case RegularizerSpec::Kind::L2:
        return square(gval);
    case RegularizerSpec::Kind::TvHuber: {
        const Expr g2 = square(ggx) + square(ggy);
        // Branch chosen on the detached value; inside the sqrt branch the
        // argument is bounded below by zeta^2 > 0.
        if (g2.value() >= spec.zeta * spec.zeta) {
            return sqrt(g2);
        }
        return g2 / wrap(tape, tape.constant(2.0 * spec.zeta)) +
               wrap(tape, tape.constant(spec.zeta / 2.0));
    }
    }
    throw ConfigError("invalid regularizer kind");
}

Expr reg_term(Tape& tape, const SpatialJet& gj, const RegularizerSpec& spec) {
    return reg_term(tape, gj.val, gj.grad[0], gj.grad[1], spec);
}

Expr mean_of(Tape& tape, Expr acc, std::size_t count) {
    return acc / wrap(tape, tape.constant(static_cast<double>(count)));
}

void require_nonempty(std::size_t n, const char* what) {
    if (n == 0) {
        throw ConfigError(std::string(what) + " batch is empty");
    }
}

} // namespace

Expr data_misfit(Tape& tape, std::span<const Vec2> xs, std::span<const double> ys,
                 const JetFn& gamma, const JetFn& u, double eps_mag) {
    require_nonempty(xs.size(), "interior");
    Expr acc;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const SpatialJet gj = gamma(tape, xs[i]);
        const SpatialJet uj = u(tape, xs[i]);
        const Expr term = misfit_term(tape, gj, uj, ys[i], eps_mag);
        acc = i == 0 ? term : acc + term;
    }
    return mean_of(tape, acc, xs.size());
}

Expr pde_residual(Tape& tape, std::span<const Vec2> xs, const JetFn& gamma, const JetFn& u) {
    require_nonempty(xs.size(), "interior");
    Expr acc;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const SpatialJet gj = gamma(tape, xs[i]);
        const SpatialJet uj = u(tape, xs[i]);
        const Expr term = residual_term(gj, uj);
        acc = i == 0 ? term : acc + term;
    }
    return mean_of(tape, acc, xs.size());
}

Expr boundary_misfit(Tape& tape, std::span<const Vec2> xs, std::span<const double> fs,
                     const ValFn& u) {
    require_nonempty(xs.size(), "boundary");
    Expr acc;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Expr term = square(u(tape, xs[i]) - wrap(tape, tape.constant(fs[i])));
        acc = i == 0 ? term : acc + term;
    }
    return mean_of(tape, acc, xs.size());
}

Expr regularizer(Tape& tape, std::span<const Vec2> xs, const JetFn& gamma,
                 const RegularizerSpec& spec) {
    require_nonempty(xs.size(), "interior");
    Expr acc;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const SpatialJet gj = gamma(tape, xs[i]);
        const Expr term = reg_term(tape, gj, spec);
        acc = i == 0 ? term : acc + term;
    }
    return mean_of(tape, acc, xs.size());
}

LossBreakdown total_loss(Tape& tape, std::span<const Vec2> interior_x,
                         std::span<const double> interior_y, std::span<const Vec2> boundary_x,
                         std::span<const double> boundary_f, const JetFn& gamma, const JetFn& u_jet,
                         const ValFn& u_val, const RegularizerSpec& reg,
                         const LossWeights& weights) {
    require_nonempty(interior_x.size(), "interior");
    require_nonempty(boundary_x.size(), "boundary");

    Expr misfit_acc, reg_acc, pde_acc;
    for (std::size_t i = 0; i < interior_x.size(); ++i) {
        const SpatialJet gj = gamma(tape, interior_x[i]);
        const SpatialJet uj = u_jet(tape, interior_x[i]);
        const Expr m = misfit_term(tape, gj, uj, interior_y[i], weights.eps_mag);
        const Expr r = reg_term(tape, gj, reg);
        const Expr p = residual_term(gj, uj);
        misfit_acc = i == 0 ? m : misfit_acc + m;
        reg_acc = i == 0 ? r : reg_acc + r;
        pde_acc = i == 0 ? p : pde_acc + p;
    }
    Expr boundary_acc;
    for (std::size_t i = 0; i < boundary_x.size(); ++i) {
        const Expr term = square(u_val(tape, boundary_x[i]) - wrap(tape, tape.constant(boundary_f[i])));
        boundary_acc = i == 0 ? term : boundary_acc + term;
    }

    const Expr misfit = mean_of(tape, misfit_acc, interior_x.size());
    const Expr regv = mean_of(tape, reg_acc, interior_x.size());
    const Expr pde = mean_of(tape, pde_acc, interior_x.size());
    const Expr bnd = mean_of(tape, boundary_acc, boundary_x.size());

    const Expr alpha = wrap(tape, tape.constant(reg.alpha));
    const Expr lp = wrap(tape, tape.constant(weights.lambda_pde));
    const Expr lb = wrap(tape, tape.constant(weights.lambda_bc));
    const Expr root = ((misfit + alpha * regv) + lp * pde) + lb * bnd;

    LossBreakdown out;
    out.misfit = misfit.value();
    out.regularizer = regv.value();
    out.pde_residual = pde.value();
    out.boundary = bnd.value();
    out.total = root.value();
    out.root = root;
    return out;
}

namespace {

struct PartialResult {
    double misfit = 0.0;
    double reg = 0.0;
    double pde = 0.0;
    double boundary = 0.0;
    std::vector<double> grad_gamma;
    std::vector<double> grad_u;
};

// One contiguous shard of the batch: parameters are bound once, each sample
// rewinds the tape to that mark and appends only its own subgraph. The
// gamma network is evaluated to first order and u with the Hessian diagonal,
// which is everything the risk reads; the values match the full-jet path
// bitwise because the kept chains run the same operations.
void run_shard(const MlpWeights& gamma_w, double gamma_shift, const MlpWeights& u_w,
               std::span<const Vec2> interior_x, std::span<const double> interior_y,
               std::span<const Vec2> boundary_x, std::span<const double> boundary_f,
               const RegularizerSpec& reg, const LossWeights& weights, bool want_grad,
               std::size_t n_interior_total, std::size_t n_boundary_total, PartialResult& out) {
    const std::size_t pg = gamma_w.param_count();
    const std::size_t pu = u_w.param_count();
    out.grad_gamma.assign(want_grad ? pg : 0, 0.0);
    out.grad_u.assign(want_grad ? pu : 0, 0.0);

    BatchWorkspace ws;
    const double inv_n = 1.0 / static_cast<double>(n_interior_total);
    const double bc_seed = weights.lambda_bc / static_cast<double>(n_boundary_total);

    const MlpParams gp = bind(ws.tape, gamma_w);
    const MlpParams up = bind(ws.tape, u_w);
    const std::size_t params_mark = ws.tape.mark();

    for (std::size_t i = 0; i < interior_x.size(); ++i) {
        ws.tape.rewind(params_mark);
        GradJet gj = forward_jet_grad(gp, ws.tape, interior_x[i]);
        if (gamma_shift != 0.0) {
            gj.val = gj.val + wrap(ws.tape, ws.tape.constant(gamma_shift));
        }
        const DiagJet uj = forward_jet_diag(up, ws.tape, interior_x[i]);

        const Expr m =
            misfit_term(ws.tape, gj.val, uj.grad[0], uj.grad[1], interior_y[i], weights.eps_mag);
        const Expr r = reg_term(ws.tape, gj.val, gj.grad[0], gj.grad[1], reg);
        const Expr p =
            residual_term(gj.val, gj.grad[0], gj.grad[1], uj.grad[0], uj.grad[1], uj.hxx, uj.hyy);
        out.misfit += m.value();
        out.reg += r.value();
        out.pde += p.value();

        if (want_grad) {
            const Expr alpha = wrap(ws.tape, ws.tape.constant(reg.alpha));
            const Expr lp = wrap(ws.tape, ws.tape.constant(weights.lambda_pde));
            const Expr root = m + alpha * r + lp * p;
            ws.tape.backward_into(root.id, inv_n, ws.adjoint);
            for (std::size_t k = 0; k < pg; ++k) {
                out.grad_gamma[k] += ws.adjoint[k];
            }
            for (std::size_t k = 0; k < pu; ++k) {
                out.grad_u[k] += ws.adjoint[pg + k];
            }
        }
    }

    for (std::size_t i = 0; i < boundary_x.size(); ++i) {
        ws.tape.rewind(params_mark);
        const Expr uval = forward(up, ws.tape, boundary_x[i]);
        const Expr term = square(uval - wrap(ws.tape, ws.tape.constant(boundary_f[i])));
        out.boundary += term.value();
        if (want_grad) {
            ws.tape.backward_into(term.id, bc_seed, ws.adjoint);
            for (std::size_t k = 0; k < pu; ++k) {
                out.grad_u[k] += ws.adjoint[pg + k];
            }
        }
    }
}

} // namespace

BatchResult batch_loss_grad(const MlpWeights& gamma_w, double gamma_shift, const MlpWeights& u_w,
                            std::span<const Vec2> interior_x, std::span<const double> interior_y,
                            std::span<const Vec2> boundary_x, std::span<const double> boundary_f,
                            const RegularizerSpec& reg, const LossWeights& weights, bool want_grad,
                            int threads) {
    require_nonempty(interior_x.size(), "interior");
    require_nonempty(boundary_x.size(), "boundary");

    const std::size_t n_int = interior_x.size();
    const std::size_t n_bnd = boundary_x.size();
    const int t = std::max(1, threads);
    std::vector<PartialResult> parts(static_cast<std::size_t>(t));

    if (t == 1) {
        run_shard(gamma_w, gamma_shift, u_w, interior_x, interior_y, boundary_x, boundary_f, reg,
                  weights, want_grad, n_int, n_bnd, parts[0]);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(t));
        for (int w = 0; w < t; ++w) {
            const std::size_t i0 = n_int * static_cast<std::size_t>(w) / static_cast<std::size_t>(t);
            const std::size_t i1 = n_int * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(t);
            const std::size_t b0 = n_bnd * static_cast<std::size_t>(w) / static_cast<std::size_t>(t);
            const std::size_t b1 = n_bnd * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(t);
            workers.emplace_back([&, w, i0, i1, b0, b1]() {
                run_shard(gamma_w, gamma_shift, u_w, interior_x.subspan(i0, i1 - i0),
                          interior_y.subspan(i0, i1 - i0), boundary_x.subspan(b0, b1 - b0),
                          boundary_f.subspan(b0, b1 - b0), reg, weights, want_grad, n_int, n_bnd,
                          parts[static_cast<std::size_t>(w)]);
            });
        }
        for (auto& worker : workers) {
            worker.join();
        }
    }

    BatchResult out;
    const std::size_t pg = gamma_w.param_count();
    const std::size_t pu = u_w.param_count();
    out.grad_gamma.assign(want_grad ? pg : 0, 0.0);
    out.grad_u.assign(want_grad ? pu : 0, 0.0);
    double misfit_sum = 0.0;
    double reg_sum = 0.0;
    double pde_sum = 0.0;
    double bnd_sum = 0.0;
    for (const PartialResult& part : parts) {
        misfit_sum += part.misfit;
        reg_sum += part.reg;
        pde_sum += part.pde;
        bnd_sum += part.boundary;
        if (want_grad) {
            for (std::size_t k = 0; k < pg; ++k) {
                out.grad_gamma[k] += part.grad_gamma[k];
            }
            for (std::size_t k = 0; k < pu; ++k) {
                out.grad_u[k] += part.grad_u[k];
            }
        }
    }

    // Same operations in the same order as the tape-side assembly in
    // total_loss, so the detached values agree bitwise.
    LossValues& v = out.values;
    v.misfit = misfit_sum / static_cast<double>(n_int);
    v.regularizer = reg_sum / static_cast<double>(n_int);
    v.pde_residual = pde_sum / static_cast<double>(n_int);
    v.boundary = bnd_sum / static_cast<double>(n_bnd);
    v.total = ((v.misfit + reg.alpha * v.regularizer) + weights.lambda_pde * v.pde_residual) +
              weights.lambda_bc * v.boundary;
    return out;
}

} // namespace cdii
