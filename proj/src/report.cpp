#include "cdii/report.hpp"

#include <cmath>
#include <fstream>

namespace cdii {

GridField evaluate_on_grid(const MlpWeights& w, double output_shift, int resolution) {
    if (resolution < 3) {
        throw ConfigError("evaluation resolution must be >= 3");
    }
    return tabulate(resolution, resolution,
                    [&](double x, double y) { return output_shift + eval_value(w, {x, y}); });
}

namespace {

double trapezoid_weight(int i, int j, int nx, int ny) {
    const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    return wx * wy;
}

double l2_norm(const GridField& g) {
    const double cell = 1.0 / ((g.nx - 1) * static_cast<double>(g.ny - 1));
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double v = g.at(i, j);
            acc += trapezoid_weight(i, j, g.nx, g.ny) * v * v;
        }
    }
    return std::sqrt(acc * cell);
}

GridField resample(const GridField& g, int resolution) {
    if (g.nx == resolution && g.ny == resolution) {
        return g;
    }
    return tabulate(resolution, resolution, [&](double x, double y) { return interpolate(g, x, y); });
}

} // namespace

double relative_l2_error(const GridField& pred, const GridField& truth) {
    if (pred.nx != truth.nx || pred.ny != truth.ny) {
        throw ConfigError("relative_l2_error: grid shapes differ");
    }
    const double denom = l2_norm(truth);
    if (denom == 0.0) {
        throw NumericError("relative_l2_error: truth field has zero norm");
    }
    GridField diff = truth;
    for (std::size_t k = 0; k < diff.values.size(); ++k) {
        diff.values[k] -= pred.values[k];
    }
    return l2_norm(diff) / denom;
}

GridField recovered_data_field(const MlpWeights& gamma_w, double gamma_shift,
                               const MlpWeights& u_w, int resolution) {
    if (resolution < 3) {
        throw ConfigError("evaluation resolution must be >= 3");
    }
    return tabulate(resolution, resolution, [&](double x, double y) {
        const double g = gamma_shift + eval_value(gamma_w, {x, y});
        const JetValue uj = eval_jet(u_w, {x, y});
        return g * std::hypot(uj.grad[0], uj.grad[1]);
    });
}

EvalReport evaluate_networks(const MlpWeights& gamma_w, double gamma_shift, const MlpWeights& u_w,
                             const GridField& gamma_true, const GridField& u_true,
                             const GridField& a_true, int resolution) {
    EvalReport rep;
    rep.gamma_hat = evaluate_on_grid(gamma_w, gamma_shift, resolution);
    rep.u_hat = evaluate_on_grid(u_w, 0.0, resolution);
    rep.a_hat = recovered_data_field(gamma_w, gamma_shift, u_w, resolution);

    const GridField gt = resample(gamma_true, resolution);
    const GridField ut = resample(u_true, resolution);
    const GridField at = resample(a_true, resolution);
    rep.err_gamma = relative_l2_error(rep.gamma_hat, gt);
    rep.err_u = relative_l2_error(rep.u_hat, ut);
    rep.err_a = relative_l2_error(rep.a_hat, at);

    rep.err_gamma_field = gt;
    for (std::size_t k = 0; k < gt.values.size(); ++k) {
        rep.err_gamma_field.values[k] = std::abs(rep.gamma_hat.values[k] - gt.values[k]);
    }
    rep.err_u_field = ut;
    for (std::size_t k = 0; k < ut.values.size(); ++k) {
        rep.err_u_field.values[k] = std::abs(rep.u_hat.values[k] - ut.values[k]);
    }
    return rep;
}

void write_report(const EvalReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_grid_csv(report.gamma_hat, out_dir / "gamma_hat.csv");
    write_grid_csv(report.u_hat, out_dir / "u_hat.csv");
    write_grid_csv(report.a_hat, out_dir / "a_hat.csv");
    write_grid_csv(report.err_gamma_field, out_dir / "err_gamma.csv");
    write_grid_csv(report.err_u_field, out_dir / "err_u.csv");

    nlohmann::json metrics = report.config_echo;
    metrics["err_gamma"] = report.err_gamma;
    metrics["err_u"] = report.err_u;
    metrics["err_a"] = report.err_a;
    const auto path = out_dir / "metrics.json";
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << metrics.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace cdii
