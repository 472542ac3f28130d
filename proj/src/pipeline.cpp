#include "cdii/pipeline.hpp"

#include "cdii/checkpoint.hpp"

#include <fstream>

namespace cdii {

namespace {

void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

nlohmann::json metrics_echo(const ExperimentConfig& cfg) {
    nlohmann::json doc;
    doc["example"] = cfg.example;
    const NoiseSpec noise = cfg.resolved_noise();
    doc["noise"] = {{"kind", noise.kind_name()}, {"level", noise.level}};
    nlohmann::json reg = {{"kind", cfg.train.reg.kind_name()}, {"alpha", cfg.train.reg.alpha}};
    if (cfg.train.reg.kind == RegularizerSpec::Kind::TvHuber) {
        reg["zeta"] = cfg.train.reg.zeta;
    }
    doc["reg"] = reg;
    doc["epochs"] = cfg.train.epochs;
    doc["n"] = cfg.n;
    doc["widths"] = {{"gamma", cfg.train.widths_gamma}, {"u", cfg.train.widths_u}};
    doc["seed"] = cfg.seed;
    return doc;
}

} // namespace

void cmd_generate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    const DatasetBundle bundle = build_dataset(cfg.example_id(), cfg.n, cfg.resolved_noise(),
                                               cfg.grid_res, cfg.seed, cfg.gamma_floor,
                                               cfg.solver_tol);
    write_dataset(bundle.data, out_dir);
    write_grid_csv(bundle.gamma_true, out_dir / "gamma_true.csv");
    write_grid_csv(bundle.u_true, out_dir / "u_true.csv");
    write_grid_csv(bundle.a_true, out_dir / "a_true.csv");
    write_json_file(cfg.to_json(), out_dir / "config_echo.json");
}

std::string cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
                      const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    const Dataset data = read_dataset(data_dir);
    const TrainResult result = train(data, cfg.train, out_dir);
    write_history_csv(result.history, out_dir / "loss_history.csv");
    write_json_file(cfg.to_json(), out_dir / "config_echo.json");
    return "ckpt_" + std::to_string(cfg.train.epochs);
}

EvalReport cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
                        const std::string& checkpoint_name, const std::filesystem::path& out_dir) {
    cfg.validate();
    const Checkpoint ckpt = read_checkpoint(out_dir, checkpoint_name);
    if (ckpt.gamma.widths != cfg.train.widths_gamma || ckpt.u.widths != cfg.train.widths_u) {
        throw ConfigError("checkpoint " + checkpoint_name +
                          " widths do not match the configured widths");
    }
    const GridField gamma_true = read_grid_csv(data_dir / "gamma_true.csv");
    const GridField u_true = read_grid_csv(data_dir / "u_true.csv");
    const GridField a_true = read_grid_csv(data_dir / "a_true.csv");

    EvalReport report =
        evaluate_networks(ckpt.gamma, cfg.train.gamma_output_shift, ckpt.u, gamma_true, u_true,
                          a_true, cfg.eval_resolution);
    report.config_echo = metrics_echo(cfg);
    write_report(report, out_dir);
    return report;
}

SizingOutput cmd_size(double n, int d, int s, double mu) {
    return prescribe(SizingInput{n, d, s, mu});
}

EvalReport cmd_full(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    cmd_generate(cfg, out_dir);
    const std::string final_ckpt = cmd_train(cfg, out_dir, out_dir);
    return cmd_evaluate(cfg, out_dir, final_ckpt, out_dir);
}

} // namespace cdii
