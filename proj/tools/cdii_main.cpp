#include "cdii/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int threads = 0; // 0 = take from config
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* cfg = cmd->add_option("-c,--config", opts.config_path, "experiment config (JSON)");
    if (config_required) {
        cfg->required();
    }
    cmd->add_option("--set", opts.overrides, "override a config key, e.g. --set train.epochs=1000")
        ->take_all();
    cmd->add_option("-o,--out", opts.out_dir, "output directory (defaults to config output_dir)");
    cmd->add_option("--threads", opts.threads, "worker threads for loss evaluation");
}

cdii::ExperimentConfig resolve_config(const CommonOpts& opts) {
    cdii::ExperimentConfig cfg = opts.config_path.empty()
                                     ? cdii::default_config(opts.overrides)
                                     : cdii::load_config(opts.config_path, opts.overrides);
    if (!opts.out_dir.empty()) {
        cfg.output_dir = opts.out_dir;
    }
    if (opts.threads > 0) {
        cfg.train.threads = opts.threads;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CDII reconstruction pipeline: synthetic data generation, coupled "
                 "physics-informed training, and evaluation"};
    app.require_subcommand(1);

    CommonOpts gen_opts, train_opts, eval_opts, full_opts;
    std::string data_dir, checkpoint_name = "";

    auto* generate = app.add_subcommand("generate", "manufacture a synthetic dataset");
    add_common(generate, gen_opts);

    auto* train = app.add_subcommand("train", "run the coupled minimization on a dataset");
    add_common(train, train_opts);
    train->add_option("--data", data_dir, "dataset directory (defaults to the output directory)");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint against ground truth");
    add_common(evaluate, eval_opts);
    evaluate->add_option("--data", data_dir, "dataset directory (defaults to the output directory)");
    evaluate->add_option("--checkpoint", checkpoint_name,
                         "checkpoint name, e.g. ckpt_5000 (defaults to the final one)");

    auto* full = app.add_subcommand("full", "generate + train + evaluate");
    add_common(full, full_opts);

    double size_n = 1.0, size_mu = 0.5;
    int size_d = 2, size_s = 1;
    auto* size = app.add_subcommand("size", "network-size prescription calculator");
    size->add_option("--n", size_n, "sample count")->required();
    size->add_option("--d", size_d, "dimension")->default_val(2);
    size->add_option("--s", size_s, "smoothness index")->default_val(1);
    size->add_option("--mu", size_mu, "slack")->default_val(0.5);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            const auto cfg = resolve_config(gen_opts);
            cdii::cmd_generate(cfg, cfg.output_dir);
            std::cout << "dataset written to " << cfg.output_dir << "\n";
        } else if (train->parsed()) {
            const auto cfg = resolve_config(train_opts);
            const std::string data = data_dir.empty() ? cfg.output_dir : data_dir;
            const std::string final_ckpt = cdii::cmd_train(cfg, data, cfg.output_dir);
            std::cout << "final checkpoint " << final_ckpt << " written to " << cfg.output_dir
                      << "\n";
        } else if (evaluate->parsed()) {
            const auto cfg = resolve_config(eval_opts);
            const std::string data = data_dir.empty() ? cfg.output_dir : data_dir;
            const std::string name =
                checkpoint_name.empty() ? "ckpt_" + std::to_string(cfg.train.epochs) : checkpoint_name;
            const cdii::EvalReport report = cdii::cmd_evaluate(cfg, data, name, cfg.output_dir);
            std::cout << "err_gamma " << report.err_gamma << "  err_u " << report.err_u
                      << "  err_a " << report.err_a << "\n";
        } else if (full->parsed()) {
            const auto cfg = resolve_config(full_opts);
            const cdii::EvalReport report = cdii::cmd_full(cfg, cfg.output_dir);
            std::cout << "err_gamma " << report.err_gamma << "  err_u " << report.err_u
                      << "  err_a " << report.err_a << "\n";
        } else if (size->parsed()) {
            const cdii::SizingOutput out = cdii::cmd_size(size_n, size_d, size_s, size_mu);
            nlohmann::json doc{{"S", out.S},
                               {"B", out.B},
                               {"rate_exponent", out.rate_exponent},
                               {"log_base", out.log_base},
                               {"depth_note", out.depth_note}};
            if (out.vacuous_rate) {
                doc["warning"] = "s <= mu: the rate exponent is nonnegative (vacuous rate)";
            }
            std::cout << doc.dump(2) << "\n";
        }
    } catch (const cdii::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cdii::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const cdii::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
