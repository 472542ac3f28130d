#include "cdii/config.hpp"

#include "cdii/rng.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace cdii {

namespace {

constexpr std::uint64_t kNoiseSeedStream = 0xA015;

void reject_unknown_keys(const nlohmann::json& doc, const std::set<std::string>& known,
                         const std::string& prefix) {
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key \"" + prefix + key + "\"");
        }
        (void)value;
    }
}

template <typename T>
void read_field(const nlohmann::json& doc, const char* key, T& out, const std::string& prefix) {
    if (!doc.contains(key)) {
        return;
    }
    try {
        out = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config field \"" + prefix + key + "\" has the wrong type");
    }
}

nlohmann::json parse_override_value(const std::string& text) {
    const nlohmann::json parsed = nlohmann::json::parse(text, nullptr, false);
    if (!parsed.is_discarded()) {
        return parsed;
    }
    return nlohmann::json(text); // bare string
}

void apply_override(nlohmann::json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("bad --set override \"" + spec + "\"; expected key=value");
    }
    const std::string path = spec.substr(0, eq);
    const nlohmann::json value = parse_override_value(spec.substr(eq + 1));

    nlohmann::json* cursor = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) {
            throw ConfigError("bad --set path \"" + path + "\"");
        }
        if (dot == std::string::npos) {
            (*cursor)[key] = value;
            return;
        }
        cursor = &(*cursor)[key];
        start = dot + 1;
    }
}

} // namespace

void ExperimentConfig::validate() const {
    if (n < 1) {
        throw ConfigError("n must be >= 1");
    }
    if (grid_res < 33) {
        throw ConfigError("grid_res must be >= 33");
    }
    if (eval_resolution < 3) {
        throw ConfigError("eval_resolution must be >= 3");
    }
    if (!(noise.level >= 0.0)) {
        throw ConfigError("noise.level must be >= 0");
    }
    if (!(solver_tol > 0.0)) {
        throw ConfigError("solver_tol must be > 0");
    }
    ExampleId::from_name(example); // throws on bad name
    if (example == "custom" && custom_gamma_csv.empty()) {
        throw ConfigError("custom example requires custom_gamma_csv");
    }
    const auto check_widths = [](const std::vector<int>& w, const char* name) {
        if (w.size() < 2 || w.front() != 2 || w.back() != 1) {
            throw ConfigError(std::string(name) + " must run from 2 inputs to 1 output");
        }
        for (int v : w) {
            if (v <= 0) {
                throw ConfigError(std::string(name) + " has a non-positive width");
            }
        }
    };
    check_widths(train.widths_gamma, "widths_gamma");
    check_widths(train.widths_u, "widths_u");
    train.validate();
}

NoiseSpec ExperimentConfig::resolved_noise() const {
    NoiseSpec spec = noise;
    if (!noise_seed_explicit) {
        spec.seed = derive_seed(seed, kNoiseSeedStream);
    }
    return spec;
}

ExampleId ExperimentConfig::example_id() const {
    ExampleId id = ExampleId::from_name(example);
    if (id.kind == ExampleId::Kind::Custom) {
        id.custom = read_grid_csv(custom_gamma_csv);
    }
    return id;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json doc;
    doc["example"] = example;
    doc["custom_gamma_csv"] = custom_gamma_csv;
    doc["n"] = n;
    doc["grid_res"] = grid_res;
    doc["gamma_floor"] = gamma_floor;
    doc["solver_tol"] = solver_tol;
    doc["seed"] = seed;
    const NoiseSpec resolved = resolved_noise();
    doc["noise"] = {{"kind", resolved.kind_name()}, {"level", resolved.level}, {"seed", resolved.seed}};
    doc["reg"] = {{"kind", train.reg.kind_name()}, {"alpha", train.reg.alpha}, {"zeta", train.reg.zeta}};
    doc["train"] = {{"epochs", train.epochs},
                    {"batch_size", train.batch_size},
                    {"steps_per_epoch", train.steps_per_epoch},
                    {"lr", train.lr},
                    {"beta1", train.beta1},
                    {"beta2", train.beta2},
                    {"eps_adam", train.eps_adam},
                    {"log_every", train.log_every},
                    {"checkpoint_every", train.checkpoint_every},
                    {"lambda_pde", train.loss_weights.lambda_pde},
                    {"lambda_bc", train.loss_weights.lambda_bc}};
    doc["widths_gamma"] = train.widths_gamma;
    doc["widths_u"] = train.widths_u;
    doc["gamma_output_shift"] = train.gamma_output_shift;
    doc["eval_resolution"] = eval_resolution;
    doc["threads"] = train.threads;
    doc["output_dir"] = output_dir;
    return doc;
}

ExperimentConfig config_from_json(nlohmann::json doc) {
    static const std::set<std::string> top_keys{
        "example", "custom_gamma_csv", "n", "grid_res", "gamma_floor", "solver_tol",
        "seed", "noise", "reg", "train", "widths_gamma", "widths_u",
        "gamma_output_shift", "eval_resolution", "threads", "output_dir"};
    static const std::set<std::string> noise_keys{"kind", "level", "seed"};
    static const std::set<std::string> reg_keys{"kind", "alpha", "zeta"};
    static const std::set<std::string> train_keys{
        "epochs", "batch_size", "steps_per_epoch", "lr", "beta1", "beta2",
        "eps_adam", "log_every", "checkpoint_every", "lambda_pde", "lambda_bc"};

    if (!doc.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    reject_unknown_keys(doc, top_keys, "");

    ExperimentConfig cfg;
    read_field(doc, "example", cfg.example, "");
    read_field(doc, "custom_gamma_csv", cfg.custom_gamma_csv, "");
    read_field(doc, "n", cfg.n, "");
    read_field(doc, "grid_res", cfg.grid_res, "");
    read_field(doc, "gamma_floor", cfg.gamma_floor, "");
    read_field(doc, "solver_tol", cfg.solver_tol, "");
    read_field(doc, "seed", cfg.seed, "");
    read_field(doc, "gamma_output_shift", cfg.train.gamma_output_shift, "");
    read_field(doc, "eval_resolution", cfg.eval_resolution, "");
    read_field(doc, "threads", cfg.train.threads, "");
    read_field(doc, "output_dir", cfg.output_dir, "");
    read_field(doc, "widths_gamma", cfg.train.widths_gamma, "");
    read_field(doc, "widths_u", cfg.train.widths_u, "");

    if (doc.contains("noise")) {
        const auto& noise = doc.at("noise");
        reject_unknown_keys(noise, noise_keys, "noise.");
        std::string kind = cfg.noise.kind_name();
        read_field(noise, "kind", kind, "noise.");
        cfg.noise.kind = NoiseSpec::kind_from_name(kind);
        read_field(noise, "level", cfg.noise.level, "noise.");
        if (noise.contains("seed")) {
            read_field(noise, "seed", cfg.noise.seed, "noise.");
            cfg.noise_seed_explicit = true;
        }
    }
    if (doc.contains("reg")) {
        const auto& reg = doc.at("reg");
        reject_unknown_keys(reg, reg_keys, "reg.");
        std::string kind = cfg.train.reg.kind_name();
        read_field(reg, "kind", kind, "reg.");
        cfg.train.reg.kind = RegularizerSpec::kind_from_name(kind);
        read_field(reg, "alpha", cfg.train.reg.alpha, "reg.");
        read_field(reg, "zeta", cfg.train.reg.zeta, "reg.");
    }
    if (doc.contains("train")) {
        const auto& train = doc.at("train");
        reject_unknown_keys(train, train_keys, "train.");
        read_field(train, "epochs", cfg.train.epochs, "train.");
        read_field(train, "batch_size", cfg.train.batch_size, "train.");
        read_field(train, "steps_per_epoch", cfg.train.steps_per_epoch, "train.");
        read_field(train, "lr", cfg.train.lr, "train.");
        read_field(train, "beta1", cfg.train.beta1, "train.");
        read_field(train, "beta2", cfg.train.beta2, "train.");
        read_field(train, "eps_adam", cfg.train.eps_adam, "train.");
        read_field(train, "log_every", cfg.train.log_every, "train.");
        read_field(train, "checkpoint_every", cfg.train.checkpoint_every, "train.");
        read_field(train, "lambda_pde", cfg.train.loss_weights.lambda_pde, "train.");
        read_field(train, "lambda_bc", cfg.train.loss_weights.lambda_bc, "train.");
    }

    cfg.train.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

namespace {

ExperimentConfig finalize(nlohmann::json doc, const std::vector<std::string>& overrides) {
    for (const std::string& spec : overrides) {
        apply_override(doc, spec);
    }
    ExperimentConfig cfg = config_from_json(std::move(doc));
    if (const char* env = std::getenv("CDII_SEED")) {
        cfg.seed = std::strtoull(env, nullptr, 10);
        cfg.train.seed = cfg.seed;
    }
    return cfg;
}

} // namespace

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return finalize(std::move(doc), overrides);
}

ExperimentConfig default_config(const std::vector<std::string>& overrides) {
    return finalize(nlohmann::json::object(), overrides);
}

} // namespace cdii
