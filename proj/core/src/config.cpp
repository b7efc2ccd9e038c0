#include "fbsde/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fbsde {

namespace {

using nlohmann::json;

json example1_to_json(const Example1Config& c) {
    return json{{"n", c.n_list},          {"horizon", c.horizon_T}, {"dt", c.dt},
                {"loss", c.loss},         {"param", c.param},       {"steps", c.steps},
                {"batch", c.batch},       {"lr", c.lr},             {"theta0", c.theta0},
                {"y0_db0", c.y0_db0}};
}

json pendulum_to_json(const PendulumConfig& c) {
    return json{{"mode", c.mode},
                {"iters", c.iters},
                {"sigma0", c.sigma0},
                {"horizon", c.horizon_T},
                {"dt", c.dt},
                {"buffer", c.buffer},
                {"rollouts", c.rollouts},
                {"batch", c.batch},
                {"lr", c.lr},
                {"weight_decay", c.weight_decay},
                {"eval_steps", c.eval_steps},
                {"improve_steps", c.improve_steps},
                {"tolerance", c.tolerance},
                {"patience", c.patience},
                {"lambda1", c.lambda1},
                {"lambda2", c.lambda2},
                {"r", c.r},
                {"x_star", c.x_star},
                {"a", c.a},
                {"b", c.b},
                {"inertia", c.inertia}};
}

template <typename T>
void take(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void overlay_example1(Example1Config& c, const json& j) {
    static const char* known[] = {"n",     "horizon", "dt", "loss",   "param",
                                  "steps", "batch",   "lr", "theta0", "y0_db0"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("config: unknown example1 key '" + key + "'");
    }
    take(j, "n", c.n_list);
    take(j, "horizon", c.horizon_T);
    take(j, "dt", c.dt);
    take(j, "loss", c.loss);
    take(j, "param", c.param);
    take(j, "steps", c.steps);
    take(j, "batch", c.batch);
    take(j, "lr", c.lr);
    take(j, "theta0", c.theta0);
    take(j, "y0_db0", c.y0_db0);
}

void overlay_pendulum(PendulumConfig& c, const json& j) {
    static const char* known[] = {"mode",       "iters",         "sigma0",    "horizon",
                                  "dt",         "buffer",        "rollouts",  "batch",
                                  "lr",         "weight_decay",  "eval_steps","improve_steps",
                                  "tolerance",  "patience",      "lambda1",   "lambda2",
                                  "r",          "x_star",        "a",         "b",
                                  "inertia"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("config: unknown pendulum key '" + key + "'");
    }
    take(j, "mode", c.mode);
    take(j, "iters", c.iters);
    take(j, "sigma0", c.sigma0);
    take(j, "horizon", c.horizon_T);
    take(j, "dt", c.dt);
    take(j, "buffer", c.buffer);
    take(j, "rollouts", c.rollouts);
    take(j, "batch", c.batch);
    take(j, "lr", c.lr);
    take(j, "weight_decay", c.weight_decay);
    take(j, "eval_steps", c.eval_steps);
    take(j, "improve_steps", c.improve_steps);
    take(j, "tolerance", c.tolerance);
    take(j, "patience", c.patience);
    take(j, "lambda1", c.lambda1);
    take(j, "lambda2", c.lambda2);
    take(j, "r", c.r);
    take(j, "x_star", c.x_star);
    take(j, "a", c.a);
    take(j, "b", c.b);
    take(j, "inertia", c.inertia);
}

} // namespace

RunConfig default_config() { return RunConfig{}; }

std::string config_to_json(const RunConfig& cfg) {
    json j{{"experiment", cfg.experiment},
           {"seed", cfg.seed},
           {"out", cfg.out_dir},
           {"timings", cfg.timings},
           {"example1", example1_to_json(cfg.example1)},
           {"pendulum", pendulum_to_json(cfg.pendulum)}};
    return j.dump(2);
}

void apply_json_overlay(RunConfig& cfg, const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "experiment" && key != "seed" && key != "out" && key != "timings" &&
            key != "example1" && key != "pendulum")
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    take(j, "experiment", cfg.experiment);
    take(j, "seed", cfg.seed);
    take(j, "out", cfg.out_dir);
    take(j, "timings", cfg.timings);
    if (j.contains("example1")) overlay_example1(cfg.example1, j.at("example1"));
    if (j.contains("pendulum")) overlay_pendulum(cfg.pendulum, j.at("pendulum"));
}

RunConfig parse_config(const std::string& json_text) {
    RunConfig cfg = default_config();
    apply_json_overlay(cfg, json_text);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

void validate(const RunConfig& cfg) {
    if (cfg.experiment != "example1" && cfg.experiment != "pendulum" &&
        cfg.experiment != "gradcheck")
        throw std::invalid_argument("config: unknown experiment '" + cfg.experiment + "'");

    const Example1Config& e = cfg.example1;
    if (e.n_list.empty()) throw std::invalid_argument("config: example1 n list is empty");
    for (int n : e.n_list)
        if (n < 1) throw std::invalid_argument("config: example1 n must be >= 1");
    if (!(e.horizon_T > 0.0) || !(e.dt > 0.0) || e.dt > e.horizon_T)
        throw std::invalid_argument("config: example1 horizon/dt invalid");
    if (e.loss != "measurability" && e.loss != "deep-bsde" && e.loss != "martingale")
        throw std::invalid_argument("config: example1 loss must be one of "
                                    "measurability|deep-bsde|martingale");
    if (e.param != "well" && e.param != "mis")
        throw std::invalid_argument("config: example1 param must be well|mis");
    if (e.steps < 1 || e.batch < 2 || !(e.lr >= 0.0))
        throw std::invalid_argument("config: example1 steps/batch/lr invalid");

    const PendulumConfig& p = cfg.pendulum;
    if (p.mode != "model-based" && p.mode != "model-free")
        throw std::invalid_argument("config: pendulum mode must be model-based|model-free");
    if (p.iters < 0) throw std::invalid_argument("config: pendulum iters must be >= 0");
    if (!(p.sigma0 >= 0.0)) throw std::invalid_argument("config: pendulum sigma0 invalid");
    if (!(p.horizon_T > 0.0) || !(p.dt > 0.0) || p.dt > p.horizon_T)
        throw std::invalid_argument("config: pendulum horizon/dt invalid");
    if (p.buffer < 2 || p.rollouts < 2 || p.batch < 2)
        throw std::invalid_argument("config: pendulum buffer/rollouts/batch must be >= 2");
    if (p.eval_steps < 1 || p.improve_steps < 1 || p.patience < 1 || !(p.tolerance > 0.0))
        throw std::invalid_argument("config: pendulum training phase settings invalid");
    if (!(p.r > 0.0) || !(p.inertia > 0.0))
        throw std::invalid_argument("config: pendulum r and inertia must be positive");
    if (p.x_star.size() != 2)
        throw std::invalid_argument("config: pendulum x_star must have 2 entries");
}

} // namespace fbsde
