#include "mecsim/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace mecsim {

namespace {

using nlohmann::json;

// Binds the keys of one section to fields; rejects anything else.
class Section {
public:
    explicit Section(std::string name) : name_(std::move(name)) {}

    template <typename T>
    Section& bind(const std::string& key, T& field) {
        readers_[key] = [this, key, &field](const json& v) {
            try {
                field = v.get<T>();
            } catch (const json::exception&) {
                throw ConfigError("config key '" + name_ + "." + key + "' has the wrong type");
            }
        };
        writers_[key] = [&field](json& out, const std::string& k) { out[k] = field; };
        return *this;
    }

    void read(const json& j) const {
        if (!j.is_object()) {
            throw ConfigError("config section '" + name_ + "' must be an object");
        }
        for (const auto& [key, value] : j.items()) {
            auto it = readers_.find(key);
            if (it == readers_.end()) {
                throw ConfigError("unknown config key '" + name_ + "." + key + "'");
            }
            it->second(value);
        }
    }

    json write() const {
        json out = json::object();
        for (const auto& [key, w] : writers_) w(out, key);
        return out;
    }

private:
    std::string name_;
    std::map<std::string, std::function<void(const json&)>> readers_;
    std::map<std::string, std::function<void(json&, const std::string&)>> writers_;
};

struct Binding {
    std::string sweep_parameter;
    std::map<std::string, Section> sections;
};

Binding bind_all(CliConfig& c) {
    Binding b;
    b.sweep_parameter = sweep_parameter_name(c.sweep_parameter);
    auto& sim = b.sections.emplace("sim", Section("sim")).first->second;
    sim.bind("n_rb", c.sim.n_rb)
        .bind("plane_edge", c.sim.plane_edge)
        .bind("speed", c.sim.speed)
        .bind("lambda", c.sim.lambda)
        .bind("M", c.sim.M)
        .bind("n_min", c.sim.n_min)
        .bind("n_max", c.sim.n_max)
        .bind("d_min", c.sim.d_min)
        .bind("d_max", c.sim.d_max)
        .bind("duration", c.sim.duration)
        .bind("seed", c.sim.seed)
        .bind("drain", c.sim.drain);
    auto& cost = b.sections.emplace("cost", Section("cost")).first->second;
    cost.bind("f_loc", c.sim.cost.f_loc)
        .bind("f_edg", c.sim.cost.f_edg)
        .bind("c", c.sim.cost.c)
        .bind("gamma", c.sim.cost.gamma)
        .bind("p_tra", c.sim.cost.p_tra)
        .bind("p_idl", c.sim.cost.p_idl)
        .bind("alpha", c.sim.cost.alpha)
        .bind("beta", c.sim.cost.beta);
    auto& ch = b.sections.emplace("channel", Section("channel")).first->second;
    ch.bind("bandwidth", c.sim.channel.bandwidth)
        .bind("noise_power", c.sim.channel.noise_power)
        .bind("gain_ref", c.sim.channel.gain_ref)
        .bind("min_distance", c.sim.channel.min_distance);
    auto& tr = b.sections.emplace("trainer", Section("trainer")).first->second;
    tr.bind("learning_rate", c.trainer.learning_rate)
        .bind("discount", c.trainer.discount)
        .bind("replay_capacity", c.trainer.replay_capacity)
        .bind("batch_size", c.trainer.batch_size)
        .bind("epsilon_start", c.trainer.epsilon_start)
        .bind("epsilon_end", c.trainer.epsilon_end)
        .bind("epsilon_decay_steps", c.trainer.epsilon_decay_steps)
        .bind("target_sync_interval", c.trainer.target_sync_interval)
        .bind("reward_scale", c.trainer.reward_scale)
        .bind("reward_percentile", c.trainer.reward_percentile)
        .bind("max_transitions", c.trainer.max_transitions)
        .bind("warmup_transitions", c.trainer.warmup_transitions)
        .bind("train_every", c.trainer.train_every)
        .bind("hidden_width", c.trainer.hidden_width)
        .bind("hidden_layers", c.trainer.hidden_layers)
        .bind("episode_duration", c.trainer.episode_duration)
        .bind("calibration_duration", c.trainer.calibration_duration)
        .bind("episodes", c.episodes);
    auto& sw = b.sections.emplace("sweep", Section("sweep")).first->second;
    sw.bind("parameter", b.sweep_parameter)
        .bind("values", c.sweep_values)
        .bind("policies", c.sweep_policies)
        .bind("seeds", c.sweep_seeds);
    auto& ev = b.sections.emplace("eval", Section("eval")).first->second;
    ev.bind("seeds", c.eval_seeds);
    auto& pb = b.sections.emplace("periodic", Section("periodic")).first->second;
    pb.bind("period", c.period);
    return b;
}

}  // namespace

void CliConfig::validate() const {
    try {
        sim.validate();
        trainer.validate();
        if (episodes < 0) throw InvalidArgument("trainer.episodes must be non-negative");
        if (!(period > 0.0)) throw InvalidArgument("periodic.period must be positive");
        for (const auto& p : sweep_policies) parse_policy_kind(p);
        if (sweep_values.empty() || sweep_policies.empty() || sweep_seeds.empty()) {
            throw InvalidArgument("sweep needs values, policies and seeds");
        }
        if (eval_seeds.empty()) throw InvalidArgument("eval.seeds must not be empty");
        for (double v : sweep_values) apply_sweep_value(sim, sweep_parameter, v).validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

CliConfig config_from_json(const json& j) {
    CliConfig cfg;
    Binding b = bind_all(cfg);
    if (!j.is_object()) {
        throw ConfigError("config root must be an object");
    }
    for (const auto& [name, section] : j.items()) {
        auto it = b.sections.find(name);
        if (it == b.sections.end()) {
            throw ConfigError("unknown config section '" + name + "'");
        }
        it->second.read(section);
    }
    try {
        cfg.sweep_parameter = parse_sweep_parameter(b.sweep_parameter);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

json config_to_json(const CliConfig& cfg) {
    CliConfig copy = cfg;
    Binding b = bind_all(copy);
    json out = json::object();
    for (const auto& [name, section] : b.sections) {
        out[name] = section.write();
    }
    return out;
}

CliConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse config file '" + path.string() + "': " + e.what());
    }
    return config_from_json(j);
}

}  // namespace mecsim
