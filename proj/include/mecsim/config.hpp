#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mecsim/dqn.hpp"
#include "mecsim/metrics.hpp"

namespace mecsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Everything one CLI invocation needs. Sections mirror the module configs:
// sim, cost, channel, trainer, sweep, eval.
struct CliConfig {
    SimConfig sim;
    TrainerConfig trainer;
    int episodes = 50;
    double period = 1.0;  // PeriodicBatch period, s

    SweepParameter sweep_parameter = SweepParameter::TaskSize;
    std::vector<double> sweep_values{120, 180, 240, 300};
    std::vector<std::string> sweep_policies{"greedy", "local", "periodic", "random"};
    std::vector<std::uint64_t> sweep_seeds{1, 2, 3};

    std::vector<std::uint64_t> eval_seeds{101, 102, 103, 104, 105, 106, 107, 108, 109, 110};

    void validate() const;
};

// Overlays `j` on the defaults. Unknown sections or keys are errors.
CliConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const CliConfig& cfg);

// Throws ConfigError naming the path if it cannot be read or parsed.
CliConfig load_config(const std::filesystem::path& path);

}  // namespace mecsim
