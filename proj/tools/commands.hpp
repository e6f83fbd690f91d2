#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mecsim/config.hpp"
#include "mecsim/verify/suites.hpp"

namespace mecsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitVerifyFailed = 2;

struct Options {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out = "out";
    std::string policy = "greedy";
    std::optional<std::filesystem::path> checkpoint;
    int jobs = 1;
    verify::Scale scale = verify::Scale::Full;
};

// Config file (or defaults) with command-line overrides applied and validated.
CliConfig resolve_config(const Options& opt);

// Each writes resolved_config.json plus its own outputs into opt.out and
// returns the process exit code. Errors propagate as exceptions.
int cmd_train(const Options& opt, std::ostream& log);
int cmd_eval(const Options& opt, std::ostream& log);
int cmd_sweep(const Options& opt, std::ostream& log);
int cmd_verify(const Options& opt, std::ostream& log);
int cmd_trace(const Options& opt, std::ostream& log);

}  // namespace mecsim::cli
