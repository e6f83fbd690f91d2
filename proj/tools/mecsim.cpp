#include <cstdlib>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace mecsim;

int main(int argc, char** argv) {
    CLI::App app{"Mobility-aware task offloading simulator for robot swarms"};
    app.require_subcommand(1);
    app.fallthrough();

    cli::Options opt;
    if (const char* env = std::getenv("MECSIM_OUT")) opt.out = env;
    std::string config;
    std::uint64_t seed = 0;
    std::string checkpoint;
    std::string out;
    app.add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Run seed (simulation and training)");
    app.add_option("--out", out, "Output directory (default $MECSIM_OUT or ./out)");
    app.add_option("--policy", opt.policy, "Policy for eval and trace")
        ->check(CLI::IsMember({"drl", "greedy", "local", "fifo", "periodic", "random"}));
    app.add_option("--checkpoint", checkpoint, "Trained model for the drl policy");
    app.add_option("--jobs", opt.jobs, "Worker threads for eval and sweep")->check(CLI::PositiveNumber);
    app.add_option("--scale", opt.scale, "Verification scale")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, verify::Scale>{{"quick", verify::Scale::Quick},
                                                 {"full", verify::Scale::Full}}));

    using Command = int (*)(const cli::Options&, std::ostream&);
    const std::pair<const char*, Command> commands[] = {
        {"train", cli::cmd_train},
        {"eval", cli::cmd_eval},
        {"sweep", cli::cmd_sweep},
        {"verify", cli::cmd_verify},
        {"trace", cli::cmd_trace},
    };
    const char* help[] = {"Train a DQN agent and write a checkpoint",
                          "Evaluate one policy on the held-out seeds",
                          "Run a parameter sweep over policies and seeds",
                          "Run the oracle verification suites",
                          "Dump the event trace of one seeded run"};
    for (std::size_t i = 0; i < std::size(commands); ++i) app.add_subcommand(commands[i].first, help[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitInvalid;
    }
    if (!config.empty()) opt.config = config;
    if (app.count("--seed") > 0) opt.seed = seed;
    if (!checkpoint.empty()) opt.checkpoint = checkpoint;
    if (!out.empty()) opt.out = out;

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        for (const auto& [cmd, fn] : commands) {
            if (name == cmd) return fn(opt, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitInvalid;
    }
    return cli::kExitInvalid;
}
