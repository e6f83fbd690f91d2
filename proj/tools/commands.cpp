#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace mecsim::cli {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    return os;
}

void prepare(const Options& opt, const CliConfig& cfg) {
    std::filesystem::create_directories(opt.out);
    auto os = open_output(opt.out / "resolved_config.json");
    os << config_to_json(cfg).dump(2) << '\n';
}

PolicySpec policy_spec(const std::string& name, const CliConfig& cfg, const Options& opt) {
    PolicySpec spec;
    spec.kind = parse_policy_kind(name);
    spec.period = cfg.period;
    if (spec.kind == PolicyKind::Drl) {
        if (!opt.checkpoint) throw InvalidArgument("policy drl needs --checkpoint");
        spec.model = load_checkpoint(*opt.checkpoint, cfg.sim.M).model;
    }
    return spec;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CliConfig resolve_config(const Options& opt) {
    CliConfig cfg = opt.config ? load_config(*opt.config) : CliConfig{};
    if (opt.seed) cfg.sim.seed = *opt.seed;
    if (opt.jobs < 1) throw InvalidArgument("--jobs must be at least 1");
    cfg.validate();
    return cfg;
}

int cmd_train(const Options& opt, std::ostream& log) {
    const CliConfig cfg = resolve_config(opt);
    prepare(opt, cfg);
    const TrainResult res = train(cfg.sim, cfg.trainer, cfg.episodes, cfg.sim.seed);
    const auto ckpt = opt.out / "model.ckpt";
    save_checkpoint(ckpt, res.model,
                    {{"seed", std::to_string(cfg.sim.seed)},
                     {"episodes", std::to_string(res.log.size())},
                     {"transitions", std::to_string(res.transitions)},
                     {"gradient_steps", std::to_string(res.gradient_steps)},
                     {"reward_scale", fmt(res.reward_scale)},
                     {"discount", fmt(cfg.trainer.discount)},
                     {"learning_rate", fmt(cfg.trainer.learning_rate)}});
    auto os = open_output(opt.out / "training_log.csv");
    write_training_log(os, res.log);
    log << "trained " << res.log.size() << " episodes, " << res.transitions << " transitions, "
        << res.gradient_steps << " gradient steps\n"
        << "checkpoint: " << ckpt.string() << '\n';
    return kExitOk;
}

int cmd_eval(const Options& opt, std::ostream& log) {
    const CliConfig cfg = resolve_config(opt);
    SweepSpec spec;
    spec.parameter = SweepParameter::QueueM;
    spec.values = {static_cast<double>(cfg.sim.M)};
    spec.policies = {policy_spec(opt.policy, cfg, opt)};
    spec.seeds = cfg.eval_seeds;
    spec.base = cfg.sim;
    prepare(opt, cfg);
    const auto rows = run_sweep(spec, opt.jobs);
    const auto summary = summarize(rows);
    auto os = open_output(opt.out / ("eval_" + opt.policy + ".csv"));
    write_sweep_csv(os, rows);
    auto ss = open_output(opt.out / ("eval_" + opt.policy + "_summary.csv"));
    write_summary_csv(ss, summary);
    const auto& m = summary.front().mean;
    log << opt.policy << " over " << rows.size() << " seeds: avg_objective " << m.avg_objective
        << ", avg_energy " << m.avg_energy << " J, avg_delay " << m.avg_delay << " s, miss ratio "
        << m.deadline_miss_ratio << '\n';
    return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& log) {
    const CliConfig cfg = resolve_config(opt);
    SweepSpec spec;
    spec.parameter = cfg.sweep_parameter;
    spec.values = cfg.sweep_values;
    for (const auto& name : cfg.sweep_policies) spec.policies.push_back(policy_spec(name, cfg, opt));
    spec.seeds = cfg.sweep_seeds;
    spec.base = cfg.sim;
    spec.validate();
    prepare(opt, cfg);
    const auto rows = run_sweep(spec, opt.jobs);
    auto os = open_output(opt.out / "sweep.csv");
    write_sweep_csv(os, rows);
    auto ss = open_output(opt.out / "sweep_summary.csv");
    write_summary_csv(ss, summarize(rows));
    log << rows.size() << " runs written to " << (opt.out / "sweep.csv").string() << '\n';
    return kExitOk;
}

int cmd_verify(const Options& opt, std::ostream& log) {
    const auto results = verify::run_all(opt.scale, opt.seed.value_or(1));
    bool ok = true;
    for (const auto& r : results) {
        log << verify::format_result(r) << '\n';
        ok = ok && r.passed;
    }
    log << (ok ? "all suites passed" : "verification FAILED") << '\n';
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_trace(const Options& opt, std::ostream& log) {
    const CliConfig cfg = resolve_config(opt);
    const PolicySpec spec = policy_spec(opt.policy, cfg, opt);
    prepare(opt, cfg);
    auto policy = make_policy(spec, cfg.sim.seed);
    RunOptions ro;
    ro.record_trace = true;
    const SimResult res = run(cfg.sim, *policy, ro);
    auto os = open_output(opt.out / "trace.jsonl");
    write_trace(os, res.trace);
    log << res.trace.size() << " events, " << res.stats.generated << " tasks ("
        << res.stats.offloaded << " offloaded, " << res.stats.local << " local, "
        << res.stats.rejected << " rejected)\n";
    return kExitOk;
}

}  // namespace mecsim::cli
