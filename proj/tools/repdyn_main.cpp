#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "repdyn/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"repdyn: reputation-feedback delegation solver and simulator"};
    app.require_subcommand(1);

    repdyn::CliOptions opt;
    std::uint64_t seed_override = 0;
    bool seed_set = false;

    const std::vector<std::string> commands = {"solve",   "simulate",  "statics",
                                               "bonus",   "committee", "ctlimit",
                                               "measure", "verify"};
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "path to the JSON run config")
            ->required();
        sub->add_option("--out", opt.out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed_override, "seed override")
            ->each([&seed_set](const std::string&) { seed_set = true; });
        sub->add_option("--threads", opt.threads, "worker threads for simulation")
            ->check(CLI::PositiveNumber);
        sub->add_option("--format", opt.format, "artifact format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&opt, name]() { opt.command = name; });
    }

    CLI11_PARSE(app, argc, argv);
    if (seed_set) opt.seed = seed_override;
    return repdyn::run_cli(opt);
}
