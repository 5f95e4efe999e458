#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shiftest/commands.hpp"

namespace {

void add_common(CLI::App* cmd, shiftest::RunConfig& cfg) {
    cmd->add_option("--output-dir", cfg.output_dir, "Directory for result files");
    cmd->add_option("--period", cfg.period, "Period T in time units")->check(CLI::PositiveNumber);
    cmd->add_option("--weights", cfg.weights, "power:<beta> | unit | file:<path>");
    cmd->add_option("--confidence", cfg.confidence, "Confidence level in (0, 1)");
    cmd->add_option("--max-iters", cfg.max_iterations, "Optimizer iteration limit");
    cmd->add_option("--grad-tol", cfg.gradient_tolerance, "Gradient max-norm tolerance");
    cmd->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
}

void add_simulation(CLI::App* cmd, shiftest::RunConfig& cfg) {
    cmd->add_option("--seed", cfg.seed, "Random seed");
    cmd->add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
    cmd->add_option("--sigma", cfg.sigma, "Noise standard deviation");
    cmd->add_option("--pattern", cfg.pattern, "sinc15 | cosine | file:<path>");
    cmd->add_option("--curves", cfg.curves, "Number of curves J");
    cmd->add_option("--samples", cfg.samples, "Samples per curve n (odd)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shift estimation among noisy translated copies of a periodic pattern"};
    app.require_subcommand(1);
    shiftest::RunConfig cfg;

    auto* estimate = app.add_subcommand("estimate", "Estimate shifts of curves in a CSV file");
    estimate->add_option("--input", cfg.input, "Curve CSV")->required();
    estimate->add_flag("--truncate-even", cfg.truncate_even, "Drop the last sample when n is even");
    add_common(estimate, cfg);

    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo study");
    add_common(simulate, cfg);
    add_simulation(simulate, cfg);

    auto* compare = app.add_subcommand("compare-landmark",
                                       "Compare with landmark (maximum) alignment");
    compare->add_option("--input", cfg.input, "Curve CSV; simulated data when omitted");
    compare->add_flag("--truncate-even", cfg.truncate_even, "Drop the last sample when n is even");
    add_common(compare, cfg);
    add_simulation(compare, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    return shiftest::run_command(name, cfg, std::cerr);
}
