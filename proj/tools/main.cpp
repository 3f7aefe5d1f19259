#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "bvarfsv/errors.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace bvarfsv;
    using namespace bvarfsv::cli;

    CLI::App app{"Bayesian vector autoregressions with factor stochastic volatility"};
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("-c,--config", common.config_path, "JSON configuration file");
    app.add_option("-o,--out", common.out_dir, "output directory (default: out)");
    auto* seed_opt = app.add_option("--seed", common.seed, "master seed, overrides the config");
    app.add_option("--threads", common.threads, "linear algebra thread count");

    SimulateOverrides ov;
    auto* sim = app.add_subcommand("simulate", "coefficient recovery study on synthetic panels");
    sim->add_option("--scenario", ov.scenario, "sparse, intermediate, dense, or all");
    sim->add_option("--m", ov.m, "cross-section size");
    sim->add_option("--T", ov.T, "sample length");
    sim->add_option("--reps", ov.reps, "replicate count");
    sim->add_option("--estimators", ov.estimators, "comma-separated estimator tags");

    auto* fit = app.add_subcommand("fit", "estimate the model on a CSV panel");
    auto* fore = app.add_subcommand("forecast", "expanding-window density evaluation");
    auto* bench = app.add_subcommand("bench", "coefficient sampler scaling measurements");
    for (auto* sub : {sim, fit, fore, bench}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    common.seed_given = seed_opt->count() > 0;
    if (common.threads > 0) Eigen::setNbThreads(common.threads);

    try {
        if (sim->parsed()) return cmd_simulate(common, ov);
        if (fit->parsed()) return cmd_fit(common);
        if (fore->parsed()) return cmd_forecast(common);
        if (bench->parsed()) return cmd_bench(common);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
