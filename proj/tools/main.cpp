#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kfield/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"geodesic k-field toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out";
    bool overwrite = false;
    unsigned long long seed = 1;

    CLI::App* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--overwrite", overwrite, "overwrite existing artifacts");
    run->add_option("--seed", seed, "random seed for sampled checks");

    CLI11_PARSE(app, argc, argv);

    try {
        kfield::Scenario sc = kfield::Scenario::load(scenario_path);
        kfield::Report rep = kfield::run_scenario(sc, out_dir, overwrite, static_cast<unsigned>(seed));
        std::cout << rep.body();
        return rep.ok() ? 0 : 1;
    } catch (const kfield::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    } catch (const kfield::ParseError& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
