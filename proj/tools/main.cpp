#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include "cli.hpp"

int main(int argc, char** argv) {
    using namespace apollo::cli;
    CLI::App app{"Apollonian packings: generation, conformal counting, residual-set dimension and orbit sums"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> overrides;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const std::vector<std::pair<std::string, std::string>> commands{
        {"gen", "generate a packing store into the cache"},
        {"count", "N_t curves, curvature counts or band tables"},
        {"fit", "power-law fit of a count CSV"},
        {"dim", "dimension of the residual set from gap covers"},
        {"ca", "Apollonian constant from a count plateau"},
        {"orbit", "Poincare sums, Patterson atoms or norm-ball counts"},
        {"render", "SVG picture of a stored packing"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "flat key=value config file");
        sub->add_option("--set", overrides, "override key=value")->take_all();
        sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        Config cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        for (const auto& s : overrides) cfg.set(s);
        std::string command = app.get_subcommands().front()->get_name();
        for (const auto& f : run_command(command, cfg, workers)) std::cout << "wrote " << f << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
