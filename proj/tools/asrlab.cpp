#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asrlab/errors.hpp"
#include "asrlab/experiment.hpp"
#include "asrlab/kernels.hpp"

namespace {

// exit codes: 0 ok, 2 config/parse, 3 I/O, 4 numeric, 1 other
int categorize(const std::exception& e) {
    if (dynamic_cast<const asrlab::ConfigError*>(&e)) return 2;
    if (dynamic_cast<const asrlab::IoError*>(&e)) return 3;
    if (dynamic_cast<const asrlab::NumericError*>(&e) ||
        dynamic_cast<const asrlab::ShapeError*>(&e))
        return 4;
    return 1;
}

std::string apply_output_root(const std::string& dir) {
    const char* root = std::getenv("ASRLAB_OUTPUT_ROOT");
    if (root == nullptr || *root == '\0') return dir;
    return (std::filesystem::path(root) / dir).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"asrlab: long-term test-time adaptation lab with adaptive/selective reset"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* cmd_run = app.add_subcommand("run", "execute a strategy x seed experiment matrix");
    cmd_run->add_option("config", config_path, "experiment config file")->required();

    std::vector<std::string> record_files;
    CLI::App* cmd_compare =
        app.add_subcommand("compare", "rank record CSVs from one stream config");
    cmd_compare->add_option("files", record_files, "record CSV files")->required();

    std::vector<std::string> plot_files;
    std::string quantity = "accuracy";
    std::string plot_out = ".";
    CLI::App* cmd_plot = app.add_subcommand("plot", "render SVG line charts with reset markers");
    cmd_plot->add_option("files", plot_files, "record CSV files")->required();
    cmd_plot->add_option("--quantity", quantity, "column to plot");
    cmd_plot->add_option("--output-dir", plot_out, "directory for the SVG");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            asrlab::ExperimentConfig config = asrlab::parse_config_file(config_path);
            config.output_dir = apply_output_root(config.output_dir);
            const asrlab::ExperimentResult result = asrlab::run_experiment(config);
            std::cout << "kernels: " << asrlab::kernels::active_backend() << "\n";
            for (const auto& entry : result.entries)
                std::cout << "wrote " << entry.csv_path << "\n";
            std::cout << "wrote " << result.summary_path << "\n";
            for (const auto& s : result.summaries)
                std::cout << s.strategy << ": mean_acc=" << asrlab::format_real(s.mean_accuracy)
                          << " resets=" << asrlab::format_real(s.mean_reset_count)
                          << (s.collapsed ? " [collapsed]" : "") << "\n";
        } else if (cmd_compare->parsed()) {
            std::cout << asrlab::compare_records(record_files);
        } else if (cmd_plot->parsed()) {
            const std::string path =
                asrlab::plot_records(plot_files, quantity, apply_output_root(plot_out));
            std::cout << "wrote " << path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return categorize(e);
    }
    return 0;
}
