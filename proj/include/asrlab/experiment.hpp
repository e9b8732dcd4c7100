#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "asrlab/config.hpp"
#include "asrlab/record.hpp"

namespace asrlab {

struct StrategySummary {
    std::string strategy;
    double mean_accuracy = 0.0;  // mean over seeds of per-run means
    double std_accuracy = 0.0;
    double mean_reset_count = 0.0;
    double mean_final_window_accuracy = 0.0;
    double source_mean_accuracy = 0.0;
    bool collapsed = false;
};

struct ExperimentResult {
    struct Entry {
        std::string strategy;
        std::uint64_t seed = 0;
        std::string csv_path;
        RunRecord record;
    };
    std::vector<Entry> entries;
    std::vector<StrategySummary> summaries;
    std::string summary_path;
};

// Executes the strategy x seed matrix (up to config.workers concurrently),
// writes one CSV per run plus summary.csv under config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Ranked comparison of record CSVs sharing one stream fingerprint.
// Throws ConfigError when fingerprints differ.
std::string compare_records(const std::vector<std::string>& csv_paths);

// One SVG per quantity, overlaying all records; dashed vertical markers at
// reset steps. Returns the output path. Output bytes are deterministic.
std::string plot_records(const std::vector<std::string>& csv_paths,
                         const std::string& quantity, const std::string& output_dir);

}  // namespace asrlab
