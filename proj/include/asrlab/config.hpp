#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asrlab/engine.hpp"
#include "asrlab/stream.hpp"

namespace asrlab {

struct ModelConfig {
    std::size_t hidden_layers = 2;       // dense stack depth = hidden_layers + 1
    std::size_t hidden_width = 32;
    SourceTrainConfig source;
};

struct ExperimentConfig {
    StreamConfig stream;  // per-run seed filled in from the seed list
    ModelConfig model;
    std::vector<Strategy> strategies;
    RunConfig run;        // hyper carries the defaults unless overridden
    std::vector<std::uint64_t> seeds = {1};
    std::string output_dir = "out";
    int workers = 1;
};

// Flat sectioned key-value text ([section] headers, key = value lines,
// '#' comments). Unknown keys are a ConfigError naming the key. A config
// may repeat the [strategy] section once per strategy to run.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Effective config with all defaults applied; re-parsing it yields an
// equivalent config.
std::string serialize_config(const ExperimentConfig& config);

// Stable hash of everything that shapes the stream and model, used to refuse
// cross-stream comparisons.
std::string stream_fingerprint(const ExperimentConfig& config);

}  // namespace asrlab
