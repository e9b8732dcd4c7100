#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "asrlab/matrix.hpp"

namespace asrlab {

class Batch;
namespace metrics {
// Sole gateway to stream labels. Adaptation code receives Batch but can only
// reach features; labels flow exclusively through the metrics namespace.
const std::vector<int>& labels_of(const Batch& b);
}  // namespace metrics

enum class CorruptionKind { Rotation, AdditiveNoise, FeatureScale, FeatureShuffle };

const char* corruption_name(CorruptionKind k);
CorruptionKind corruption_from_name(const std::string& name);

struct DomainSpec {
    CorruptionKind kind;
    double severity;  // in [0, 5]; 0 is the identity transform
};

enum class ScheduleMode { Smooth, Recurring, Dynamic };

struct Schedule {
    ScheduleMode mode = ScheduleMode::Recurring;
    std::vector<CorruptionKind> domains;
    double severity_max = 5.0;
    // smooth: batches per severity sub-step; a full crossfade spans
    // transition_speed * smooth_substeps batches
    long transition_speed = 50;
    int smooth_substeps = 10;
    // recurring: fixed per-domain duration, sequence repeated revisit_count times
    long recurring_duration = 100;
    int revisit_count = 20;
    // dynamic: per-visit duration drawn from this set
    std::vector<long> duration_set = {100, 200, 500};
};

enum class LabelMode { IidUniform, Dirichlet };

struct StreamConfig {
    Schedule schedule;
    std::size_t class_count = 10;
    std::size_t dim = 16;
    double spread = 1.0;
    double cluster_sigma = 0.5;   // within-class feature noise
    double noise_unit = 0.35;      // additive-noise sigma per severity unit
    LabelMode label_mode = LabelMode::IidUniform;
    double dirichlet_delta = 0.1;
    long dirichlet_block = 50;    // batches between weight redraws
    std::uint64_t seed = 0;
};

class Batch {
public:
    Matrix features;
    std::vector<DomainSpec> domains;  // active corruption(s) with severities
    long step = 0;

    Batch(Matrix f, std::vector<DomainSpec> d, long s, std::vector<int> labels)
        : features(std::move(f)), domains(std::move(d)), step(s), labels_(std::move(labels)) {}

    std::string domain_tag() const;

private:
    std::vector<int> labels_;
    friend const std::vector<int>& metrics::labels_of(const Batch& b);
};

// C class means with pairwise distance > 2*spread, rejection-resampled.
Matrix make_prototypes(std::uint64_t seed, std::size_t class_count, std::size_t dim,
                       double spread);

// Deterministic kinds ignore the rng; additive noise draws from it.
Matrix corrupt(const Matrix& features, const DomainSpec& spec, std::mt19937_64& rng,
               double noise_unit = 0.35);

// One Dirichlet(delta) draw over classes; smaller delta gives more skew.
std::vector<double> dirichlet_label_weights(double delta, std::size_t class_count,
                                            std::mt19937_64& rng);

class Stream {
public:
    explicit Stream(StreamConfig config);

    Batch next_batch(std::size_t batch_size);
    // Active corruption(s) the schedule prescribes at a given step.
    std::vector<DomainSpec> domains_at(long step) const;

    long step() const { return step_; }
    const Matrix& prototypes() const { return prototypes_; }
    const StreamConfig& config() const { return config_; }

private:
    void refresh_label_weights();

    StreamConfig config_;
    Matrix prototypes_;
    long step_ = 0;
    std::mt19937_64 label_rng_, feature_rng_, noise_rng_, schedule_rng_;
    std::vector<double> label_weights_;
    // dynamic mode bookkeeping
    mutable std::vector<long> dynamic_boundaries_;  // cumulative visit end steps
    mutable std::vector<std::size_t> dynamic_domains_;
    void extend_dynamic_plan(long step) const;
    mutable std::mt19937_64 dynamic_rng_;
};

}  // namespace asrlab
