#include "asrlab/stream.hpp"

#include <algorithm>
#include <cmath>

#include "asrlab/rng.hpp"

namespace asrlab {

const char* corruption_name(CorruptionKind k) {
    switch (k) {
        case CorruptionKind::Rotation: return "rotation";
        case CorruptionKind::AdditiveNoise: return "additive_noise";
        case CorruptionKind::FeatureScale: return "feature_scale";
        case CorruptionKind::FeatureShuffle: return "feature_shuffle";
    }
    throw ConfigError("corruption_name: unknown kind");
}

CorruptionKind corruption_from_name(const std::string& name) {
    if (name == "rotation") return CorruptionKind::Rotation;
    if (name == "additive_noise") return CorruptionKind::AdditiveNoise;
    if (name == "feature_scale") return CorruptionKind::FeatureScale;
    if (name == "feature_shuffle") return CorruptionKind::FeatureShuffle;
    throw ConfigError("unknown corruption kind: " + name);
}

std::string Batch::domain_tag() const {
    std::string tag;
    for (const DomainSpec& d : domains) {
        if (!tag.empty()) tag += '+';
        tag += corruption_name(d.kind);
    }
    return tag;
}

Matrix make_prototypes(std::uint64_t seed, std::size_t class_count, std::size_t dim,
                       double spread) {
    if (class_count < 2 || dim < 2) throw ConfigError("make_prototypes: need C >= 2, dim >= 2");
    std::mt19937_64 rng(splitmix64(seed ^ hash_name("prototypes")));
    std::normal_distribution<double> draw(0.0, 2.0 * spread);
    Matrix means(class_count, dim);
    const double min_dist2 = 4.0 * spread * spread;
    int budget = 10000;
    for (std::size_t c = 0; c < class_count;) {
        if (--budget < 0) throw ConfigError("make_prototypes: resampling budget exhausted");
        for (std::size_t d = 0; d < dim; ++d) means(c, d) = draw(rng);
        bool ok = true;
        for (std::size_t o = 0; o < c && ok; ++o) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = means(c, d) - means(o, d);
                d2 += diff * diff;
            }
            ok = d2 > min_dist2;
        }
        if (ok) ++c;
    }
    return means;
}

Matrix corrupt(const Matrix& features, const DomainSpec& spec, std::mt19937_64& rng,
               double noise_unit) {
    if (spec.severity < 0.0 || spec.severity > 5.0)
        throw ConfigError("corrupt: severity outside [0, 5]");
    Matrix out = features;
    if (spec.severity == 0.0) return out;
    const double s = spec.severity;
    switch (spec.kind) {
        case CorruptionKind::Rotation: {
            // rotate disjoint coordinate pairs; the first pair gets the full
            // angle (severity 5 maps to pi) and later pairs half the previous
            double angle = M_PI * s / 5.0;
            for (std::size_t c = 0; c + 1 < out.cols(); c += 2) {
                const double ca = std::cos(angle), sa = std::sin(angle);
                for (std::size_t r = 0; r < out.rows(); ++r) {
                    double* row = out.row(r);
                    const double x = row[c], y = row[c + 1];
                    row[c] = ca * x - sa * y;
                    row[c + 1] = sa * x + ca * y;
                }
                angle *= 0.5;
            }
            break;
        }
        case CorruptionKind::AdditiveNoise: {
            std::normal_distribution<double> noise(0.0, noise_unit * s);
            for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += noise(rng);
            break;
        }
        case CorruptionKind::FeatureScale: {
            // anisotropic: stretch even coordinates, squeeze odd ones
            const double factor = 1.0 + s;
            for (std::size_t r = 0; r < out.rows(); ++r) {
                double* row = out.row(r);
                for (std::size_t c = 0; c < out.cols(); ++c)
                    row[c] *= (c % 2 == 0) ? factor : 1.0 / factor;
            }
            break;
        }
        case CorruptionKind::FeatureShuffle: {
            // cyclic shift of the first k coordinates, k growing with severity
            const std::size_t k =
                std::size_t(std::floor(double(out.cols()) * s / 10.0 + 0.5));
            if (k >= 2) {
                for (std::size_t r = 0; r < out.rows(); ++r) {
                    double* row = out.row(r);
                    const double last = row[k - 1];
                    for (std::size_t i = k - 1; i > 0; --i) row[i] = row[i - 1];
                    row[0] = last;
                }
            }
            break;
        }
    }
    return out;
}

Stream::Stream(StreamConfig config)
    : config_(std::move(config)),
      prototypes_(make_prototypes(config_.seed, config_.class_count, config_.dim,
                                  config_.spread)),
      label_rng_(substream(config_.seed, "labels")),
      feature_rng_(substream(config_.seed, "features")),
      noise_rng_(substream(config_.seed, "corruption_noise")),
      schedule_rng_(substream(config_.seed, "schedule")),
      dynamic_rng_(substream(config_.seed, "dynamic_durations")) {
    if (config_.schedule.domains.empty())
        throw ConfigError("Stream: schedule has no domains");
    refresh_label_weights();
}

std::vector<double> dirichlet_label_weights(double delta, std::size_t class_count,
                                            std::mt19937_64& rng) {
    if (delta <= 0.0) throw ConfigError("dirichlet_label_weights: delta must be positive");
    std::gamma_distribution<double> gamma(delta, 1.0);
    std::vector<double> weights(class_count);
    double total = 0.0;
    for (double& w : weights) {
        w = gamma(rng);
        total += w;
    }
    if (total <= 0.0)  // all-zero draws are possible for tiny delta
        return std::vector<double>(class_count, 1.0 / double(class_count));
    for (double& w : weights) w /= total;
    return weights;
}

void Stream::refresh_label_weights() {
    if (config_.label_mode == LabelMode::Dirichlet)
        label_weights_ =
            dirichlet_label_weights(config_.dirichlet_delta, config_.class_count, label_rng_);
    else
        label_weights_.assign(config_.class_count, 1.0 / double(config_.class_count));
}

void Stream::extend_dynamic_plan(long step) const {
    while (dynamic_boundaries_.empty() || dynamic_boundaries_.back() <= step) {
        const auto& set = config_.schedule.duration_set;
        std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
        const long duration = set[pick(dynamic_rng_)];
        const long prev = dynamic_boundaries_.empty() ? 0 : dynamic_boundaries_.back();
        dynamic_boundaries_.push_back(prev + duration);
        dynamic_domains_.push_back(dynamic_domains_.size() % config_.schedule.domains.size());
    }
}

std::vector<DomainSpec> Stream::domains_at(long step) const {
    const Schedule& sch = config_.schedule;
    const std::size_t d_count = sch.domains.size();
    switch (sch.mode) {
        case ScheduleMode::Smooth: {
            const long n = sch.smooth_substeps;
            const long phase_len = sch.transition_speed * n;
            const long phase = step / phase_len;
            const long j = (step % phase_len) / sch.transition_speed;
            const double frac = double(j) / double(n);
            // phase 0 ramps the first domain in from clean data; afterwards
            // each phase crossfades the previous domain out and the next in
            DomainSpec emerging{sch.domains[std::size_t(phase) % d_count],
                                sch.severity_max * frac};
            if (phase == 0) return {emerging};
            DomainSpec fading{sch.domains[std::size_t(phase - 1) % d_count],
                              sch.severity_max * (1.0 - frac)};
            return {fading, emerging};
        }
        case ScheduleMode::Recurring: {
            const long idx = step / sch.recurring_duration;
            return {{sch.domains[std::size_t(idx) % d_count], sch.severity_max}};
        }
        case ScheduleMode::Dynamic: {
            extend_dynamic_plan(step);
            const auto it = std::upper_bound(dynamic_boundaries_.begin(),
                                             dynamic_boundaries_.end(), step);
            const std::size_t visit = std::size_t(it - dynamic_boundaries_.begin());
            return {{sch.domains[dynamic_domains_[visit]], sch.severity_max}};
        }
    }
    throw ConfigError("domains_at: unknown schedule mode");
}

Batch Stream::next_batch(std::size_t batch_size) {
    if (batch_size < 1) throw ConfigError("next_batch: batch_size must be >= 1");
    if (config_.label_mode == LabelMode::Dirichlet && step_ > 0 &&
        step_ % config_.dirichlet_block == 0)
        refresh_label_weights();

    const std::size_t c_count = config_.class_count;
    std::vector<int> labels(batch_size);
    std::discrete_distribution<int> pick_label(label_weights_.begin(), label_weights_.end());
    for (std::size_t i = 0; i < batch_size; ++i) labels[i] = pick_label(label_rng_);

    Matrix features(batch_size, config_.dim);
    std::normal_distribution<double> jitter(0.0, config_.cluster_sigma);
    for (std::size_t i = 0; i < batch_size; ++i)
        for (std::size_t d = 0; d < config_.dim; ++d)
            features(i, d) = prototypes_(std::size_t(labels[i]), d) + jitter(feature_rng_);

    // fading corruption applied first, then emerging (smooth mode order)
    std::vector<DomainSpec> active = domains_at(step_);
    for (const DomainSpec& spec : active)
        if (spec.severity > 0.0)
            features = corrupt(features, spec, noise_rng_, config_.noise_unit);

    Batch b(std::move(features), std::move(active), step_, std::move(labels));
    ++step_;
    return b;
}

}  // namespace asrlab
