#pragma once

#include <string>

#include "asrlab/controller.hpp"
#include "asrlab/record.hpp"
#include "asrlab/stream.hpp"

namespace asrlab {

struct AsrFlags {
    bool adaptive_when = true;    // off: fixed-interval trigger instead
    bool selective_where = true;  // off: full reset (r_t = 1)
    bool fisher_recovery = true;  // off: no penalty, no CMA/EMA stores
    bool adjust_lambda = true;    // off: lambda_f fixed at the fallback
    bool adjust_mu = true;        // off: mu_c fixed at the fallback
};

struct Strategy {
    enum class Kind {
        SourceOnly,
        NoResetEm,
        FixedIntervalFullReset,
        FixedProportionReset,
        Asr,
    };
    Kind kind = Kind::Asr;
    long interval = 200;          // FixedIntervalFullReset period, and the
                                  // Asr trigger period when adaptive_when is off
    double proportion = 0.5;      // FixedProportionReset scope
    AsrFlags flags;
    double delay_epsilon = 0.0;   // Asr delayed-trigger variant

    std::string name() const;
};

struct RunConfig {
    AsrParams hyper;
    ConcentrationMode concentration_mode = ConcentrationMode::SoftmaxOfMean;
    double lr = 0.05;
    std::size_t batch_size = 32;
    long horizon = 1000;
};

// Test seam: observes each step after it completes, with full access to the
// live model and controller state.
struct RunObserver {
    struct StepView {
        const StepRow& row;
        const Network& net;
        const Matrix& logits;           // pre-update logits z_t
        double bar_c_before = 0.0;      // bar C entering the step
        const KnowledgeStore* store;    // null when Fisher bookkeeping is off
    };
    virtual ~RunObserver() = default;
    virtual void on_step(const StepView& view) = 0;
};

// One adaptation run following the reference step ordering:
//   1) forward with theta_{t-1}, total loss, CMA accumulate, optimizer step;
//   2) phi_t from the pre-update logits vs the source model, reparameterize;
//   3) C_t from the pre-update logits, then either update bar C or fire a
//      selective reset (restore layers, reinit bar C, EMA aggregate).
RunRecord run(const Strategy& strategy, Stream& stream, Network net,
              const ParameterSnapshot& source, const RunConfig& config,
              RunObserver* observer = nullptr);

// Entropy loss plus the Fisher penalty, with the exact summed gradient.
struct TotalLoss {
    double value = 0.0;
    GradientSet gradient;
};
TotalLoss total_loss(const Network& net, const Matrix& features, const ParamSet& bar_f,
                     const ParamSet& bar_theta, double lambda_f);

// Clean-data source training (cross-entropy, plain SGD); returns final
// clean-batch accuracy. Deterministic for a given seed.
struct SourceTrainConfig {
    long steps = 2000;
    std::size_t batch_size = 64;
    double lr = 0.1;
};
double train_source(Network& net, const Matrix& prototypes, double cluster_sigma,
                    const SourceTrainConfig& config, std::uint64_t seed);

}  // namespace asrlab
