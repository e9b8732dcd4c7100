#include "asrlab/engine.hpp"

#include <cmath>
#include <optional>

#include "asrlab/metrics.hpp"
#include "asrlab/rng.hpp"

namespace asrlab {

std::string Strategy::name() const {
    switch (kind) {
        case Kind::SourceOnly: return "source_only";
        case Kind::NoResetEm: return "no_reset_em";
        case Kind::FixedIntervalFullReset:
            return "fixed_interval_full_reset_T" + std::to_string(interval);
        case Kind::FixedProportionReset: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "fixed_proportion_reset_p%g", proportion);
            return buf;
        }
        case Kind::Asr: {
            std::string n = "asr";
            if (!flags.adaptive_when) n += "-adaptive_off";
            if (!flags.selective_where) n += "-selective_off";
            if (!flags.fisher_recovery) n += "-fisher_off";
            if (!flags.adjust_lambda) n += "-adjust_lambda_off";
            if (!flags.adjust_mu) n += "-adjust_mu_off";
            if (delay_epsilon > 0.0) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "-delay%g", delay_epsilon);
                n += buf;
            }
            return n;
        }
    }
    return "unknown";
}

TotalLoss total_loss(const Network& net, const Matrix& features, const ParamSet& bar_f,
                     const ParamSet& bar_theta, double lambda_f) {
    ForwardTrace trace;
    const Matrix logits = forward(net, features, &trace);
    const Matrix probs = softmax_rows(logits);
    TotalLoss out;
    out.value = entropy_loss(probs);
    out.gradient = backward(net, trace, entropy_loss_grad_logits(probs));
    const FisherPenalty pen = fisher_penalty(net, bar_f, bar_theta, lambda_f);
    out.value += pen.value;
    out.gradient.add(pen.gradient);
    return out;
}

RunRecord run(const Strategy& strategy, Stream& stream, Network net,
              const ParameterSnapshot& source, const RunConfig& config,
              RunObserver* observer) {
    net.validate();
    if (!source.congruent(net)) throw ShapeError("run: source snapshot shape mismatch");

    const bool is_asr = strategy.kind == Strategy::Kind::Asr;
    const bool adapts = strategy.kind != Strategy::Kind::SourceOnly;
    const bool fisher_on = is_asr && strategy.flags.fisher_recovery;
    const AsrParams& hp = config.hyper;

    Network source_net = net;
    {
        std::vector<std::size_t> all(net.depth());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        restore_layers(source_net, source, all);
    }

    ConcentrationTracker tracker(hp.alpha_0, net.class_count);
    std::optional<KnowledgeStore> store;
    if (fisher_on) store.emplace(net);

    // lambda_f enters the loss one step delayed: the adjuster runs after the
    // optimizer step, so step t uses the value computed at t-1.
    double lambda_f = 0.0;
    if (fisher_on && !strategy.flags.adjust_lambda) lambda_f = hp.lambda_f_fallback;
    double mu_c = hp.mu_c_fallback;

    RunRecord rec;
    rec.strategy_name = strategy.name();
    rec.seed = stream.config().seed;
    rec.rows.reserve(std::size_t(config.horizon));

    for (long t = 1; t <= config.horizon; ++t) {
        const Batch batch = stream.next_batch(config.batch_size);

        ForwardTrace trace;
        const Matrix logits = forward(net, batch.features, &trace);

        StepRow row;
        row.step = t;
        row.domain = batch.domain_tag();
        for (const DomainSpec& d : batch.domains)
            row.severity = std::max(row.severity, d.severity);
        row.accuracy = metrics::batch_accuracy(logits, metrics::labels_of(batch));
        for (int p : metrics::argmax_rows(logits)) row.predicted_mask |= 1ULL << p;

        // 1) adaptation
        if (adapts) {
            const Matrix probs = softmax_rows(logits);
            double loss = entropy_loss(probs);
            GradientSet grads = backward(net, trace, entropy_loss_grad_logits(probs));
            if (fisher_on) {
                const FisherPenalty pen =
                    fisher_penalty(net, store->bar_f(), store->bar_theta(), lambda_f);
                loss += pen.value;
                grads.add(pen.gradient);
            }
            if (!std::isfinite(loss) || !grads.all_finite()) {
                rec.aborted = true;
                rec.abort_step = t;
                row.c_t = prediction_concentration(logits, config.concentration_mode);
                row.bar_c = tracker.bar_c();
                row.lambda_f = lambda_f;
                row.mu_c = mu_c;
                rec.rows.push_back(std::move(row));
                break;
            }
            if (fisher_on) store->cma_accumulate(net, grads);
            sgd_step(net, grads, config.lr);
        }

        // 2) on-the-fly adjustment, from the pre-update logits z_t
        double phi = 0.0;
        if (is_asr) {
            const Matrix source_logits = forward(source_net, batch.features);
            phi = prediction_inconsistency(source_logits, logits);
            const auto [lf, mc] = reparameterize(phi, hp.lambda_0, hp.mu_0);
            if (fisher_on && strategy.flags.adjust_lambda) lambda_f = lf;
            if (strategy.flags.adjust_mu) mu_c = mc;
        }

        // 3) reset branch
        const double c_t = prediction_concentration(logits, config.concentration_mode);
        const double bar_c_before = tracker.bar_c();
        bool trigger = false;
        switch (strategy.kind) {
            case Strategy::Kind::SourceOnly:
            case Strategy::Kind::NoResetEm:
                break;
            case Strategy::Kind::FixedIntervalFullReset:
                trigger = t % strategy.interval == 0;
                break;
            case Strategy::Kind::FixedProportionReset:
                trigger = should_reset(c_t, bar_c_before, 0.0);
                break;
            case Strategy::Kind::Asr:
                trigger = strategy.flags.adaptive_when
                              ? should_reset(c_t, bar_c_before, strategy.delay_epsilon)
                              : t % strategy.interval == 0;
                break;
        }

        if (trigger) {
            double r_t = 1.0;
            if (strategy.kind == Strategy::Kind::FixedProportionReset) {
                r_t = strategy.proportion;
            } else if (is_asr && strategy.flags.selective_where) {
                // gap <= 0 can only happen with the fixed-interval trigger
                r_t = c_t > bar_c_before ? reset_proportion(c_t, bar_c_before, hp) : hp.r_0;
            }
            const std::vector<std::size_t> layers = select_reset_layers(net.depth(), r_t);
            restore_layers(net, source, layers);
            tracker.reinit();
            if (fisher_on) store->ema_aggregate_on_reset(hp.mu_f, hp.mu_theta);
            row.reset = true;
            row.r_t = r_t;
            row.layers_reset = long(layers.size());
        } else {
            tracker.update(c_t, mu_c);
        }

        row.c_t = c_t;
        row.bar_c = tracker.bar_c();
        row.phi_t = phi;
        row.lambda_f = lambda_f;
        row.mu_c = mu_c;
        rec.rows.push_back(std::move(row));

        if (observer) {
            RunObserver::StepView view{rec.rows.back(), net, logits, bar_c_before,
                                       fisher_on ? &*store : nullptr};
            observer->on_step(view);
        }
    }

    rec.finalize_summary();
    return rec;
}

double train_source(Network& net, const Matrix& prototypes, double cluster_sigma,
                    const SourceTrainConfig& config, std::uint64_t seed) {
    const std::size_t c_count = prototypes.rows();
    const std::size_t dim = prototypes.cols();
    std::mt19937_64 rng = substream(seed, "source_training");
    std::uniform_int_distribution<int> pick(0, int(c_count) - 1);
    std::normal_distribution<double> jitter(0.0, cluster_sigma);

    auto draw_batch = [&](std::size_t n, Matrix& x, std::vector<int>& y) {
        x = Matrix(n, dim);
        y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = pick(rng);
            for (std::size_t d = 0; d < dim; ++d)
                x(i, d) = prototypes(std::size_t(y[i]), d) + jitter(rng);
        }
    };

    Matrix x;
    std::vector<int> y;
    for (long step = 0; step < config.steps; ++step) {
        draw_batch(config.batch_size, x, y);
        ForwardTrace trace;
        const Matrix logits = forward(net, x, &trace);
        const Matrix probs = softmax_rows(logits);
        const GradientSet grads = backward(net, trace, cross_entropy_grad_logits(probs, y));
        sgd_step(net, grads, config.lr);
    }

    double acc = 0.0;
    const int eval_batches = 20;
    for (int b = 0; b < eval_batches; ++b) {
        draw_batch(config.batch_size, x, y);
        acc += metrics::batch_accuracy(forward(net, x), y);
    }
    return acc / eval_batches;
}

}  // namespace asrlab
