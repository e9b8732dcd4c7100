#include "asrlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "asrlab/errors.hpp"

namespace asrlab {

namespace metrics {
const std::vector<int>& labels_of(const Batch& b) { return b.labels_; }
}  // namespace metrics

namespace metrics {

std::vector<int> argmax_rows(const Matrix& logits) {
    std::vector<int> out(logits.rows());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const double* row = logits.row(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < logits.cols(); ++c)
            if (row[c] > row[best]) best = c;
        out[r] = int(best);
    }
    return out;
}

double batch_accuracy(const Matrix& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows()) throw ShapeError("batch_accuracy: length mismatch");
    const std::vector<int> preds = argmax_rows(logits);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (preds[i] == labels[i]) ++correct;
    return double(correct) / double(labels.size());
}

double class_coverage(const std::vector<int>& predictions, std::size_t class_count) {
    if (predictions.empty()) throw ShapeError("class_coverage: empty window");
    std::set<int> distinct(predictions.begin(), predictions.end());
    return double(distinct.size()) / double(class_count);
}

double window_coverage(const RunRecord& record, std::size_t first, std::size_t last,
                       std::size_t class_count) {
    std::uint64_t mask = 0;
    for (std::size_t i = first; i < last && i < record.rows.size(); ++i)
        mask |= record.rows[i].predicted_mask;
    int bits = 0;
    for (; mask != 0; mask &= mask - 1) ++bits;
    return double(bits) / double(class_count);
}

bool collapse_flag(double method_mean_accuracy, double source_mean_accuracy) {
    return method_mean_accuracy < source_mean_accuracy;
}

std::vector<ResetEventStats> reset_drop_and_delay(const RunRecord& record) {
    constexpr std::size_t kWindow = 10;
    std::vector<std::size_t> reset_idx;
    for (std::size_t i = 0; i < record.rows.size(); ++i)
        if (record.rows[i].reset) reset_idx.push_back(i);

    std::vector<ResetEventStats> out;
    for (std::size_t k = 0; k < reset_idx.size(); ++k) {
        const std::size_t i = reset_idx[k];
        if (i < kWindow || i + kWindow >= record.rows.size()) continue;
        ResetEventStats ev;
        ev.reset_step = record.rows[i].step;
        double pre = 0.0, post = 0.0, pre_max = 0.0;
        for (std::size_t j = i - kWindow; j < i; ++j) {
            pre += record.rows[j].accuracy;
            pre_max = std::max(pre_max, record.rows[j].accuracy);
        }
        for (std::size_t j = i + 1; j <= i + kWindow; ++j) post += record.rows[j].accuracy;
        ev.pre_accuracy = pre / double(kWindow);
        ev.post_accuracy = post / double(kWindow);
        ev.drop = ev.post_accuracy - ev.pre_accuracy;
        if (ev.drop < 0.0) {
            const std::size_t cap = (k + 1 < reset_idx.size())
                                        ? reset_idx[k + 1] - i
                                        : record.rows.size() - 1 - i;
            long delay = long(cap);
            for (std::size_t d = 1; d <= cap; ++d) {
                if (record.rows[i + d].accuracy >= pre_max) {
                    delay = long(d);
                    break;
                }
            }
            ev.recovery_delay = delay;
        }
        out.push_back(ev);
    }
    return out;
}

double knowledge_recovery(const RunRecord& record) {
    if (record.rows.empty()) throw ConfigError("knowledge_recovery: empty record");
    // visits: maximal runs of consecutive rows sharing a domain tag
    std::map<std::string, std::vector<double>> visits;  // per-domain visit accuracies
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= record.rows.size(); ++i) {
        if (i == record.rows.size() || record.rows[i].domain != record.rows[begin].domain) {
            double total = 0.0;
            for (std::size_t j = begin; j < i; ++j) total += record.rows[j].accuracy;
            visits[record.rows[begin].domain].push_back(total / double(i - begin));
            begin = i;
        }
    }
    double gap_total = 0.0;
    for (const auto& [domain, accs] : visits) {
        if (accs.size() < 2)
            throw ConfigError("knowledge_recovery: domain '" + domain +
                              "' has fewer than 2 visits");
        const double best_prior = *std::max_element(accs.begin(), accs.end() - 1);
        gap_total += accs.back() - best_prior;
    }
    return gap_total / double(visits.size());
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ShapeError("pearson: need equal lengths >= 2");
    const double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw NumericError("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace metrics
}  // namespace asrlab
