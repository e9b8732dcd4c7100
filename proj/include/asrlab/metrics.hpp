#pragma once

#include <vector>

#include "asrlab/matrix.hpp"
#include "asrlab/record.hpp"
#include "asrlab/stream.hpp"

namespace asrlab::metrics {

// Top-1 accuracy; argmax ties break to the lowest class index.
double batch_accuracy(const Matrix& logits, const std::vector<int>& labels);

std::vector<int> argmax_rows(const Matrix& logits);

// |distinct predicted classes| / C over a prediction window.
double class_coverage(const std::vector<int>& predictions, std::size_t class_count);

// Coverage over [first, last) rows of a record via the per-row prediction
// masks; rows read from CSV carry no masks, so this is in-memory only.
double window_coverage(const RunRecord& record, std::size_t first, std::size_t last,
                       std::size_t class_count);

// True iff the method underperforms the frozen source model.
bool collapse_flag(double method_mean_accuracy, double source_mean_accuracy);

struct ResetEventStats {
    long reset_step = 0;        // 1-based step at which the reset fired
    double pre_accuracy = 0.0;  // mean over the 10 batches before
    double post_accuracy = 0.0; // mean over the 10 batches after
    double drop = 0.0;          // post - pre; negative = detrimental
    long recovery_delay = 0;    // batches to regain the pre-window max; 0 if drop >= 0
};

// Resets within 10 batches of either horizon boundary are skipped. For
// detrimental resets the delay is capped at the distance to the next reset
// (or to the end of the record).
std::vector<ResetEventStats> reset_drop_and_delay(const RunRecord& record);

// Mean over domains of (final-visit accuracy - best prior-visit accuracy).
// Requires a recurring run where every domain appears at least twice.
double knowledge_recovery(const RunRecord& record);

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace asrlab::metrics
