#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace asrlab {

struct StepRow {
    long step = 0;           // 1-based
    std::string domain;      // '+'-joined active corruption kinds
    double severity = 0.0;   // largest active severity
    double accuracy = 0.0;
    double c_t = 0.0;
    double bar_c = 0.0;
    double phi_t = 0.0;
    double lambda_f = 0.0;
    double mu_c = 0.0;
    bool reset = false;
    double r_t = 0.0;        // 0 on non-reset rows
    long layers_reset = 0;
    std::uint64_t predicted_mask = 0;  // bit c set iff class c predicted in batch
};

struct RunSummary {
    double mean_accuracy = 0.0;
    long reset_count = 0;
    double final_window_accuracy = 0.0;  // last min(1000, horizon) steps
};

struct RunRecord {
    std::string strategy_name;
    std::uint64_t seed = 0;
    std::vector<StepRow> rows;
    RunSummary summary;
    bool aborted = false;   // numeric failure; rows end at abort_step
    long abort_step = 0;

    void finalize_summary(long final_window = 1000);
};

// CSV layout: optional '#'-prefixed metadata lines, then a header row, then
// one line per step. Reals carry 12 significant digits; LF line endings.
struct CsvMeta {
    std::string stream_fingerprint;
    double source_mean_accuracy = 0.0;
};

void write_record_csv(std::ostream& os, const RunRecord& record, const CsvMeta& meta);
RunRecord read_record_csv(std::istream& is, CsvMeta* meta = nullptr);

std::string format_real(double v);  // 12 significant digits

}  // namespace asrlab
