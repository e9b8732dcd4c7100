#include "asrlab/record.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "asrlab/errors.hpp"

namespace asrlab {

void RunRecord::finalize_summary(long final_window) {
    double total = 0.0;
    long resets = 0;
    for (const StepRow& r : rows) {
        total += r.accuracy;
        if (r.reset) ++resets;
    }
    summary.mean_accuracy = rows.empty() ? 0.0 : total / double(rows.size());
    summary.reset_count = resets;
    const std::size_t window = std::min<std::size_t>(rows.size(), std::size_t(final_window));
    double wtotal = 0.0;
    for (std::size_t i = rows.size() - window; i < rows.size(); ++i) wtotal += rows[i].accuracy;
    summary.final_window_accuracy = window == 0 ? 0.0 : wtotal / double(window);
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_record_csv(std::ostream& os, const RunRecord& record, const CsvMeta& meta) {
    os << "# strategy=" << record.strategy_name << ",seed=" << record.seed
       << ",fingerprint=" << meta.stream_fingerprint
       << ",source_mean_accuracy=" << format_real(meta.source_mean_accuracy)
       << ",aborted=" << (record.aborted ? 1 : 0) << ",abort_step=" << record.abort_step << "\n";
    os << "step,domain,severity,accuracy,c_t,bar_c,phi_t,lambda_f,mu_c,reset,r_t,layers_reset\n";
    for (const StepRow& r : record.rows) {
        os << r.step << ',' << r.domain << ',' << format_real(r.severity) << ','
           << format_real(r.accuracy) << ',' << format_real(r.c_t) << ','
           << format_real(r.bar_c) << ',' << format_real(r.phi_t) << ','
           << format_real(r.lambda_f) << ',' << format_real(r.mu_c) << ','
           << (r.reset ? 1 : 0) << ',' << format_real(r.r_t) << ',' << r.layers_reset << "\n";
    }
}

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, delim)) out.push_back(item);
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

}  // namespace

RunRecord read_record_csv(std::istream& is, CsvMeta* meta) {
    RunRecord record;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            for (const std::string& kv : split(line.substr(1), ',')) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                std::string key = kv.substr(0, eq);
                key.erase(0, key.find_first_not_of(' '));
                const std::string val = kv.substr(eq + 1);
                if (key == "strategy") record.strategy_name = val;
                else if (key == "seed") record.seed = std::stoull(val);
                else if (key == "aborted") record.aborted = val == "1";
                else if (key == "abort_step") record.abort_step = std::stol(val);
                else if (meta && key == "fingerprint") meta->stream_fingerprint = val;
                else if (meta && key == "source_mean_accuracy")
                    meta->source_mean_accuracy = std::stod(val);
            }
            continue;
        }
        if (!header_seen) {  // header row
            header_seen = true;
            continue;
        }
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 12) throw IoError("read_record_csv: malformed row: " + line);
        StepRow r;
        r.step = std::stol(f[0]);
        r.domain = f[1];
        r.severity = std::stod(f[2]);
        r.accuracy = std::stod(f[3]);
        r.c_t = std::stod(f[4]);
        r.bar_c = std::stod(f[5]);
        r.phi_t = std::stod(f[6]);
        r.lambda_f = std::stod(f[7]);
        r.mu_c = std::stod(f[8]);
        r.reset = f[9] == "1";
        r.r_t = std::stod(f[10]);
        r.layers_reset = std::stol(f[11]);
        record.rows.push_back(std::move(r));
    }
    if (!header_seen) throw IoError("read_record_csv: missing header row");
    record.finalize_summary();
    return record;
}

}  // namespace asrlab
