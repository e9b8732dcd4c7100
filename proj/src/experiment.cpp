#include "asrlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "asrlab/engine.hpp"
#include "asrlab/metrics.hpp"
#include "asrlab/rng.hpp"

namespace fs = std::filesystem;

namespace asrlab {
namespace {

Network build_source_net(const ExperimentConfig& config, std::uint64_t seed) {
    std::vector<std::size_t> hidden(config.model.hidden_layers, config.model.hidden_width);
    Network net = make_network(config.stream.dim, hidden, config.stream.class_count,
                               splitmix64(seed ^ hash_name("net_init")));
    const Matrix prototypes = make_prototypes(seed, config.stream.class_count,
                                              config.stream.dim, config.stream.spread);
    train_source(net, prototypes, config.stream.cluster_sigma, config.model.source, seed);
    return net;
}

RunRecord execute_run(const ExperimentConfig& config, const Strategy& strategy,
                      const Network& source_net, std::uint64_t seed) {
    StreamConfig sc = config.stream;
    sc.seed = seed;
    Stream stream(sc);
    return run(strategy, stream, source_net, snapshot(source_net), config.run);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    fs::create_directories(config.output_dir);
    std::error_code ec;
    if (!fs::is_directory(config.output_dir))
        throw IoError("output directory is not writable: " + config.output_dir);

    const std::string fingerprint = stream_fingerprint(config);

    // One trained source model per seed, shared by every strategy.
    std::map<std::uint64_t, Network> source_nets;
    std::map<std::uint64_t, RunRecord> source_refs;
    for (std::uint64_t seed : config.seeds) {
        Network net = build_source_net(config, seed);
        Strategy ref;
        ref.kind = Strategy::Kind::SourceOnly;
        source_refs.emplace(seed, execute_run(config, ref, net, seed));
        source_nets.emplace(seed, std::move(net));
    }

    struct Task {
        std::size_t strategy_idx;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < config.strategies.size(); ++si)
        for (std::uint64_t seed : config.seeds) tasks.push_back({si, seed});

    ExperimentResult result;
    result.entries.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                const Task& task = tasks[i];
                const Strategy& strategy = config.strategies[task.strategy_idx];
                RunRecord rec =
                    execute_run(config, strategy, source_nets.at(task.seed), task.seed);

                CsvMeta meta;
                meta.stream_fingerprint = fingerprint;
                meta.source_mean_accuracy = source_refs.at(task.seed).summary.mean_accuracy;
                const std::string path =
                    (fs::path(config.output_dir) /
                     (rec.strategy_name + "_seed" + std::to_string(task.seed) + ".csv"))
                        .string();
                std::ofstream os(path, std::ios::binary);
                if (!os) throw IoError("cannot write CSV: " + path);
                write_record_csv(os, rec, meta);

                result.entries[i] = {rec.strategy_name, task.seed, path, std::move(rec)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(config.workers, int(tasks.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    // summary, in declared strategy order
    for (std::size_t si = 0; si < config.strategies.size(); ++si) {
        StrategySummary s;
        std::vector<double> means;
        double resets = 0.0, final_acc = 0.0, src_acc = 0.0;
        for (const auto& entry : result.entries) {
            const std::size_t idx = &entry - result.entries.data();
            if (tasks[idx].strategy_idx != si) continue;
            s.strategy = entry.strategy;
            means.push_back(entry.record.summary.mean_accuracy);
            resets += double(entry.record.summary.reset_count);
            final_acc += entry.record.summary.final_window_accuracy;
            src_acc += source_refs.at(entry.seed).summary.mean_accuracy;
        }
        const double n = double(means.size());
        for (double m : means) s.mean_accuracy += m;
        s.mean_accuracy /= n;
        for (double m : means) s.std_accuracy += (m - s.mean_accuracy) * (m - s.mean_accuracy);
        s.std_accuracy = means.size() > 1 ? std::sqrt(s.std_accuracy / (n - 1.0)) : 0.0;
        s.mean_reset_count = resets / n;
        s.mean_final_window_accuracy = final_acc / n;
        s.source_mean_accuracy = src_acc / n;
        s.collapsed = metrics::collapse_flag(s.mean_accuracy, s.source_mean_accuracy);
        result.summaries.push_back(std::move(s));
    }

    result.summary_path = (fs::path(config.output_dir) / "summary.csv").string();
    std::ofstream os(result.summary_path, std::ios::binary);
    if (!os) throw IoError("cannot write summary: " + result.summary_path);
    os << "strategy,mean_accuracy,std_accuracy,mean_reset_count,"
          "mean_final_window_accuracy,source_mean_accuracy,collapsed\n";
    for (const StrategySummary& s : result.summaries)
        os << s.strategy << ',' << format_real(s.mean_accuracy) << ','
           << format_real(s.std_accuracy) << ',' << format_real(s.mean_reset_count) << ','
           << format_real(s.mean_final_window_accuracy) << ','
           << format_real(s.source_mean_accuracy) << ',' << (s.collapsed ? 1 : 0) << "\n";
    return result;
}

std::string compare_records(const std::vector<std::string>& csv_paths) {
    if (csv_paths.size() < 2) throw ConfigError("compare needs at least 2 record files");
    struct Item {
        std::string path;
        RunRecord record;
        CsvMeta meta;
    };
    std::vector<Item> items;
    for (const std::string& path : csv_paths) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw IoError("cannot open record: " + path);
        Item item;
        item.path = path;
        item.record = read_record_csv(is, &item.meta);
        items.push_back(std::move(item));
    }
    for (const Item& item : items)
        if (item.meta.stream_fingerprint != items.front().meta.stream_fingerprint)
            throw ConfigError("comparison refused: mismatched stream fingerprints (" +
                              item.path + ")");

    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return a.record.summary.mean_accuracy > b.record.summary.mean_accuracy;
    });

    std::ostringstream os;
    os << "rank,strategy,seed,mean_accuracy,reset_count,collapsed,tie\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& item = items[i];
        const bool collapsed = metrics::collapse_flag(item.record.summary.mean_accuracy,
                                                      item.meta.source_mean_accuracy);
        const bool tie =
            (i > 0 && items[i - 1].record.summary.mean_accuracy ==
                          item.record.summary.mean_accuracy) ||
            (i + 1 < items.size() && items[i + 1].record.summary.mean_accuracy ==
                                         item.record.summary.mean_accuracy);
        os << (i + 1) << ',' << item.record.strategy_name << ',' << item.record.seed << ','
           << format_real(item.record.summary.mean_accuracy) << ','
           << item.record.summary.reset_count << ',' << (collapsed ? 1 : 0) << ','
           << (tie ? 1 : 0) << "\n";
    }
    return os.str();
}

namespace {

double row_quantity(const StepRow& r, const std::string& quantity) {
    if (quantity == "accuracy") return r.accuracy;
    if (quantity == "c_t") return r.c_t;
    if (quantity == "bar_c") return r.bar_c;
    if (quantity == "phi_t") return r.phi_t;
    if (quantity == "lambda_f") return r.lambda_f;
    if (quantity == "mu_c") return r.mu_c;
    if (quantity == "r_t") return r.r_t;
    if (quantity == "severity") return r.severity;
    throw ConfigError("unknown plot quantity: " + quantity);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string plot_records(const std::vector<std::string>& csv_paths,
                         const std::string& quantity, const std::string& output_dir) {
    struct Series {
        std::string name;
        std::vector<double> ys;
        std::vector<long> reset_steps;
    };
    std::vector<Series> series;
    double ymin = 0.0, ymax = 0.0;
    long xmax = 1;
    bool first_val = true;
    for (const std::string& path : csv_paths) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw IoError("cannot open record: " + path);
        const RunRecord rec = read_record_csv(is);
        Series s;
        s.name = rec.strategy_name + "/seed" + std::to_string(rec.seed);
        for (const StepRow& r : rec.rows) {
            const double v = row_quantity(r, quantity);
            s.ys.push_back(v);
            if (first_val || v < ymin) ymin = v;
            if (first_val || v > ymax) ymax = v;
            first_val = false;
            if (r.reset) s.reset_steps.push_back(r.step);
        }
        xmax = std::max<long>(xmax, long(s.ys.size()));
        series.push_back(std::move(s));
    }
    if (ymax == ymin) ymax = ymin + 1.0;

    const double width = 900.0, height = 420.0, ml = 60.0, mr = 20.0, mt = 30.0, mb = 40.0;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto sx = [&](double step) { return ml + pw * (step - 1.0) / std::max(1.0, double(xmax - 1)); };
    auto sy = [&](double v) { return mt + ph * (1.0 - (v - ymin) / (ymax - ymin)); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << ml << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
       << quantity << "</text>\n";
    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << (mt + ph) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << (mt + ph) << "\" x2=\"" << (ml + pw)
       << "\" y2=\"" << (mt + ph) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"8\" y=\"" << format_real(sy(ymax) + 4) << "\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << format_real(ymax) << "</text>\n";
    os << "<text x=\"8\" y=\"" << format_real(sy(ymin) + 4) << "\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << format_real(ymin) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        for (long step : s.reset_steps)
            os << "<line x1=\"" << format_real(sx(double(step))) << "\" y1=\"" << mt
               << "\" x2=\"" << format_real(sx(double(step))) << "\" y2=\"" << (mt + ph)
               << "\" stroke=\"" << color << "\" stroke-dasharray=\"4,4\" "
               << "stroke-opacity=\"0.6\" class=\"reset-marker\"/>\n";
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.ys.size(); ++i) {
            if (i) os << ' ';
            os << format_real(sx(double(i + 1))) << ',' << format_real(sy(s.ys[i]));
        }
        os << "\"/>\n";
        os << "<text x=\"" << (ml + 10) << "\" y=\"" << (mt + 16.0 * double(si + 1))
           << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
           << s.name << "</text>\n";
    }
    os << "</svg>\n";

    fs::create_directories(output_dir);
    const std::string out_path = (fs::path(output_dir) / (quantity + ".svg")).string();
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write SVG: " + out_path);
    out << os.str();
    return out_path;
}

}  // namespace asrlab
