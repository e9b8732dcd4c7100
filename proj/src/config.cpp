#include "asrlab/config.hpp"

#include <fstream>
#include <sstream>

#include "asrlab/record.hpp"
#include "asrlab/rng.hpp"

namespace asrlab {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for '" + key + "': " + v);
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for '" + key + "': " + v);
    }
}

bool to_flag(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("invalid flag value for '" + key + "': " + v + " (use on/off)");
}

void apply_stream(StreamConfig& s, const std::string& key, const std::string& v) {
    if (key == "mode") {
        if (v == "smooth") s.schedule.mode = ScheduleMode::Smooth;
        else if (v == "recurring") s.schedule.mode = ScheduleMode::Recurring;
        else if (v == "dynamic") s.schedule.mode = ScheduleMode::Dynamic;
        else throw ConfigError("unknown stream mode: " + v);
    } else if (key == "domains") {
        s.schedule.domains.clear();
        for (const std::string& d : split_list(v))
            s.schedule.domains.push_back(corruption_from_name(d));
    } else if (key == "severity_max") s.schedule.severity_max = to_real(key, v);
    else if (key == "transition_speed") s.schedule.transition_speed = to_long(key, v);
    else if (key == "smooth_substeps") s.schedule.smooth_substeps = int(to_long(key, v));
    else if (key == "recurring_duration") s.schedule.recurring_duration = to_long(key, v);
    else if (key == "revisit_count") s.schedule.revisit_count = int(to_long(key, v));
    else if (key == "duration_set") {
        s.schedule.duration_set.clear();
        for (const std::string& d : split_list(v))
            s.schedule.duration_set.push_back(to_long(key, d));
    } else if (key == "label_mode") {
        if (v == "iid_uniform") s.label_mode = LabelMode::IidUniform;
        else if (v == "dirichlet") s.label_mode = LabelMode::Dirichlet;
        else throw ConfigError("unknown label_mode: " + v);
    } else if (key == "dirichlet_delta") s.dirichlet_delta = to_real(key, v);
    else if (key == "dirichlet_block") s.dirichlet_block = to_long(key, v);
    else if (key == "class_count") s.class_count = std::size_t(to_long(key, v));
    else if (key == "input_dim") s.dim = std::size_t(to_long(key, v));
    else if (key == "spread") s.spread = to_real(key, v);
    else if (key == "cluster_sigma") s.cluster_sigma = to_real(key, v);
    else if (key == "noise_unit") s.noise_unit = to_real(key, v);
    else throw ConfigError("unknown [stream] key: " + key);
}

void apply_model(ModelConfig& m, const std::string& key, const std::string& v) {
    if (key == "hidden_layers") m.hidden_layers = std::size_t(to_long(key, v));
    else if (key == "hidden_width") m.hidden_width = std::size_t(to_long(key, v));
    else if (key == "source_steps") m.source.steps = to_long(key, v);
    else if (key == "source_batch") m.source.batch_size = std::size_t(to_long(key, v));
    else if (key == "source_lr") m.source.lr = to_real(key, v);
    else throw ConfigError("unknown [model] key: " + key);
}

void apply_run(ExperimentConfig& c, const std::string& key, const std::string& v) {
    if (key == "horizon") c.run.horizon = to_long(key, v);
    else if (key == "batch_size") c.run.batch_size = std::size_t(to_long(key, v));
    else if (key == "lr") c.run.lr = to_real(key, v);
    else if (key == "seeds") {
        c.seeds.clear();
        for (const std::string& s : split_list(v))
            c.seeds.push_back(std::uint64_t(to_long(key, s)));
        if (c.seeds.empty()) throw ConfigError("seed list must be nonempty");
    } else if (key == "output_dir") c.output_dir = v;
    else if (key == "workers") c.workers = int(to_long(key, v));
    else if (key == "concentration_metric") {
        if (v == "softmax_of_mean") c.run.concentration_mode = ConcentrationMode::SoftmaxOfMean;
        else if (v == "mean_of_softmax")
            c.run.concentration_mode = ConcentrationMode::MeanOfSoftmax;
        else throw ConfigError("unknown concentration_metric: " + v);
    } else throw ConfigError("unknown [run] key: " + key);
}

void apply_hyper(AsrParams& h, const std::string& key, const std::string& v) {
    if (key == "alpha_0") h.alpha_0 = to_real(key, v);
    else if (key == "mu_c") h.mu_c_fallback = to_real(key, v);
    else if (key == "r_0") h.r_0 = to_real(key, v);
    else if (key == "lambda_r") h.lambda_r = to_real(key, v);
    else if (key == "lambda_f") h.lambda_f_fallback = to_real(key, v);
    else if (key == "lambda_0") h.lambda_0 = to_real(key, v);
    else if (key == "mu_0") h.mu_0 = to_real(key, v);
    else if (key == "mu_f") h.mu_f = to_real(key, v);
    else if (key == "mu_theta") h.mu_theta = to_real(key, v);
    else throw ConfigError("unknown [hyper] key: " + key);
}

void apply_strategy(Strategy& s, const std::string& key, const std::string& v) {
    if (key == "name") {
        if (v == "source_only") s.kind = Strategy::Kind::SourceOnly;
        else if (v == "no_reset_em") s.kind = Strategy::Kind::NoResetEm;
        else if (v == "fixed_interval_full_reset") s.kind = Strategy::Kind::FixedIntervalFullReset;
        else if (v == "fixed_proportion_reset") s.kind = Strategy::Kind::FixedProportionReset;
        else if (v == "asr") s.kind = Strategy::Kind::Asr;
        else throw ConfigError("unknown strategy name: " + v);
    } else if (key == "interval") s.interval = to_long(key, v);
    else if (key == "proportion") s.proportion = to_real(key, v);
    else if (key == "adaptive_when") s.flags.adaptive_when = to_flag(key, v);
    else if (key == "selective_where") s.flags.selective_where = to_flag(key, v);
    else if (key == "fisher_recovery") s.flags.fisher_recovery = to_flag(key, v);
    else if (key == "adjust_lambda") s.flags.adjust_lambda = to_flag(key, v);
    else if (key == "adjust_mu") s.flags.adjust_mu = to_flag(key, v);
    else if (key == "delay_epsilon") s.delay_epsilon = to_real(key, v);
    else throw ConfigError("unknown [strategy] key: " + key);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream is(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            if (section == "strategy") config.strategies.emplace_back();
            else if (section != "stream" && section != "model" && section != "run" &&
                     section != "hyper")
                throw ConfigError("unknown section: [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section == "stream") apply_stream(config.stream, key, val);
        else if (section == "model") apply_model(config.model, key, val);
        else if (section == "run") apply_run(config, key, val);
        else if (section == "hyper") apply_hyper(config.run.hyper, key, val);
        else if (section == "strategy") apply_strategy(config.strategies.back(), key, val);
        else throw ConfigError("key outside any section: " + key);
    }
    if (config.strategies.empty())
        throw ConfigError("config declares no [strategy] section");
    if (config.stream.schedule.domains.empty())
        config.stream.schedule.domains = {CorruptionKind::Rotation, CorruptionKind::AdditiveNoise,
                                          CorruptionKind::FeatureScale,
                                          CorruptionKind::FeatureShuffle};
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    const Schedule& sch = c.stream.schedule;
    os << "[stream]\n";
    os << "mode = "
       << (sch.mode == ScheduleMode::Smooth
               ? "smooth"
               : sch.mode == ScheduleMode::Recurring ? "recurring" : "dynamic")
       << "\n";
    os << "domains = ";
    for (std::size_t i = 0; i < sch.domains.size(); ++i)
        os << (i ? "," : "") << corruption_name(sch.domains[i]);
    os << "\n";
    os << "severity_max = " << format_real(sch.severity_max) << "\n";
    os << "transition_speed = " << sch.transition_speed << "\n";
    os << "smooth_substeps = " << sch.smooth_substeps << "\n";
    os << "recurring_duration = " << sch.recurring_duration << "\n";
    os << "revisit_count = " << sch.revisit_count << "\n";
    os << "duration_set = ";
    for (std::size_t i = 0; i < sch.duration_set.size(); ++i)
        os << (i ? "," : "") << sch.duration_set[i];
    os << "\n";
    os << "label_mode = "
       << (c.stream.label_mode == LabelMode::IidUniform ? "iid_uniform" : "dirichlet") << "\n";
    os << "dirichlet_delta = " << format_real(c.stream.dirichlet_delta) << "\n";
    os << "dirichlet_block = " << c.stream.dirichlet_block << "\n";
    os << "class_count = " << c.stream.class_count << "\n";
    os << "input_dim = " << c.stream.dim << "\n";
    os << "spread = " << format_real(c.stream.spread) << "\n";
    os << "cluster_sigma = " << format_real(c.stream.cluster_sigma) << "\n";
    os << "noise_unit = " << format_real(c.stream.noise_unit) << "\n";
    os << "\n[model]\n";
    os << "hidden_layers = " << c.model.hidden_layers << "\n";
    os << "hidden_width = " << c.model.hidden_width << "\n";
    os << "source_steps = " << c.model.source.steps << "\n";
    os << "source_batch = " << c.model.source.batch_size << "\n";
    os << "source_lr = " << format_real(c.model.source.lr) << "\n";
    os << "\n[run]\n";
    os << "horizon = " << c.run.horizon << "\n";
    os << "batch_size = " << c.run.batch_size << "\n";
    os << "lr = " << format_real(c.run.lr) << "\n";
    os << "concentration_metric = "
       << (c.run.concentration_mode == ConcentrationMode::SoftmaxOfMean ? "softmax_of_mean"
                                                                        : "mean_of_softmax")
       << "\n";
    os << "seeds = ";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
    os << "\n";
    os << "output_dir = " << c.output_dir << "\n";
    os << "workers = " << c.workers << "\n";
    const AsrParams& h = c.run.hyper;
    os << "\n[hyper]\n";
    os << "alpha_0 = " << format_real(h.alpha_0) << "\n";
    os << "mu_c = " << format_real(h.mu_c_fallback) << "\n";
    os << "r_0 = " << format_real(h.r_0) << "\n";
    os << "lambda_r = " << format_real(h.lambda_r) << "\n";
    os << "lambda_f = " << format_real(h.lambda_f_fallback) << "\n";
    os << "lambda_0 = " << format_real(h.lambda_0) << "\n";
    os << "mu_0 = " << format_real(h.mu_0) << "\n";
    os << "mu_f = " << format_real(h.mu_f) << "\n";
    os << "mu_theta = " << format_real(h.mu_theta) << "\n";
    for (const Strategy& s : c.strategies) {
        os << "\n[strategy]\n";
        switch (s.kind) {
            case Strategy::Kind::SourceOnly: os << "name = source_only\n"; break;
            case Strategy::Kind::NoResetEm: os << "name = no_reset_em\n"; break;
            case Strategy::Kind::FixedIntervalFullReset:
                os << "name = fixed_interval_full_reset\n";
                break;
            case Strategy::Kind::FixedProportionReset:
                os << "name = fixed_proportion_reset\n";
                break;
            case Strategy::Kind::Asr: os << "name = asr\n"; break;
        }
        os << "interval = " << s.interval << "\n";
        os << "proportion = " << format_real(s.proportion) << "\n";
        os << "adaptive_when = " << (s.flags.adaptive_when ? "on" : "off") << "\n";
        os << "selective_where = " << (s.flags.selective_where ? "on" : "off") << "\n";
        os << "fisher_recovery = " << (s.flags.fisher_recovery ? "on" : "off") << "\n";
        os << "adjust_lambda = " << (s.flags.adjust_lambda ? "on" : "off") << "\n";
        os << "adjust_mu = " << (s.flags.adjust_mu ? "on" : "off") << "\n";
        os << "delay_epsilon = " << format_real(s.delay_epsilon) << "\n";
    }
    return os.str();
}

std::string stream_fingerprint(const ExperimentConfig& c) {
    // everything that shapes the batch sequence and the model family
    std::ostringstream os;
    ExperimentConfig core = c;
    core.strategies.clear();
    core.strategies.emplace_back();  // canonical placeholder
    core.output_dir = "";
    core.workers = 1;
    os << serialize_config(core);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_name(os.str())));
    return buf;
}

}  // namespace asrlab
