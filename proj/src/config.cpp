#include "sdda/config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "sdda/errors.hpp"

namespace sdda {
namespace {

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value, char sep, const std::string& key,
                                    int line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = value.find(sep, start);
        std::string tok = trim(value.substr(start, pos == std::string::npos ? pos : pos - start));
        if (tok.empty())
            throw config_error("empty element in list value for '" + key + "'", line);
        out.push_back(std::move(tok));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(d)) throw std::invalid_argument("not finite");
        return d;
    } catch (const std::exception&) {
        throw config_error("invalid number '" + v + "' for '" + key + "'", line);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
    try {
        if (v.empty() || v[0] == '-' || v[0] == '+') throw std::invalid_argument("sign");
        std::size_t used = 0;
        const unsigned long long u = std::stoull(v, &used, 10);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return u;
    } catch (const std::exception&) {
        throw config_error("invalid integer '" + v + "' for '" + key + "'", line);
    }
}

std::size_t parse_count(const std::string& v, const std::string& key, int line) {
    return static_cast<std::size_t>(parse_u64(v, key, line));
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw config_error("invalid flag '" + v + "' for '" + key + "' (use true/false)", line);
}

// Shortest digit string that parses back to the same double; keeps dumped
// configs readable without losing a bit.
std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_double_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt_double(v[i]);
    }
    return s;
}

// Tracks where cross-key facts came from so late validation can still
// point at a line.
struct ParsePositions {
    int classes = 0, dim = 0, class_means = 0, target_translation = 0;
    int batch_size = 0, metric = 0, layer_dims = 0;
    int source_csv = 0, target_csv = 0;
    bool has_shape = false, has_epochs = false;
    bool classes_set = false, dim_set = false;
    std::vector<std::pair<std::string, int>> generation_keys;  // name, line
};

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    ParsePositions at;
    std::map<std::string, int> seen;
    std::set<std::string> sections;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string section;

    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("malformed section header '" + line + "'", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "data" && section != "trainer" && section != "output")
                throw config_error("unknown section [" + section + "]", lineno);
            sections.insert(section);
            continue;
        }
        if (section.empty())
            throw config_error("key before any [section] header", lineno);

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value', got '" + line + "'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("empty key", lineno);
        if (value.empty()) throw config_error("empty value for '" + key + "'", lineno);

        const std::string qualified = section + "." + key;
        if (!seen.emplace(qualified, lineno).second)
            throw config_error("duplicate key '" + key + "' in [" + section + "]", lineno);

        auto generation_key = [&] { at.generation_keys.emplace_back(key, lineno); };

        if (section == "data") {
            if (key == "shape") {
                if (!shape_from_string(value, cfg.data.spec.shape))
                    throw config_error("unknown shape '" + value + "'", lineno);
                at.has_shape = true;
                generation_key();
            } else if (key == "classes") {
                cfg.data.spec.classes = parse_count(value, key, lineno);
                if (cfg.data.spec.classes < 2)
                    throw config_error("classes must be >= 2", lineno);
                at.classes = lineno;
                at.classes_set = true;
                generation_key();
            } else if (key == "dim") {
                cfg.data.spec.dim = parse_count(value, key, lineno);
                if (cfg.data.spec.dim < 1) throw config_error("dim must be >= 1", lineno);
                at.dim = lineno;
                at.dim_set = true;
                generation_key();
            } else if (key == "samples_per_class") {
                cfg.data.spec.samples_per_class = parse_count(value, key, lineno);
                if (cfg.data.spec.samples_per_class < 1)
                    throw config_error("samples_per_class must be >= 1", lineno);
                generation_key();
            } else if (key == "class_stddev") {
                cfg.data.spec.class_stddev = parse_double(value, key, lineno);
                if (cfg.data.spec.class_stddev < 0.0)
                    throw config_error("class_stddev must be >= 0", lineno);
                generation_key();
            } else if (key == "class_means") {
                if (value != "auto") {
                    for (const std::string& mean : split_list(value, ';', key, lineno)) {
                        std::vector<double> coords;
                        for (const std::string& c : split_list(mean, ',', key, lineno))
                            coords.push_back(parse_double(c, key, lineno));
                        cfg.data.spec.class_means.push_back(std::move(coords));
                    }
                }
                at.class_means = lineno;
                generation_key();
            } else if (key == "target_rotation_deg") {
                cfg.data.spec.target_rotation_deg = parse_double(value, key, lineno);
                generation_key();
            } else if (key == "target_translation") {
                if (value != "auto")
                    for (const std::string& c : split_list(value, ',', key, lineno))
                        cfg.data.spec.target_translation.push_back(parse_double(c, key, lineno));
                at.target_translation = lineno;
                generation_key();
            } else if (key == "target_scale") {
                cfg.data.spec.target_scale = parse_double(value, key, lineno);
                if (!(cfg.data.spec.target_scale > 0.0))
                    throw config_error("target_scale must be > 0", lineno);
                generation_key();
            } else if (key == "target_noise_std") {
                cfg.data.spec.target_noise_std = parse_double(value, key, lineno);
                if (cfg.data.spec.target_noise_std < 0.0)
                    throw config_error("target_noise_std must be >= 0", lineno);
                generation_key();
            } else if (key == "seed") {
                cfg.data.spec.seed = parse_u64(value, key, lineno);
                generation_key();
            } else if (key == "source_csv") {
                cfg.data.source_csv = value;
                at.source_csv = lineno;
            } else if (key == "target_csv") {
                cfg.data.target_csv = value;
                at.target_csv = lineno;
            } else {
                throw config_error("unknown key '" + key + "' in [data]", lineno);
            }
        } else if (section == "trainer") {
            if (key == "lambda_ssc") {
                cfg.trainer.lambda_ssc = parse_double(value, key, lineno);
                if (cfg.trainer.lambda_ssc < 0.0)
                    throw config_error("lambda_ssc must be >= 0", lineno);
            } else if (key == "lambda_intra") {
                cfg.trainer.lambda_intra = parse_double(value, key, lineno);
                if (cfg.trainer.lambda_intra < 0.0)
                    throw config_error("lambda_intra must be >= 0", lineno);
            } else if (key == "lambda_inter") {
                cfg.trainer.lambda_inter = parse_double(value, key, lineno);
                if (cfg.trainer.lambda_inter < 0.0)
                    throw config_error("lambda_inter must be >= 0", lineno);
            } else if (key == "metric") {
                try {
                    cfg.trainer.metric = metric_from_string(value);
                } catch (const std::exception&) {
                    throw config_error("unknown metric '" + value + "'", lineno);
                }
                at.metric = lineno;
            } else if (key == "similarity") {
                if (!similarity_from_string(value, cfg.trainer.similarity.tag))
                    throw config_error("unknown similarity '" + value + "'", lineno);
            } else if (key == "gamma") {
                cfg.trainer.similarity.gamma = parse_double(value, key, lineno);
                if (!(cfg.trainer.similarity.gamma > 0.0))
                    throw config_error("gamma must be > 0", lineno);
            } else if (key == "target_norm") {
                cfg.trainer.target_norm = parse_double(value, key, lineno);
                if (!(cfg.trainer.target_norm > 0.0))
                    throw config_error("target_norm must be > 0", lineno);
            } else if (key == "margin") {
                cfg.trainer.margin = parse_double(value, key, lineno);
                if (cfg.trainer.margin < 0.0)
                    throw config_error("margin must be >= 0", lineno);
            } else if (key == "center_alpha") {
                cfg.trainer.center_alpha = parse_double(value, key, lineno);
                if (cfg.trainer.center_alpha < 0.0 || cfg.trainer.center_alpha > 1.0)
                    throw config_error("center_alpha must lie in [0, 1]", lineno);
            } else if (key == "batch_size") {
                cfg.trainer.batch_size = parse_count(value, key, lineno);
                if (cfg.trainer.batch_size < 1)
                    throw config_error("batch_size must be >= 1", lineno);
                at.batch_size = lineno;
            } else if (key == "epochs") {
                cfg.trainer.epochs = parse_count(value, key, lineno);
                at.has_epochs = true;
            } else if (key == "learning_rate") {
                cfg.trainer.learning_rate = parse_double(value, key, lineno);
                if (!(cfg.trainer.learning_rate > 0.0))
                    throw config_error("learning_rate must be > 0", lineno);
            } else if (key == "schedule_mu") {
                cfg.trainer.schedule_mu = parse_double(value, key, lineno);
                if (cfg.trainer.schedule_mu < 0.0)
                    throw config_error("schedule_mu must be >= 0", lineno);
            } else if (key == "schedule_enabled") {
                cfg.trainer.schedule_enabled = parse_bool(value, key, lineno);
            } else if (key == "seed") {
                cfg.trainer.seed = parse_u64(value, key, lineno);
            } else if (key == "layer_dims") {
                at.layer_dims = lineno;
                if (value == "auto") {
                    cfg.layer_dims_auto = true;
                } else {
                    cfg.layer_dims_auto = false;
                    for (const std::string& d : split_list(value, ',', key, lineno)) {
                        const std::size_t width = parse_count(d, key, lineno);
                        if (width == 0)
                            throw config_error("layer_dims entries must be positive", lineno);
                        cfg.trainer.layer_dims.push_back(width);
                    }
                    if (cfg.trainer.layer_dims.size() < 3)
                        throw config_error(
                            "layer_dims needs at least input, adapted and output sizes", lineno);
                }
            } else if (key == "activation") {
                if (!activation_from_string(value, cfg.trainer.hidden_activation))
                    throw config_error("unknown activation '" + value + "'", lineno);
            } else {
                throw config_error("unknown key '" + key + "' in [trainer]", lineno);
            }
        } else {  // output
            if (key == "dir") {
                cfg.output.dir = value;
            } else if (key == "emit_svg") {
                cfg.output.emit_svg = parse_bool(value, key, lineno);
            } else if (key == "emit_features") {
                cfg.output.emit_features = parse_bool(value, key, lineno);
            } else if (key == "seeds") {
                if (value != "auto") {
                    std::set<std::uint64_t> unique;
                    for (const std::string& s : split_list(value, ',', key, lineno)) {
                        const std::uint64_t seed = parse_u64(s, key, lineno);
                        if (!unique.insert(seed).second)
                            throw config_error("duplicate seed " + s + " in sweep list", lineno);
                        cfg.output.seeds.push_back(seed);
                    }
                }
            } else {
                throw config_error("unknown key '" + key + "' in [output]", lineno);
            }
        }
    }

    if (!sections.count("data")) throw config_error("missing required section [data]");
    if (!sections.count("trainer")) throw config_error("missing required section [trainer]");

    const bool any_csv = at.source_csv || at.target_csv;
    if (any_csv) {
        cfg.data.from_csv = true;
        if (!at.source_csv || !at.target_csv)
            throw config_error("source_csv and target_csv must be set together",
                               at.source_csv ? at.source_csv : at.target_csv);
        if (!at.generation_keys.empty())
            throw config_error("'" + at.generation_keys.front().first +
                                   "' cannot be combined with csv input",
                               at.generation_keys.front().second);
    } else if (!at.has_shape) {
        throw config_error("section [data] must set shape (or source_csv/target_csv)");
    }
    if (!at.has_epochs) throw config_error("section [trainer] must set epochs");

    if (!cfg.data.from_csv) {
        DomainShiftSpec& spec = cfg.data.spec;
        if (spec.shape == DatasetShape::two_moons) {
            if (at.classes_set && spec.classes != 2)
                throw config_error("two_moons requires classes = 2", at.classes);
            if (at.dim_set && spec.dim != 2)
                throw config_error("two_moons requires dim = 2", at.dim);
            spec.classes = 2;
            spec.dim = 2;
        }
        if (!spec.class_means.empty()) {
            if (spec.class_means.size() != spec.classes)
                throw config_error("class_means must list one mean per class", at.class_means);
            for (const auto& m : spec.class_means)
                if (m.size() != spec.dim)
                    throw config_error("each class mean needs dim coordinates", at.class_means);
        }
        if (!spec.target_translation.empty() && spec.target_translation.size() != spec.dim)
            throw config_error("target_translation needs dim coordinates", at.target_translation);
        if (!cfg.layer_dims_auto) {
            if (cfg.trainer.layer_dims.front() != spec.dim)
                throw config_error("layer_dims input width must equal data dim", at.layer_dims);
            if (cfg.trainer.layer_dims.back() != spec.classes)
                throw config_error("layer_dims output width must equal class count",
                                   at.layer_dims);
        }
    }
    if (cfg.trainer.metric != MetricKind::none && cfg.trainer.batch_size < 2)
        throw config_error("batch_size must be >= 2 when a metric is active",
                           at.batch_size ? at.batch_size : at.metric);
    return cfg;
}

std::string print_config(const ExperimentConfig& cfg) {
    std::string out;
    out += "[data]\n";
    if (cfg.data.from_csv) {
        out += "source_csv = " + cfg.data.source_csv + "\n";
        out += "target_csv = " + cfg.data.target_csv + "\n";
    } else {
        const DomainShiftSpec& spec = cfg.data.spec;
        out += "shape = " + to_string(spec.shape) + "\n";
        out += "classes = " + std::to_string(spec.classes) + "\n";
        out += "dim = " + std::to_string(spec.dim) + "\n";
        out += "samples_per_class = " + std::to_string(spec.samples_per_class) + "\n";
        out += "class_stddev = " + fmt_double(spec.class_stddev) + "\n";
        if (spec.class_means.empty()) {
            out += "class_means = auto\n";
        } else {
            out += "class_means = ";
            for (std::size_t c = 0; c < spec.class_means.size(); ++c) {
                if (c) out += ';';
                out += fmt_double_list(spec.class_means[c]);
            }
            out += "\n";
        }
        out += "target_rotation_deg = " + fmt_double(spec.target_rotation_deg) + "\n";
        out += "target_translation = " +
               (spec.target_translation.empty() ? "auto"
                                                : fmt_double_list(spec.target_translation)) +
               "\n";
        out += "target_scale = " + fmt_double(spec.target_scale) + "\n";
        out += "target_noise_std = " + fmt_double(spec.target_noise_std) + "\n";
        out += "seed = " + std::to_string(spec.seed) + "\n";
    }

    const TrainerConfig& t = cfg.trainer;
    out += "\n[trainer]\n";
    out += "lambda_ssc = " + fmt_double(t.lambda_ssc) + "\n";
    out += "lambda_intra = " + fmt_double(t.lambda_intra) + "\n";
    out += "lambda_inter = " + fmt_double(t.lambda_inter) + "\n";
    out += "metric = " + to_string(t.metric) + "\n";
    out += "similarity = " + to_string(t.similarity.tag) + "\n";
    out += "gamma = " + fmt_double(t.similarity.gamma) + "\n";
    out += "target_norm = " + fmt_double(t.target_norm) + "\n";
    out += "margin = " + fmt_double(t.margin) + "\n";
    out += "center_alpha = " + fmt_double(t.center_alpha) + "\n";
    out += "batch_size = " + std::to_string(t.batch_size) + "\n";
    out += "epochs = " + std::to_string(t.epochs) + "\n";
    out += "learning_rate = " + fmt_double(t.learning_rate) + "\n";
    out += "schedule_mu = " + fmt_double(t.schedule_mu) + "\n";
    out += std::string("schedule_enabled = ") + (t.schedule_enabled ? "true" : "false") + "\n";
    out += "seed = " + std::to_string(t.seed) + "\n";
    if (cfg.layer_dims_auto) {
        out += "layer_dims = auto\n";
    } else {
        out += "layer_dims = ";
        for (std::size_t i = 0; i < t.layer_dims.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(t.layer_dims[i]);
        }
        out += "\n";
    }
    out += "activation = " + to_string(t.hidden_activation) + "\n";

    out += "\n[output]\n";
    out += "dir = " + cfg.output.dir + "\n";
    out += std::string("emit_svg = ") + (cfg.output.emit_svg ? "true" : "false") + "\n";
    out += std::string("emit_features = ") + (cfg.output.emit_features ? "true" : "false") + "\n";
    if (cfg.output.seeds.empty()) {
        out += "seeds = auto\n";
    } else {
        out += "seeds = ";
        for (std::size_t i = 0; i < cfg.output.seeds.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(cfg.output.seeds[i]);
        }
        out += "\n";
    }
    return out;
}

} // namespace sdda
