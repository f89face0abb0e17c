#include "sdda/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "sdda/errors.hpp"
#include "sdda/network.hpp"

namespace fs = std::filesystem;

namespace sdda {
namespace {

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << text;
    if (!out) throw io_error("write failed for " + path.string());
}

std::size_t class_count_of(const LabeledDataset& ds) {
    std::size_t classes = 0;
    for (int y : ds.labels)
        classes = std::max(classes, static_cast<std::size_t>(y) + 1);
    return classes;
}

std::string features_csv_text(const MlpParams& params, const LabeledDataset& source,
                              const LabeledDataset& target) {
    std::string text = "domain,label";
    for (std::size_t j = 0; j < params.adapted_dim(); ++j)
        text += ",f" + std::to_string(j + 1);
    text += "\n";

    const auto dump = [&](const LabeledDataset& ds, const char* tag) {
        ForwardCache cache;
        forward(params, ds.x, cache);
        const Matrix& phi = cache.adapted_features();
        for (std::size_t r = 0; r < phi.rows(); ++r) {
            text += tag;
            text += ',' + std::to_string(ds.labels[r]);
            for (std::size_t c = 0; c < phi.cols(); ++c)
                text += ',' + format_g17(phi(r, c));
            text += '\n';
        }
    };
    dump(source, "source");
    dump(target, "target");
    return text;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Target error (1 - accuracy) against epoch, one polyline per seed.
std::string convergence_svg(const std::vector<SeedOutcome>& outcomes) {
    constexpr double kWidth = 640, kHeight = 400;
    constexpr double kLeft = 62, kRight = 620, kTop = 24, kBottom = 356;
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

    std::size_t max_epochs = 1;
    for (const SeedOutcome& oc : outcomes)
        max_epochs = std::max(max_epochs, oc.result.log.records.size());

    const auto x_of = [&](std::size_t e) {
        if (max_epochs == 1) return (kLeft + kRight) / 2.0;
        return kLeft + (kRight - kLeft) * static_cast<double>(e) /
                           static_cast<double>(max_epochs - 1);
    };
    const auto y_of = [&](double error) { return kTop + (kBottom - kTop) * (1.0 - error); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_coord(kWidth) +
           "\" height=\"" + fmt_coord(kHeight) + "\" viewBox=\"0 0 " + fmt_coord(kWidth) + " " +
           fmt_coord(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes with y ticks every 0.25 of the error range.
    svg += "<line x1=\"" + fmt_coord(kLeft) + "\" y1=\"" + fmt_coord(kTop) + "\" x2=\"" +
           fmt_coord(kLeft) + "\" y2=\"" + fmt_coord(kBottom) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt_coord(kLeft) + "\" y1=\"" + fmt_coord(kBottom) + "\" x2=\"" +
           fmt_coord(kRight) + "\" y2=\"" + fmt_coord(kBottom) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = 0.25 * i;
        const double y = y_of(v);
        svg += "<line x1=\"" + fmt_coord(kLeft - 4) + "\" y1=\"" + fmt_coord(y) + "\" x2=\"" +
               fmt_coord(kLeft) + "\" y2=\"" + fmt_coord(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt_coord(kLeft - 8) + "\" y=\"" + fmt_coord(y + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + fmt_coord(v) + "</text>\n";
    }
    svg += "<text x=\"" + fmt_coord((kLeft + kRight) / 2) + "\" y=\"" +
           fmt_coord(kBottom + 32) +
           "\" font-size=\"13\" text-anchor=\"middle\">epoch</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt_coord((kTop + kBottom) / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt_coord((kTop + kBottom) / 2) + ")\">target error</text>\n";
    svg += "<text x=\"" + fmt_coord(kLeft) + "\" y=\"" + fmt_coord(kBottom + 16) +
           "\" font-size=\"12\" text-anchor=\"middle\">0</text>\n";
    svg += "<text x=\"" + fmt_coord(kRight) + "\" y=\"" + fmt_coord(kBottom + 16) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + std::to_string(max_epochs - 1) +
           "</text>\n";

    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const auto& records = outcomes[i].result.log.records;
        if (!records.empty()) {
            std::string points;
            for (std::size_t e = 0; e < records.size(); ++e) {
                if (e) points += ' ';
                points += fmt_coord(x_of(e)) + "," +
                          fmt_coord(y_of(1.0 - records[e].target_accuracy));
            }
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        }
        svg += "<text x=\"" + fmt_coord(kRight - 4) + "\" y=\"" +
               fmt_coord(kTop + 14 + 16 * static_cast<double>(i)) +
               "\" font-size=\"12\" text-anchor=\"end\" fill=\"" + color + "\">seed " +
               std::to_string(outcomes[i].seed) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace

std::string resolve_output_dir(const ExperimentConfig& cfg) {
    const char* env = std::getenv("SDDA_OUT_DIR");
    if (env != nullptr && env[0] != '\0') return env;
    return cfg.output.dir;
}

std::vector<std::size_t> resolve_layer_dims(const ExperimentConfig& cfg, std::size_t data_dim,
                                            std::size_t classes) {
    if (classes < 2) throw config_error("data must contain at least two classes");
    if (cfg.layer_dims_auto) return {data_dim, 16, 16, 8, classes};
    const std::vector<std::size_t>& dims = cfg.trainer.layer_dims;
    if (dims.front() != data_dim)
        throw config_error("layer_dims input width " + std::to_string(dims.front()) +
                           " does not match data dim " + std::to_string(data_dim));
    if (dims.back() < classes)
        throw config_error("layer_dims output width " + std::to_string(dims.back()) +
                           " is smaller than the class count " + std::to_string(classes));
    return dims;
}

std::string metrics_csv_text(const TrainLog& log) {
    std::string text = std::string(kMetricsHeader) + "\n";
    for (const EpochRecord& r : log.records) {
        text += std::to_string(r.epoch);
        text += ',' + format_g17(r.loss_total);
        text += ',' + format_g17(r.loss_cls);
        text += ',' + format_g17(r.loss_metric);
        text += ',' + format_g17(r.loss_intra);
        text += ',' + format_g17(r.loss_inter);
        text += ',' + format_g17(r.source_accuracy);
        text += ',' + format_g17(r.target_accuracy);
        text += ',' + format_g17(r.mean_source_feature_norm);
        text += ',' + format_g17(r.mean_target_feature_norm);
        text += ',' + format_g17(r.schedule_factor);
        text += '\n';
    }
    return text;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& err) {
    try {
        LabeledDataset csv_source, csv_target;
        if (cfg.data.from_csv) {
            csv_source = load_csv(cfg.data.source_csv, true);
            csv_target = load_csv(cfg.data.target_csv, true);
        }

        const bool sweep = !cfg.output.seeds.empty();
        std::vector<std::uint64_t> seeds = cfg.output.seeds;
        if (seeds.empty()) seeds.push_back(cfg.trainer.seed);

        std::vector<SeedOutcome> outcomes(seeds.size());
        std::vector<std::exception_ptr> failures(seeds.size());
        std::atomic<std::size_t> cursor{0};

        const auto work = [&](std::size_t i) {
            SeedOutcome& oc = outcomes[i];
            oc.seed = seeds[i];
            if (cfg.data.from_csv) {
                oc.source = csv_source;
                oc.target = csv_target;
            } else {
                DomainShiftSpec spec = cfg.data.spec;
                if (sweep) spec.seed = seeds[i];
                DatasetPair pair = generate_pair(spec);
                oc.source = std::move(pair.source);
                oc.target = std::move(pair.target);
            }
            TrainerConfig tc = cfg.trainer;
            if (sweep) tc.seed = seeds[i];
            tc.layer_dims = resolve_layer_dims(cfg, oc.source.dim(), class_count_of(oc.source));
            oc.resolved = tc;
            oc.result = train(tc, oc.source, oc.target);
        };

        const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
        const std::size_t workers = std::min<std::size_t>(hw, seeds.size());
        if (workers <= 1) {
            for (std::size_t i = 0; i < seeds.size(); ++i) work(i);
        } else {
            const auto runner = [&] {
                while (true) {
                    const std::size_t i = cursor.fetch_add(1);
                    if (i >= seeds.size()) break;
                    try {
                        work(i);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(runner);
            for (std::thread& t : pool) t.join();
            for (const std::exception_ptr& e : failures)
                if (e) std::rethrow_exception(e);
        }

        const fs::path dir = resolve_output_dir(cfg);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw io_error("cannot create output directory " + dir.string());

        for (const SeedOutcome& oc : outcomes) {
            write_text_file(dir / ("metrics_" + std::to_string(oc.seed) + ".csv"),
                            metrics_csv_text(oc.result.log));
            if (cfg.output.emit_features && !oc.result.aborted)
                write_text_file(dir / ("features_" + std::to_string(oc.seed) + ".csv"),
                                features_csv_text(oc.result.params, oc.source, oc.target));
        }
        if (cfg.output.emit_svg)
            write_text_file(dir / "convergence.svg", convergence_svg(outcomes));

        nlohmann::ordered_json summary;
        summary["seeds"] = nlohmann::ordered_json::array();
        std::vector<double> finals_src, finals_tgt;
        for (const SeedOutcome& oc : outcomes) {
            nlohmann::ordered_json entry;
            entry["seed"] = oc.seed;
            entry["aborted"] = oc.result.aborted;
            entry["epochs_completed"] = oc.result.log.records.size();
            if (!oc.result.log.records.empty()) {
                const EpochRecord& last = oc.result.log.records.back();
                entry["source_accuracy"] = last.source_accuracy;
                entry["target_accuracy"] = last.target_accuracy;
                if (!oc.result.aborted) {
                    finals_src.push_back(last.source_accuracy);
                    finals_tgt.push_back(last.target_accuracy);
                }
            }
            summary["seeds"].push_back(entry);
        }
        const auto mean_of = [](const std::vector<double>& v) {
            double m = 0.0;
            for (double x : v) m += x;
            return m / static_cast<double>(v.size());
        };
        const auto stddev_of = [&](const std::vector<double>& v) {
            const double m = mean_of(v);
            double s = 0.0;
            for (double x : v) s += (x - m) * (x - m);
            return std::sqrt(s / static_cast<double>(v.size()));
        };
        if (!finals_tgt.empty()) {
            summary["source_accuracy_mean"] = mean_of(finals_src);
            summary["source_accuracy_stddev"] = stddev_of(finals_src);
            summary["target_accuracy_mean"] = mean_of(finals_tgt);
            summary["target_accuracy_stddev"] = stddev_of(finals_tgt);
        }
        write_text_file(dir / "summary.json", summary.dump(2) + "\n");

        for (const SeedOutcome& oc : outcomes) {
            if (oc.result.aborted) {
                err << "numeric failure (seed " << oc.seed << "): " << oc.result.abort_reason
                    << "\n";
                return 2;
            }
        }
        return 0;
    } catch (const io_error& e) {
        err << "io error: " << e.what() << "\n";
        return 3;
    } catch (const config_error& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const numeric_error& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 2;
    }
}

} // namespace sdda
