#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sdda/config.hpp"
#include "sdda/datagen.hpp"
#include "sdda/errors.hpp"
#include "sdda/experiment.hpp"
#include "sdda/gradcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sdda::io_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt_err(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

int cmd_run(const std::string& config_path) {
    const sdda::ExperimentConfig cfg = sdda::parse_config(read_file(config_path));
    return sdda::run_experiment(cfg, std::cerr);
}

int cmd_gradcheck(const sdda::GradCheckOptions& opts) {
    const sdda::GradCheckReport report = sdda::run_gradcheck(opts);
    for (const sdda::GradCheckEntry& e : report.entries)
        std::cout << e.name << ": max rel err " << fmt_err(e.max_rel_err) << " (worst trial "
                  << e.worst_trial << ") " << (e.passed ? "PASS" : "FAIL") << "\n";
    if (!report.all_passed()) {
        for (const sdda::GradCheckEntry& e : report.entries)
            if (!e.passed)
                std::cerr << "gradcheck failure: " << e.name << " exceeded tolerance "
                          << fmt_err(opts.tolerance) << " at trial " << e.worst_trial
                          << " (seed " << opts.seed << ")\n";
        return kExitNumeric;
    }
    std::cout << "gradcheck: all gradients within " << fmt_err(opts.tolerance) << "\n";
    return kExitOk;
}

int cmd_gen_data(const std::string& config_path, const std::string& prefix) {
    const sdda::ExperimentConfig cfg = sdda::parse_config(read_file(config_path));
    if (cfg.data.from_csv)
        throw sdda::config_error("gen-data needs a generated [data] section, not csv inputs");
    const sdda::DatasetPair pair = sdda::generate_pair(cfg.data.spec);
    const std::string source_path = prefix + "_source.csv";
    const std::string target_path = prefix + "_target.csv";
    sdda::save_csv(source_path, pair.source, true);
    sdda::save_csv(target_path, pair.target, true);
    std::cout << "wrote " << source_path << " (" << pair.source.size() << " rows)\n";
    std::cout << "wrote " << target_path << " (" << pair.target.size() << " rows)\n";
    return kExitOk;
}

int cmd_print_config(const std::string& config_path) {
    const sdda::ExperimentConfig cfg = sdda::parse_config(read_file(config_path));
    std::cout << sdda::print_config(cfg);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Domain-adaptation experiments around the self-similarity consistency metric"};
    app.require_subcommand(1);

    std::string run_config;
    CLI::App* run_cmd = app.add_subcommand("run", "Train per the config and write metrics");
    run_cmd->add_option("config", run_config, "experiment config file")->required();

    sdda::GradCheckOptions gopts;
    bool corrupt = false;
    CLI::App* gc_cmd = app.add_subcommand(
        "gradcheck", "Verify every analytic gradient against finite differences");
    gc_cmd->add_option("--scope", gopts.scope,
                       "all|ssc|coral|mmd|cmd|msm|intra|inter|network|composite")
        ->check([](const std::string& s) {
            return sdda::valid_gradcheck_scope(s) ? std::string{}
                                                  : "unknown scope '" + s + "'";
        });
    gc_cmd->add_option("--trials", gopts.trials, "random points per gradient")
        ->check(CLI::PositiveNumber);
    gc_cmd->add_option("--seed", gopts.seed, "root seed for the random points");
    gc_cmd->add_flag("--corrupt", corrupt)->group("");  // test hook, hidden from help

    std::string gen_config, gen_prefix;
    CLI::App* gen_cmd =
        app.add_subcommand("gen-data", "Generate a source/target pair as csv files");
    gen_cmd->add_option("config", gen_config, "experiment config file")->required();
    gen_cmd->add_option("prefix", gen_prefix, "output path prefix")->required();

    std::string print_config_path;
    CLI::App* print_cmd =
        app.add_subcommand("print-config", "Parse a config and dump every effective value");
    print_cmd->add_option("config", print_config_path, "experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_config);
        if (gc_cmd->parsed()) {
            if (corrupt) gopts.corrupt_scale = 1.01;
            return cmd_gradcheck(gopts);
        }
        if (gen_cmd->parsed()) return cmd_gen_data(gen_config, gen_prefix);
        if (print_cmd->parsed()) return cmd_print_config(print_config_path);
    } catch (const sdda::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const sdda::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const sdda::numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
