// Command line front end: threshold calibration, Pd sweeps, convergence
// profiles and preset experiment reproductions, all emitting deterministic
// CSV artifacts plus a plot script.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ncpd/config.hpp"
#include "ncpd/csv_io.hpp"
#include "ncpd/montecarlo.hpp"
#include "ncpd/version.hpp"

namespace fs = std::filesystem;
using namespace ncpd;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::string detectors = "cd,rncp,dncp,amf";
    std::optional<std::uint64_t> seed;
    std::optional<double> pfa;
    int workers = 0;
};

struct SweepFlags {
    std::optional<double> scnr_min;
    std::optional<double> scnr_max;
    std::optional<double> scnr_step;
    int trials_pd = 0;
    int trials_cal = 0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path,
                    "Experiment config file (key = value lines)");
    cmd->add_option("--seed", flags.seed, "RNG seed override");
    cmd->add_option("--pfa", flags.pfa, "Target false-alarm probability");
    cmd->add_option("--workers", flags.workers,
                    "Worker threads (0 = hardware concurrency)");
    cmd->add_option("--out-dir", flags.out_dir, "Output directory");
    cmd->add_option("--detectors", flags.detectors,
                    "Comma separated detector list (cd,rncp,dncp,amf)");
}

void add_sweep_flags(CLI::App* cmd, SweepFlags& flags) {
    cmd->add_option("--scnr-min", flags.scnr_min, "Grid start [dB]");
    cmd->add_option("--scnr-max", flags.scnr_max, "Grid end [dB]");
    cmd->add_option("--scnr-step", flags.scnr_step, "Grid step [dB]");
    cmd->add_option("--trials-pd", flags.trials_pd,
                    "Detection trials per grid point (default 1000)");
    cmd->add_option("--trials-cal", flags.trials_cal,
                    "Calibration trials (default ceil(100/pfa))");
}

ScenarioConfig load_config(const CommonFlags& flags) {
    ScenarioConfig cfg = flags.config_path.empty()
                             ? ScenarioConfig{}
                             : parse_config_file(flags.config_path);
    if (flags.seed) cfg.rng_seed = *flags.seed;
    if (flags.pfa) cfg.pfa = *flags.pfa;
    cfg.validate();
    return cfg;
}

std::vector<DetectorId> parse_detector_list(const std::string& csv) {
    std::vector<DetectorId> out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ',')) {
        const auto detector = parse_detector(item);
        if (!detector) {
            throw CLI::ValidationError("--detectors",
                                       "unknown detector '" + item + "'");
        }
        out.push_back(*detector);
    }
    if (out.empty()) {
        throw CLI::ValidationError("--detectors", "empty detector list");
    }
    return out;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int default_trials_cal(double pfa) {
    return static_cast<int>(std::ceil(100.0 / pfa));
}

void apply_grid_flags(ScenarioConfig& cfg, const SweepFlags& flags) {
    if (!flags.scnr_min && !flags.scnr_max && !flags.scnr_step) return;
    const double lo = flags.scnr_min.value_or(cfg.scnr_grid_db.front());
    const double hi = flags.scnr_max.value_or(cfg.scnr_grid_db.back());
    const double step = flags.scnr_step.value_or(2.0);
    if (!(step > 0.0) || hi < lo) {
        throw CLI::ValidationError("--scnr-min/max/step",
                                   "need step > 0 and max >= min");
    }
    cfg.scnr_grid_db.clear();
    for (double s = lo; s <= hi + 1e-9 * step; s += step) {
        cfg.scnr_grid_db.push_back(s);
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - since)
        .count();
}

int run_calibrate(const CommonFlags& common, int trials_cal) {
    const ScenarioConfig cfg = load_config(common);
    const auto detectors = parse_detector_list(common.detectors);
    const int n_cal = trials_cal > 0 ? trials_cal : default_trials_cal(cfg.pfa);
    const int workers = resolve_workers(common.workers);

    const auto started = std::chrono::steady_clock::now();
    const auto tables =
        calibrate_thresholds(detectors, cfg, n_cal, cfg.rng_seed, workers);

    const fs::path dir(common.out_dir);
    fs::create_directories(dir);
    const fs::path csv_path = dir / "thresholds.csv";
    write_text_file(csv_path.string(), format_thresholds_csv(tables));

    ExperimentManifest manifest;
    manifest.config_digest = config_digest(cfg);
    manifest.seed = cfg.rng_seed;
    manifest.tool_version = std::string(version);
    manifest.outputs["thresholds"] = csv_path.filename().string();
    manifest.timings_ms["calibration"] = elapsed_ms(started);
    write_text_file((dir / "manifest.json").string(), manifest_json(manifest));

    for (const auto& t : tables) {
        std::printf("%-8s threshold %.6g  empirical pfa %.6g (%d trials)\n",
                    std::string(detector_id(t.detector)).c_str(), t.threshold,
                    t.empirical_pfa, t.n_trials);
    }
    return 0;
}

// Runs the calibrate-then-sweep experiment and writes
// <stem>_curves.csv, <stem>_thresholds.csv, plot_<stem>.py, <stem>_manifest.json.
int run_sweep_experiment(const CommonFlags& common, const SweepFlags& sweep,
                         ScenarioConfig cfg, const std::string& stem,
                         const std::string& title) {
    apply_grid_flags(cfg, sweep);
    const auto detectors = parse_detector_list(common.detectors);
    const int n_cal =
        sweep.trials_cal > 0 ? sweep.trials_cal : default_trials_cal(cfg.pfa);
    const int n_pd = sweep.trials_pd > 0 ? sweep.trials_pd : 1000;
    const int workers = resolve_workers(common.workers);

    const auto started = std::chrono::steady_clock::now();
    const ExperimentResult result =
        run_experiment(cfg, detectors, cfg.rng_seed, workers, n_cal, n_pd);
    const double total_ms = elapsed_ms(started);

    const fs::path dir(common.out_dir);
    fs::create_directories(dir);
    const std::string curves_name = stem + "_curves.csv";
    const std::string thresholds_name = stem + "_thresholds.csv";
    const std::string plot_name = "plot_" + stem + ".py";
    write_text_file((dir / curves_name).string(),
                    format_curves_csv(result.curves));
    write_text_file((dir / thresholds_name).string(),
                    format_thresholds_csv(result.thresholds));
    write_text_file((dir / plot_name).string(),
                    plot_script_text(curves_name, title));

    ExperimentManifest manifest;
    manifest.config_digest = config_digest(cfg);
    manifest.seed = cfg.rng_seed;
    manifest.tool_version = std::string(version);
    manifest.outputs["curves"] = curves_name;
    manifest.outputs["thresholds"] = thresholds_name;
    manifest.outputs["plot_script"] = plot_name;
    manifest.timings_ms["total"] = total_ms;
    write_text_file((dir / (stem + "_manifest.json")).string(),
                    manifest_json(manifest));

    std::printf("%s (%s): wrote %s\n", stem.c_str(), title.c_str(),
                (dir / curves_name).string().c_str());
    return 0;
}

int run_converge(const CommonFlags& common, const std::string& detector_name,
                 double scnr_db, int trials) {
    const ScenarioConfig cfg = load_config(common);
    const auto detector = parse_detector(detector_name);
    if (!detector ||
        (*detector != DetectorId::rncp && *detector != DetectorId::dncp)) {
        throw CLI::ValidationError("--detector",
                                   "convergence profiling needs rncp or dncp");
    }
    const int workers = resolve_workers(common.workers);

    const auto started = std::chrono::steady_clock::now();
    const auto profile = convergence_profile(*detector, cfg, scnr_db, trials,
                                             cfg.rng_seed, workers);

    const fs::path dir(common.out_dir);
    fs::create_directories(dir);
    const fs::path csv_path = dir / "convergence.csv";
    write_text_file(csv_path.string(), format_convergence_csv({profile}));

    ExperimentManifest manifest;
    manifest.config_digest = config_digest(cfg);
    manifest.seed = cfg.rng_seed;
    manifest.tool_version = std::string(version);
    manifest.outputs["convergence"] = csv_path.filename().string();
    manifest.timings_ms["profiling"] = elapsed_ms(started);
    write_text_file((dir / "manifest.json").string(), manifest_json(manifest));

    std::printf("%s final mean deltas: signature %.3e, amplitude %.3e\n",
                std::string(detector_id(*detector)).c_str(),
                profile.mean_delta_signature.back(),
                profile.mean_delta_amplitude.back());
    return 0;
}

// Preset experiments 5-11: array size / training size / jammer state.
struct FigurePreset {
    int n_antennas;
    int k_secondary;
    bool jammer;
};

std::optional<FigurePreset> figure_preset(int id) {
    switch (id) {
        case 5: return FigurePreset{8, 12, true};
        case 6: return FigurePreset{8, 16, true};
        case 7: return FigurePreset{8, 24, true};
        case 8: return FigurePreset{8, 12, false};
        case 9: return FigurePreset{8, 16, false};
        case 10: return FigurePreset{8, 24, false};
        case 11: return FigurePreset{16, 32, true};
        default: return std::nullopt;
    }
}

int run_reproduce_figure(const CommonFlags& common, const SweepFlags& sweep,
                         int figure_id) {
    const auto preset = figure_preset(figure_id);
    if (!preset) {
        throw CLI::ValidationError(
            "figure", "unknown figure id " + std::to_string(figure_id) +
                          " (supported: 5-11)");
    }
    ScenarioConfig cfg = load_config(common);
    cfg.n_antennas = preset->n_antennas;
    cfg.k_secondary = preset->k_secondary;
    cfg.jammer_present = preset->jammer;
    cfg.validate();

    const std::string stem = "figure" + std::to_string(figure_id);
    const std::string title = "N=" + std::to_string(cfg.n_antennas) +
                              ", K=" + std::to_string(cfg.k_secondary) +
                              (cfg.jammer_present ? ", jammer on"
                                                  : ", jammer off");
    return run_sweep_experiment(common, sweep, cfg, stem, title);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive radar detection against noise-cover-pulse jamming"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    CommonFlags common_cal;
    int trials_cal_only = 0;
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Calibrate detection thresholds");
    add_common_flags(calibrate, common_cal);
    calibrate->add_option("--trials-cal", trials_cal_only,
                          "Calibration trials (default ceil(100/pfa))");

    CommonFlags common_sweep;
    SweepFlags sweep_flags;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Calibrate and sweep detection probability over SCNR");
    add_common_flags(sweep, common_sweep);
    add_sweep_flags(sweep, sweep_flags);

    CommonFlags common_conv;
    std::string conv_detector = "rncp";
    double conv_scnr = 20.0;
    int conv_trials = 1000;
    CLI::App* converge = app.add_subcommand(
        "converge", "Profile the alternating-estimator convergence");
    add_common_flags(converge, common_conv);
    converge->add_option("--detector", conv_detector, "rncp or dncp");
    converge->add_option("--scnr", conv_scnr, "SCNR of the profiled trials [dB]");
    converge->add_option("--trials", conv_trials, "Number of trials");

    CommonFlags common_fig;
    SweepFlags fig_flags;
    int figure_id = 0;
    CLI::App* figure = app.add_subcommand(
        "reproduce-figure", "Run a preset experiment (ids 5-11)");
    figure->add_option("figure", figure_id, "Preset id")->required();
    add_common_flags(figure, common_fig);
    add_sweep_flags(figure, fig_flags);

    try {
        app.parse(argc, argv);
        if (calibrate->parsed()) {
            return run_calibrate(common_cal, trials_cal_only);
        }
        if (sweep->parsed()) {
            const ScenarioConfig cfg = load_config(common_sweep);
            return run_sweep_experiment(common_sweep, sweep_flags, cfg,
                                        "sweep", "Pd versus SCNR");
        }
        if (converge->parsed()) {
            return run_converge(common_conv, conv_detector, conv_scnr,
                                conv_trials);
        }
        if (figure->parsed()) {
            return run_reproduce_figure(common_fig, fig_flags, figure_id);
        }
        return kExitUsage;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const ConfigParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error (%s): %s\n", e.field().c_str(),
                     e.what());
        return kExitValidation;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
