#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ncpd/detectors.hpp"

namespace ncpd {

struct ThresholdTable {
    DetectorId detector = DetectorId::cd;
    double threshold = 0.0;
    int n_trials = 0;
    double target_pfa = 0.0;
    double empirical_pfa = 0.0;
    // Null statistics the threshold came from, sorted descending.
    std::vector<double> null_statistics;
};

struct PdCurve {
    DetectorId detector = DetectorId::cd;
    std::vector<double> scnr_db;
    std::vector<double> pd;
    std::vector<double> std_err;  // sqrt(pd (1-pd) / n)
    std::vector<int> n_trials;
};

struct ConvergenceProfile {
    DetectorId detector = DetectorId::rncp;
    // Entry k = mean iterate delta at iteration k+1, averaged over trials.
    std::vector<double> mean_delta_signature;
    std::vector<double> mean_delta_amplitude;
    int n_trials = 0;
};

struct ExperimentResult {
    std::vector<ThresholdTable> thresholds;
    std::vector<PdCurve> curves;
};

// Runs body(0..n-1) on `workers` threads over contiguous index blocks.
// Results must be written to per-index slots; then the outcome is identical
// for any worker count. Rethrows the first exception raised by any worker.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

// Conservative empirical quantile: with the sample sorted descending the
// threshold is the m-th largest value, m = ceil(n pfa), and the strict rule
// "statistic > threshold" yields empirical pfa (m-1)/n <= pfa.
// Returns (threshold, empirical_pfa).
std::pair<double, double> select_threshold(std::vector<double> statistics,
                                           double pfa);

// Statistics of the listed detectors on shared per-trial datasets, indexed
// [detector][trial]. Trial t draws from the stream (seed, phase, t), so all
// detectors see identical data and results are reproducible bit-for-bit
// regardless of worker count.
std::vector<std::vector<double>> collect_statistics(
    const Scenario& scenario, const std::vector<DetectorId>& detectors,
    Hypothesis hyp, double scnr_db, int n_trials, std::uint64_t seed,
    std::uint64_t phase, int workers);

ThresholdTable calibrate_threshold(DetectorId detector,
                                   const ScenarioConfig& cfg, int n_trials,
                                   std::uint64_t seed, int workers = 1);

// Same as calibrate_threshold for several detectors at once; every detector
// is calibrated on the same trial datasets.
std::vector<ThresholdTable> calibrate_thresholds(
    const std::vector<DetectorId>& detectors, const ScenarioConfig& cfg,
    int n_trials, std::uint64_t seed, int workers = 1);

// Fraction of H1 trials whose statistic exceeds the threshold, with the
// binomial standard error. Returns (pd, std_err).
std::pair<double, double> estimate_pd(DetectorId detector,
                                      const ScenarioConfig& cfg,
                                      double threshold, double scnr_db,
                                      int n_trials, std::uint64_t seed,
                                      int workers = 1);

// Average per-iteration estimator deltas over independent trials with the
// jammer on and its azimuth drawn outside the mainlobe at every trial.
ConvergenceProfile convergence_profile(DetectorId detector,
                                       const ScenarioConfig& cfg,
                                       double scnr_db, int n_trials,
                                       std::uint64_t seed, int workers = 1);

// Calibrates every detector once on shared H0 trials, then sweeps the SCNR
// grid with shared H1 trials. Pure function of (cfg, detectors, seed).
// Trial counts of 0 select the defaults: ceil(100/pfa) calibration trials
// and 1000 detection trials per grid point.
ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::vector<DetectorId>& detectors,
                                std::uint64_t seed, int workers = 1,
                                int n_calibration = 0, int n_pd = 0);

}  // namespace ncpd
