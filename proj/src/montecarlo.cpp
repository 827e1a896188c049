#include "ncpd/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "ncpd/rng.hpp"

namespace ncpd {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr std::uint64_t kPhaseCalibration = 0x0c411b7a7eull;
constexpr std::uint64_t kPhaseConvergence = 0x0c077e46e5ull;

std::uint64_t pd_phase(double scnr_db) {
    return mix_keys(0x9D2C5680u, std::bit_cast<std::uint64_t>(scnr_db));
}

DetectorOptions harness_options(const ScenarioConfig& cfg, bool record_trace) {
    DetectorOptions opts;
    opts.max_iterations = cfg.max_iterations;
    opts.init_signature = default_init_signature(
        cfg.target_azimuth_deg * kPi / 180.0, cfg.n_antennas);
    opts.record_trace = record_trace;
    return opts;
}

bool needs_whitening(const std::vector<DetectorId>& detectors) {
    return std::any_of(detectors.begin(), detectors.end(), [](DetectorId d) {
        return d == DetectorId::rncp || d == DetectorId::dncp;
    });
}

int default_calibration_trials(double pfa) {
    return static_cast<int>(std::ceil(100.0 / pfa));
}

}  // namespace

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    if (n <= 0) return;
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }

    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
        const int end =
            static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        pool.emplace_back([&, begin, end] {
            try {
                for (int i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::pair<double, double> select_threshold(std::vector<double> statistics,
                                           double pfa) {
    const int n = static_cast<int>(statistics.size());
    if (!(pfa > 0.0 && pfa < 1.0)) {
        throw std::invalid_argument("select_threshold: pfa must lie in (0, 1)");
    }
    if (n < 1 || static_cast<double>(n) * pfa < 1.0) {
        throw std::invalid_argument(
            "select_threshold: need at least 1/pfa statistics");
    }
    std::sort(statistics.begin(), statistics.end(), std::greater<double>());
    const int m = static_cast<int>(std::ceil(static_cast<double>(n) * pfa));
    const double threshold = statistics[m - 1];
    const double empirical = static_cast<double>(m - 1) / n;
    return {threshold, empirical};
}

std::vector<std::vector<double>> collect_statistics(
    const Scenario& scenario, const std::vector<DetectorId>& detectors,
    Hypothesis hyp, double scnr_db, int n_trials, std::uint64_t seed,
    std::uint64_t phase, int workers) {
    const ScenarioConfig& cfg = scenario.config();
    const DetectorOptions opts = harness_options(cfg, /*record_trace=*/false);
    const bool whitening = needs_whitening(detectors);

    std::vector<std::vector<double>> stats(detectors.size());
    for (auto& s : stats) s.resize(n_trials);

    parallel_for(n_trials, workers, [&](int trial) {
        auto rng = make_stream(seed, phase, static_cast<std::uint64_t>(trial));
        const Dataset data = scenario.synthesize(hyp, scnr_db, rng);

        std::optional<HermitianCovariance> m_hat;
        WhitenedData whitened;
        auto ensure_m_hat = [&]() {
            if (!m_hat) m_hat.emplace(sample_covariance(data.r_secondary));
        };
        if (whitening) {
            ensure_m_hat();
            whitened = whiten(*m_hat, data, scenario.target_steering());
        }

        for (std::size_t d = 0; d < detectors.size(); ++d) {
            switch (detectors[d]) {
                case DetectorId::cd:
                    stats[d][trial] = cd_core_statistic(
                        data.z_cut, data.truth.jammer,
                        scenario.clutter_plus_noise(),
                        scenario.target_steering());
                    break;
                case DetectorId::rncp:
                    stats[d][trial] = rncp_statistic(whitened, opts).statistic;
                    break;
                case DetectorId::dncp:
                    stats[d][trial] = dncp_statistic(whitened, opts).statistic;
                    break;
                case DetectorId::amf:
                    ensure_m_hat();
                    stats[d][trial] = amf_statistic(
                        data.z_cut, scenario.target_steering(), *m_hat);
                    break;
            }
        }
    });
    return stats;
}

std::vector<ThresholdTable> calibrate_thresholds(
    const std::vector<DetectorId>& detectors, const ScenarioConfig& cfg,
    int n_trials, std::uint64_t seed, int workers) {
    if (static_cast<double>(n_trials) * cfg.pfa < 1.0) {
        throw std::invalid_argument(
            "calibrate_threshold: n_trials must be at least 1/pfa");
    }
    const Scenario scenario(cfg);
    auto stats = collect_statistics(scenario, detectors, Hypothesis::h0, 0.0,
                                    n_trials, seed, kPhaseCalibration, workers);

    std::vector<ThresholdTable> tables(detectors.size());
    for (std::size_t d = 0; d < detectors.size(); ++d) {
        ThresholdTable& table = tables[d];
        table.detector = detectors[d];
        table.n_trials = n_trials;
        table.target_pfa = cfg.pfa;
        std::tie(table.threshold, table.empirical_pfa) =
            select_threshold(stats[d], cfg.pfa);
        std::sort(stats[d].begin(), stats[d].end(), std::greater<double>());
        table.null_statistics = std::move(stats[d]);
    }
    return tables;
}

ThresholdTable calibrate_threshold(DetectorId detector,
                                   const ScenarioConfig& cfg, int n_trials,
                                   std::uint64_t seed, int workers) {
    return calibrate_thresholds({detector}, cfg, n_trials, seed, workers)[0];
}

std::pair<double, double> estimate_pd(DetectorId detector,
                                      const ScenarioConfig& cfg,
                                      double threshold, double scnr_db,
                                      int n_trials, std::uint64_t seed,
                                      int workers) {
    if (n_trials < 1) {
        throw std::invalid_argument("estimate_pd: n_trials must be >= 1");
    }
    const Scenario scenario(cfg);
    const auto stats =
        collect_statistics(scenario, {detector}, Hypothesis::h1, scnr_db,
                           n_trials, seed, pd_phase(scnr_db), workers);
    int hits = 0;
    for (double s : stats[0]) {
        if (s > threshold) ++hits;
    }
    const double pd = static_cast<double>(hits) / n_trials;
    const double std_err = std::sqrt(pd * (1.0 - pd) / n_trials);
    return {pd, std_err};
}

ConvergenceProfile convergence_profile(DetectorId detector,
                                       const ScenarioConfig& cfg,
                                       double scnr_db, int n_trials,
                                       std::uint64_t seed, int workers) {
    if (detector != DetectorId::rncp && detector != DetectorId::dncp) {
        throw std::invalid_argument(
            "convergence_profile: only the alternating detectors iterate");
    }
    if (n_trials < 1) {
        throw std::invalid_argument("convergence_profile: n_trials must be >= 1");
    }

    ScenarioConfig profiled = cfg;
    profiled.jammer_present = true;
    profiled.jammer_azimuth_random = true;
    const Scenario scenario(profiled);
    const DetectorOptions opts =
        harness_options(profiled, /*record_trace=*/true);

    const int iters = profiled.max_iterations;
    std::vector<std::vector<double>> dsig(n_trials), damp(n_trials);
    parallel_for(n_trials, workers, [&](int trial) {
        auto rng = make_stream(seed, kPhaseConvergence,
                               static_cast<std::uint64_t>(trial));
        const Dataset data = scenario.synthesize(Hypothesis::h1, scnr_db, rng);
        const auto m_hat = sample_covariance(data.r_secondary);
        const auto whitened = whiten(m_hat, data, scenario.target_steering());
        const DetectorOutcome outcome = detector == DetectorId::rncp
                                            ? rncp_statistic(whitened, opts)
                                            : dncp_statistic(whitened, opts);
        dsig[trial] = outcome.delta_signature;
        damp[trial] = outcome.delta_amplitude;
    });

    ConvergenceProfile profile;
    profile.detector = detector;
    profile.n_trials = n_trials;
    profile.mean_delta_signature.assign(iters, 0.0);
    profile.mean_delta_amplitude.assign(iters, 0.0);
    for (int trial = 0; trial < n_trials; ++trial) {
        for (int k = 0; k < iters; ++k) {
            profile.mean_delta_signature[k] += dsig[trial][k];
            profile.mean_delta_amplitude[k] += damp[trial][k];
        }
    }
    for (int k = 0; k < iters; ++k) {
        profile.mean_delta_signature[k] /= n_trials;
        profile.mean_delta_amplitude[k] /= n_trials;
    }
    return profile;
}

ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::vector<DetectorId>& detectors,
                                std::uint64_t seed, int workers,
                                int n_calibration, int n_pd) {
    cfg.validate();
    if (detectors.empty()) {
        throw std::invalid_argument("run_experiment: no detectors selected");
    }
    if (n_calibration <= 0) n_calibration = default_calibration_trials(cfg.pfa);
    if (n_pd <= 0) n_pd = 1000;
    if (static_cast<double>(n_calibration) * cfg.pfa < 1.0) {
        throw std::invalid_argument(
            "run_experiment: n_calibration must be at least 1/pfa");
    }

    const Scenario scenario(cfg);

    ExperimentResult result;
    result.thresholds.resize(detectors.size());
    result.curves.resize(detectors.size());

    auto null_stats =
        collect_statistics(scenario, detectors, Hypothesis::h0, 0.0,
                           n_calibration, seed, kPhaseCalibration, workers);
    for (std::size_t d = 0; d < detectors.size(); ++d) {
        ThresholdTable& table = result.thresholds[d];
        table.detector = detectors[d];
        table.n_trials = n_calibration;
        table.target_pfa = cfg.pfa;
        std::tie(table.threshold, table.empirical_pfa) =
            select_threshold(null_stats[d], cfg.pfa);
        std::sort(null_stats[d].begin(), null_stats[d].end(),
                  std::greater<double>());
        table.null_statistics = std::move(null_stats[d]);

        result.curves[d].detector = detectors[d];
    }

    for (double scnr : cfg.scnr_grid_db) {
        const auto stats =
            collect_statistics(scenario, detectors, Hypothesis::h1, scnr, n_pd,
                               seed, pd_phase(scnr), workers);
        for (std::size_t d = 0; d < detectors.size(); ++d) {
            int hits = 0;
            for (double s : stats[d]) {
                if (s > result.thresholds[d].threshold) ++hits;
            }
            const double pd = static_cast<double>(hits) / n_pd;
            PdCurve& curve = result.curves[d];
            curve.scnr_db.push_back(scnr);
            curve.pd.push_back(pd);
            curve.std_err.push_back(std::sqrt(pd * (1.0 - pd) / n_pd));
            curve.n_trials.push_back(n_pd);
        }
    }
    return result;
}

}  // namespace ncpd
