#include <doctest.h>

#include <atomic>
#include <cmath>

#include "ncpd/montecarlo.hpp"
#include "ncpd/rng.hpp"

using namespace ncpd;

namespace {

// Small scenario used to keep Monte Carlo unit tests fast.
ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.n_antennas = 4;
    cfg.k_secondary = 6;
    cfg.h_left = 1;
    cfg.h_right = 1;
    cfg.pfa = 0.1;
    cfg.scnr_grid_db = {0.0, 10.0};
    return cfg;
}

}  // namespace

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, 8, [&](int i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);

    parallel_for(0, 4, [](int) { FAIL("no work expected"); });

    CHECK_THROWS_AS(parallel_for(16, 4,
                                 [](int i) {
                                     if (i == 7) throw NumericError("boom");
                                 }),
                    NumericError);
}

TEST_CASE("threshold rule follows the conservative quantile") {
    const std::vector<double> stats = {4.0, 3.0, 2.0, 1.0};

    auto [eta_half, pfa_half] = select_threshold(stats, 0.5);
    CHECK(eta_half == doctest::Approx(3.0));
    CHECK(pfa_half == doctest::Approx(0.25));

    auto [eta_quarter, pfa_quarter] = select_threshold(stats, 0.25);
    CHECK(eta_quarter == doctest::Approx(4.0));
    CHECK(pfa_quarter == doctest::Approx(0.0));

    CHECK_THROWS_AS(select_threshold({1.0, 2.0}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(select_threshold(stats, 0.0), std::invalid_argument);
}

TEST_CASE("calibration rejects undersized runs") {
    const ScenarioConfig cfg = small_config();
    CHECK_THROWS_AS(calibrate_threshold(DetectorId::amf, cfg, 5, 1),
                    std::invalid_argument);
}

TEST_CASE("detection probability saturates at the threshold extremes") {
    const ScenarioConfig cfg = small_config();
    auto [pd_all, err_all] =
        estimate_pd(DetectorId::amf, cfg, -1e12, 10.0, 50, 3);
    CHECK(pd_all == doctest::Approx(1.0));
    CHECK(err_all == doctest::Approx(0.0));

    auto [pd_none, err_none] =
        estimate_pd(DetectorId::amf, cfg, 1e12, 10.0, 50, 3);
    CHECK(pd_none == doctest::Approx(0.0));
    CHECK(err_none == doctest::Approx(0.0));
}

TEST_CASE("independent validation reproduces the target false-alarm rate") {
    ScenarioConfig cfg = small_config();
    cfg.pfa = 0.05;
    // Calibrate on a large sample so the threshold's own quantile noise is
    // small against the validation-side binomial band.
    const int n_cal = 20000;
    const int n_val = 4000;
    const auto table = calibrate_threshold(DetectorId::amf, cfg, n_cal, 11);
    CHECK(table.empirical_pfa <= cfg.pfa);
    CHECK(static_cast<int>(table.null_statistics.size()) == n_cal);

    const Scenario scenario(cfg);
    const auto fresh = collect_statistics(scenario, {DetectorId::amf},
                                          Hypothesis::h0, 0.0, n_val,
                                          /*seed=*/20240601, /*phase=*/77, 1);
    int false_alarms = 0;
    for (double s : fresh[0]) {
        if (s > table.threshold) ++false_alarms;
    }
    const double empirical = static_cast<double>(false_alarms) / n_val;
    // Both the threshold and the validation estimate carry binomial noise.
    const double combined =
        std::sqrt(cfg.pfa * (1.0 - cfg.pfa) * (1.0 / n_val + 1.0 / n_cal));
    CHECK(std::abs(empirical - cfg.pfa) <= 3.0 * combined);
}

TEST_CASE("clairvoyant detection grows with target strength") {
    ScenarioConfig cfg = small_config();
    cfg.scnr_grid_db = {0.0, 6.0, 12.0, 18.0};
    const auto table = calibrate_threshold(DetectorId::cd, cfg, 1000, 5);
    double previous = -1.0;
    for (double scnr : cfg.scnr_grid_db) {
        const auto [pd, err] =
            estimate_pd(DetectorId::cd, cfg, table.threshold, scnr, 800, 5);
        CHECK(pd >= previous - 3.0 * std::max(err, 0.02));
        previous = pd;
    }
    // The sweep has to leave the floor by its top point.
    CHECK(previous > 0.5);
}

TEST_CASE("convergence profile is finite, nonnegative and shrinking") {
    ScenarioConfig cfg = small_config();
    const auto profile =
        convergence_profile(DetectorId::rncp, cfg, 20.0, 64, 9);
    CHECK(static_cast<int>(profile.mean_delta_signature.size()) ==
          cfg.max_iterations);
    for (double d : profile.mean_delta_signature) {
        CHECK(std::isfinite(d));
        CHECK(d >= 0.0);
    }
    CHECK(profile.mean_delta_signature.back() <
          profile.mean_delta_signature.front());

    const auto dprofile =
        convergence_profile(DetectorId::dncp, cfg, 20.0, 64, 9);
    CHECK(dprofile.mean_delta_amplitude.back() <
          dprofile.mean_delta_amplitude.front());

    CHECK_THROWS_AS(convergence_profile(DetectorId::amf, cfg, 20.0, 8, 9),
                    std::invalid_argument);
}

TEST_CASE("experiments are reproducible for any worker count") {
    const ScenarioConfig cfg = small_config();
    const std::vector<DetectorId> detectors{DetectorId::cd, DetectorId::rncp,
                                            DetectorId::dncp, DetectorId::amf};

    const auto serial = run_experiment(cfg, detectors, 31, 1, 200, 150);
    const auto threaded = run_experiment(cfg, detectors, 31, 4, 200, 150);
    const auto repeat = run_experiment(cfg, detectors, 31, 1, 200, 150);

    for (std::size_t d = 0; d < detectors.size(); ++d) {
        CHECK(serial.thresholds[d].threshold ==
              threaded.thresholds[d].threshold);
        CHECK(serial.thresholds[d].threshold == repeat.thresholds[d].threshold);
        for (std::size_t i = 0; i < serial.curves[d].pd.size(); ++i) {
            CHECK(serial.curves[d].pd[i] == threaded.curves[d].pd[i]);
            CHECK(serial.curves[d].pd[i] == repeat.curves[d].pd[i]);
        }
    }
}

TEST_CASE("standalone calibration matches the composed experiment") {
    const ScenarioConfig cfg = small_config();
    const std::vector<DetectorId> detectors{DetectorId::rncp, DetectorId::amf};
    const auto result = run_experiment(cfg, detectors, 77, 2, 300, 100);
    for (std::size_t d = 0; d < detectors.size(); ++d) {
        const auto standalone =
            calibrate_threshold(detectors[d], cfg, 300, 77, 2);
        CHECK(standalone.threshold == result.thresholds[d].threshold);
        CHECK(standalone.empirical_pfa == result.thresholds[d].empirical_pfa);
    }
}

TEST_CASE("detectors see identical trial data within a phase") {
    const ScenarioConfig cfg = small_config();
    const Scenario scenario(cfg);
    // The clairvoyant statistic depends only on the dataset, so evaluating
    // it alone and alongside other detectors must give identical values.
    const auto alone = collect_statistics(scenario, {DetectorId::cd},
                                          Hypothesis::h1, 10.0, 32, 5, 42, 1);
    const auto shared = collect_statistics(
        scenario, {DetectorId::amf, DetectorId::cd, DetectorId::rncp},
        Hypothesis::h1, 10.0, 32, 5, 42, 2);
    for (int t = 0; t < 32; ++t) {
        CHECK(alone[0][t] == shared[1][t]);
    }
}
