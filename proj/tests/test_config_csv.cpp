#include <doctest.h>

#include <cmath>

#include "ncpd/config.hpp"
#include "ncpd/csv_io.hpp"

using namespace ncpd;

TEST_CASE("empty config text yields the documented defaults") {
    const ScenarioConfig cfg = parse_config_text("");
    CHECK(cfg.n_antennas == 8);
    CHECK(cfg.k_secondary == 12);
    CHECK(cfg.h_left == 10);
    CHECK(cfg.h_right == 10);
    CHECK(cfg.noise_power == 1.0);
    CHECK(cfg.cnr_db == 20.0);
    CHECK(cfg.jnr_db == 30.0);
    CHECK(cfg.clutter_rho == 0.9);
    CHECK(cfg.jammer_azimuth_deg == 35.0);
    CHECK(cfg.jammer_present);
    CHECK(cfg.pfa == 1e-2);
    CHECK(cfg.max_iterations == 10);
}

TEST_CASE("invalid values are reported with their field") {
    try {
        parse_config_text("clutter_rho = 1.2\n");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "clutter_rho");
    }

    try {
        parse_config_text("k_secondary = 7\n");  // below the default N = 8
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "k_secondary");
    }
}

TEST_CASE("malformed lines carry their line number") {
    try {
        parse_config_text("n_antennas = 8\nnot a pair\n");
        FAIL("expected ConfigParseError");
    } catch (const ConfigParseError& e) {
        CHECK(e.line() == 2);
    }

    try {
        parse_config_text("unknown_key = 3\n");
        FAIL("expected ConfigParseError");
    } catch (const ConfigParseError& e) {
        CHECK(e.field() == "unknown_key");
    }

    try {
        parse_config_text("cnr_db = twenty\n");
        FAIL("expected ConfigParseError");
    } catch (const ConfigParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.field() == "cnr_db");
    }
}

TEST_CASE("comments, sections and grids parse") {
    const std::string text =
        "# experiment\n"
        "[scenario]\n"
        "n_antennas = 4   ; inline note\n"
        "k_secondary = 6\n"
        "scnr_grid_db = 0:5:20\n";
    const ScenarioConfig cfg = parse_config_text(text);
    CHECK(cfg.n_antennas == 4);
    CHECK(cfg.scnr_grid_db == std::vector<double>{0.0, 5.0, 10.0, 15.0, 20.0});

    const ScenarioConfig listed =
        parse_config_text("scnr_grid_db = -3, 0, 2.5\n");
    CHECK(listed.scnr_grid_db == std::vector<double>{-3.0, 0.0, 2.5});
}

TEST_CASE("serialization round-trips and the digest tracks every field") {
    ScenarioConfig cfg;
    cfg.n_antennas = 6;
    cfg.k_secondary = 9;
    cfg.scnr_grid_db = {1.0, 2.0, 4.0};
    cfg.jammer_azimuth_random = true;
    cfg.rng_seed = 987654321;

    const ScenarioConfig parsed = parse_config_text(serialize_config(cfg));
    CHECK(parsed == cfg);
    CHECK(config_digest(parsed) == config_digest(cfg));

    const auto base_digest = config_digest(cfg);
    auto mutated = cfg;
    mutated.n_antennas = 5;
    mutated.k_secondary = 8;
    CHECK(config_digest(mutated) != base_digest);
    mutated = cfg;
    mutated.pfa = 0.2;
    CHECK(config_digest(mutated) != base_digest);
    mutated = cfg;
    mutated.jammer_present = false;
    CHECK(config_digest(mutated) != base_digest);
    mutated = cfg;
    mutated.scnr_grid_db.push_back(8.0);
    CHECK(config_digest(mutated) != base_digest);
    mutated = cfg;
    mutated.rng_seed += 1;
    CHECK(config_digest(mutated) != base_digest);
}

TEST_CASE("curve CSV layout, ordering and round trip") {
    PdCurve rncp;
    rncp.detector = DetectorId::rncp;
    rncp.scnr_db = {10.0, 0.0};
    rncp.pd = {0.8125, 0.1230545};
    rncp.std_err = {0.0123456, 0.007};
    rncp.n_trials = {2000, 2000};

    PdCurve amf;
    amf.detector = DetectorId::amf;
    amf.scnr_db = {0.0, 10.0};
    amf.pd = {0.05, 0.25};
    amf.std_err = {0.001, 0.002};
    amf.n_trials = {2000, 2000};

    const std::string csv = format_curves_csv({rncp, amf});
    CHECK(csv.rfind("scnr_db,detector,pd,std_err,n_trials\n", 0) == 0);

    // One header plus four rows, grouped by detector then ascending SCNR.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.find("0,amf,") < csv.find("10,amf,"));
    CHECK(csv.find("10,amf,") < csv.find("0,rncp,"));
    CHECK(csv.find("0,rncp,") < csv.find("10,rncp,"));

    const auto parsed = parse_curves_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].detector == DetectorId::amf);
    CHECK(parsed[1].detector == DetectorId::rncp);
    // Values survive to six significant digits.
    CHECK(parsed[1].pd[1] == doctest::Approx(0.8125).epsilon(1e-6));
    CHECK(parsed[1].pd[0] == doctest::Approx(0.1230545).epsilon(1e-6));
    CHECK(parsed[1].std_err[1] ==
          doctest::Approx(0.0123456).epsilon(1e-6));

    CHECK_THROWS(parse_curves_csv("wrong,header\n1,2\n"));
}

TEST_CASE("threshold and convergence CSV formats") {
    ThresholdTable table;
    table.detector = DetectorId::dncp;
    table.threshold = 12.345678;
    table.n_trials = 10000;
    table.target_pfa = 0.01;
    table.empirical_pfa = 0.0099;
    const std::string csv = format_thresholds_csv({table});
    CHECK(csv ==
          "detector,threshold,n_trials,target_pfa,empirical_pfa\n"
          "dncp,12.3457,10000,0.01,0.0099\n");

    ConvergenceProfile profile;
    profile.detector = DetectorId::rncp;
    profile.mean_delta_signature = {1.5, 0.25};
    profile.mean_delta_amplitude = {0.5, 0.125};
    profile.n_trials = 1000;
    const std::string conv = format_convergence_csv({profile});
    CHECK(conv ==
          "iteration,detector,mean_delta_signature,mean_delta_amplitude,"
          "n_trials\n"
          "1,rncp,1.5,0.5,1000\n"
          "2,rncp,0.25,0.125,1000\n");
}

TEST_CASE("manifest and plot script are self-describing") {
    ExperimentManifest manifest;
    manifest.config_digest = 0xdeadbeef;
    manifest.seed = 7;
    manifest.outputs["curves"] = "figure5_curves.csv";
    manifest.timings_ms["calibration"] = 1234.5;
    const std::string json = manifest_json(manifest);
    CHECK(json.find("\"00000000deadbeef\"") != std::string::npos);
    CHECK(json.find("figure5_curves.csv") != std::string::npos);
    CHECK(json.find("tool_version") != std::string::npos);

    const std::string script = plot_script_text("curves.csv", "demo");
    CHECK(script.find("curves.csv") != std::string::npos);
    CHECK(script.find("matplotlib") != std::string::npos);
}
