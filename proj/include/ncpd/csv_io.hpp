#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ncpd/montecarlo.hpp"

namespace ncpd {

// All emitted text is byte-deterministic given its inputs: 6 significant
// digits, '.' decimal separator, '\n' line endings, rows fully ordered.

std::string format_number(double value);  // %.6g with nan/inf spelled out

// Header `scnr_db,detector,pd,std_err,n_trials`; rows sorted by
// (detector id, scnr_db ascending).
std::string format_curves_csv(const std::vector<PdCurve>& curves);

// Strict reader for the format above (round-trip checks, plotting).
std::vector<PdCurve> parse_curves_csv(const std::string& text);

// Header `detector,threshold,n_trials,target_pfa,empirical_pfa`.
std::string format_thresholds_csv(const std::vector<ThresholdTable>& tables);

// Header `iteration,detector,mean_delta_signature,mean_delta_amplitude,
// n_trials`; one row per iteration per detector.
std::string format_convergence_csv(const std::vector<ConvergenceProfile>& profiles);

// Self-contained matplotlib script that reads the named CSV next to it.
std::string plot_script_text(const std::string& csv_filename,
                             const std::string& title);

struct ExperimentManifest {
    std::uint64_t config_digest = 0;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::map<std::string, std::string> outputs;     // role -> path
    std::map<std::string, double> timings_ms;       // phase -> wall clock
};

std::string manifest_json(const ExperimentManifest& manifest);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ncpd
