#include "ncpd/csv_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ncpd/version.hpp"

namespace ncpd {

namespace {

struct CurveRow {
    double scnr_db;
    std::string detector;
    double pd;
    double std_err;
    int n_trials;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string item;
    while (std::getline(in, item, ',')) fields.push_back(item);
    return fields;
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

std::string format_curves_csv(const std::vector<PdCurve>& curves) {
    std::vector<CurveRow> rows;
    for (const PdCurve& curve : curves) {
        for (std::size_t i = 0; i < curve.scnr_db.size(); ++i) {
            rows.push_back({curve.scnr_db[i], std::string(detector_id(curve.detector)),
                            curve.pd[i], curve.std_err[i], curve.n_trials[i]});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
        if (a.detector != b.detector) return a.detector < b.detector;
        return a.scnr_db < b.scnr_db;
    });

    std::string out = "scnr_db,detector,pd,std_err,n_trials\n";
    for (const CurveRow& r : rows) {
        out += format_number(r.scnr_db);
        out += ',';
        out += r.detector;
        out += ',';
        out += format_number(r.pd);
        out += ',';
        out += format_number(r.std_err);
        out += ',';
        out += std::to_string(r.n_trials);
        out += '\n';
    }
    return out;
}

std::vector<PdCurve> parse_curves_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "scnr_db,detector,pd,std_err,n_trials") {
        throw std::runtime_error("parse_curves_csv: bad or missing header");
    }
    std::vector<PdCurve> curves;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw std::runtime_error("parse_curves_csv: line " +
                                     std::to_string(line_no) +
                                     ": expected 5 fields");
        }
        const auto detector = parse_detector(fields[1]);
        if (!detector) {
            throw std::runtime_error("parse_curves_csv: line " +
                                     std::to_string(line_no) +
                                     ": unknown detector '" + fields[1] + "'");
        }
        if (curves.empty() || curves.back().detector != *detector) {
            curves.push_back(PdCurve{});
            curves.back().detector = *detector;
        }
        PdCurve& curve = curves.back();
        try {
            curve.scnr_db.push_back(std::stod(fields[0]));
            curve.pd.push_back(std::stod(fields[2]));
            curve.std_err.push_back(std::stod(fields[3]));
            curve.n_trials.push_back(std::stoi(fields[4]));
        } catch (const std::exception&) {
            throw std::runtime_error("parse_curves_csv: line " +
                                     std::to_string(line_no) +
                                     ": malformed numeric field");
        }
    }
    return curves;
}

std::string format_thresholds_csv(const std::vector<ThresholdTable>& tables) {
    std::vector<const ThresholdTable*> ordered;
    for (const auto& t : tables) ordered.push_back(&t);
    std::sort(ordered.begin(), ordered.end(),
              [](const ThresholdTable* a, const ThresholdTable* b) {
                  return detector_id(a->detector) < detector_id(b->detector);
              });

    std::string out = "detector,threshold,n_trials,target_pfa,empirical_pfa\n";
    for (const ThresholdTable* t : ordered) {
        out += detector_id(t->detector);
        out += ',';
        out += format_number(t->threshold);
        out += ',';
        out += std::to_string(t->n_trials);
        out += ',';
        out += format_number(t->target_pfa);
        out += ',';
        out += format_number(t->empirical_pfa);
        out += '\n';
    }
    return out;
}

std::string format_convergence_csv(
    const std::vector<ConvergenceProfile>& profiles) {
    std::string out =
        "iteration,detector,mean_delta_signature,mean_delta_amplitude,"
        "n_trials\n";
    for (const ConvergenceProfile& p : profiles) {
        for (std::size_t k = 0; k < p.mean_delta_signature.size(); ++k) {
            out += std::to_string(k + 1);
            out += ',';
            out += detector_id(p.detector);
            out += ',';
            out += format_number(p.mean_delta_signature[k]);
            out += ',';
            out += format_number(p.mean_delta_amplitude[k]);
            out += ',';
            out += std::to_string(p.n_trials);
            out += '\n';
        }
    }
    return out;
}

std::string plot_script_text(const std::string& csv_filename,
                             const std::string& title) {
    std::string script = R"PY(#!/usr/bin/env python3
"""Plot detection-probability curves from the CSV written alongside."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_NAME = "@CSV@"
TITLE = "@TITLE@"
LABELS = {"cd": "CD", "rncp": "R-NCP-D", "dncp": "D-NCP-D", "amf": "AMF"}
STYLES = {"cd": "k-o", "rncp": "b-s", "dncp": "r--^", "amf": "g-.v"}


def main() -> int:
    path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.abspath(__file__)), CSV_NAME)
    series = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            entry = series.setdefault(row["detector"], ([], [], []))
            entry[0].append(float(row["scnr_db"]))
            entry[1].append(float(row["pd"]))
            entry[2].append(float(row["std_err"]))
    fig, ax = plt.subplots(figsize=(7, 5))
    for det in sorted(series):
        scnr, pd, err = series[det]
        ax.errorbar(scnr, pd, yerr=err, fmt=STYLES.get(det, "-"),
                    label=LABELS.get(det, det), capsize=2, markersize=4)
    ax.set_xlabel("SCNR [dB]")
    ax.set_ylabel("Pd")
    ax.set_title(TITLE)
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.4)
    ax.legend(loc="lower right")
    out = os.path.splitext(path)[0] + ".png"
    fig.savefig(out, dpi=150, bbox_inches="tight")
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
)PY";
    const auto replace_all = [&script](const std::string& tag,
                                       const std::string& value) {
        for (auto pos = script.find(tag); pos != std::string::npos;
             pos = script.find(tag, pos + value.size())) {
            script.replace(pos, tag.size(), value);
        }
    };
    replace_all("@CSV@", csv_filename);
    replace_all("@TITLE@", title);
    return script;
}

std::string manifest_json(const ExperimentManifest& manifest) {
    nlohmann::json doc;
    char digest[32];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(manifest.config_digest));
    doc["config_digest"] = digest;
    doc["seed"] = manifest.seed;
    doc["tool_version"] = manifest.tool_version.empty()
                              ? std::string(version)
                              : manifest.tool_version;
    doc["outputs"] = manifest.outputs;
    doc["timings_ms"] = manifest.timings_ms;
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing: " + path);
    }
}

}  // namespace ncpd
