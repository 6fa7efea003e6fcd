#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nathedge/config.hpp"
#include "nathedge/risk.hpp"

namespace nathedge {

struct HedgeRatioRow {
    std::string label;
    CalibrationMethod method = CalibrationMethod::None;
    GeneratorKind generator = GeneratorKind::LeeCarter;
    double hedge_ratio = 1.0;
    /// h = -annuity_measure / insurance_measure: Cov(A, I) and Var(I) for
    /// vm, mortality durations for dm, longevity deltas for dn. Unset for none.
    double annuity_measure = 0.0;
    double insurance_measure = 0.0;
};

struct RunManifest {
    std::string name;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::string> files;
    std::string version;
};

/// Everything one run produces, held in memory.
struct ExperimentResult {
    std::vector<ReportRow> report;
    std::vector<HedgeRatioRow> hedge_ratios;
    /// file name -> content, in a fixed order.
    std::vector<std::pair<std::string, std::string>> outputs;
};

void write_hedge_ratio_csv(std::ostream& out, const std::vector<HedgeRatioRow>& rows);

/// Runs valuation, calibration, evaluation and rendering without touching
/// the file system beyond reading inputs.
ExperimentResult compute_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

/// compute_experiment, then writes the outputs and manifest.json into
/// cfg.output_dir. Either every file is written or none.
RunManifest run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

std::string manifest_json(const RunManifest& m);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace nathedge
