#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nathedge/calibration.hpp"
#include "nathedge/error.hpp"
#include "nathedge/mortality_table.hpp"
#include "nathedge/portfolio.hpp"
#include "nathedge/random.hpp"

namespace nathedge {

struct DataSpec {
    std::filesystem::path rates;
    Sex sex = Sex::Male;
    IntRange ages{40, 99};
    IntRange years{1970, 2018};
    std::optional<std::filesystem::path> population;
};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::LeeCarter;
    /// Projection years; for the bootstrap this is 2 * blocks.
    int horizon = 60;
    int blocks = 35;
};

struct NamedPortfolio {
    std::string name;
    Portfolio portfolio;
};

struct CalibrationSpec {
    CalibrationMethod method = CalibrationMethod::VarianceMinimising;
    GeneratorKind generator = GeneratorKind::LeeCarter;
    double epsilon = 1e-4;
};

struct HedgeSpec {
    std::string label;
    std::string insurance_label;
    std::string annuity;
    std::string insurance;
    CalibrationSpec calibration;
    std::vector<GeneratorKind> evaluate;
};

enum class OutputFormat { Csv, Svg, Both };

OutputFormat parse_output_format(const std::string& s);
std::string_view to_string(OutputFormat f) noexcept;

struct RenderSpec {
    std::vector<double> alphas;
    std::optional<double> offset;
    bool points = true;
    bool var_line = true;
    bool outcome_scatter = true;
    double ridge = 0.0;
    int width = 720;
    int height = 600;
    std::vector<std::string> colors;
    std::map<std::string, std::string> outcome_colors;
};

struct ExperimentConfig {
    std::string name;
    std::filesystem::path source;
    DataSpec data;
    double interest_rate = 0.04;
    int limiting_age = 100;
    std::size_t paths = 20000;
    std::uint64_t seed = 1;
    double alpha = 0.95;
    std::vector<GeneratorSpec> generators;
    std::vector<NamedPortfolio> portfolios;
    std::vector<HedgeSpec> hedges;
    RenderSpec render;
    std::filesystem::path output_dir;
    OutputFormat format = OutputFormat::Both;

    const GeneratorSpec* generator(GeneratorKind kind) const noexcept;
    const Portfolio* portfolio(const std::string& name) const noexcept;
};

struct Diagnostic {
    std::string key;
    std::string message;
    ErrorCategory category = ErrorCategory::Config;
};

std::string to_string(const Diagnostic& d);

/// Parses and checks the config without running anything. Every violation
/// found is listed; ParseError only for unreadable files or invalid JSON.
std::vector<Diagnostic> validate_config(const std::filesystem::path& path);

/// Parses, validates and resolves a config. Config violations raise
/// ConfigError, missing input files DataError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Command-line overrides applied after loading.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::filesystem::path> output_dir;
    std::optional<OutputFormat> format;
};

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& o);

/// Canonical text of every semantically meaningful field (output location
/// and format excluded), and its 64-bit FNV-1a hash in hex.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

/// Directory holding the bundled presets.
std::filesystem::path preset_dir();
std::vector<std::string> list_presets();
/// A preset name or a file path.
std::filesystem::path resolve_config_path(const std::string& name_or_path);

}  // namespace nathedge
