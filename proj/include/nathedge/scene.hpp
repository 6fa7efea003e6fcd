#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nathedge/calibration.hpp"
#include "nathedge/geometry.hpp"
#include "nathedge/risk.hpp"

namespace nathedge {

struct ScenePoint {
    std::size_t path = 0;
    double a = 0.0;
    double l = 0.0;
    Outcome outcome = Outcome::PerfectHedge;
};

/// Region stack and optional scatter for one hedged position.
struct SceneLayer {
    std::string name;
    std::string color;
    std::vector<PredictionRegion> regions;
    std::vector<ScenePoint> points;
    /// Dashed line a + l = value (mean-adjusted VaR of the hedged position).
    std::optional<double> var_line;
};

/// Everything drawn in one chart. All layers share one coordinate frame.
struct MetricScene {
    std::vector<SceneLayer> layers;
    bool mean_adjusted = false;
    bool benchmark = false;
    /// Offset lines a + l = +-d.
    std::optional<double> offset;
    std::string title;
    std::string x_label;
    std::string y_label;

    /// No layers, no lines and no labels.
    bool empty() const noexcept;
};

struct SceneOptions {
    std::vector<double> alphas = default_alpha_grid();
    bool mean_adjusted = true;
    bool with_points = false;
    bool with_var_line = false;
    double var_alpha = 0.95;
    double ridge = 0.0;
};

/// Layer for (annuity, calibrated insurance) pairs of one position.
SceneLayer make_layer(const std::string& name, const std::string& color,
                      const HedgedPosition& position, const SceneOptions& opt);

struct RenderStyle {
    int width = 720;
    int height = 600;
    double opacity_low = 0.08;   // at alpha = 0.05
    double opacity_high = 0.85;  // at alpha = 0.95
    double point_radius = 1.2;
    std::map<Outcome, std::string> outcome_colors = default_outcome_colors();

    static std::map<Outcome, std::string> default_outcome_colors();
};

/// Layer colours used when a config names none.
const std::vector<std::string>& default_layer_colors();

double region_opacity(double alpha, const RenderStyle& style) noexcept;

/// Deterministic SVG 1.1 document. Throws EmptyScene for an empty scene.
std::string render_svg(const MetricScene& scene, const RenderStyle& style = {});

/// Flat geometry table. Columns: record,layer,alpha,index,a,l,outcome.
/// Vertex rows have record=vertex, index = vertex position and an empty
/// outcome; point rows have record=point, index = path and an empty alpha.
struct GeometryRow {
    enum class Kind { Vertex, Point };
    Kind kind = Kind::Vertex;
    std::string layer;
    double alpha = 0.0;
    std::size_t index = 0;
    double a = 0.0;
    double l = 0.0;
    std::optional<Outcome> outcome;
};

std::vector<GeometryRow> geometry_rows(const MetricScene& scene);
void export_geometry_csv(std::ostream& out, const MetricScene& scene);
std::vector<GeometryRow> import_geometry_csv(std::istream& in);

std::optional<Outcome> parse_outcome(std::string_view name) noexcept;

}  // namespace nathedge
