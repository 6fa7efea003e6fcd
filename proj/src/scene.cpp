#include "nathedge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nathedge/error.hpp"
#include "nathedge/text.hpp"

namespace nathedge {

namespace {

constexpr int kMarginLeft = 90;
constexpr int kMarginRight = 200;
constexpr int kMarginTop = 44;
constexpr int kMarginBottom = 64;

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;  // data bounds
    double px0, px1, py0, py1;  // pixel bounds, py0 is the top

    double sx(double a) const { return px0 + (a - x0) / (x1 - x0) * (px1 - px0); }
    double sy(double l) const { return py1 - (l - y0) / (y1 - y0) * (py1 - py0); }
};

std::string px(double v) { return text::fixed(v, 2); }

void widen(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double w = std::max(1.0, std::abs(lo) * 0.1);
        lo -= w;
        hi += w;
    }
    const double pad = 0.06 * (hi - lo);
    lo -= pad;
    hi += pad;
}

Frame make_frame(const MetricScene& scene, const RenderStyle& style) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    auto take = [&](double a, double l) {
        x0 = std::min(x0, a);
        x1 = std::max(x1, a);
        y0 = std::min(y0, l);
        y1 = std::max(y1, l);
    };
    for (const auto& layer : scene.layers) {
        for (const auto& r : layer.regions) {
            for (const auto& v : r.vertices) take(v.a, v.l);
        }
        for (const auto& p : layer.points) take(p.a, p.l);
    }
    if (scene.mean_adjusted) take(0.0, 0.0);
    if (!std::isfinite(x0)) {
        x0 = y0 = -1.0;
        x1 = y1 = 1.0;
    }
    widen(x0, x1);
    widen(y0, y1);
    return Frame{x0, x1, y0, y1, static_cast<double>(kMarginLeft),
                 static_cast<double>(style.width - kMarginRight), static_cast<double>(kMarginTop),
                 static_cast<double>(style.height - kMarginBottom)};
}

/// Tick positions at 1, 2 or 5 times a power of ten.
std::vector<double> ticks(double lo, double hi, double& step) {
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    step = (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
    std::vector<double> out;
    for (double k = std::ceil(lo / step); k * step <= hi; k += 1.0) {
        const double v = k * step;
        out.push_back(v == 0.0 ? 0.0 : v);
    }
    return out;
}

std::string tick_label(double v, double step) {
    const int dec = std::max(0, -static_cast<int>(std::floor(std::log10(step))));
    return text::fixed(v, dec);
}

/// Segment of the line a + l = c across the frame (clipped later by the plot clip path).
void line_const_sum(std::ostringstream& os, const Frame& f, double c, const std::string& color,
                    const char* dash, double width) {
    os << "<line x1=\"" << px(f.sx(f.x0)) << "\" y1=\"" << px(f.sy(c - f.x0)) << "\" x2=\""
       << px(f.sx(f.x1)) << "\" y2=\"" << px(f.sy(c - f.x1)) << "\" stroke=\"" << color
       << "\" stroke-width=\"" << px(width) << "\"";
    if (dash != nullptr) os << " stroke-dasharray=\"" << dash << "\"";
    os << "/>\n";
}

void draw_axes(std::ostringstream& os, const Frame& f, const MetricScene& scene) {
    os << "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << px(f.px0) << "\" y1=\"" << px(f.py1) << "\" x2=\"" << px(f.px1)
       << "\" y2=\"" << px(f.py1) << "\"/>\n";
    os << "<line x1=\"" << px(f.px0) << "\" y1=\"" << px(f.py0) << "\" x2=\"" << px(f.px0)
       << "\" y2=\"" << px(f.py1) << "\"/>\n";
    double step = 0.0;
    for (double v : ticks(f.x0, f.x1, step)) {
        os << "<line x1=\"" << px(f.sx(v)) << "\" y1=\"" << px(f.py1) << "\" x2=\"" << px(f.sx(v))
           << "\" y2=\"" << px(f.py1 + 5) << "\"/>\n";
        os << "<text x=\"" << px(f.sx(v)) << "\" y=\"" << px(f.py1 + 18)
           << "\" stroke=\"none\" text-anchor=\"middle\">" << tick_label(v, step) << "</text>\n";
    }
    for (double v : ticks(f.y0, f.y1, step)) {
        os << "<line x1=\"" << px(f.px0 - 5) << "\" y1=\"" << px(f.sy(v)) << "\" x2=\""
           << px(f.px0) << "\" y2=\"" << px(f.sy(v)) << "\"/>\n";
        os << "<text x=\"" << px(f.px0 - 8) << "\" y=\"" << px(f.sy(v) + 4)
           << "\" stroke=\"none\" text-anchor=\"end\">" << tick_label(v, step) << "</text>\n";
    }
    os << "</g>\n";
    os << "<text id=\"x-label\" x=\"" << px(0.5 * (f.px0 + f.px1)) << "\" y=\"" << px(f.py1 + 44)
       << "\" text-anchor=\"middle\">" << xml_escape(scene.x_label) << "</text>\n";
    const double cy = 0.5 * (f.py0 + f.py1);
    os << "<text id=\"y-label\" x=\"24\" y=\"" << px(cy) << "\" text-anchor=\"middle\" transform=\"rotate(-90 24 "
       << px(cy) << ")\">" << xml_escape(scene.y_label) << "</text>\n";
}

}  // namespace

bool MetricScene::empty() const noexcept {
    return layers.empty() && !benchmark && !offset && x_label.empty() && y_label.empty();
}

SceneLayer make_layer(const std::string& name, const std::string& color,
                      const HedgedPosition& position, const SceneOptions& opt) {
    std::vector<double> a = opt.mean_adjusted ? position.annuity_adjusted()
                                              : position.annuity().values;
    std::vector<double> l = opt.mean_adjusted ? position.calibrated_adjusted()
                                              : position.calibrated().values;
    std::vector<Point2> pts(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) pts[n] = {a[n], l[n]};

    SceneLayer layer;
    layer.name = name;
    layer.color = color;
    layer.regions = build_regions(pts, opt.alphas, opt.ridge);
    if (opt.with_points) {
        const auto ta = position.annuity_adjusted();
        const auto tl = position.calibrated_adjusted();
        layer.points.reserve(pts.size());
        for (std::size_t n = 0; n < pts.size(); ++n) {
            layer.points.push_back({n, pts[n].a, pts[n].l, classify_outcome(ta[n], tl[n])});
        }
    }
    if (opt.with_var_line) {
        layer.var_line = risk_report(position.combined_adjusted(), opt.var_alpha).var_alpha;
    }
    return layer;
}

std::map<Outcome, std::string> RenderStyle::default_outcome_colors() {
    return {
        {Outcome::PerfectHedge, "#000000"},
        {Outcome::TooMuchInsuranceSurplus, "#e377c2"},
        {Outcome::TooMuchInsuranceDeficit, "#1f3fbf"},
        {Outcome::NotEnoughInsuranceSurplus, "#17a2a2"},
        {Outcome::NotEnoughInsuranceDeficit, "#2ca02c"},
        {Outcome::NoHedgingEffectSurplus, "#d4a017"},
        {Outcome::NoHedgingEffectDeficit, "#d62728"},
    };
}

const std::vector<std::string>& default_layer_colors() {
    static const std::vector<std::string> colors = {"#e6b800", "#1f5fbf", "#d94f9e", "#2ca02c",
                                                    "#8c564b"};
    return colors;
}

double region_opacity(double alpha, const RenderStyle& style) noexcept {
    const double t = std::clamp((alpha - 0.05) / 0.9, 0.0, 1.0);
    return style.opacity_low + t * (style.opacity_high - style.opacity_low);
}

std::string render_svg(const MetricScene& scene, const RenderStyle& style) {
    if (scene.empty()) throw Error(Errc::EmptyScene, "scene has nothing to draw");
    if (scene.offset && !(*scene.offset > 0.0)) {
        throw Error(Errc::EmptyScene, "offset distance must be positive");
    }
    const Frame f = make_frame(scene, style);
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << style.width
       << "\" height=\"" << style.height << "\" viewBox=\"0 0 " << style.width << ' '
       << style.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<defs><clipPath id=\"plot\"><rect x=\"" << px(f.px0) << "\" y=\"" << px(f.py0)
       << "\" width=\"" << px(f.px1 - f.px0) << "\" height=\"" << px(f.py1 - f.py0)
       << "\"/></clipPath></defs>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!scene.title.empty()) {
        os << "<text id=\"title\" x=\"" << px(0.5 * (f.px0 + f.px1))
           << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(scene.title)
           << "</text>\n";
    }
    os << "<g clip-path=\"url(#plot)\">\n";
    if (scene.mean_adjusted) {
        os << "<line x1=\"" << px(f.sx(0)) << "\" y1=\"" << px(f.py0) << "\" x2=\"" << px(f.sx(0))
           << "\" y2=\"" << px(f.py1) << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
        os << "<line x1=\"" << px(f.px0) << "\" y1=\"" << px(f.sy(0)) << "\" x2=\"" << px(f.px1)
           << "\" y2=\"" << px(f.sy(0)) << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
    }
    for (std::size_t li = 0; li < scene.layers.size(); ++li) {
        const auto& layer = scene.layers[li];
        os << "<g id=\"layer-" << li << "\">\n";
        // Larger regions first so the small high-alpha ones end up on top.
        std::vector<const PredictionRegion*> order;
        for (const auto& r : layer.regions) order.push_back(&r);
        std::stable_sort(order.begin(), order.end(),
                         [](const auto* x, const auto* y) { return x->alpha < y->alpha; });
        for (const auto* r : order) {
            const std::string op = text::fixed(region_opacity(r->alpha, style), 4);
            if (r->vertices.size() >= 3) {
                os << "<polygon data-alpha=\"" << text::fixed(r->alpha, 4) << "\" fill=\""
                   << layer.color << "\" fill-opacity=\"" << op << "\" stroke=\"none\" points=\"";
            } else {
                os << "<polyline data-alpha=\"" << text::fixed(r->alpha, 4) << "\" fill=\"none\" stroke=\""
                   << layer.color << "\" stroke-opacity=\"" << op << "\" points=\"";
            }
            for (std::size_t k = 0; k < r->vertices.size(); ++k) {
                if (k) os << ' ';
                os << px(f.sx(r->vertices[k].a)) << ',' << px(f.sy(r->vertices[k].l));
            }
            os << "\"/>\n";
        }
        for (const auto& p : layer.points) {
            auto it = style.outcome_colors.find(p.outcome);
            const std::string& c = it != style.outcome_colors.end() ? it->second : layer.color;
            os << "<circle cx=\"" << px(f.sx(p.a)) << "\" cy=\"" << px(f.sy(p.l)) << "\" r=\""
               << px(style.point_radius) << "\" fill=\"" << c << "\"/>\n";
        }
        os << "</g>\n";
    }
    if (scene.benchmark) line_const_sum(os, f, 0.0, "#000000", nullptr, 1.5);
    if (scene.offset) {
        line_const_sum(os, f, *scene.offset, "#444444", "6 4", 1.0);
        line_const_sum(os, f, -*scene.offset, "#444444", "6 4", 1.0);
    }
    for (const auto& layer : scene.layers) {
        if (layer.var_line) line_const_sum(os, f, *layer.var_line, layer.color, "3 3", 1.5);
    }
    os << "</g>\n";
    draw_axes(os, f, scene);

    // Legend: one entry per layer, then outcome classes if any points are drawn.
    double y = f.py0 + 10;
    const double lx = f.px1 + 16;
    os << "<g id=\"legend\">\n";
    for (const auto& layer : scene.layers) {
        os << "<rect x=\"" << px(lx) << "\" y=\"" << px(y - 9) << "\" width=\"14\" height=\"10\" fill=\""
           << layer.color << "\"/>\n";
        os << "<text x=\"" << px(lx + 20) << "\" y=\"" << px(y) << "\">" << xml_escape(layer.name)
           << "</text>\n";
        y += 18;
    }
    const bool any_points = std::any_of(scene.layers.begin(), scene.layers.end(),
                                        [](const SceneLayer& l) { return !l.points.empty(); });
    if (any_points) {
        y += 8;
        for (const auto& [o, c] : style.outcome_colors) {
            os << "<circle cx=\"" << px(lx + 7) << "\" cy=\"" << px(y - 4) << "\" r=\"4\" fill=\"" << c
               << "\"/>\n";
            os << "<text x=\"" << px(lx + 20) << "\" y=\"" << px(y) << "\" font-size=\"10\">"
               << to_string(o) << "</text>\n";
            y += 16;
        }
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::optional<Outcome> parse_outcome(std::string_view name) noexcept {
    for (std::size_t k = 0; k < kOutcomeCount; ++k) {
        const auto o = static_cast<Outcome>(k);
        if (to_string(o) == name) return o;
    }
    return std::nullopt;
}

std::vector<GeometryRow> geometry_rows(const MetricScene& scene) {
    if (scene.empty()) throw Error(Errc::EmptyScene, "scene has no geometry");
    std::vector<GeometryRow> rows;
    for (const auto& layer : scene.layers) {
        if (layer.name.find_first_of(",\"\n\r") != std::string::npos) {
            throw Error(Errc::ConfigError, "layer name '" + layer.name + "' contains CSV delimiters");
        }
        for (const auto& r : layer.regions) {
            for (std::size_t k = 0; k < r.vertices.size(); ++k) {
                rows.push_back({GeometryRow::Kind::Vertex, layer.name, r.alpha, k, r.vertices[k].a,
                                r.vertices[k].l, std::nullopt});
            }
        }
        for (const auto& p : layer.points) {
            rows.push_back({GeometryRow::Kind::Point, layer.name, 0.0, p.path, p.a, p.l, p.outcome});
        }
    }
    return rows;
}

void export_geometry_csv(std::ostream& out, const MetricScene& scene) {
    const auto rows = geometry_rows(scene);
    out << "record,layer,alpha,index,a,l,outcome\n";
    for (const auto& r : rows) {
        if (r.kind == GeometryRow::Kind::Vertex) {
            out << "vertex," << r.layer << ',' << text::shortest(r.alpha) << ',' << r.index << ','
                << text::shortest(r.a) << ',' << text::shortest(r.l) << ",\n";
        } else {
            out << "point," << r.layer << ",," << r.index << ',' << text::shortest(r.a) << ','
                << text::shortest(r.l) << ',' << to_string(*r.outcome) << '\n';
        }
    }
}

std::vector<GeometryRow> import_geometry_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != "record,layer,alpha,index,a,l,outcome") {
        throw Error(Errc::MalformedRow, "geometry CSV header missing");
    }
    std::vector<GeometryRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const auto f = text::split(text::trim(line), ',');
        auto bad = [&](const char* why) {
            return Error(Errc::MalformedRow,
                         "geometry CSV line " + std::to_string(lineno) + ": " + why);
        };
        if (f.size() != 7) throw bad("expected 7 fields");
        GeometryRow r;
        if (f[0] == "vertex") {
            r.kind = GeometryRow::Kind::Vertex;
            if (!text::parse_double(f[2], r.alpha)) throw bad("bad alpha");
        } else if (f[0] == "point") {
            r.kind = GeometryRow::Kind::Point;
            r.outcome = parse_outcome(f[6]);
            if (!r.outcome) throw bad("unknown outcome class");
        } else {
            throw bad("unknown record type");
        }
        r.layer = std::string(f[1]);
        int idx = 0;
        if (!text::parse_int(f[3], idx) || idx < 0) throw bad("bad index");
        r.index = static_cast<std::size_t>(idx);
        if (!text::parse_double(f[4], r.a) || !text::parse_double(f[5], r.l)) {
            throw bad("bad coordinate");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace nathedge
