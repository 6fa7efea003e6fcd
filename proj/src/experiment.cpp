#include "nathedge/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <unistd.h>

#include "json.hpp"
#include "nathedge/bootstrap.hpp"
#include "nathedge/mortality_models.hpp"
#include "nathedge/scene.hpp"
#include "nathedge/text.hpp"

namespace nathedge {

namespace fs = std::filesystem;

namespace {

constexpr GeneratorKind kGeneratorOrder[] = {GeneratorKind::LeeCarter, GeneratorKind::CBD,
                                             GeneratorKind::Bootstrap};

// One hedge ratio is computed per distinct calibration request.
using CalKey = std::tuple<std::string, std::string, CalibrationMethod, GeneratorKind, double>;

CalKey cal_key(const HedgeSpec& h) {
    const bool uses_generator = h.calibration.method != CalibrationMethod::None;
    const bool uses_eps = h.calibration.method == CalibrationMethod::DurationMatching;
    return {h.annuity, h.insurance, h.calibration.method,
            uses_generator ? h.calibration.generator : GeneratorKind::LeeCarter,
            uses_eps ? h.calibration.epsilon : 0.0};
}

std::string slug(const std::string& s) {
    std::string out;
    for (char c : s) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    }
    return out;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Layer {
    std::string label;
    const HedgeSpec* hedge;
    GeneratorKind generator;
    HedgedPosition position;
};

}  // namespace

void write_hedge_ratio_csv(std::ostream& out, const std::vector<HedgeRatioRow>& rows) {
    out << "hedge,method,generator,hedge_ratio,annuity_measure,insurance_measure\n";
    for (const auto& r : rows) {
        out << r.label << ',' << to_string(r.method) << ',';
        if (r.method == CalibrationMethod::None) {
            out << ',' << text::shortest(r.hedge_ratio) << ",,\n";
        } else {
            out << to_string(r.generator) << ',' << text::shortest(r.hedge_ratio) << ','
                << text::shortest(r.annuity_measure) << ',' << text::shortest(r.insurance_measure)
                << '\n';
        }
    }
}

ExperimentResult compute_experiment(const ExperimentConfig& cfg, unsigned threads) {
    const MortalityTable table = load_rates(cfg.data.rates.string(), cfg.data.sex, cfg.data.ages,
                                            cfg.data.years);
    const double delta = force_of_interest(cfg.interest_rate);

    // What each generator has to supply.
    std::map<GeneratorKind, std::set<std::string>> pv_needed;
    std::map<GeneratorKind, std::vector<CalKey>> dm_needed;
    std::vector<CalKey> cal_order;
    for (const auto& h : cfg.hedges) {
        const CalKey key = cal_key(h);
        if (std::find(cal_order.begin(), cal_order.end(), key) == cal_order.end()) {
            cal_order.push_back(key);
            if (h.calibration.method == CalibrationMethod::VarianceMinimising) {
                pv_needed[h.calibration.generator].insert({h.annuity, h.insurance});
            } else if (h.calibration.method == CalibrationMethod::DurationMatching) {
                dm_needed[h.calibration.generator].push_back(key);
            } else if (h.calibration.method == CalibrationMethod::DeltaNeutral &&
                       h.calibration.generator != GeneratorKind::LeeCarter) {
                throw Error(Errc::ConfigError, "delta-neutral calibration requires lc");
            }
        }
        for (auto g : h.evaluate) pv_needed[g].insert({h.annuity, h.insurance});
    }
    bool need_lc_params = false;
    for (const auto& key : cal_order) {
        need_lc_params = need_lc_params || std::get<2>(key) == CalibrationMethod::DeltaNeutral;
    }

    std::map<std::pair<GeneratorKind, std::string>, PVSample> pv;
    std::map<CalKey, HedgeRatioRow> ratios;
    std::optional<LCParams> lc_params;
    std::optional<KappaPaths> lc_kappa;

    for (GeneratorKind g : kGeneratorOrder) {
        const bool used = pv_needed.count(g) || dm_needed.count(g) ||
                          (g == GeneratorKind::LeeCarter && need_lc_params);
        if (!used) continue;
        const GeneratorSpec* spec = cfg.generator(g);
        if (!spec) {
            throw Error(Errc::ConfigError, "generator " + std::string(to_string(g)) +
                                               " is not configured");
        }
        // The scenario grid is large; only one lives at a time.
        std::optional<ScenarioSet> sc;
        if (g == GeneratorKind::LeeCarter) {
            lc_params = fit_lee_carter(table);
            lc_kappa = simulate_lc_kappa(*lc_params, spec->horizon, cfg.paths, cfg.seed, threads);
            if (pv_needed.count(g) || dm_needed.count(g)) {
                sc.emplace(lc_scenarios(*lc_params, *lc_kappa, table.ages(), threads));
            }
        } else if (g == GeneratorKind::CBD) {
            sc.emplace(simulate_cbd(fit_cbd(table), table.ages(), spec->horizon, cfg.paths,
                                    cfg.seed, threads));
        } else {
            sc.emplace(simulate_bootstrap(table, spec->blocks, cfg.paths, cfg.seed, threads));
        }
        if (!sc) continue;
        for (const auto& name : pv_needed[g]) {
            pv.emplace(std::pair{g, name}, portfolio_pv(*sc, *cfg.portfolio(name), delta, threads));
        }
        for (const auto& key : dm_needed[g]) {
            const auto dm = hedge_ratio_dm(*cfg.portfolio(std::get<0>(key)),
                                           *cfg.portfolio(std::get<1>(key)), *sc, delta,
                                           std::get<4>(key), threads);
            ratios[key] = {"", CalibrationMethod::DurationMatching, g, dm.hedge_ratio,
                           dm.annuity_duration, dm.insurance_duration};
        }
    }

    for (const auto& key : cal_order) {
        const auto& [a, i, method, g, eps] = key;
        (void)eps;
        if (method == CalibrationMethod::None) {
            ratios[key] = {"", method, g, 1.0, 0.0, 0.0};
        } else if (method == CalibrationMethod::VarianceMinimising) {
            const PVSample& pa = pv.at({g, a});
            const PVSample& pi = pv.at({g, i});
            ratios[key] = {"", method, g, hedge_ratio_vm(pa, pi),
                           sample_covariance(pa.values, pi.values), sample_variance(pi.values)};
        } else if (method == CalibrationMethod::DeltaNeutral) {
            const auto dn = hedge_ratio_dn(*lc_params, *lc_kappa, *cfg.portfolio(a),
                                           *cfg.portfolio(i), delta, threads);
            ratios[key] = {"", method, g, dn.hedge_ratio, dn.annuity_delta, dn.insurance_delta};
        }
    }

    ExperimentResult result;
    std::vector<Layer> layers;
    for (const auto& h : cfg.hedges) {
        HedgeRatioRow r = ratios.at(cal_key(h));
        r.label = h.label;
        result.hedge_ratios.push_back(r);
        for (auto g : h.evaluate) {
            const std::string suffix =
                h.evaluate.size() > 1 ? "[" + std::string(to_string(g)) + "]" : "";
            layers.push_back({h.label + suffix, &h, g,
                              HedgedPosition(pv.at({g, h.annuity}), pv.at({g, h.insurance}),
                                             r.hedge_ratio)});
        }
    }

    // Risk report rows: annuities, then calibrated insurance, then hedged positions.
    std::map<std::string, std::set<GeneratorKind>> annuity_gens;
    for (const auto& l : layers) annuity_gens[l.hedge->annuity].insert(l.generator);
    std::set<std::pair<std::string, GeneratorKind>> seen;
    for (const auto& l : layers) {
        if (!seen.insert({l.hedge->annuity, l.generator}).second) continue;
        const std::string name =
            annuity_gens[l.hedge->annuity].size() > 1
                ? l.hedge->annuity + "[" + std::string(to_string(l.generator)) + "]"
                : l.hedge->annuity;
        result.report.push_back({name, risk_report(l.position.annuity().values, cfg.alpha)});
    }
    for (const auto& l : layers) {
        const std::string suffix = l.label.substr(l.hedge->label.size());
        result.report.push_back(
            {l.hedge->insurance_label + suffix, risk_report(l.position.calibrated().values, cfg.alpha)});
    }
    for (const auto& l : layers) {
        result.report.push_back({l.label, risk_report(l.position.combined().values, cfg.alpha)});
    }

    const bool want_csv = cfg.format != OutputFormat::Svg;
    const bool want_svg = cfg.format != OutputFormat::Csv;
    auto emit = [&](const std::string& name, const std::string& body) {
        result.outputs.emplace_back(name, body);
    };
    if (want_csv) {
        std::ostringstream rr;
        write_risk_csv(rr, result.report);
        emit("risk_report.csv", rr.str());
        std::ostringstream hr;
        write_hedge_ratio_csv(hr, result.hedge_ratios);
        emit("hedge_ratios.csv", hr.str());
    }

    RenderStyle style;
    style.width = cfg.render.width;
    style.height = cfg.render.height;
    for (const auto& [name, color] : cfg.render.outcome_colors) {
        style.outcome_colors[*parse_outcome(name)] = color;
    }
    const auto& palette = cfg.render.colors.empty() ? default_layer_colors() : cfg.render.colors;

    MetricScene raw;
    raw.title = cfg.name + ": joint prediction regions";
    raw.x_label = "Annuity PV";
    raw.y_label = "Calibrated insurance PV";
    MetricScene adj;
    adj.mean_adjusted = true;
    adj.benchmark = true;
    adj.offset = cfg.render.offset;
    adj.title = cfg.name + ": mean-adjusted joint prediction regions";
    adj.x_label = "Mean-adjusted annuity PV";
    adj.y_label = "Mean-adjusted calibrated insurance PV";
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        const std::string& color = palette[k % palette.size()];
        SceneOptions o;
        o.alphas = cfg.render.alphas;
        o.ridge = cfg.render.ridge;
        o.mean_adjusted = false;
        raw.layers.push_back(make_layer(l.label, color, l.position, o));
        o.mean_adjusted = true;
        o.with_points = cfg.render.points;
        o.with_var_line = cfg.render.var_line;
        o.var_alpha = cfg.alpha;
        adj.layers.push_back(make_layer(l.label, color, l.position, o));
    }
    if (want_csv) {
        std::ostringstream g1, g2;
        export_geometry_csv(g1, raw);
        export_geometry_csv(g2, adj);
        emit("geometry_unadjusted.csv", g1.str());
        emit("geometry_mean_adjusted.csv", g2.str());
    }
    if (want_svg) {
        emit("regions_unadjusted.svg", render_svg(raw, style));
        MetricScene regions_only = adj;
        for (auto& l : regions_only.layers) l.points.clear();
        emit("regions_mean_adjusted.svg", render_svg(regions_only, style));
        if (cfg.render.points && cfg.render.outcome_scatter) {
            for (const auto& l : adj.layers) {
                MetricScene sc;
                sc.mean_adjusted = true;
                sc.benchmark = true;
                sc.offset = adj.offset;
                sc.title = cfg.name + ": hedging outcomes of " + l.name;
                sc.x_label = adj.x_label;
                sc.y_label = adj.y_label;
                SceneLayer only = l;
                only.regions.clear();
                sc.layers.push_back(std::move(only));
                emit("outcomes_" + slug(l.name) + ".svg", render_svg(sc, style));
            }
        }
    }
    return result;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::DataError, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error(Errc::DataError, "short write to '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(Errc::DataError, "cannot move output into '" + path.string() + "'");
    }
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["name"] = m.name;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    j["started_utc"] = m.started_utc;
    j["finished_utc"] = m.finished_utc;
    j["files"] = m.files;
    j["version"] = m.version;
    return j.dump(2) + "\n";
}

RunManifest run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    RunManifest m;
    m.name = cfg.name;
    m.config_hash = config_hash(cfg);
    m.seed = cfg.seed;
    m.version = NATHEDGE_VERSION;
    m.started_utc = utc_now();
    const ExperimentResult res = compute_experiment(cfg, threads);

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw Error(Errc::DataError, "cannot create '" + cfg.output_dir.string() + "'");

    // Stage every file first so a failure leaves no partial set behind.
    std::vector<std::pair<fs::path, fs::path>> staged;
    const std::string tag = ".staged" + std::to_string(::getpid());
    try {
        for (const auto& [name, body] : res.outputs) {
            const fs::path final = cfg.output_dir / name;
            const fs::path tmp = final.string() + tag;
            write_file_atomic(tmp, body);
            staged.emplace_back(tmp, final);
            m.files.push_back(name);
        }
    } catch (...) {
        for (const auto& [tmp, final] : staged) fs::remove(tmp, ec);
        throw;
    }
    for (const auto& [tmp, final] : staged) fs::rename(tmp, final);
    m.finished_utc = utc_now();
    m.files.push_back("manifest.json");
    write_file_atomic(cfg.output_dir / "manifest.json", manifest_json(m));
    return m;
}

}  // namespace nathedge
