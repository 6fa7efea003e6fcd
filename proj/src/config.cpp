#include "nathedge/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nathedge/geometry.hpp"
#include "nathedge/scene.hpp"

namespace nathedge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string key_of(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

/// Accumulates diagnostics while reading one config document.
class Reader {
public:
    explicit Reader(fs::path base) : base_(std::move(base)) {}

    std::vector<Diagnostic> diags;

    void fail(const std::string& key, const std::string& msg,
              ErrorCategory cat = ErrorCategory::Config) {
        diags.push_back({key, msg, cat});
    }

    bool object(const json& j, const std::string& key) {
        if (j.is_object()) return true;
        fail(key, "must be an object");
        return false;
    }

    void allowed_keys(const json& obj, const std::string& path,
                      std::initializer_list<std::string_view> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
                fail(key_of(path, it.key()), "unknown key");
            }
        }
    }

    const json* find(const json& obj, const std::string& key) const {
        auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    }

    std::optional<double> number(const json& obj, const std::string& path, const std::string& key) {
        const json* v = find(obj, key);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(key_of(path, key), "must be a number");
            return std::nullopt;
        }
        return v->get<double>();
    }

    std::optional<long long> integer(const json& obj, const std::string& path,
                                     const std::string& key) {
        const json* v = find(obj, key);
        if (!v) return std::nullopt;
        if (!v->is_number_integer()) {
            fail(key_of(path, key), "must be an integer");
            return std::nullopt;
        }
        return v->get<long long>();
    }

    std::optional<std::string> string(const json& obj, const std::string& path,
                                      const std::string& key) {
        const json* v = find(obj, key);
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            fail(key_of(path, key), "must be a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<bool> boolean(const json& obj, const std::string& path, const std::string& key) {
        const json* v = find(obj, key);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) {
            fail(key_of(path, key), "must be true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    std::optional<IntRange> range(const json& obj, const std::string& path, const std::string& key) {
        const json* v = find(obj, key);
        if (!v) return std::nullopt;
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() ||
            !(*v)[1].is_number_integer()) {
            fail(key_of(path, key), "must be a [lo, hi] pair of integers");
            return std::nullopt;
        }
        IntRange r{(*v)[0].get<int>(), (*v)[1].get<int>()};
        if (r.lo > r.hi) {
            fail(key_of(path, key), "lo must not exceed hi");
            return std::nullopt;
        }
        return r;
    }

    fs::path resolve(const std::string& p) const {
        fs::path q(p);
        return q.is_absolute() ? q : (base_ / q).lexically_normal();
    }

private:
    fs::path base_;
};

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, "cannot read config '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ParseError, path.string() + ": " + e.what());
    }
}

std::optional<GeneratorKind> generator_from_name(const std::string& s) {
    if (s == "lc") return GeneratorKind::LeeCarter;
    if (s == "cbd") return GeneratorKind::CBD;
    if (s == "bootstrap") return GeneratorKind::Bootstrap;
    return std::nullopt;
}

std::string generator_key(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::LeeCarter: return "lc";
        case GeneratorKind::CBD: return "cbd";
        case GeneratorKind::Bootstrap: return "bootstrap";
    }
    return "?";
}

/// Reads one portfolio object. Returns nullopt after recording diagnostics.
std::optional<Portfolio> read_portfolio(Reader& rd, const json& j, const std::string& path,
                                        const ExperimentConfig& cfg,
                                        const std::optional<PopulationCounts>& pop) {
    if (!rd.object(j, path)) return std::nullopt;
    rd.allowed_keys(j, path, {"kind", "payment", "benefit", "weights", "products", "description"});
    const auto kind = rd.string(j, path, "kind");
    if (!kind || (*kind != "annuity" && *kind != "insurance")) {
        rd.fail(key_of(path, "kind"), "must be \"annuity\" or \"insurance\"");
        return std::nullopt;
    }
    const bool annuity = *kind == "annuity";
    const auto base_amount = rd.number(j, path, annuity ? "payment" : "benefit");
    if (j.contains(annuity ? "benefit" : "payment")) {
        rd.fail(key_of(path, annuity ? "benefit" : "payment"),
                std::string("not valid for a ") + *kind + " portfolio");
    }
    const auto weights_mode = rd.string(j, path, "weights");
    const bool from_population = weights_mode && *weights_mode == "population";
    if (weights_mode && !from_population) {
        rd.fail(key_of(path, "weights"), "only \"population\" is supported");
    }
    const json* products = rd.find(j, "products");
    if (!products || !products->is_array() || products->empty()) {
        rd.fail(key_of(path, "products"), "must be a non-empty list");
        return std::nullopt;
    }
    const std::size_t before = rd.diags.size();
    std::vector<AnnuityProduct> ann;
    std::vector<InsuranceProduct> ins;
    std::vector<int> ages;
    for (std::size_t k = 0; k < products->size(); ++k) {
        const json& p = (*products)[k];
        const std::string pk = path + ".products[" + std::to_string(k) + "]";
        if (!rd.object(p, pk)) continue;
        if (annuity) {
            rd.allowed_keys(p, pk, {"age", "weight", "deferral", "payments", "payment"});
        } else {
            rd.allowed_keys(p, pk, {"age", "weight", "term", "benefit"});
        }
        const auto age = rd.integer(p, pk, "age");
        if (!age) {
            rd.fail(key_of(pk, "age"), "required");
            continue;
        }
        if (!cfg.data.ages.contains(static_cast<int>(*age))) {
            rd.fail(key_of(pk, "age"), "issue age " + std::to_string(*age) +
                                           " outside the data ages " +
                                           std::to_string(cfg.data.ages.lo) + ".." +
                                           std::to_string(cfg.data.ages.hi));
        }
        const int x = static_cast<int>(*age);
        ages.push_back(x);
        double w = 1.0;
        if (auto wv = rd.number(p, pk, "weight")) {
            if (from_population) rd.fail(key_of(pk, "weight"), "conflicts with population weights");
            w = *wv;
        } else if (!from_population && products->size() > 1) {
            rd.fail(key_of(pk, "weight"), "required when a portfolio has several products");
        }
        if (!(w > 0.0 && w <= 1.0)) rd.fail(key_of(pk, "weight"), "must lie in (0, 1]");
        const auto amount = rd.number(p, pk, annuity ? "payment" : "benefit");
        const double c = amount ? *amount : base_amount.value_or(1.0);
        if (!(c > 0.0) || !std::isfinite(c)) {
            rd.fail(key_of(pk, annuity ? "payment" : "benefit"), "must be positive");
        }
        if (annuity) {
            const int tau = static_cast<int>(rd.integer(p, pk, "deferral").value_or(0));
            const auto n = rd.integer(p, pk, "payments");
            if (!n) {
                rd.fail(key_of(pk, "payments"), "required");
                continue;
            }
            if (tau < 0) rd.fail(key_of(pk, "deferral"), "must be >= 0");
            if (*n < 1) rd.fail(key_of(pk, "payments"), "must be >= 1");
            const long long last_age = x + tau + *n - 1;
            if (last_age > cfg.limiting_age - 1) {
                rd.fail(pk, "coverage: last payment at age " + std::to_string(last_age) +
                                " exceeds limiting age " + std::to_string(cfg.limiting_age) +
                                " minus one");
            }
            ann.push_back({x, w, tau, static_cast<int>(*n), c});
        } else {
            int term = 0;
            const json* tv = rd.find(p, "term");
            if (tv && tv->is_string() && tv->get<std::string>() == "whole_life") {
                term = cfg.limiting_age - x;
            } else if (auto t = rd.integer(p, pk, "term")) {
                term = static_cast<int>(*t);
            } else {
                rd.fail(key_of(pk, "term"), "required (an integer or \"whole_life\")");
                continue;
            }
            if (term < 1) rd.fail(key_of(pk, "term"), "must be >= 1");
            if (x + term > cfg.limiting_age) {
                rd.fail(pk, "coverage: term ends at age " + std::to_string(x + term) +
                                " beyond limiting age " + std::to_string(cfg.limiting_age));
            }
            ins.push_back({x, w, term, c});
        }
    }
    if (rd.diags.size() != before) return std::nullopt;

    if (from_population) {
        if (!pop) {
            rd.fail(key_of(path, "weights"), "population weights need data.population");
            return std::nullopt;
        }
        const auto [lo, hi] = std::minmax_element(ages.begin(), ages.end());
        try {
            const auto w = compute_age_weights(*pop, IntRange{*lo, *hi});
            for (auto& p : ann) p.weight = w.at(p.issue_age);
            for (auto& p : ins) p.weight = w.at(p.issue_age);
            double total = 0.0;
            for (int a : ages) total += w.at(a);
            for (auto& p : ann) p.weight /= total;
            for (auto& p : ins) p.weight /= total;
        } catch (const Error& e) {
            rd.fail(key_of(path, "weights"), e.what(), ErrorCategory::Data);
            return std::nullopt;
        }
    }
    try {
        return annuity ? Portfolio::annuity(std::move(ann)) : Portfolio::insurance(std::move(ins));
    } catch (const Error& e) {
        rd.fail(path, e.what());
        return std::nullopt;
    }
}

struct Parsed {
    ExperimentConfig cfg;
    std::vector<Diagnostic> diags;
};

Parsed parse(const fs::path& path) {
    const json root = read_json(path);
    Reader rd(path.parent_path());
    Parsed out;
    ExperimentConfig& cfg = out.cfg;
    cfg.source = path;
    cfg.name = path.stem().string();
    if (!rd.object(root, "<root>")) {
        out.diags = rd.diags;
        return out;
    }
    rd.allowed_keys(root, "", {"name", "description", "data", "interest_rate", "limiting_age",
                               "paths", "seed", "alpha", "generators", "portfolios", "hedges",
                               "render", "output_dir"});
    if (auto s = rd.string(root, "", "name")) cfg.name = *s;

    // data
    const json* data = rd.find(root, "data");
    if (!data) {
        rd.fail("data", "required");
    } else if (rd.object(*data, "data")) {
        rd.allowed_keys(*data, "data", {"rates", "sex", "ages", "years", "population"});
        if (auto s = rd.string(*data, "data", "rates")) {
            cfg.data.rates = rd.resolve(*s);
            if (!fs::is_regular_file(cfg.data.rates)) {
                rd.fail("data.rates", "file not found: " + cfg.data.rates.string(),
                        ErrorCategory::Data);
            }
        } else {
            rd.fail("data.rates", "required");
        }
        if (auto s = rd.string(*data, "data", "sex")) {
            try {
                cfg.data.sex = parse_sex(*s);
            } catch (const Error&) {
                rd.fail("data.sex", "must be female, male or total");
            }
        }
        if (auto r = rd.range(*data, "data", "ages")) {
            cfg.data.ages = *r;
            if (r->size() < 3) rd.fail("data.ages", "need at least 3 ages");
        }
        if (auto r = rd.range(*data, "data", "years")) {
            cfg.data.years = *r;
            if (r->size() < 3) rd.fail("data.years", "need at least 3 years");
        }
        if (auto s = rd.string(*data, "data", "population")) {
            cfg.data.population = rd.resolve(*s);
            if (!fs::is_regular_file(*cfg.data.population)) {
                rd.fail("data.population", "file not found: " + cfg.data.population->string(),
                        ErrorCategory::Data);
            }
        }
    }

    if (auto v = rd.number(root, "", "interest_rate")) {
        cfg.interest_rate = *v;
        if (!(*v > -1.0) || !std::isfinite(*v) || *v > 1.0) {
            rd.fail("interest_rate", "must lie in (-1, 1]");
        }
    }
    if (auto v = rd.integer(root, "", "limiting_age")) {
        cfg.limiting_age = static_cast<int>(*v);
        if (*v <= cfg.data.ages.lo || *v > 130) {
            rd.fail("limiting_age", "must exceed the lowest data age and be at most 130");
        }
    }
    if (cfg.limiting_age - 1 > cfg.data.ages.hi) {
        rd.fail("data.ages", "coverage: data ages must reach the limiting age minus one (" +
                                 std::to_string(cfg.limiting_age - 1) + ")");
    }
    if (auto v = rd.integer(root, "", "paths")) {
        if (*v < 100) {
            rd.fail("paths", "must be at least 100");
        } else {
            cfg.paths = static_cast<std::size_t>(*v);
        }
    }
    if (const json* s = rd.find(root, "seed")) {
        if (s->is_number_unsigned()) {
            cfg.seed = s->get<std::uint64_t>();
        } else {
            rd.fail("seed", "must be a non-negative integer");
        }
    }
    if (auto v = rd.number(root, "", "alpha")) {
        cfg.alpha = *v;
        if (!(*v > 0.0 && *v < 1.0)) rd.fail("alpha", "must lie in (0, 1)");
    }

    // generators
    const json* gens = rd.find(root, "generators");
    if (!gens) {
        rd.fail("generators", "required");
    } else if (rd.object(*gens, "generators")) {
        rd.allowed_keys(*gens, "generators", {"lc", "cbd", "bootstrap"});
        for (const char* name : {"lc", "cbd", "bootstrap"}) {
            const json* g = rd.find(*gens, name);
            if (!g) continue;
            const std::string gk = std::string("generators.") + name;
            if (!rd.object(*g, gk)) continue;
            GeneratorSpec spec;
            spec.kind = *generator_from_name(name);
            if (spec.kind == GeneratorKind::Bootstrap) {
                rd.allowed_keys(*g, gk, {"blocks"});
                spec.blocks = static_cast<int>(rd.integer(*g, gk, "blocks").value_or(35));
                if (spec.blocks < 1 || spec.blocks > 500) {
                    rd.fail(gk + ".blocks", "must lie in 1..500");
                }
                spec.horizon = 2 * spec.blocks;
            } else {
                rd.allowed_keys(*g, gk, {"horizon"});
                spec.horizon = static_cast<int>(rd.integer(*g, gk, "horizon").value_or(60));
                if (spec.horizon < 1 || spec.horizon > 1000) {
                    rd.fail(gk + ".horizon", "must lie in 1..1000");
                }
            }
            cfg.generators.push_back(spec);
        }
        if (cfg.generators.empty()) rd.fail("generators", "configure at least one generator");
    }

    // portfolios
    std::optional<PopulationCounts> pop;
    if (cfg.data.population && fs::is_regular_file(*cfg.data.population)) {
        std::ifstream in(*cfg.data.population);
        try {
            pop = parse_population_csv(in);
        } catch (const Error& e) {
            rd.fail("data.population", e.what(), ErrorCategory::Data);
        }
    }
    const json* pfs = rd.find(root, "portfolios");
    if (!pfs) {
        rd.fail("portfolios", "required");
    } else if (rd.object(*pfs, "portfolios")) {
        std::map<fs::path, json> files;
        for (auto it = pfs->begin(); it != pfs->end(); ++it) {
            const std::string pk = "portfolios." + it.key();
            const json* body = &*it;
            json loaded;
            if (body->is_object() && body->contains("file")) {
                rd.allowed_keys(*body, pk, {"file", "name"});
                const auto file = rd.string(*body, pk, "file");
                const auto name = rd.string(*body, pk, "name").value_or(it.key());
                if (!file) continue;
                const fs::path fp = rd.resolve(*file);
                if (!files.count(fp)) {
                    if (!fs::is_regular_file(fp)) {
                        rd.fail(pk + ".file", "file not found: " + fp.string());
                        continue;
                    }
                    files[fp] = read_json(fp);
                }
                const json& doc = files[fp];
                if (!doc.is_object() || !doc.contains(name)) {
                    rd.fail(pk + ".name", "portfolio '" + name + "' not in " + fp.string());
                    continue;
                }
                loaded = doc.at(name);
                body = &loaded;
            }
            if (it.key().find_first_of(",\"\n") != std::string::npos) {
                rd.fail(pk, "portfolio names must not contain commas or quotes");
            }
            if (auto p = read_portfolio(rd, *body, pk, cfg, pop)) {
                cfg.portfolios.push_back({it.key(), std::move(*p)});
            }
        }
    }

    // hedges
    const json* hedges = rd.find(root, "hedges");
    if (!hedges || !hedges->is_array() || hedges->empty()) {
        rd.fail("hedges", "must be a non-empty list");
    } else {
        std::set<std::string> labels;
        for (std::size_t k = 0; k < hedges->size(); ++k) {
            const json& h = (*hedges)[k];
            const std::string hk = "hedges[" + std::to_string(k) + "]";
            if (!rd.object(h, hk)) continue;
            rd.allowed_keys(h, hk, {"label", "insurance_label", "annuity", "insurance",
                                    "calibration", "evaluate"});
            HedgeSpec spec;
            spec.label = rd.string(h, hk, "label").value_or("");
            if (spec.label.empty()) rd.fail(hk + ".label", "required");
            if (spec.label.find_first_of(",\"\n") != std::string::npos) {
                rd.fail(hk + ".label", "must not contain commas or quotes");
            }
            if (!labels.insert(spec.label).second) rd.fail(hk + ".label", "duplicate label");
            spec.insurance_label = rd.string(h, hk, "insurance_label").value_or("L_" + spec.label);
            spec.annuity = rd.string(h, hk, "annuity").value_or("");
            spec.insurance = rd.string(h, hk, "insurance").value_or("");
            const Portfolio* a = cfg.portfolio(spec.annuity);
            const Portfolio* i = cfg.portfolio(spec.insurance);
            if (!a) {
                rd.fail(hk + ".annuity", "unknown portfolio '" + spec.annuity + "'");
            } else if (a->kind() != PortfolioKind::Annuity) {
                rd.fail(hk + ".annuity", "'" + spec.annuity + "' is not an annuity portfolio");
            }
            if (!i) {
                rd.fail(hk + ".insurance", "unknown portfolio '" + spec.insurance + "'");
            } else if (i->kind() != PortfolioKind::Insurance) {
                rd.fail(hk + ".insurance", "'" + spec.insurance + "' is not an insurance portfolio");
            }

            std::optional<GeneratorKind> cal_gen;
            if (const json* c = rd.find(h, "calibration")) {
                const std::string ck = hk + ".calibration";
                if (rd.object(*c, ck)) {
                    rd.allowed_keys(*c, ck, {"method", "generator", "epsilon"});
                    const auto m = rd.string(*c, ck, "method").value_or("vm");
                    try {
                        spec.calibration.method = parse_calibration_method(m);
                    } catch (const Error&) {
                        rd.fail(ck + ".method", "must be one of none, vm, dm, dn");
                    }
                    if (auto g = rd.string(*c, ck, "generator")) {
                        cal_gen = generator_from_name(*g);
                        if (!cal_gen) rd.fail(ck + ".generator", "must be lc, cbd or bootstrap");
                    }
                    if (auto e = rd.number(*c, ck, "epsilon")) {
                        spec.calibration.epsilon = *e;
                        if (!(*e > 0.0 && *e < 0.01)) rd.fail(ck + ".epsilon", "must lie in (0, 0.01)");
                    }
                }
            }
            if (const json* ev = rd.find(h, "evaluate")) {
                if (!ev->is_array() || ev->empty()) {
                    rd.fail(hk + ".evaluate", "must be a non-empty list of generators");
                } else {
                    for (const auto& g : *ev) {
                        auto kind = g.is_string() ? generator_from_name(g.get<std::string>())
                                                  : std::nullopt;
                        if (!kind) {
                            rd.fail(hk + ".evaluate", "entries must be lc, cbd or bootstrap");
                        } else if (std::find(spec.evaluate.begin(), spec.evaluate.end(), *kind) ==
                                   spec.evaluate.end()) {
                            spec.evaluate.push_back(*kind);
                        }
                    }
                }
            }
            // Defaults: calibrate under the first evaluation generator and vice versa.
            if (!cal_gen) {
                if (!spec.evaluate.empty()) {
                    cal_gen = spec.evaluate.front();
                } else if (!cfg.generators.empty()) {
                    cal_gen = cfg.generators.front().kind;
                }
            }
            if (cal_gen) spec.calibration.generator = *cal_gen;
            if (spec.evaluate.empty() && cal_gen) spec.evaluate.push_back(*cal_gen);

            auto need_generator = [&](GeneratorKind g, const std::string& key) {
                const GeneratorSpec* gs = cfg.generator(g);
                if (!gs) {
                    rd.fail(key, "generator '" + generator_key(g) + "' is not configured");
                    return;
                }
                for (const Portfolio* pf : {a, i}) {
                    if (pf && pf->required_horizon() > gs->horizon) {
                        rd.fail(key, "coverage: generator '" + generator_key(g) + "' horizon " +
                                         std::to_string(gs->horizon) + " shorter than the " +
                                         std::to_string(pf->required_horizon()) +
                                         " years a portfolio needs");
                    }
                }
            };
            if (spec.calibration.method != CalibrationMethod::None) {
                need_generator(spec.calibration.generator, hk + ".calibration.generator");
            }
            for (auto g : spec.evaluate) need_generator(g, hk + ".evaluate");
            if (spec.calibration.method == CalibrationMethod::DeltaNeutral &&
                spec.calibration.generator != GeneratorKind::LeeCarter) {
                rd.fail(hk + ".calibration.generator", "delta-neutral calibration requires lc");
            }
            cfg.hedges.push_back(std::move(spec));
        }
    }

    // render
    cfg.render.alphas = default_alpha_grid();
    if (const json* r = rd.find(root, "render")) {
        if (rd.object(*r, "render")) {
            rd.allowed_keys(*r, "render", {"alphas", "offset", "points", "var_line", "outcome_scatter",
                                           "ridge", "width", "height", "colors", "outcome_colors"});
            if (const json* al = rd.find(*r, "alphas")) {
                std::vector<double> grid;
                bool ok = al->is_array() && !al->empty();
                if (ok) {
                    for (const auto& v : *al) {
                        if (!v.is_number() || !(v.get<double>() > 0.0 && v.get<double>() < 1.0)) {
                            ok = false;
                            break;
                        }
                        grid.push_back(v.get<double>());
                    }
                    ok = ok && std::is_sorted(grid.begin(), grid.end()) &&
                         std::adjacent_find(grid.begin(), grid.end()) == grid.end();
                }
                if (ok) {
                    cfg.render.alphas = grid;
                } else {
                    rd.fail("render.alphas", "must be an increasing list of levels in (0, 1)");
                }
            }
            if (auto v = rd.number(*r, "render", "offset")) {
                cfg.render.offset = *v;
                if (!(*v > 0.0)) rd.fail("render.offset", "must be positive");
            }
            cfg.render.points = rd.boolean(*r, "render", "points").value_or(true);
            cfg.render.var_line = rd.boolean(*r, "render", "var_line").value_or(true);
            cfg.render.outcome_scatter = rd.boolean(*r, "render", "outcome_scatter").value_or(true);
            if (auto v = rd.number(*r, "render", "ridge")) {
                cfg.render.ridge = *v;
                if (!(*v >= 0.0)) rd.fail("render.ridge", "must be >= 0");
            }
            if (auto v = rd.integer(*r, "render", "width")) {
                cfg.render.width = static_cast<int>(*v);
                if (*v < 300 || *v > 10000) rd.fail("render.width", "must lie in 300..10000");
            }
            if (auto v = rd.integer(*r, "render", "height")) {
                cfg.render.height = static_cast<int>(*v);
                if (*v < 200 || *v > 10000) rd.fail("render.height", "must lie in 200..10000");
            }
            auto is_color = [](const std::string& s) {
                return s.size() == 7 && s[0] == '#' &&
                       std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
            };
            if (const json* cs = rd.find(*r, "colors")) {
                bool ok = cs->is_array();
                if (ok) {
                    for (const auto& c : *cs) {
                        if (!c.is_string() || !is_color(c.get<std::string>())) {
                            ok = false;
                            break;
                        }
                        cfg.render.colors.push_back(c.get<std::string>());
                    }
                }
                if (!ok) rd.fail("render.colors", "must be a list of #rrggbb colours");
            }
            if (const json* oc = rd.find(*r, "outcome_colors")) {
                if (rd.object(*oc, "render.outcome_colors")) {
                    for (auto it = oc->begin(); it != oc->end(); ++it) {
                        const std::string k = "render.outcome_colors." + it.key();
                        if (!parse_outcome(it.key())) {
                            rd.fail(k, "unknown outcome class");
                        } else if (!it->is_string() || !is_color(it->get<std::string>())) {
                            rd.fail(k, "must be a #rrggbb colour");
                        } else {
                            cfg.render.outcome_colors[it.key()] = it->get<std::string>();
                        }
                    }
                }
            }
        }
    }

    if (auto s = rd.string(root, "", "output_dir")) {
        cfg.output_dir = rd.resolve(*s);
    } else {
        cfg.output_dir = fs::path("out") / cfg.name;
    }
    out.diags = std::move(rd.diags);
    return out;
}

json range_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

}  // namespace

OutputFormat parse_output_format(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "svg") return OutputFormat::Svg;
    if (s == "both") return OutputFormat::Both;
    throw Error(Errc::ConfigError, "format must be csv, svg or both");
}

std::string_view to_string(OutputFormat f) noexcept {
    switch (f) {
        case OutputFormat::Csv: return "csv";
        case OutputFormat::Svg: return "svg";
        case OutputFormat::Both: return "both";
    }
    return "?";
}

const GeneratorSpec* ExperimentConfig::generator(GeneratorKind kind) const noexcept {
    for (const auto& g : generators) {
        if (g.kind == kind) return &g;
    }
    return nullptr;
}

const Portfolio* ExperimentConfig::portfolio(const std::string& n) const noexcept {
    for (const auto& p : portfolios) {
        if (p.name == n) return &p.portfolio;
    }
    return nullptr;
}

std::string to_string(const Diagnostic& d) {
    return d.key.empty() ? d.message : d.key + ": " + d.message;
}

std::vector<Diagnostic> validate_config(const fs::path& path) { return parse(path).diags; }

ExperimentConfig load_config(const fs::path& path) {
    Parsed p = parse(path);
    if (!p.diags.empty()) {
        std::string msg;
        bool config = false;
        for (const auto& d : p.diags) {
            if (!msg.empty()) msg += "; ";
            msg += to_string(d);
            config = config || d.category == ErrorCategory::Config;
        }
        throw Error(config ? Errc::ConfigError : Errc::DataError, msg);
    }
    return std::move(p.cfg);
}

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.paths) {
        if (*o.paths < 100) throw Error(Errc::ConfigError, "paths must be at least 100");
        cfg.paths = *o.paths;
    }
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.format) cfg.format = *o.format;
}

std::string canonical_config(const ExperimentConfig& cfg) {
    json j;
    j["data"] = {{"rates", fs::weakly_canonical(cfg.data.rates).string()},
                 {"sex", cfg.data.sex == Sex::Female ? "female"
                         : cfg.data.sex == Sex::Male ? "male"
                                                     : "total"},
                 {"ages", range_json(cfg.data.ages)},
                 {"years", range_json(cfg.data.years)}};
    if (cfg.data.population) {
        j["data"]["population"] = fs::weakly_canonical(*cfg.data.population).string();
    }
    j["interest_rate"] = cfg.interest_rate;
    j["limiting_age"] = cfg.limiting_age;
    j["paths"] = cfg.paths;
    j["seed"] = cfg.seed;
    j["alpha"] = cfg.alpha;
    for (const auto& g : cfg.generators) {
        j["generators"][generator_key(g.kind)] = {{"horizon", g.horizon}, {"blocks", g.blocks}};
    }
    for (const auto& np : cfg.portfolios) {
        json products = json::array();
        for (const auto& p : np.portfolio.annuities()) {
            products.push_back({{"age", p.issue_age}, {"weight", p.weight}, {"deferral", p.deferral},
                                {"payments", p.n_payments}, {"payment", p.payment}});
        }
        for (const auto& p : np.portfolio.insurances()) {
            products.push_back({{"age", p.issue_age}, {"weight", p.weight}, {"term", p.term},
                                {"benefit", p.benefit}});
        }
        j["portfolios"][np.name] = {
            {"kind", np.portfolio.kind() == PortfolioKind::Annuity ? "annuity" : "insurance"},
            {"products", products}};
    }
    for (const auto& h : cfg.hedges) {
        json ev = json::array();
        for (auto g : h.evaluate) ev.push_back(generator_key(g));
        j["hedges"].push_back({{"label", h.label},
                               {"insurance_label", h.insurance_label},
                               {"annuity", h.annuity},
                               {"insurance", h.insurance},
                               {"method", to_string(h.calibration.method)},
                               {"generator", generator_key(h.calibration.generator)},
                               {"epsilon", h.calibration.epsilon},
                               {"evaluate", ev}});
    }
    const auto& r = cfg.render;
    j["render"] = {{"alphas", r.alphas},      {"points", r.points},
                   {"var_line", r.var_line},  {"outcome_scatter", r.outcome_scatter},
                   {"ridge", r.ridge},        {"width", r.width},
                   {"height", r.height},      {"colors", r.colors},
                   {"outcome_colors", r.outcome_colors}};
    if (r.offset) j["render"]["offset"] = *r.offset;
    return j.dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

fs::path preset_dir() {
    if (const char* env = std::getenv("NATHEDGE_PRESET_DIR"); env && *env) return env;
#ifdef NATHEDGE_PRESET_DIR_DEFAULT
    return NATHEDGE_PRESET_DIR_DEFAULT;
#else
    return "configs";
#endif
}

std::vector<std::string> list_presets() {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(preset_dir(), ec)) {
        if (e.is_regular_file() && e.path().extension() == ".json") {
            out.push_back(e.path().stem().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

fs::path resolve_config_path(const std::string& name_or_path) {
    const fs::path direct(name_or_path);
    if (fs::is_regular_file(direct)) return direct;
    const fs::path preset = preset_dir() / (name_or_path + ".json");
    if (fs::is_regular_file(preset)) return preset;
    throw Error(Errc::ParseError, "no config file or preset named '" + name_or_path + "'");
}

}  // namespace nathedge
