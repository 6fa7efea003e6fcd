#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nathedge/config.hpp"
#include "nathedge/experiment.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nathedge;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json toy_json() {
    std::ifstream in(oracle::source_path("configs/toy.json"));
    json j = json::parse(in);
    j["data"]["rates"] = oracle::source_path("data/hmd/USA.Mx_1x1.txt");
    return j;
}

fs::path write_config(const std::string& name, const json& j) {
    const fs::path dir = fs::path(testing::TempDir()) / "nathedge_cfg";
    fs::create_directories(dir);
    const fs::path p = dir / (name + ".json");
    std::ofstream(p) << j.dump(2);
    return p;
}

bool mentions(const std::vector<Diagnostic>& ds, const std::string& key) {
    for (const auto& d : ds) {
        if (d.key.find(key) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST(Config, BundledPresetsValidate) {
    for (const auto& name : list_presets()) {
        const auto ds = validate_config(resolve_config_path(name));
        EXPECT_TRUE(ds.empty()) << name << ": " << (ds.empty() ? "" : to_string(ds[0]));
    }
    EXPECT_GE(list_presets().size(), 4u);
}

TEST(Config, ToyFields) {
    const auto cfg = load_config(resolve_config_path("toy"));
    EXPECT_EQ(cfg.name, "toy");
    EXPECT_EQ(cfg.paths, 20000u);
    EXPECT_EQ(cfg.hedges.size(), 2u);
    EXPECT_EQ(cfg.hedges[0].insurance_label, "L1");
    ASSERT_NE(cfg.generator(GeneratorKind::Bootstrap), nullptr);
    EXPECT_EQ(cfg.generator(GeneratorKind::Bootstrap)->horizon, 70);
    EXPECT_EQ(cfg.generator(GeneratorKind::LeeCarter), nullptr);
    ASSERT_NE(cfg.portfolio("A"), nullptr);
    EXPECT_EQ(cfg.portfolio("A")->annuities()[0].payment, 20.0);
    EXPECT_TRUE(cfg.render.offset.has_value());
}

TEST(Config, BadAlphaNamesTheKey) {
    auto j = toy_json();
    j["alpha"] = 1.5;
    const auto ds = validate_config(write_config("bad_alpha", j));
    ASSERT_FALSE(ds.empty());
    EXPECT_TRUE(mentions(ds, "alpha"));
    EXPECT_EQ(code_of([&] { load_config(write_config("bad_alpha", j)); }), Errc::ConfigError);
}

TEST(Config, AllViolationsListed) {
    auto j = toy_json();
    j["alpha"] = 1.5;
    j["paths"] = 5;
    j["bogus_key"] = true;
    const auto ds = validate_config(write_config("many", j));
    EXPECT_TRUE(mentions(ds, "alpha"));
    EXPECT_TRUE(mentions(ds, "paths"));
    EXPECT_TRUE(mentions(ds, "bogus_key"));
}

TEST(Config, CoverageBeyondLimitingAge) {
    auto j = toy_json();
    // Payments run to age 45 + 40 + 20 - 1 = 104.
    j["portfolios"]["A"]["products"][0]["deferral"] = 40;
    const auto ds = validate_config(write_config("coverage", j));
    ASSERT_FALSE(ds.empty());
    EXPECT_TRUE(mentions(ds, "portfolios.A"));
}

TEST(Config, UnknownReferences) {
    auto j = toy_json();
    j["hedges"][0]["insurance"] = "NOPE";
    EXPECT_TRUE(mentions(validate_config(write_config("unknown_ref", j)), "hedges[0]"));
    auto k = toy_json();
    k["hedges"][0]["calibration"]["method"] = "dn";
    EXPECT_FALSE(validate_config(write_config("dn_needs_lc", k)).empty());
}

TEST(Config, InvalidJsonIsParseError) {
    const fs::path p = fs::path(testing::TempDir()) / "broken.json";
    std::ofstream(p) << "{ \"name\": ";
    EXPECT_EQ(code_of([&] { validate_config(p); }), Errc::ParseError);
    EXPECT_EQ(code_of([] { resolve_config_path("no-such-preset"); }), Errc::ParseError);
}

TEST(Config, HashTracksSemanticFields) {
    const auto base = load_config(write_config("h0", toy_json()));
    auto j = toy_json();
    j["output_dir"] = "/tmp/elsewhere";
    j["name"] = "renamed";
    EXPECT_EQ(config_hash(load_config(write_config("h1", j))), config_hash(base));
    auto k = toy_json();
    k["interest_rate"] = 0.05;
    EXPECT_NE(config_hash(load_config(write_config("h2", k))), config_hash(base));
    auto cfg = base;
    apply_overrides(cfg, {.seed = 7});
    EXPECT_NE(config_hash(cfg), config_hash(base));
    EXPECT_EQ(config_hash(base).size(), 16u);
}

TEST(Experiment, MissingDataIsDataErrorWithNoOutputs) {
    auto j = toy_json();
    j["data"]["rates"] = "/nonexistent/mx.txt";
    const fs::path out = fs::path(testing::TempDir()) / "nathedge_missing_out";
    fs::remove_all(out);
    j["output_dir"] = out.string();
    const auto p = write_config("missing_data", j);
    EXPECT_EQ(code_of([&] { run_experiment(load_config(p)); }), Errc::DataError);
    EXPECT_FALSE(fs::exists(out) && !fs::is_empty(out));
}

TEST(Experiment, ToyOutputsAndThreadDeterminism) {
    auto cfg = load_config(resolve_config_path("toy"));
    apply_overrides(cfg, {.paths = 2000});
    const auto r1 = compute_experiment(cfg, 1);
    const auto r4 = compute_experiment(cfg, 4);
    ASSERT_EQ(r1.outputs.size(), r4.outputs.size());
    for (std::size_t k = 0; k < r1.outputs.size(); ++k) {
        EXPECT_EQ(r1.outputs[k].first, r4.outputs[k].first);
        EXPECT_EQ(r1.outputs[k].second, r4.outputs[k].second) << r1.outputs[k].first;
    }
    std::vector<std::string> labels;
    for (const auto& row : r1.report) labels.push_back(row.portfolio);
    EXPECT_EQ(labels, (std::vector<std::string>{"A", "L1", "L2", "P1", "P2"}));
    // Hedged values are the sum of their parts.
    EXPECT_NEAR(r1.report[3].report.mean, r1.report[0].report.mean + r1.report[1].report.mean, 1e-9);

    const fs::path out = fs::path(testing::TempDir()) / "nathedge_toy_out";
    fs::remove_all(out);
    apply_overrides(cfg, {.output_dir = out});
    const auto m = run_experiment(cfg, 2);
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
    for (const auto& f : m.files) EXPECT_TRUE(fs::exists(out / f)) << f;
    for (const auto& e : fs::directory_iterator(out)) {
        EXPECT_EQ(e.path().string().find(".staged"), std::string::npos);
    }
    EXPECT_EQ(m.seed, cfg.seed);
    EXPECT_EQ(m.config_hash, config_hash(cfg));
}

TEST(Experiment, HedgeRatioCsvHeader) {
    std::ostringstream out;
    write_hedge_ratio_csv(out, {});
    EXPECT_EQ(out.str(), "hedge,method,generator,hedge_ratio,annuity_measure,insurance_measure\n");
}
