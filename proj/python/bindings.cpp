// Python bindings for the nathedge core.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nathedge/bootstrap.hpp"
#include "nathedge/calibration.hpp"
#include "nathedge/config.hpp"
#include "nathedge/error.hpp"
#include "nathedge/experiment.hpp"
#include "nathedge/geometry.hpp"
#include "nathedge/mortality_models.hpp"
#include "nathedge/portfolio.hpp"
#include "nathedge/risk.hpp"

namespace py = pybind11;
using namespace nathedge;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
    return {a.data(), a.data() + a.size()};
}

IntRange range_of(std::pair<int, int> p) { return {p.first, p.second}; }

py::dict report_dict(const RiskReport& r) {
    py::dict d;
    d["alpha"] = r.alpha;
    d["mean"] = r.mean;
    d["variance"] = r.variance;
    d["var"] = r.var_alpha;
    d["es"] = r.es_alpha;
    d["var_minus_mean"] = r.mean_adjusted_var_alpha;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Natural longevity hedging: mortality models, valuation, hedge calibration and risk metrics";
    m.attr("__version__") = NATHEDGE_VERSION;

    // Kept alive for the interpreter's lifetime.
    static PyObject* error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).inc_ref().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error_type)(py::str(e.what()));
            inst.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type, inst.ptr());
        }
    });

    // Data.
    py::class_<MortalityTable>(m, "MortalityTable")
        .def_property_readonly("ages", [](const MortalityTable& t) { return std::pair(t.ages().lo, t.ages().hi); })
        .def_property_readonly("years", [](const MortalityTable& t) { return std::pair(t.years().lo, t.years().hi); })
        .def("rate", &MortalityTable::rate, py::arg("age"), py::arg("year"))
        .def_property_readonly("rates", [](const MortalityTable& t) {
            Array a = to_array(t.rates());
            return a.reshape({static_cast<py::ssize_t>(t.n_ages()), static_cast<py::ssize_t>(t.n_years())});
        });
    m.def("load_rates",
          [](const std::string& path, const std::string& sex, std::pair<int, int> ages, std::pair<int, int> years) {
              return load_rates(path, parse_sex(sex), range_of(ages), range_of(years));
          },
          py::arg("path"), py::arg("sex") = "male", py::arg("ages") = std::pair(40, 99),
          py::arg("years") = std::pair(1970, 2018));

    // Models.
    py::class_<LCParams>(m, "LCParams")
        .def_readonly("alpha", &LCParams::alpha)
        .def_readonly("beta", &LCParams::beta)
        .def_readonly("kappa", &LCParams::kappa)
        .def_readwrite("drift", &LCParams::drift)
        .def_readwrite("step_sd", &LCParams::step_sd)
        .def_readwrite("last_kappa", &LCParams::last_kappa);
    py::class_<CBDParams>(m, "CBDParams")
        .def_readonly("kappa1", &CBDParams::kappa1)
        .def_readonly("kappa2", &CBDParams::kappa2)
        .def_readonly("xbar", &CBDParams::xbar)
        .def_readonly("drift", &CBDParams::drift)
        .def_readonly("incr_cov", &CBDParams::incr_cov);
    m.def("fit_lee_carter", &fit_lee_carter, py::arg("table"));
    m.def("fit_cbd", &fit_cbd, py::arg("table"));

    py::class_<ScenarioSet>(m, "ScenarioSet")
        .def_property_readonly("generator", [](const ScenarioSet& s) { return std::string(to_string(s.generator())); })
        .def_property_readonly("seed", &ScenarioSet::seed)
        .def_property_readonly("base_year", &ScenarioSet::base_year)
        .def_property_readonly("ages", [](const ScenarioSet& s) { return std::pair(s.ages().lo, s.ages().hi); })
        .def_property_readonly("horizon", &ScenarioSet::horizon)
        .def_property_readonly("n_paths", &ScenarioSet::n_paths)
        .def_property_readonly("q", [](const ScenarioSet& s) {
            Array a = to_array(s.values());
            return a.reshape({static_cast<py::ssize_t>(s.n_paths()), static_cast<py::ssize_t>(s.n_ages()),
                              static_cast<py::ssize_t>(s.horizon())});
        })
        .def("survival_curve",
             [](const ScenarioSet& s, std::size_t path, int age, int max_t) {
                 return to_array(survival_curve(s, path, age, max_t));
             },
             py::arg("path"), py::arg("age"), py::arg("max_t"));

    m.def("simulate_lc",
          [](const LCParams& p, std::pair<int, int> ages, int horizon, std::size_t n, std::uint64_t seed,
             unsigned threads) { return simulate_lc(p, range_of(ages), horizon, n, seed, threads); },
          py::arg("params"), py::arg("ages"), py::arg("horizon"), py::arg("n_paths"), py::arg("seed"),
          py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("simulate_cbd",
          [](const CBDParams& p, std::pair<int, int> ages, int horizon, std::size_t n, std::uint64_t seed,
             unsigned threads) { return simulate_cbd(p, range_of(ages), horizon, n, seed, threads); },
          py::arg("params"), py::arg("ages"), py::arg("horizon"), py::arg("n_paths"), py::arg("seed"),
          py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("simulate_bootstrap", &simulate_bootstrap, py::arg("table"), py::arg("blocks"),
          py::arg("n_paths"), py::arg("seed"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    // Valuation.
    py::class_<AnnuityProduct>(m, "AnnuityProduct")
        .def(py::init([](int age, double weight, int deferral, int payments, double payment) {
                 return AnnuityProduct{age, weight, deferral, payments, payment};
             }),
             py::arg("age"), py::arg("weight") = 1.0, py::arg("deferral") = 0, py::arg("payments") = 1,
             py::arg("payment") = 1.0);
    py::class_<InsuranceProduct>(m, "InsuranceProduct")
        .def(py::init([](int age, double weight, int term, double benefit) {
                 return InsuranceProduct{age, weight, term, benefit};
             }),
             py::arg("age"), py::arg("weight") = 1.0, py::arg("term") = 1, py::arg("benefit") = 1.0);
    py::class_<Portfolio>(m, "Portfolio")
        .def_static("annuity", &Portfolio::annuity, py::arg("products"))
        .def_static("insurance", &Portfolio::insurance, py::arg("products"))
        .def_property_readonly("required_horizon", &Portfolio::required_horizon)
        .def("__len__", &Portfolio::size);
    m.def("force_of_interest", &force_of_interest, py::arg("rate"));
    m.def("present_values",
          [](const ScenarioSet& sc, const Portfolio& pf, double delta, unsigned threads) {
              PVSample s;
              {
                  py::gil_scoped_release release;
                  s = portfolio_pv(sc, pf, delta, threads);
              }
              return to_array(s.values);
          },
          py::arg("scenario"), py::arg("portfolio"), py::arg("delta"), py::arg("threads") = 1);

    // Calibration.
    m.def("hedge_ratio_vm",
          [](const Array& a, const Array& i) {
              return hedge_ratio_vm(PVSample(to_vector(a)), PVSample(to_vector(i)));
          },
          py::arg("annuity"), py::arg("insurance"));
    m.def("hedge_ratio_dm",
          [](const Portfolio& a, const Portfolio& i, const ScenarioSet& sc, double delta, double eps,
             unsigned threads) { return hedge_ratio_dm(a, i, sc, delta, eps, threads).hedge_ratio; },
          py::arg("annuity"), py::arg("insurance"), py::arg("scenario"), py::arg("delta"),
          py::arg("eps") = 1e-4, py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

    // Risk.
    m.def("value_at_risk", [](const Array& x, double alpha) { return value_at_risk(to_vector(x), alpha); },
          py::arg("sample"), py::arg("alpha") = 0.95);
    m.def("expected_shortfall",
          [](const Array& x, double alpha) { return expected_shortfall(to_vector(x), alpha); },
          py::arg("sample"), py::arg("alpha") = 0.95);
    m.def("risk_report", [](const Array& x, double alpha) { return report_dict(risk_report(to_vector(x), alpha)); },
          py::arg("sample"), py::arg("alpha") = 0.95);
    m.def("classify_outcome",
          [](double a, double l, double tol) { return std::string(to_string(classify_outcome(a, l, tol))); },
          py::arg("a"), py::arg("l"), py::arg("tol") = 0.0);

    // Geometry.
    m.def("build_regions",
          [](const Array& a, const Array& l, std::vector<double> alphas, double ridge) {
              const auto va = to_vector(a), vl = to_vector(l);
              if (va.size() != vl.size()) throw py::value_error("a and l differ in length");
              std::vector<Point2> pts(va.size());
              for (std::size_t n = 0; n < va.size(); ++n) pts[n] = {va[n], vl[n]};
              if (alphas.empty()) alphas = default_alpha_grid();
              py::list out;
              for (const auto& r : build_regions(pts, alphas, ridge)) {
                  py::dict d;
                  d["alpha"] = r.alpha;
                  d["n_enclosed"] = r.n_enclosed;
                  d["collinear"] = r.collinear;
                  py::list v;
                  for (const auto& p : r.vertices) v.append(py::make_tuple(p.a, p.l));
                  d["vertices"] = v;
                  out.append(d);
              }
              return out;
          },
          py::arg("a"), py::arg("l"), py::arg("alphas") = std::vector<double>{}, py::arg("ridge") = 0.0);

    // Experiments.
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readonly("name", &ExperimentConfig::name)
        .def_readwrite("paths", &ExperimentConfig::paths)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readonly("alpha", &ExperimentConfig::alpha)
        .def_readonly("interest_rate", &ExperimentConfig::interest_rate)
        .def_property("output_dir", [](const ExperimentConfig& c) { return c.output_dir; },
                      [](ExperimentConfig& c, const std::filesystem::path& p) { c.output_dir = p; })
        .def_property_readonly("hash", [](const ExperimentConfig& c) { return config_hash(c); });
    m.def("load_config", [](const std::string& name) { return load_config(resolve_config_path(name)); },
          py::arg("name_or_path"));
    m.def("validate_config",
          [](const std::string& name) {
              py::list out;
              for (const auto& d : validate_config(resolve_config_path(name))) {
                  py::dict e;
                  e["key"] = d.key;
                  e["message"] = d.message;
                  e["category"] = d.category == ErrorCategory::Config ? "config"
                                  : d.category == ErrorCategory::Data ? "data"
                                                                      : "numerical";
                  out.append(e);
              }
              return out;
          },
          py::arg("name_or_path"));
    m.def("list_presets", &list_presets);
    m.def("compute_experiment",
          [](const ExperimentConfig& cfg, unsigned threads) {
              ExperimentResult r;
              {
                  py::gil_scoped_release release;
                  r = compute_experiment(cfg, threads);
              }
              py::dict report;
              for (const auto& row : r.report) report[py::str(row.portfolio)] = report_dict(row.report);
              py::dict ratios;
              for (const auto& h : r.hedge_ratios) {
                  py::dict d;
                  d["method"] = std::string(to_string(h.method));
                  d["generator"] = std::string(to_string(h.generator));
                  d["hedge_ratio"] = h.hedge_ratio;
                  d["annuity_measure"] = h.annuity_measure;
                  d["insurance_measure"] = h.insurance_measure;
                  ratios[py::str(h.label)] = d;
              }
              py::dict outputs;
              for (const auto& [name, content] : r.outputs) outputs[py::str(name)] = py::bytes(content);
              py::dict out;
              out["report"] = report;
              out["hedge_ratios"] = ratios;
              out["outputs"] = outputs;
              return out;
          },
          py::arg("config"), py::arg("threads") = 1);
    m.def("run_experiment",
          [](const ExperimentConfig& cfg, unsigned threads) { return run_experiment(cfg, threads).files; },
          py::arg("config"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
}
