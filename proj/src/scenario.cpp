#include "nathedge/scenario.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "nathedge/error.hpp"
#include "nathedge/text.hpp"

namespace nathedge {

std::string_view to_string(GeneratorKind kind) noexcept {
    switch (kind) {
        case GeneratorKind::LeeCarter: return "LC";
        case GeneratorKind::CBD: return "CBD";
        case GeneratorKind::Bootstrap: return "BOOTSTRAP";
    }
    return "?";
}

ScenarioSet::ScenarioSet(GeneratorKind generator, std::uint64_t seed, int base_year, IntRange ages,
                         int horizon, std::size_t n_paths, std::vector<double> q)
    : generator_(generator),
      seed_(seed),
      base_year_(base_year),
      ages_(ages),
      horizon_(horizon),
      n_paths_(n_paths),
      q_(std::move(q)) {
    if (horizon_ < 1) throw Error(Errc::HorizonExceeded, "scenario horizon must be >= 1");
    if (ages_.size() < 1) throw Error(Errc::AgeOutOfRange, "scenario has no ages");
    if (n_paths_ < 1) throw Error(Errc::EmptySample, "scenario has no paths");
    if (q_.size() != n_paths_ * n_ages() * static_cast<std::size_t>(horizon_)) {
        throw Error(Errc::DataError, "scenario grid size mismatch");
    }
    for (double v : q_) {
        if (!(v >= 0.0 && v < 1.0)) {
            throw Error(Errc::NegativeRate, "death probability outside [0, 1)");
        }
    }
}

void check_cohort_coverage(const ScenarioSet& sc, int x, int max_t) {
    if (max_t < 0) throw Error(Errc::HorizonExceeded, "negative survival horizon");
    if (max_t > sc.horizon()) {
        throw Error(Errc::HorizonExceeded, "survival to T=" + std::to_string(max_t) +
                                               " exceeds horizon " + std::to_string(sc.horizon()));
    }
    const int top = max_t == 0 ? x : x + max_t - 1;
    if (!sc.ages().contains(x) || !sc.ages().contains(top)) {
        throw Error(Errc::AgeOutOfRange, "cohort aged " + std::to_string(x) + " followed " +
                                             std::to_string(max_t) + " years leaves ages [" +
                                             std::to_string(sc.ages().lo) + "," +
                                             std::to_string(sc.ages().hi) + "]");
    }
}

void survival_curve_into(const ScenarioSet& sc, std::size_t n, int x,
                         std::span<double> out) noexcept {
    out[0] = 1.0;
    const auto& q = sc.values();
    std::size_t idx = sc.index(n, static_cast<std::size_t>(x - sc.ages().lo), 0);
    // Moving one age down and one year along is a stride of horizon + 1.
    const std::size_t stride = static_cast<std::size_t>(sc.horizon()) + 1;
    for (std::size_t s = 1; s < out.size(); ++s, idx += stride) {
        out[s] = out[s - 1] * (1.0 - q[idx]);
    }
}

std::vector<double> survival_curve(const ScenarioSet& sc, std::size_t n, int x, int max_t) {
    check_cohort_coverage(sc, x, max_t);
    if (n >= sc.n_paths()) throw Error(Errc::EmptySample, "path index out of range");
    std::vector<double> out(static_cast<std::size_t>(max_t) + 1);
    survival_curve_into(sc, n, x, out);
    return out;
}

ScenarioSet shift_mortality(const ScenarioSet& sc, double eps, unsigned threads) {
    const auto& src = sc.values();
    std::vector<double> q(src.size());
    const std::size_t per_path = sc.n_ages() * static_cast<std::size_t>(sc.horizon());
    std::vector<char> negative(sc.n_paths(), 0);
    parallel_for(sc.n_paths(), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b * per_path; i < e * per_path; ++i) {
            const double m = -std::log1p(-src[i]) + eps;
            if (!(m > 0.0)) {
                negative[i / per_path] = 1;
                q[i] = 0.0;
                continue;
            }
            q[i] = -std::expm1(-m);
        }
    });
    for (char bad : negative) {
        if (bad) {
            throw Error(Errc::NegativeRate,
                        "mortality shift " + text::shortest(eps) + " makes a central death rate <= 0");
        }
    }
    return ScenarioSet(sc.generator(), sc.seed(), sc.base_year(), sc.ages(), sc.horizon(),
                       sc.n_paths(), std::move(q));
}

void write_scenarios_csv(std::ostream& out, const ScenarioSet& sc) {
    out << "# generator=" << to_string(sc.generator()) << " seed=" << sc.seed()
        << " base_year=" << sc.base_year() << " horizon=" << sc.horizon()
        << " paths=" << sc.n_paths() << '\n';
    out << "path,age,year,q\n";
    for (std::size_t n = 0; n < sc.n_paths(); ++n) {
        for (int a = sc.ages().lo; a <= sc.ages().hi; ++a) {
            for (int s = 1; s <= sc.horizon(); ++s) {
                out << n << ',' << a << ',' << sc.base_year() + s << ','
                    << text::shortest(sc.q(n, a, s)) << '\n';
            }
        }
    }
}

ScenarioSet read_scenarios_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
        throw Error(Errc::MalformedRow, "scenario cache lacks its metadata line");
    }
    std::map<std::string, std::string> meta;
    for (auto tok : text::split_ws(std::string_view(line).substr(2))) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) continue;
        meta[std::string(tok.substr(0, eq))] = std::string(tok.substr(eq + 1));
    }
    GeneratorKind kind = GeneratorKind::LeeCarter;
    if (meta["generator"] == "CBD") kind = GeneratorKind::CBD;
    else if (meta["generator"] == "BOOTSTRAP") kind = GeneratorKind::Bootstrap;
    else if (meta["generator"] != "LC") throw Error(Errc::MalformedRow, "unknown generator tag");
    const std::uint64_t seed = std::stoull(meta.at("seed"));
    const int base_year = std::stoi(meta.at("base_year"));
    const int horizon = std::stoi(meta.at("horizon"));
    const std::size_t paths = std::stoull(meta.at("paths"));

    if (!std::getline(in, line) || text::trim(line) != "path,age,year,q") {
        throw Error(Errc::MalformedRow, "expected header 'path,age,year,q'");
    }
    int age_lo = 0;
    int age_hi = 0;
    bool first = true;
    std::vector<double> q;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto cols = text::split(line, ',');
        int age = 0;
        double v = 0.0;
        if (cols.size() != 4 || !text::parse_int(cols[1], age) || !text::parse_double(cols[3], v)) {
            throw Error(Errc::MalformedRow, "line " + std::to_string(line_no));
        }
        if (first) {
            age_lo = age_hi = age;
            first = false;
        }
        age_hi = std::max(age_hi, age);
        q.push_back(v);
    }
    return ScenarioSet(kind, seed, base_year, IntRange{age_lo, age_hi}, horizon, paths,
                       std::move(q));
}

}  // namespace nathedge
