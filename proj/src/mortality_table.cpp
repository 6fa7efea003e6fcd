#include "nathedge/mortality_table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "nathedge/error.hpp"
#include "nathedge/text.hpp"

namespace nathedge {

namespace {

constexpr int kOpenAgeGroup = 110;

void check_range(const IntRange& r, const char* what) {
    if (r.hi < r.lo) {
        throw Error(Errc::EmptySelection, std::string(what) + " range is empty");
    }
}

// Collects the cells of a requested window, keyed by (age, year), then
// checks that the window is completely covered.
class WindowCollector {
public:
    WindowCollector(IntRange ages, IntRange years)
        : ages_(ages),
          years_(years),
          cells_(static_cast<std::size_t>(ages.size()) * years.size()) {}

    bool wants(int age, int year) const noexcept {
        return ages_.contains(age) && years_.contains(year);
    }

    void put(int age, int year, std::optional<double> value, std::size_t line_no) {
        auto& cell = cells_[index(age, year)];
        cell.seen = true;
        cell.value = value;
        cell.line = line_no;
        any_ = true;
    }

    MortalityTable finish() const {
        if (!any_) {
            throw Error(Errc::EmptySelection, "no observations inside ages [" +
                                                  std::to_string(ages_.lo) + "," +
                                                  std::to_string(ages_.hi) + "] x years [" +
                                                  std::to_string(years_.lo) + "," +
                                                  std::to_string(years_.hi) + "]");
        }
        std::vector<double> rates(cells_.size());
        for (int a = ages_.lo; a <= ages_.hi; ++a) {
            for (int y = years_.lo; y <= years_.hi; ++y) {
                const auto& cell = cells_[index(a, y)];
                const std::string where =
                    "age " + std::to_string(a) + ", year " + std::to_string(y);
                if (!cell.seen || !cell.value) {
                    throw Error(Errc::MissingCell, "no rate for " + where);
                }
                const double v = *cell.value;
                if (!std::isfinite(v) || v <= 0.0) {
                    throw Error(Errc::DataError, "non-positive rate for " + where + " (line " +
                                                     std::to_string(cell.line) + ")");
                }
                rates[index(a, y)] = v;
            }
        }
        return MortalityTable(ages_, years_, std::move(rates));
    }

private:
    struct Cell {
        bool seen = false;
        std::optional<double> value;
        std::size_t line = 0;
    };

    std::size_t index(int age, int year) const noexcept {
        return static_cast<std::size_t>(age - ages_.lo) * years_.size() +
               static_cast<std::size_t>(year - years_.lo);
    }

    IntRange ages_;
    IntRange years_;
    std::vector<Cell> cells_;
    bool any_ = false;
};

[[noreturn]] void malformed(std::size_t line_no, std::string_view line) {
    throw Error(Errc::MalformedRow,
                "line " + std::to_string(line_no) + ": '" + std::string(text::trim(line)) + "'");
}

bool parse_age_token(std::string_view tok, int& age) {
    if (!tok.empty() && tok.back() == '+') tok.remove_suffix(1);
    return text::parse_int(tok, age);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

MortalityTable::MortalityTable(IntRange ages, IntRange years, std::vector<double> rates)
    : ages_(ages), years_(years), rates_(std::move(rates)) {
    check_range(ages_, "age");
    check_range(years_, "year");
    if (rates_.size() != n_ages() * n_years()) {
        throw Error(Errc::DataError, "rate grid size does not match ages x years");
    }
    for (double r : rates_) {
        if (!std::isfinite(r) || r <= 0.0) {
            throw Error(Errc::DataError, "rates must be finite and strictly positive");
        }
    }
}

double MortalityTable::rate(int age, int year) const {
    if (!ages_.contains(age) || !years_.contains(year)) {
        throw Error(Errc::AgeOutOfRange, "cell (" + std::to_string(age) + ", " +
                                             std::to_string(year) + ") outside table");
    }
    return at(static_cast<std::size_t>(age - ages_.lo), static_cast<std::size_t>(year - years_.lo));
}

MortalityTable MortalityTable::restrict(IntRange ages, IntRange years) const {
    if (ages.lo < ages_.lo || ages.hi > ages_.hi || years.lo < years_.lo || years.hi > years_.hi) {
        throw Error(Errc::EmptySelection, "restriction exceeds table extent");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(ages.size()) * years.size());
    for (int a = ages.lo; a <= ages.hi; ++a) {
        for (int y = years.lo; y <= years.hi; ++y) out.push_back(rate(a, y));
    }
    return MortalityTable(ages, years, std::move(out));
}

MortalityTable parse_hmd_rates(std::istream& in, Sex sex, IntRange ages, IntRange years) {
    check_range(ages, "age");
    check_range(years, "year");
    WindowCollector window(ages, years);
    const std::size_t column = sex == Sex::Female ? 2 : sex == Sex::Male ? 3 : 4;

    std::string line;
    std::size_t line_no = 0;
    bool in_body = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = text::split_ws(line);
        if (tokens.empty()) continue;
        if (!in_body) {
            // Title and header lines precede the body; a bare numeric row
            // means the file has no header at all.
            if (lower(tokens[0]) == "year") {
                in_body = true;
                continue;
            }
            int probe = 0;
            if (!text::parse_int(tokens[0], probe)) continue;
            in_body = true;
        }
        if (tokens.size() != 5) malformed(line_no, line);
        int year = 0;
        int age = 0;
        if (!text::parse_int(tokens[0], year) || !parse_age_token(tokens[1], age)) {
            malformed(line_no, line);
        }
        const bool open_group = tokens[1].back() == '+';
        if (open_group && age != kOpenAgeGroup) malformed(line_no, line);
        std::optional<double> value;
        for (std::size_t c = 2; c < 5; ++c) {
            double v = 0.0;
            if (tokens[c] == ".") {
                if (c == column) value.reset();
                continue;
            }
            if (!text::parse_double(tokens[c], v)) malformed(line_no, line);
            if (c == column) value = v;
        }
        if (window.wants(age, year)) window.put(age, year, value, line_no);
    }
    return window.finish();
}

MortalityTable parse_rates_csv(std::istream& in, IntRange ages, IntRange years) {
    check_range(ages, "age");
    check_range(years, "year");
    WindowCollector window(ages, years);

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto cols = text::split(line, ',');
        if (!header_seen) {
            if (cols.size() != 3 || lower(cols[0]) != "year" || lower(cols[1]) != "age" ||
                lower(cols[2]) != "rate") {
                throw Error(Errc::MalformedRow, "expected header 'year,age,rate'");
            }
            header_seen = true;
            continue;
        }
        if (cols.size() != 3) malformed(line_no, line);
        int year = 0;
        int age = 0;
        if (!text::parse_int(cols[0], year) || !parse_age_token(cols[1], age)) {
            malformed(line_no, line);
        }
        std::optional<double> value;
        if (cols[2] != "." && !cols[2].empty()) {
            double v = 0.0;
            if (!text::parse_double(cols[2], v)) malformed(line_no, line);
            value = v;
        }
        if (window.wants(age, year)) window.put(age, year, value, line_no);
    }
    if (!header_seen) throw Error(Errc::MalformedRow, "empty rate file");
    return window.finish();
}

void write_rates_csv(std::ostream& out, const MortalityTable& table) {
    out << "year,age,rate\n";
    for (int y = table.years().lo; y <= table.years().hi; ++y) {
        for (int a = table.ages().lo; a <= table.ages().hi; ++a) {
            out << y << ',' << a << ',' << text::shortest(table.rate(a, y)) << '\n';
        }
    }
}

MortalityTable load_rates(const std::string& path, Sex sex, IntRange ages, IntRange years) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::DataError, "cannot open rate file '" + path + "'");
    std::string first;
    while (std::getline(in, first) && text::trim(first).empty()) {
    }
    in.clear();
    in.seekg(0);
    if (lower(text::trim(first)).rfind("year,", 0) == 0) {
        return parse_rates_csv(in, ages, years);
    }
    return parse_hmd_rates(in, sex, ages, years);
}

PopulationCounts parse_population_csv(std::istream& in) {
    PopulationCounts pop;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto cols = text::split(line, ',');
        if (!header_seen) {
            if (cols.size() != 2 || lower(cols[0]) != "age" || lower(cols[1]) != "count") {
                throw Error(Errc::MalformedRow, "expected header 'age,count'");
            }
            header_seen = true;
            continue;
        }
        int age = 0;
        double count = 0.0;
        if (cols.size() != 2 || !parse_age_token(cols[0], age) ||
            !text::parse_double(cols[1], count) || !std::isfinite(count) || count < 0.0) {
            malformed(line_no, line);
        }
        pop[age] = count;
    }
    if (!header_seen) throw Error(Errc::MalformedRow, "empty population file");
    return pop;
}

std::map<int, double> compute_age_weights(const PopulationCounts& pop, IntRange ages) {
    check_range(ages, "age");
    std::map<int, double> weights;
    double total = 0.0;
    for (int a = ages.lo; a <= ages.hi; ++a) {
        const auto it = pop.find(a);
        const double c = it == pop.end() ? 0.0 : it->second;
        weights[a] = c;
        total += c;
    }
    if (!(total > 0.0)) {
        throw Error(Errc::EmptySelection, "all population counts are zero in the age range");
    }
    for (auto& [age, w] : weights) w /= total;
    return weights;
}

Sex parse_sex(const std::string& name) {
    const auto n = lower(name);
    if (n == "female") return Sex::Female;
    if (n == "male") return Sex::Male;
    if (n == "total") return Sex::Total;
    throw Error(Errc::ConfigError, "unknown sex column '" + name + "'");
}

}  // namespace nathedge
