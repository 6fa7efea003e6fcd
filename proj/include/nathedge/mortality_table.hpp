#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nathedge {

/// Inclusive integer range, used for ages and calendar years.
struct IntRange {
    int lo = 0;
    int hi = 0;

    int size() const noexcept { return hi >= lo ? hi - lo + 1 : 0; }
    bool contains(int v) const noexcept { return v >= lo && v <= hi; }
    friend bool operator==(const IntRange&, const IntRange&) = default;
};

enum class Sex { Female, Male, Total };

/// Rectangular grid of central death rates m(x, t), stored row-major by age.
/// Immutable after construction; every rate is finite and strictly positive.
class MortalityTable {
public:
    MortalityTable(IntRange ages, IntRange years, std::vector<double> rates);

    const IntRange& ages() const noexcept { return ages_; }
    const IntRange& years() const noexcept { return years_; }
    std::size_t n_ages() const noexcept { return static_cast<std::size_t>(ages_.size()); }
    std::size_t n_years() const noexcept { return static_cast<std::size_t>(years_.size()); }

    /// Rate for calendar age and year.
    double rate(int age, int year) const;
    /// Rate by zero-based row/column.
    double at(std::size_t age_idx, std::size_t year_idx) const noexcept {
        return rates_[age_idx * n_years() + year_idx];
    }
    const std::vector<double>& rates() const noexcept { return rates_; }

    MortalityTable restrict(IntRange ages, IntRange years) const;

private:
    IntRange ages_;
    IntRange years_;
    std::vector<double> rates_;
};

/// Reads the HMD "Mx 1x1" text layout (Year, Age, Female, Male, Total).
/// Missing cells ("."), when inside the requested window, are errors.
MortalityTable parse_hmd_rates(std::istream& in, Sex sex, IntRange ages, IntRange years);

/// Reads the CSV fallback (header `year,age,rate`), restricted to the window.
MortalityTable parse_rates_csv(std::istream& in, IntRange ages, IntRange years);

/// Writes the CSV fallback with shortest round-trip number formatting.
void write_rates_csv(std::ostream& out, const MortalityTable& table);

/// Opens a rate file, choosing the HMD or CSV reader from its first line.
MortalityTable load_rates(const std::string& path, Sex sex, IntRange ages, IntRange years);

using PopulationCounts = std::map<int, double>;

/// Reads `age,count` CSV.
PopulationCounts parse_population_csv(std::istream& in);

/// Population share of each age within the range; the weights sum to one.
std::map<int, double> compute_age_weights(const PopulationCounts& pop, IntRange ages);

Sex parse_sex(const std::string& name);

}  // namespace nathedge
