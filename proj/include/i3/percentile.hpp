#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "i3/corpus.hpp"
#include "i3/error.hpp"
#include "i3/scheme.hpp"

namespace i3 {

// Percentile boundaries to evaluate, ascending, starting at 0 and below 100.
class BoundarySet {
public:
    static BoundarySet make(std::vector<double> values) {
        if (values.empty())
            throw ConfigError("boundary set is empty");
        if (values.front() != 0.0)
            throw ConfigError("boundary set must start at 0");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 0.0 || values[i] >= 100.0)
                throw ConfigError("boundary " +
                                  detail::format_trimmed(values[i]) +
                                  " outside [0,100)");
            if (i > 0 && !(values[i] > values[i - 1]))
                throw ConfigError("boundaries must be strictly ascending");
        }
        BoundarySet b;
        b.values_ = std::move(values);
        return b;
    }

    static BoundarySet from_scheme(const WeightingScheme& scheme) {
        return make(scheme.boundary_values());
    }

    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

enum class CountingMode { at_or_above, fractional };

inline CountingMode parse_counting_mode(std::string_view text) {
    if (text == "at-or-above") return CountingMode::at_or_above;
    if (text == "fractional") return CountingMode::fractional;
    throw ConfigError("unknown counting mode '" + std::string(text) +
                      "' (expected at-or-above or fractional)");
}

// Threshold data for one positive boundary b over a reference population of
// n papers: the citation count at descending rank ceil(n*(100-b)/100), the
// number of papers strictly above and exactly at that count, and the nominal
// top share n*(100-b)/100 the boundary is meant to capture.
struct BoundaryThreshold {
    double boundary = 0.0;
    std::int64_t threshold = 0;
    std::int64_t above = 0;
    std::int64_t tied = 0;
    double target_mass = 0.0;
};

struct ThresholdSet {
    std::int64_t n = 0;
    std::vector<BoundaryThreshold> entries;  // ascending boundary, b > 0 only

    const BoundaryThreshold& at(double boundary) const {
        for (const auto& e : entries)
            if (e.boundary == boundary) return e;
        throw DataError("no threshold for boundary " +
                        detail::format_trimmed(boundary));
    }
};

// Thresholds over one reference population. Ranks use exact integer
// arithmetic whenever the boundary is a whole percent, so no ceiling ever
// lands on the wrong side of a representable value.
inline ThresholdSet compute_thresholds(std::vector<std::int64_t> values,
                                       const BoundarySet& boundaries) {
    if (values.empty())
        throw DataError("cannot compute thresholds over an empty population");
    std::sort(values.begin(), values.end(), std::greater<>());
    ThresholdSet set;
    set.n = static_cast<std::int64_t>(values.size());
    for (double b : boundaries.values()) {
        if (b <= 0.0) continue;
        BoundaryThreshold e;
        e.boundary = b;
        std::int64_t rank = 0;
        if (detail::nearly_integer(b)) {
            std::int64_t num = set.n * (100 - static_cast<std::int64_t>(std::llround(b)));
            rank = (num + 99) / 100;
            e.target_mass = static_cast<double>(num) / 100.0;
        } else {
            double x = static_cast<double>(set.n) * (100.0 - b) / 100.0;
            rank = static_cast<std::int64_t>(std::ceil(x - 1e-9));
            e.target_mass = x;
        }
        rank = std::clamp<std::int64_t>(rank, 1, set.n);
        e.threshold = values[static_cast<std::size_t>(rank - 1)];
        auto first_le = std::lower_bound(values.begin(), values.end(),
                                         e.threshold, std::greater<>());
        auto first_lt = std::upper_bound(values.begin(), values.end(),
                                         e.threshold, std::greater<>());
        e.above = first_le - values.begin();
        e.tied = first_lt - first_le;
        set.entries.push_back(e);
    }
    return set;
}

// Share of the papers tied at the threshold that belongs to the top class,
// chosen so the population-wide top mass equals the nominal share exactly.
// A threshold drawn from a real population always has at least one tied
// paper (the one at the delimiting rank) and a raw share inside [0,1]; a
// context violating either is inconsistent with its population.
inline double tie_fraction(const BoundaryThreshold& e) {
    if (e.tied <= 0)
        throw DataError("threshold context has no papers at the threshold");
    double f = (e.target_mass - static_cast<double>(e.above)) /
               static_cast<double>(e.tied);
    if (f < -1e-9 || f > 1.0 + 1e-9)
        throw DataError("tie share " + detail::format_trimmed(f) +
                        " outside [0,1]; threshold context inconsistent");
    return std::clamp(f, 0.0, 1.0);
}

// Mass one paper contributes at or above the boundary.
inline double top_mass(std::int64_t citations, const BoundaryThreshold& e,
                       CountingMode mode) {
    if (citations > e.threshold) return 1.0;
    if (citations < e.threshold) return 0.0;
    return mode == CountingMode::at_or_above ? 1.0 : tie_fraction(e);
}

// Mass a unit's papers contribute at or above the boundary.
inline double count_top(const std::vector<std::int64_t>& citations,
                        const BoundaryThreshold& e, CountingMode mode) {
    double mass = 0.0;
    for (std::int64_t c : citations) mass += top_mass(c, e, mode);
    return mass;
}

// Per-unit class masses: cumulative (at or above each positive boundary) and
// per distinct class, over the unit's n papers.
struct UnitClassCounts {
    std::string unit_id;
    double n = 0.0;
    std::map<double, double> cumulative;
    std::map<double, double> distinct;
};

struct ClassCounts {
    CountingMode mode = CountingMode::at_or_above;
    bool field_normalized = false;
    double population_n = 0.0;
    ThresholdSet global_thresholds;                      // global counting
    std::map<std::string, ThresholdSet> category_thresholds;  // field counting
    std::map<std::string, UnitClassCounts> units;
};

namespace detail {

// Runs fn(unit_index) over [0, count) split into contiguous chunks, one per
// thread. Each unit's result is independent, so the partition cannot change
// any value, only who computes it.
inline void for_each_unit(std::size_t count, unsigned threads,
                          const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = count * w / workers;
        std::size_t hi = count * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Counts every unit's papers against thresholds drawn from the whole corpus.
inline ClassCounts class_counts_global(const Corpus& corpus,
                                       const BoundarySet& boundaries,
                                       CountingMode mode,
                                       unsigned threads = 1) {
    if (corpus.empty()) throw DataError("corpus contains no records");
    std::vector<std::int64_t> all;
    all.reserve(corpus.size());
    for (const auto& r : corpus.records()) all.push_back(r.citations);
    ClassCounts out;
    out.mode = mode;
    out.population_n = static_cast<double>(corpus.size());
    out.global_thresholds = compute_thresholds(std::move(all), boundaries);

    std::vector<const std::pair<const std::string,
                                std::vector<std::size_t>>*> units;
    for (const auto& u : corpus.units()) units.push_back(&u);
    std::vector<UnitClassCounts> results(units.size());
    detail::for_each_unit(
        units.size(), threads, [&](std::size_t ui) {
            const auto& [unit_id, indices] = *units[ui];
            UnitClassCounts ucc;
            ucc.unit_id = unit_id;
            ucc.n = static_cast<double>(indices.size());
            for (const auto& e : out.global_thresholds.entries) {
                double mass = 0.0;
                for (std::size_t idx : indices)
                    mass += top_mass(corpus.records()[idx].citations, e, mode);
                ucc.cumulative[e.boundary] = mass;
            }
            ucc.distinct = distinct_counts(ucc.cumulative, ucc.n);
            results[ui] = std::move(ucc);
        });
    for (auto& ucc : results) {
        std::string id = ucc.unit_id;
        out.units.emplace(std::move(id), std::move(ucc));
    }
    return out;
}

// Counts with per-category thresholds: each paper is ranked within each of
// its categories against that category's own citation distribution, takes
// the fractional tie share there, and contributes 1/k of the result per
// category. A paper's masses sum to one, so unit sizes are preserved; papers
// without categories contribute nothing.
inline ClassCounts class_counts_field_normalized(const Corpus& corpus,
                                                 const BoundarySet& boundaries,
                                                 unsigned threads = 1) {
    if (corpus.empty()) throw DataError("corpus contains no records");
    ClassCounts out;
    out.mode = CountingMode::fractional;
    out.field_normalized = true;
    for (const auto& [cat, indices] : corpus.categories()) {
        std::vector<std::int64_t> vals;
        vals.reserve(indices.size());
        for (std::size_t idx : indices)
            vals.push_back(corpus.records()[idx].citations);
        out.category_thresholds.emplace(
            cat, compute_thresholds(std::move(vals), boundaries));
    }

    std::vector<const std::pair<const std::string,
                                std::vector<std::size_t>>*> units;
    for (const auto& u : corpus.units()) units.push_back(&u);
    std::vector<UnitClassCounts> results(units.size());
    detail::for_each_unit(
        units.size(), threads, [&](std::size_t ui) {
            const auto& [unit_id, indices] = *units[ui];
            UnitClassCounts ucc;
            ucc.unit_id = unit_id;
            for (double b : boundaries.values())
                if (b > 0.0) ucc.cumulative[b] = 0.0;
            for (std::size_t idx : indices) {
                const auto& rec = corpus.records()[idx];
                if (rec.categories.empty()) continue;
                double share = 1.0 / static_cast<double>(rec.categories.size());
                ucc.n += 1.0;
                for (const auto& cat : rec.categories) {
                    const auto& ts = out.category_thresholds.at(cat);
                    for (const auto& e : ts.entries)
                        ucc.cumulative[e.boundary] +=
                            share *
                            top_mass(rec.citations, e, CountingMode::fractional);
                }
            }
            ucc.distinct = distinct_counts(ucc.cumulative, ucc.n);
            results[ui] = std::move(ucc);
        });
    double pop = 0.0;
    for (auto& ucc : results) {
        pop += ucc.n;
        std::string id = ucc.unit_id;
        out.units.emplace(std::move(id), std::move(ucc));
    }
    out.population_n = pop;
    return out;
}

inline IndicatorResult indicator_result(const UnitClassCounts& counts,
                                        const WeightingScheme& scheme) {
    return indicator_result(counts.distinct, counts.n, scheme, counts.unit_id);
}

// The top-10% excellence count as the one-class weighting 90-1: evaluating
// it over any counts that include boundary 90 recovers the cumulative
// top-10% figure.
inline double ptop10_equivalence(const UnitClassCounts& counts) {
    if (counts.cumulative.find(90.0) == counts.cumulative.end())
        throw DataError("counts lack boundary 90");
    return compute_i3(counts.distinct, schemes::ptop10());
}

}  // namespace i3
