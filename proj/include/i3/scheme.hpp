#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "i3/error.hpp"

namespace i3 {

namespace detail {

inline bool nearly_integer(double x) {
    return std::abs(x - std::round(x)) < 1e-9;
}

// "99" not "99.000000"; keeps up to 6 significant decimals otherwise.
inline std::string format_trimmed(double x) {
    if (nearly_integer(x)) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", std::round(x));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace detail

// One percentile class: papers whose percentile rank falls in [lower, upper)
// count here with the given weight. The upper bound is implied by the next
// class up (100 for the top class).
struct SchemeClass {
    double lower = 0.0;
    double weight = 1.0;
};

// An ordered weighting over percentile classes, written in the compact
// notation "99-100,90-10,50-2,0-1": top-1% papers weigh 100, the rest of the
// top-10% weigh 10, the rest of the top-50% weigh 2, the bottom half weighs 1.
// Classes are stored in descending boundary order. A scheme may stop above
// zero (e.g. "90-1", the top-10% count): everything below its last boundary
// then carries an implicit weight of zero.
class WeightingScheme {
public:
    static WeightingScheme make(std::string name,
                                std::vector<SchemeClass> classes) {
        if (classes.empty())
            throw ConfigError("scheme '" + name + "': no classes");
        for (std::size_t i = 0; i < classes.size(); ++i) {
            const auto& c = classes[i];
            if (c.lower < 0.0 || c.lower >= 100.0)
                throw ConfigError("scheme '" + name + "': boundary " +
                                  detail::format_trimmed(c.lower) +
                                  " outside [0,100)");
            if (!(c.weight > 0.0))
                throw ConfigError("scheme '" + name + "': weight must be positive");
            if (i > 0) {
                if (!(c.lower < classes[i - 1].lower))
                    throw ConfigError("scheme '" + name +
                                      "': boundaries must be strictly decreasing");
                if (c.weight > classes[i - 1].weight)
                    throw ConfigError("scheme '" + name +
                                      "': weights must not increase downward");
            }
        }
        WeightingScheme s;
        s.name_ = std::move(name);
        s.classes_ = std::move(classes);
        return s;
    }

    // Parses either a preset name (I3STAR, PR6, QUANTILE4, LINEAR4, PTOP10)
    // or a "PR-W" list such as "99-100,90-10,50-2,0-1".
    static WeightingScheme parse(std::string_view text);

    const std::string& name() const { return name_; }
    const std::vector<SchemeClass>& classes() const { return classes_; }
    std::size_t class_count() const { return classes_.size(); }

    // Upper percentile bound of class i (100 for the top class).
    double upper_of(std::size_t i) const {
        return i == 0 ? 100.0 : classes_[i - 1].lower;
    }

    double top_weight() const { return classes_.front().weight; }

    bool has_explicit_bottom() const { return classes_.back().lower == 0.0; }

    // Weight applied at the very bottom of the distribution; zero when the
    // scheme stops above boundary 0.
    double bottom_weight() const {
        return has_explicit_bottom() ? classes_.back().weight : 0.0;
    }

    // Class lower bounds plus 0, ascending. This is the boundary set the
    // percentile engine needs to evaluate the scheme.
    std::vector<double> boundary_values() const {
        std::vector<double> b;
        if (!has_explicit_bottom()) b.push_back(0.0);
        for (auto it = classes_.rbegin(); it != classes_.rend(); ++it)
            b.push_back(it->lower);
        return b;
    }

    // Round-trips through parse(): "99-100,90-10,50-2,0-1".
    std::string notation() const {
        std::string out;
        for (std::size_t i = 0; i < classes_.size(); ++i) {
            if (i) out.push_back(',');
            out += detail::format_trimmed(classes_[i].lower);
            out.push_back('-');
            out += detail::format_trimmed(classes_[i].weight);
        }
        return out;
    }

private:
    std::string name_;
    std::vector<SchemeClass> classes_;
};

namespace schemes {

inline WeightingScheme i3star() {
    return WeightingScheme::make("I3STAR",
                                 {{99, 100}, {90, 10}, {50, 2}, {0, 1}});
}

inline WeightingScheme pr6() {
    return WeightingScheme::make(
        "PR6", {{99, 6}, {95, 5}, {90, 4}, {75, 3}, {50, 2}, {0, 1}});
}

inline WeightingScheme quantile4() {
    return WeightingScheme::make("QUANTILE4",
                                 {{99, 99}, {90, 89}, {50, 50}, {0, 1}});
}

inline WeightingScheme linear4() {
    return WeightingScheme::make("LINEAR4",
                                 {{99, 6}, {90, 4}, {50, 2}, {0, 1}});
}

inline WeightingScheme ptop10() {
    return WeightingScheme::make("PTOP10", {{90, 1}});
}

}  // namespace schemes

inline WeightingScheme WeightingScheme::parse(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (upper == "I3STAR") return schemes::i3star();
    if (upper == "PR6") return schemes::pr6();
    if (upper == "QUANTILE4") return schemes::quantile4();
    if (upper == "LINEAR4") return schemes::linear4();
    if (upper == "PTOP10") return schemes::ptop10();

    std::vector<SchemeClass> classes;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item = text.substr(
            pos, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - pos);
        std::size_t dash = item.find('-');
        if (dash == std::string_view::npos || dash == 0 ||
            dash + 1 >= item.size())
            throw ConfigError("scheme item '" + std::string(item) +
                              "': expected PR-W");
        auto to_double = [&](std::string_view v) {
            std::string s(v);
            std::size_t used = 0;
            double out = 0.0;
            try {
                out = std::stod(s, &used);
            } catch (const std::exception&) {
                throw ConfigError("scheme item '" + std::string(item) +
                                  "': not a number: '" + s + "'");
            }
            if (used != s.size())
                throw ConfigError("scheme item '" + std::string(item) +
                                  "': trailing characters in '" + s + "'");
            return out;
        };
        SchemeClass c;
        c.lower = to_double(item.substr(0, dash));
        c.weight = to_double(item.substr(dash + 1));
        classes.push_back(c);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return make(std::string(text), std::move(classes));
}

// Display label of a class, matching the usual rendering of percentile rank
// classes: "99-100" for the top class, "90-98" for [90,99) when the bounds
// are whole percents, "[50,89.5)" otherwise.
inline std::string class_label(double lower, double upper, bool top) {
    using detail::format_trimmed;
    if (top) return format_trimmed(lower) + "-100";
    if (detail::nearly_integer(lower) && detail::nearly_integer(upper))
        return format_trimmed(lower) + "-" + format_trimmed(upper - 1);
    return "[" + format_trimmed(lower) + "," + format_trimmed(upper) + ")";
}

// Converts nested cumulative top-layer counts into counts per distinct class.
// `cumulative` maps each positive class boundary to the number of papers at
// or above it; the bottom class absorbs the remainder up to `total`.
inline std::map<double, double> distinct_counts(
    const std::map<double, double>& cumulative, double total) {
    std::map<double, double> distinct;
    double higher = 0.0;  // cumulative count of all classes above
    bool first = true;
    for (auto it = cumulative.rbegin(); it != cumulative.rend(); ++it) {
        double boundary = it->first;
        double cum = it->second;
        if (boundary <= 0.0)
            throw DataError("cumulative counts must be keyed by positive boundaries");
        if (!first && cum < higher - 1e-9)
            throw DataError("cumulative counts decrease toward lower boundaries");
        double n = cum - higher;
        if (n < -1e-9)
            throw DataError("negative distinct count at boundary " +
                            detail::format_trimmed(boundary));
        distinct[boundary] = std::max(n, 0.0);
        higher = cum;
        first = false;
    }
    double bottom = total - higher;
    if (bottom < -1e-9)
        throw DataError("cumulative counts exceed the total");
    distinct[0.0] = std::max(bottom, 0.0);
    return distinct;
}

// Weighted sum over the scheme's classes: sum of n_i x W_i. The distinct map
// must contain every scheme boundary; it may be finer (extra boundaries
// subdividing a class), in which case sub-class counts pick up their class's
// weight. Counts below the scheme's last boundary weigh zero.
inline double compute_i3(const std::map<double, double>& distinct,
                         const WeightingScheme& scheme) {
    for (const auto& cls : scheme.classes())
        if (distinct.find(cls.lower) == distinct.end())
            throw DataError("distinct counts lack scheme boundary " +
                            detail::format_trimmed(cls.lower));
    double value = 0.0;
    for (const auto& [lower, count] : distinct) {
        double weight = 0.0;
        for (const auto& cls : scheme.classes()) {
            if (lower >= cls.lower) {
                weight = cls.weight;
                break;
            }
        }
        value += count * weight;
    }
    return value;
}

struct Bounds {
    double min = 0.0;
    double max = 0.0;
};

// Extremes of the indicator for a unit of size n: all papers in the top class
// versus all papers at the bottom.
inline Bounds bounds(double n, const WeightingScheme& scheme) {
    return {n * scheme.bottom_weight(), n * scheme.top_weight()};
}

struct IndicatorResult {
    std::string unit_id;
    std::string scheme_name;
    double i3 = 0.0;
    double n = 0.0;
    double i3_per_n = 0.0;    // size-independent expected value per paper
    double i3_min = 0.0;
    double i3_max = 0.0;
    double percent_of_max = 0.0;
};

inline IndicatorResult indicator_result(const std::map<double, double>& distinct,
                                        double n, const WeightingScheme& scheme,
                                        std::string unit_id = "") {
    if (!(n > 0.0)) throw DataError("unit '" + unit_id + "' has no papers");
    IndicatorResult r;
    r.unit_id = std::move(unit_id);
    r.scheme_name = scheme.name();
    r.i3 = compute_i3(distinct, scheme);
    r.n = n;
    r.i3_per_n = r.i3 / n;
    Bounds b = bounds(n, scheme);
    r.i3_min = b.min;
    r.i3_max = b.max;
    r.percent_of_max = 100.0 * r.i3 / r.i3_max;
    return r;
}

}  // namespace i3
