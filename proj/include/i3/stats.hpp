#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "i3/error.hpp"
#include "i3/scheme.hpp"

namespace i3 {

enum class Significance { undefined, none, p05, p01, p001 };

inline const char* significance_label(Significance s) {
    switch (s) {
        case Significance::p001: return "p<.001";
        case Significance::p01: return "p<.01";
        case Significance::p05: return "p<.05";
        case Significance::none: return "n.s.";
        default: return "undef";
    }
}

namespace detail {

// Regularized lower incomplete gamma P(a,x), series form; converges fast for
// x < a+1.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) via Lentz's continued fraction;
// converges fast for x >= a+1.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

}  // namespace detail

inline double chi_square_cdf(double x, double df) {
    if (df <= 0.0) throw ConfigError("chi-square df must be positive");
    return detail::gamma_p(df / 2.0, x / 2.0);
}

// Upper-tail critical value: x with P(X > x) = alpha, by bisection.
inline double chi_square_critical(double df, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("alpha must lie in (0,1)");
    double lo = 0.0, hi = df + 10.0;
    while (1.0 - chi_square_cdf(hi, df) > alpha) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (1.0 - chi_square_cdf(mid, df) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

struct CriticalValues {
    double p05 = 0.0;
    double p01 = 0.0;
    double p001 = 0.0;
};

// The df=3 cutoffs are the standard table values, hard-coded so reported
// labels match published tables digit for digit; other df use the computed
// quantiles.
inline CriticalValues chi_square_critical_values(std::size_t df) {
    if (df == 3) return {7.815, 11.345, 16.266};
    double fdf = static_cast<double>(df);
    return {chi_square_critical(fdf, 0.05), chi_square_critical(fdf, 0.01),
            chi_square_critical(fdf, 0.001)};
}

inline constexpr CriticalValues z_critical_values() {
    return {1.96, 2.576, 3.291};
}

namespace detail {

inline Significance grade(double statistic, const CriticalValues& crit) {
    if (std::isnan(statistic)) return Significance::undefined;
    if (statistic >= crit.p001) return Significance::p001;
    if (statistic >= crit.p01) return Significance::p01;
    if (statistic >= crit.p05) return Significance::p05;
    return Significance::none;
}

}  // namespace detail

inline Significance chi_square_significance(double chi2, std::size_t df) {
    return detail::grade(chi2, chi_square_critical_values(df));
}

inline Significance z_significance(double z) {
    return detail::grade(std::abs(z), z_critical_values());
}

// A labeled column of class values (distinct counts or weighted values).
struct ClassVector {
    std::vector<std::string> labels;
    std::vector<double> values;
};

struct ContingencyResult {
    double chi2 = 0.0;
    std::size_t df = 0;
    double grand_total = 0.0;
    double cramers_v = 0.0;
    Significance significance = Significance::none;
    std::vector<double> row_contributions;           // aligned to input rows
    std::vector<std::vector<double>> expected;       // per-cell expecteds
    std::vector<std::string> warnings;
};

// Pearson chi-square over an r x c table of non-negative totals, expected
// cells from the margins. All-zero rows carry no information: they are
// dropped with a warning and df is reduced; their contributions stay zero.
inline ContingencyResult contingency_chi_square(
    const std::vector<std::vector<double>>& table) {
    if (table.empty()) throw DataError("contingency table has no rows");
    std::size_t cols = table.front().size();
    if (cols < 2) throw DataError("contingency table needs at least 2 columns");
    for (const auto& row : table) {
        if (row.size() != cols)
            throw DataError("contingency table rows have unequal width");
        for (double v : row)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw DataError("contingency cells must be non-negative");
    }
    std::vector<double> row_sum(table.size(), 0.0), col_sum(cols, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            row_sum[i] += table[i][j];
            col_sum[j] += table[i][j];
            grand += table[i][j];
        }
    for (std::size_t j = 0; j < cols; ++j)
        if (!(col_sum[j] > 0.0))
            throw DataError("contingency column " + std::to_string(j + 1) +
                            " has zero total");
    ContingencyResult res;
    res.grand_total = grand;
    res.row_contributions.assign(table.size(), 0.0);
    res.expected.assign(table.size(), std::vector<double>(cols, 0.0));
    std::size_t r_eff = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (row_sum[i] > 0.0) {
            ++r_eff;
        } else {
            res.warnings.push_back("class row " + std::to_string(i + 1) +
                                   " is empty in both columns; dropped");
        }
    }
    if (r_eff < 2) {
        res.warnings.push_back(
            "fewer than 2 non-empty class rows; association undefined");
        return res;
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (row_sum[i] <= 0.0) continue;
        for (std::size_t j = 0; j < cols; ++j) {
            double expected = row_sum[i] * col_sum[j] / grand;
            res.expected[i][j] = expected;
            double diff = table[i][j] - expected;
            res.row_contributions[i] += diff * diff / expected;
        }
        res.chi2 += res.row_contributions[i];
    }
    res.df = (r_eff - 1) * (cols - 1);
    res.significance = chi_square_significance(res.chi2, res.df);
    std::size_t k = std::min(r_eff, cols);
    res.cramers_v = std::sqrt(res.chi2 / (grand * static_cast<double>(k - 1)));
    return res;
}

inline ContingencyResult contingency_chi_square(const ClassVector& a,
                                                const ClassVector& b) {
    if (a.labels != b.labels)
        throw DataError("contingency columns have different class labels");
    if (a.values.size() != a.labels.size() ||
        b.values.size() != b.labels.size())
        throw DataError("class vector labels and values differ in length");
    std::vector<std::vector<double>> table;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        table.push_back({a.values[i], b.values[i]});
    return contingency_chi_square(table);
}

// (O - E) / sqrt(E) per cell, each interpretable as a z-value; expected
// cells must be positive.
inline std::vector<double> standardized_residuals(
    const std::vector<double>& observed, const std::vector<double>& expected) {
    if (observed.size() != expected.size())
        throw DataError("residuals need equally long observed/expected vectors");
    std::vector<double> out(observed.size());
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0))
            throw DataError("expected counts must be positive");
        out[i] = (observed[i] - expected[i]) / std::sqrt(expected[i]);
    }
    return out;
}

inline double cramers_v(double chi2, double grand_total, std::size_t rows,
                        std::size_t cols) {
    if (!(grand_total > 0.0)) throw DataError("grand total must be positive");
    std::size_t k = std::min(rows, cols);
    if (k < 2) throw DataError("Cramer's V needs at least a 2x2 table");
    return std::sqrt(chi2 / (grand_total * static_cast<double>(k - 1)));
}

// Pooled two-proportion z statistic for x1/n1 versus x2/n2. NaN when the
// pooled proportion is 0 or 1 (no variance, test undefined).
inline double two_proportion_z(double x1, double n1, double x2, double n2) {
    if (!(n1 > 0.0) || !(n2 > 0.0))
        throw DataError("two-proportion z needs positive sample sizes");
    if (x1 < 0.0 || x1 > n1 || x2 < 0.0 || x2 > n2)
        throw DataError("proportion counts must lie within their samples");
    double p1 = x1 / n1, p2 = x2 / n2;
    double pooled = (x1 + x2) / (n1 + n2);
    if (pooled <= 0.0 || pooled >= 1.0)
        return std::numeric_limits<double>::quiet_NaN();
    double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    return (p1 - p2) / se;
}

// Cohen's h: arcsine-transformed difference of two proportions.
inline double cohens_h(double p1, double p2) {
    if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0)
        throw DataError("proportions must lie in [0,1]");
    auto phi = [](double p) { return 2.0 * std::asin(std::sqrt(p)); };
    return phi(p1) - phi(p2);
}

struct CohensW {
    double w = 0.0;
    std::vector<double> contributions;  // (p_obs - p_ref)^2 / p_ref per class
};

// Cohen's w between an observed and a reference distribution over the same
// classes; both must be full distributions and the reference must give every
// class positive mass.
inline CohensW cohens_w(const std::vector<double>& p_obs,
                        const std::vector<double>& p_ref) {
    if (p_obs.size() != p_ref.size())
        throw DataError("effect size needs equally long distributions");
    double so = 0.0, sr = 0.0;
    for (double p : p_obs) so += p;
    for (double p : p_ref) sr += p;
    if (std::abs(so - 1.0) > 1e-9 || std::abs(sr - 1.0) > 1e-9)
        throw DataError("proportion vectors must sum to 1");
    CohensW out;
    out.contributions.resize(p_obs.size());
    for (std::size_t i = 0; i < p_obs.size(); ++i) {
        if (!(p_ref[i] > 0.0))
            throw DataError("reference distribution has an empty class");
        double d = p_obs[i] - p_ref[i];
        out.contributions[i] = d * d / p_ref[i];
        out.w += out.contributions[i];
    }
    out.w = std::sqrt(out.w);
    return out;
}

struct ExpectedBaseline {
    double n = 0.0;
    std::map<double, double> distinct_expected;  // class width share of n
    std::map<double, double> i3_expected;        // expected count x weight
};

// Reference profile when citations carry no signal: every paper lands in a
// class with probability equal to the class width. Multiplication before the
// final division keeps round counts exact (30042 papers, width 1 -> 300.42).
inline ExpectedBaseline expected_baseline(double n,
                                          const WeightingScheme& scheme) {
    if (!(n > 0.0)) throw DataError("baseline needs a positive paper count");
    ExpectedBaseline out;
    out.n = n;
    for (std::size_t i = 0; i < scheme.class_count(); ++i) {
        const auto& cls = scheme.classes()[i];
        double width = scheme.upper_of(i) - cls.lower;
        double count = (n * width) / 100.0;
        out.distinct_expected[cls.lower] = count;
        out.i3_expected[cls.lower] = count * cls.weight;
    }
    if (!scheme.has_explicit_bottom()) {
        double width = scheme.classes().back().lower;
        out.distinct_expected[0.0] = (n * width) / 100.0;
        out.i3_expected[0.0] = 0.0;
    }
    return out;
}

struct ComparisonRow {
    std::string label;
    double lower = 0.0;
    double weight = 0.0;
    double obs_distinct = 0.0;
    double ref_distinct = 0.0;
    double obs_i3 = 0.0;
    double ref_i3 = 0.0;
    double chi2_contribution = 0.0;
    double residual = 0.0;  // obs counts vs reference profile at obs size
    Significance residual_significance = Significance::none;
    double p_obs = 0.0;
    double p_ref = 0.0;
    double z = 0.0;
    Significance z_significance = Significance::none;
    double h = 0.0;
    double w_contribution = 0.0;
};

struct ComparisonTotals {
    double obs_n = 0.0;
    double ref_n = 0.0;
    double obs_i3 = 0.0;
    double ref_i3 = 0.0;
    double chi2 = 0.0;
    std::size_t df = 0;
    Significance chi2_significance = Significance::none;
    double grand_total = 0.0;
    double cramers_v = 0.0;
    double cohens_w = 0.0;
};

// z, h, and the residuals are oriented observed minus reference throughout;
// renderers state this, since published tables mix orientations.
struct ComparisonReport {
    std::string obs_label;
    std::string ref_label;
    std::string scheme_name;
    std::vector<ComparisonRow> rows;  // descending classes, bottom last
    ComparisonTotals totals;
    std::vector<std::string> warnings;
};

namespace detail {

struct ClassSlice {
    std::string label;
    double lower;
    double weight;
};

// Scheme classes top-down, plus the implicit zero-weight bottom class when
// the scheme stops above zero, so comparisons always cover the whole unit.
inline std::vector<ClassSlice> class_slices(const WeightingScheme& scheme) {
    std::vector<ClassSlice> out;
    for (std::size_t i = 0; i < scheme.class_count(); ++i) {
        const auto& cls = scheme.classes()[i];
        out.push_back({class_label(cls.lower, scheme.upper_of(i), i == 0),
                       cls.lower, cls.weight});
    }
    if (!scheme.has_explicit_bottom())
        out.push_back(
            {class_label(0.0, scheme.classes().back().lower, false), 0.0, 0.0});
    return out;
}

inline double distinct_at(const std::map<double, double>& distinct,
                          double lower) {
    auto it = distinct.find(lower);
    if (it == distinct.end())
        throw DataError("distinct counts lack boundary " +
                        format_trimmed(lower));
    return it->second;
}

}  // namespace detail

// Full side-by-side comparison of two class profiles under one scheme: a
// chi-square block on the weighted vectors, and a residual / proportion /
// effect-size block on the class counts. The reference column drives
// expectations; residuals rescale the reference profile to the observed
// unit's size.
inline ComparisonReport compare_profiles(const std::map<double, double>& obs,
                                         double obs_n,
                                         const std::map<double, double>& ref,
                                         double ref_n,
                                         const WeightingScheme& scheme,
                                         std::string obs_label,
                                         std::string ref_label) {
    if (!(obs_n > 0.0) || !(ref_n > 0.0))
        throw DataError("comparison needs non-empty profiles");
    ComparisonReport rep;
    rep.obs_label = std::move(obs_label);
    rep.ref_label = std::move(ref_label);
    rep.scheme_name = scheme.name();

    auto slices = detail::class_slices(scheme);
    std::vector<std::vector<double>> weighted;
    std::vector<double> obs_counts, ref_scaled, p_obs, p_ref;
    for (const auto& s : slices) {
        ComparisonRow row;
        row.label = s.label;
        row.lower = s.lower;
        row.weight = s.weight;
        row.obs_distinct = detail::distinct_at(obs, s.lower);
        row.ref_distinct = detail::distinct_at(ref, s.lower);
        row.obs_i3 = row.obs_distinct * s.weight;
        row.ref_i3 = row.ref_distinct * s.weight;
        row.p_obs = row.obs_distinct / obs_n;
        row.p_ref = row.ref_distinct / ref_n;
        row.z = two_proportion_z(row.obs_distinct, obs_n, row.ref_distinct,
                                 ref_n);
        row.z_significance = z_significance(row.z);
        row.h = cohens_h(row.p_obs, row.p_ref);
        weighted.push_back({row.obs_i3, row.ref_i3});
        obs_counts.push_back(row.obs_distinct);
        ref_scaled.push_back(row.p_ref * obs_n);
        p_obs.push_back(row.p_obs);
        p_ref.push_back(row.p_ref);
        rep.rows.push_back(std::move(row));
    }

    auto residuals = standardized_residuals(obs_counts, ref_scaled);
    auto chi = contingency_chi_square(weighted);
    auto w = cohens_w(p_obs, p_ref);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        auto& row = rep.rows[i];
        row.residual = residuals[i];
        row.residual_significance = z_significance(row.residual);
        row.chi2_contribution = chi.row_contributions[i];
        row.w_contribution = w.contributions[i];
    }
    rep.warnings = chi.warnings;

    auto& t = rep.totals;
    t.obs_n = obs_n;
    t.ref_n = ref_n;
    for (const auto& row : rep.rows) {
        t.obs_i3 += row.obs_i3;
        t.ref_i3 += row.ref_i3;
    }
    t.chi2 = chi.chi2;
    t.df = chi.df;
    t.chi2_significance = chi.significance;
    t.grand_total = chi.grand_total;
    t.cramers_v = chi.cramers_v;
    t.cohens_w = w.w;
    return rep;
}

// Unit against the no-signal expectation at its own size. The expectation is
// treated as a reference sample of the same size, which makes the z column a
// conservative check of each class against its nominal share.
inline ComparisonReport compare_with_expected(
    const std::map<double, double>& obs, double obs_n,
    const WeightingScheme& scheme, std::string obs_label) {
    auto base = expected_baseline(obs_n, scheme);
    return compare_profiles(obs, obs_n, base.distinct_expected, obs_n, scheme,
                            std::move(obs_label), "expected");
}

}  // namespace i3
