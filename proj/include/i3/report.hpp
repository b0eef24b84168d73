#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "i3/analysis.hpp"
#include "i3/corpus.hpp"
#include "i3/csv.hpp"
#include "i3/percentile.hpp"
#include "i3/scheme.hpp"
#include "i3/stats.hpp"

namespace i3 {

enum class OutputFormat { csv, json, markdown };

inline OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    if (text == "markdown") return OutputFormat::markdown;
    throw ConfigError("unknown output format '" + std::string(text) +
                      "' (expected csv, json or markdown)");
}

namespace fmt {

// Fixed-decimal rendering: 2 decimals for counts and I3 values, 3 for
// statistics, stable across platforms. Undefined values render as "undef".
inline std::string fixed(double v, int decimals) {
    if (std::isnan(v)) return "undef";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos &&
        !s.empty() && s.front() == '-')
        s.erase(s.begin());  // never print negative zero
    return s;
}

inline std::string count(double v) { return fixed(v, 2); }
inline std::string stat(double v) { return fixed(v, 3); }

}  // namespace fmt

namespace detail {

inline std::string md_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else out.push_back(c);
    }
    return out;
}

inline void md_row(std::ostream& os, const std::vector<std::string>& cells) {
    os << '|';
    for (const auto& c : cells) os << ' ' << md_escape(c) << " |";
    os << '\n';
}

inline void md_header(std::ostream& os, const std::vector<std::string>& cells) {
    md_row(os, cells);
    os << '|';
    for (std::size_t i = 0; i < cells.size(); ++i) os << "---|";
    os << '\n';
}

// JSON with non-finite doubles mapped to null, since JSON has no NaN.
inline nlohmann::json num(double v) {
    if (std::isnan(v) || std::isinf(v)) return nullptr;
    return v;
}

inline nlohmann::json threshold_json(const ThresholdSet& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : set.entries) {
        arr.push_back({{"boundary", e.boundary},
                       {"threshold", e.threshold},
                       {"above", e.above},
                       {"tied", e.tied},
                       {"target_mass", e.target_mass},
                       {"tie_fraction", tie_fraction(e)}});
    }
    return {{"population_n", set.n}, {"entries", arr}};
}

}  // namespace detail

// One unit's full computed row: class masses plus the indicator summary.
struct UnitReport {
    UnitClassCounts counts;
    IndicatorResult indicator;
};

struct ComputeReport {
    std::string scheme_name;
    std::string scheme_notation;
    std::string mode;           // at-or-above | fractional
    std::string normalization;  // global | field
    std::vector<double> boundaries;  // ascending, including 0
    ClassCounts source;              // thresholds for metadata output
    std::vector<UnitReport> units;   // unit_id ascending
};

namespace detail {

inline std::vector<std::pair<double, double>> class_intervals(
    const std::vector<double>& boundaries) {
    std::vector<std::pair<double, double>> out;  // (lower, upper) descending
    for (std::size_t i = boundaries.size(); i-- > 0;) {
        double upper = i + 1 < boundaries.size() ? boundaries[i + 1] : 100.0;
        out.emplace_back(boundaries[i], upper);
    }
    return out;
}

}  // namespace detail

inline void render_compute(std::ostream& os, const ComputeReport& rep,
                           OutputFormat format) {
    auto intervals = detail::class_intervals(rep.boundaries);
    std::vector<std::string> cum_names, dist_names;
    for (std::size_t i = rep.boundaries.size(); i-- > 0;) {
        if (rep.boundaries[i] > 0.0)
            cum_names.push_back("cum_" +
                                detail::format_trimmed(rep.boundaries[i]));
    }
    for (const auto& [lower, upper] : intervals)
        dist_names.push_back("dist_" + detail::format_trimmed(lower) + "_" +
                             detail::format_trimmed(upper));

    if (format == OutputFormat::json) {
        nlohmann::json units = nlohmann::json::array();
        for (const auto& u : rep.units) {
            nlohmann::json cum = nlohmann::json::object();
            for (const auto& [b, v] : u.counts.cumulative)
                cum[detail::format_trimmed(b)] = v;
            nlohmann::json dist = nlohmann::json::object();
            for (const auto& [b, v] : u.counts.distinct)
                dist[detail::format_trimmed(b)] = v;
            units.push_back({{"unit_id", u.indicator.unit_id},
                             {"n", u.indicator.n},
                             {"cumulative", cum},
                             {"distinct", dist},
                             {"i3", u.indicator.i3},
                             {"i3_per_n", u.indicator.i3_per_n},
                             {"i3_min", u.indicator.i3_min},
                             {"i3_max", u.indicator.i3_max},
                             {"percent_of_max", u.indicator.percent_of_max}});
        }
        nlohmann::json thresholds;
        if (rep.normalization == "field") {
            thresholds = nlohmann::json::object();
            for (const auto& [cat, set] : rep.source.category_thresholds)
                thresholds[cat] = detail::threshold_json(set);
        } else {
            thresholds = detail::threshold_json(rep.source.global_thresholds);
        }
        nlohmann::json doc = {{"scheme", rep.scheme_name},
                              {"notation", rep.scheme_notation},
                              {"mode", rep.mode},
                              {"normalization", rep.normalization},
                              {"thresholds", thresholds},
                              {"units", units}};
        os << doc.dump(2) << '\n';
        return;
    }

    if (format == OutputFormat::markdown) {
        os << "## Indicator values (" << rep.scheme_name << " = "
           << rep.scheme_notation << ", " << rep.mode << ", "
           << rep.normalization << ")\n\n";
        std::vector<std::string> header{"Unit", "N"};
        for (const auto& c : cum_names) header.push_back(c);
        for (const auto& d : dist_names) header.push_back(d);
        header.insert(header.end(),
                      {"I3", "I3/N", "% of max"});
        detail::md_header(os, header);
        for (const auto& u : rep.units) {
            std::vector<std::string> row{u.indicator.unit_id,
                                         fmt::count(u.indicator.n)};
            for (auto it = u.counts.cumulative.rbegin();
                 it != u.counts.cumulative.rend(); ++it)
                row.push_back(fmt::count(it->second));
            for (auto it = u.counts.distinct.rbegin();
                 it != u.counts.distinct.rend(); ++it)
                row.push_back(fmt::count(it->second));
            row.push_back(fmt::count(u.indicator.i3));
            row.push_back(fmt::stat(u.indicator.i3_per_n));
            row.push_back(fmt::count(u.indicator.percent_of_max));
            detail::md_row(os, row);
        }
        return;
    }

    std::vector<std::string> header{"unit_id", "n"};
    for (const auto& c : cum_names) header.push_back(c);
    for (const auto& d : dist_names) header.push_back(d);
    header.insert(header.end(), {"i3", "i3_per_n", "i3_min", "i3_max",
                                 "percent_of_max"});
    csv::write_record(os, header);
    for (const auto& u : rep.units) {
        std::vector<std::string> row{u.indicator.unit_id,
                                     fmt::count(u.indicator.n)};
        for (auto it = u.counts.cumulative.rbegin();
             it != u.counts.cumulative.rend(); ++it)
            row.push_back(fmt::count(it->second));
        for (auto it = u.counts.distinct.rbegin();
             it != u.counts.distinct.rend(); ++it)
            row.push_back(fmt::count(it->second));
        row.push_back(fmt::count(u.indicator.i3));
        row.push_back(fmt::stat(u.indicator.i3_per_n));
        row.push_back(fmt::count(u.indicator.i3_min));
        row.push_back(fmt::count(u.indicator.i3_max));
        row.push_back(fmt::count(u.indicator.percent_of_max));
        csv::write_record(os, row);
    }
}

inline void render_comparison(std::ostream& os, const ComparisonReport& rep,
                              OutputFormat format) {
    const auto& t = rep.totals;
    CriticalValues chi_crit;
    if (t.df >= 1) chi_crit = chi_square_critical_values(t.df);
    auto z_crit = z_critical_values();

    if (format == OutputFormat::json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : rep.rows) {
            rows.push_back(
                {{"class", r.label},
                 {"weight", r.weight},
                 {"obs_distinct", r.obs_distinct},
                 {"ref_distinct", r.ref_distinct},
                 {"obs_i3", r.obs_i3},
                 {"ref_i3", r.ref_i3},
                 {"chi2", detail::num(r.chi2_contribution)},
                 {"residual", detail::num(r.residual)},
                 {"residual_sig",
                  significance_label(r.residual_significance)},
                 {"p_obs", r.p_obs},
                 {"p_ref", r.p_ref},
                 {"z", detail::num(r.z)},
                 {"z_sig", significance_label(r.z_significance)},
                 {"h", detail::num(r.h)},
                 {"w_contribution", detail::num(r.w_contribution)}});
        }
        nlohmann::json doc = {
            {"observed", rep.obs_label},
            {"reference", rep.ref_label},
            {"scheme", rep.scheme_name},
            {"orientation", "observed minus reference"},
            {"rows", rows},
            {"totals",
             {{"obs_n", t.obs_n},
              {"ref_n", t.ref_n},
              {"obs_i3", t.obs_i3},
              {"ref_i3", t.ref_i3},
              {"chi2", detail::num(t.chi2)},
              {"df", t.df},
              {"chi2_sig", significance_label(t.chi2_significance)},
              {"grand_total", t.grand_total},
              {"cramers_v", detail::num(t.cramers_v)},
              {"cohens_w", detail::num(t.cohens_w)}}},
            {"critical_values",
             {{"chi2", t.df >= 1
                           ? nlohmann::json{{"p05", chi_crit.p05},
                                            {"p01", chi_crit.p01},
                                            {"p001", chi_crit.p001}}
                           : nlohmann::json(nullptr)},
              {"z", {{"p05", z_crit.p05},
                     {"p01", z_crit.p01},
                     {"p001", z_crit.p001}}}}},
            {"warnings", rep.warnings}};
        os << doc.dump(2) << '\n';
        return;
    }

    if (format == OutputFormat::markdown) {
        os << "## " << detail::md_escape(rep.obs_label) << " vs "
           << detail::md_escape(rep.ref_label) << " (" << rep.scheme_name
           << ")\n\n";
        os << "z, h and residuals are oriented observed minus reference.\n\n";
        detail::md_header(os, {"Class", "Papers (obs)", "Papers (ref)",
                               "I3 (obs)", "I3 (ref)", "chi2", "Residual",
                               "Sig."});
        for (const auto& r : rep.rows)
            detail::md_row(os, {r.label, fmt::count(r.obs_distinct),
                                fmt::count(r.ref_distinct),
                                fmt::count(r.obs_i3), fmt::count(r.ref_i3),
                                fmt::stat(r.chi2_contribution),
                                fmt::stat(r.residual),
                                significance_label(r.residual_significance)});
        detail::md_row(os, {"Total", fmt::count(t.obs_n), fmt::count(t.ref_n),
                            fmt::count(t.obs_i3), fmt::count(t.ref_i3),
                            fmt::stat(t.chi2), "", ""});
        os << '\n';
        detail::md_header(os, {"Class", "p (obs)", "p (ref)", "z", "Sig.",
                               "h", "w contrib."});
        for (const auto& r : rep.rows)
            detail::md_row(os, {r.label, fmt::stat(r.p_obs),
                                fmt::stat(r.p_ref), fmt::stat(r.z),
                                significance_label(r.z_significance),
                                fmt::stat(r.h), fmt::stat(r.w_contribution)});
        os << '\n';
        os << "Totals: chi2 = " << fmt::stat(t.chi2) << " (df = " << t.df
           << ", " << significance_label(t.chi2_significance)
           << "), grand total = " << fmt::count(t.grand_total)
           << ", Cramer's V = " << fmt::stat(t.cramers_v)
           << ", Cohen's w = " << fmt::stat(t.cohens_w) << "\n";
        os << "Critical values: ";
        if (t.df >= 1)
            os << "chi2 (df=" << t.df << "): " << fmt::stat(chi_crit.p05)
               << " (p<.05), " << fmt::stat(chi_crit.p01) << " (p<.01), "
               << fmt::stat(chi_crit.p001) << " (p<.001); ";
        os << "z: " << fmt::stat(z_crit.p05) << ", " << fmt::stat(z_crit.p01)
           << ", " << fmt::stat(z_crit.p001) << "\n";
        for (const auto& w : rep.warnings) os << "Note: " << w << "\n";
        return;
    }

    csv::write_record(os, {"class", "obs_distinct", "ref_distinct", "obs_i3",
                           "ref_i3", "chi2", "residual", "residual_sig",
                           "p_obs", "p_ref", "z", "z_sig", "h",
                           "w_contribution"});
    for (const auto& r : rep.rows)
        csv::write_record(
            os, {r.label, fmt::count(r.obs_distinct),
                 fmt::count(r.ref_distinct), fmt::count(r.obs_i3),
                 fmt::count(r.ref_i3), fmt::stat(r.chi2_contribution),
                 fmt::stat(r.residual),
                 significance_label(r.residual_significance),
                 fmt::stat(r.p_obs), fmt::stat(r.p_ref), fmt::stat(r.z),
                 significance_label(r.z_significance), fmt::stat(r.h),
                 fmt::stat(r.w_contribution)});
    os << '\n';
    csv::write_record(os, {"key", "value"});
    csv::write_record(os, {"observed", rep.obs_label});
    csv::write_record(os, {"reference", rep.ref_label});
    csv::write_record(os, {"scheme", rep.scheme_name});
    csv::write_record(os, {"obs_n", fmt::count(t.obs_n)});
    csv::write_record(os, {"ref_n", fmt::count(t.ref_n)});
    csv::write_record(os, {"obs_i3", fmt::count(t.obs_i3)});
    csv::write_record(os, {"ref_i3", fmt::count(t.ref_i3)});
    csv::write_record(os, {"chi2", fmt::stat(t.chi2)});
    csv::write_record(os, {"df", std::to_string(t.df)});
    csv::write_record(os, {"chi2_sig", significance_label(t.chi2_significance)});
    csv::write_record(os, {"grand_total", fmt::count(t.grand_total)});
    csv::write_record(os, {"cramers_v", fmt::stat(t.cramers_v)});
    csv::write_record(os, {"cohens_w", fmt::stat(t.cohens_w)});
}

inline void render_ranking(std::ostream& os, const RankingTable& table,
                           OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : table.rows)
            rows.push_back({{"rank", r.rank},
                            {"unit_id", r.unit_id},
                            {"value", detail::num(r.value)}});
        nlohmann::json doc = {{"key", table.key}, {"rows", rows}};
        os << doc.dump(2) << '\n';
        return;
    }
    if (format == OutputFormat::markdown) {
        os << "## Ranking by " << table.key << "\n\n";
        detail::md_header(os, {"Rank", "Unit", table.key});
        for (const auto& r : table.rows)
            detail::md_row(os, {std::to_string(r.rank), r.unit_id,
                                fmt::count(r.value)});
        return;
    }
    csv::write_record(os, {"rank", "unit_id", table.key});
    for (const auto& r : table.rows)
        csv::write_record(
            os, {std::to_string(r.rank), r.unit_id, fmt::count(r.value)});
}

inline void render_correlation(std::ostream& os, const CorrelationMatrix& m,
                               OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::json rho = nlohmann::json::array();
        for (const auto& row : m.rho) {
            nlohmann::json r = nlohmann::json::array();
            for (double v : row) r.push_back(detail::num(v));
            rho.push_back(r);
        }
        nlohmann::json doc = {
            {"n", m.n}, {"variables", m.names}, {"rho", rho}};
        os << doc.dump(2) << '\n';
        return;
    }
    if (format == OutputFormat::markdown) {
        os << "## Spearman rank correlations (n = " << m.n << ")\n\n";
        std::vector<std::string> header{"Variable"};
        header.insert(header.end(), m.names.begin(), m.names.end());
        detail::md_header(os, header);
        for (std::size_t i = 0; i < m.names.size(); ++i) {
            std::vector<std::string> row{m.names[i]};
            for (double v : m.rho[i]) row.push_back(fmt::stat(v));
            detail::md_row(os, row);
        }
        return;
    }
    std::vector<std::string> header{"variable"};
    header.insert(header.end(), m.names.begin(), m.names.end());
    csv::write_record(os, header);
    for (std::size_t i = 0; i < m.names.size(); ++i) {
        std::vector<std::string> row{m.names[i]};
        for (double v : m.rho[i]) row.push_back(fmt::stat(v));
        csv::write_record(os, row);
    }
}

inline void render_validation(std::ostream& os, const ValidationReport& rep,
                              OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::json issues = nlohmann::json::array();
        for (const auto& i : rep.issues)
            issues.push_back(
                {{"severity",
                  i.severity == ValidationIssue::Severity::error ? "error"
                                                                 : "warning"},
                 {"message", i.message}});
        nlohmann::json doc = {{"ok", rep.ok()},
                              {"records", rep.n_records},
                              {"units", rep.n_units},
                              {"categories", rep.n_categories},
                              {"uncategorized", rep.n_uncategorized},
                              {"zero_citation", rep.n_zero_citation},
                              {"issues", issues}};
        os << doc.dump(2) << '\n';
        return;
    }
    if (format == OutputFormat::markdown) {
        os << "## Corpus validation\n\n";
        detail::md_header(os, {"Check", "Value"});
        detail::md_row(os, {"ok", rep.ok() ? "yes" : "no"});
        detail::md_row(os, {"records", std::to_string(rep.n_records)});
        detail::md_row(os, {"units", std::to_string(rep.n_units)});
        detail::md_row(os, {"categories", std::to_string(rep.n_categories)});
        detail::md_row(os, {"uncategorized",
                            std::to_string(rep.n_uncategorized)});
        detail::md_row(os, {"zero_citation",
                            std::to_string(rep.n_zero_citation)});
        if (!rep.issues.empty()) {
            os << '\n';
            for (const auto& i : rep.issues)
                os << "- "
                   << (i.severity == ValidationIssue::Severity::error
                           ? "error: "
                           : "warning: ")
                   << i.message << '\n';
        }
        return;
    }
    csv::write_record(os, {"key", "value"});
    csv::write_record(os, {"ok", rep.ok() ? "yes" : "no"});
    csv::write_record(os, {"records", std::to_string(rep.n_records)});
    csv::write_record(os, {"units", std::to_string(rep.n_units)});
    csv::write_record(os, {"categories", std::to_string(rep.n_categories)});
    csv::write_record(os, {"uncategorized",
                           std::to_string(rep.n_uncategorized)});
    csv::write_record(os, {"zero_citation",
                           std::to_string(rep.n_zero_citation)});
    os << '\n';
    csv::write_record(os, {"severity", "message"});
    for (const auto& i : rep.issues)
        csv::write_record(
            os, {i.severity == ValidationIssue::Severity::error ? "error"
                                                                : "warning",
                 i.message});
}

}  // namespace i3
