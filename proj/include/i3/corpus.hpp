#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "i3/csv.hpp"
#include "i3/error.hpp"

namespace i3 {

struct PublicationRecord {
    std::string paper_id;
    std::string unit_id;
    std::int64_t citations = 0;
    std::vector<std::string> categories;  // deduplicated, sorted
};

// Per-unit aggregates from an external source, used for rank correlations.
// Any field but unit_id may be missing.
struct ExternalMetricsRecord {
    std::string unit_id;
    std::optional<double> n_pub;
    std::optional<double> n_cit;
    std::optional<double> jif2;
    std::optional<double> jif5;
};

struct ValidationIssue {
    enum class Severity { warning, error };
    Severity severity = Severity::warning;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    std::size_t n_records = 0;
    std::size_t n_units = 0;
    std::size_t n_categories = 0;
    std::size_t n_uncategorized = 0;
    std::size_t n_zero_citation = 0;

    bool ok() const {
        return std::none_of(issues.begin(), issues.end(), [](const auto& i) {
            return i.severity == ValidationIssue::Severity::error;
        });
    }
};

// The full population of records under study. Records are held in a canonical
// order (ascending paper_id) so every downstream traversal, and therefore
// every floating-point accumulation, is reproducible regardless of input
// order. Units and categories index into the record array.
class Corpus {
public:
    static Corpus from_records(std::vector<PublicationRecord> records) {
        Corpus c;
        std::sort(records.begin(), records.end(),
                  [](const auto& a, const auto& b) {
                      return a.paper_id < b.paper_id;
                  });
        for (std::size_t i = 0; i < records.size(); ++i) {
            auto& r = records[i];
            if (r.paper_id.empty())
                throw DataError("record with empty paper_id");
            if (i > 0 && r.paper_id == records[i - 1].paper_id)
                throw DataError("duplicate paper_id '" + r.paper_id + "'");
            if (r.unit_id.empty())
                throw DataError("paper '" + r.paper_id + "' has empty unit_id");
            if (r.citations < 0)
                throw DataError("paper '" + r.paper_id +
                                "' has negative citations");
            std::sort(r.categories.begin(), r.categories.end());
            r.categories.erase(
                std::unique(r.categories.begin(), r.categories.end()),
                r.categories.end());
        }
        c.records_ = std::move(records);
        for (std::size_t i = 0; i < c.records_.size(); ++i) {
            const auto& r = c.records_[i];
            c.unit_index_[r.unit_id].push_back(i);
            for (const auto& cat : r.categories)
                c.category_index_[cat].push_back(i);
        }
        return c;
    }

    const std::vector<PublicationRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    // Unit ids in lexicographic order, with record indices in canonical order.
    const std::map<std::string, std::vector<std::size_t>>& units() const {
        return unit_index_;
    }

    const std::map<std::string, std::vector<std::size_t>>& categories() const {
        return category_index_;
    }

    const std::vector<std::size_t>& unit_records(const std::string& unit) const {
        auto it = unit_index_.find(unit);
        if (it == unit_index_.end())
            throw DataError("unknown unit '" + unit + "'");
        return it->second;
    }

    bool has_unit(const std::string& unit) const {
        return unit_index_.count(unit) != 0;
    }

    // Structural checks beyond what construction enforces. Uncategorized
    // records are legal for global counting but degrade field normalization,
    // so they surface as warnings rather than errors.
    ValidationReport validate() const {
        ValidationReport rep;
        rep.n_records = records_.size();
        rep.n_units = unit_index_.size();
        rep.n_categories = category_index_.size();
        if (records_.empty()) {
            rep.issues.push_back({ValidationIssue::Severity::error,
                                  "corpus contains no records"});
            return rep;
        }
        for (const auto& r : records_) {
            if (r.categories.empty()) ++rep.n_uncategorized;
            if (r.citations == 0) ++rep.n_zero_citation;
        }
        if (rep.n_uncategorized > 0)
            rep.issues.push_back(
                {ValidationIssue::Severity::warning,
                 std::to_string(rep.n_uncategorized) +
                     " record(s) have no category; field-normalized counting "
                     "will drop them"});
        for (const auto& [cat, idx] : category_index_) {
            if (idx.size() < 100)
                rep.issues.push_back(
                    {ValidationIssue::Severity::warning,
                     "category '" + cat + "' has only " +
                         std::to_string(idx.size()) +
                         " record(s); percentile thresholds will be coarse"});
        }
        return rep;
    }

private:
    std::vector<PublicationRecord> records_;
    std::map<std::string, std::vector<std::size_t>> unit_index_;
    std::map<std::string, std::vector<std::size_t>> category_index_;
};

enum class InputFormat { csv, jsonl };

inline InputFormat parse_input_format(std::string_view text) {
    if (text == "csv") return InputFormat::csv;
    if (text == "jsonl") return InputFormat::jsonl;
    throw ConfigError("unknown input format '" + std::string(text) +
                      "' (expected csv or jsonl)");
}

namespace detail {

inline std::vector<std::string> split_categories(std::string_view cell) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= cell.size()) {
        std::size_t semi = cell.find(';', pos);
        std::string_view item = cell.substr(
            pos, semi == std::string_view::npos ? std::string_view::npos
                                                : semi - pos);
        // trim surrounding whitespace
        std::size_t b = item.find_first_not_of(" \t");
        std::size_t e = item.find_last_not_of(" \t");
        if (b != std::string_view::npos)
            out.emplace_back(item.substr(b, e - b + 1));
        if (semi == std::string_view::npos) break;
        pos = semi + 1;
    }
    return out;
}

inline std::int64_t parse_count(const std::string& cell, std::size_t line,
                                std::string_view column) {
    if (cell.empty())
        throw DataError("line " + std::to_string(line) + ": empty " +
                        std::string(column));
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(cell, &used);
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line) + ": " +
                        std::string(column) + " '" + cell +
                        "' is not an integer");
    }
    if (used != cell.size())
        throw DataError("line " + std::to_string(line) + ": " +
                        std::string(column) + " '" + cell +
                        "' has trailing characters");
    return v;
}

inline std::optional<double> parse_optional_double(const std::string& cell,
                                                   std::size_t line,
                                                   std::string_view column) {
    if (cell.empty()) return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line) + ": " +
                        std::string(column) + " '" + cell +
                        "' is not a number");
    }
    if (used != cell.size())
        throw DataError("line " + std::to_string(line) + ": " +
                        std::string(column) + " '" + cell +
                        "' has trailing characters");
    return v;
}

inline void expect_header(const std::vector<std::string>& fields,
                          const std::vector<std::string>& expected) {
    if (fields != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) want.push_back(',');
            want += expected[i];
        }
        throw DataError("bad header; expected '" + want + "'");
    }
}

}  // namespace detail

struct IngestResult {
    Corpus corpus;
    std::size_t n_read = 0;
};

// Reads publication records. CSV expects a header
// paper_id,unit_id,citations,categories with categories ';'-separated and
// possibly empty. JSONL expects one object per line with the same keys
// (categories as an array, optional).
inline IngestResult ingest_publications(std::istream& in, InputFormat format) {
    std::vector<PublicationRecord> records;
    if (format == InputFormat::csv) {
        std::vector<std::string> fields;
        std::size_t line = 1, at = 1;
        if (!csv::read_record(in, fields, line, at))
            throw DataError("publications file is empty");
        detail::expect_header(fields,
                              {"paper_id", "unit_id", "citations", "categories"});
        while (csv::read_record(in, fields, line, at)) {
            if (fields.size() != 4)
                throw DataError("line " + std::to_string(at) + ": expected 4 "
                                "fields, got " + std::to_string(fields.size()));
            PublicationRecord r;
            r.paper_id = fields[0];
            r.unit_id = fields[1];
            r.citations = detail::parse_count(fields[2], at, "citations");
            r.categories = detail::split_categories(fields[3]);
            records.push_back(std::move(r));
        }
    } else {
        std::string text;
        std::size_t at = 0;
        while (std::getline(in, text)) {
            ++at;
            if (text.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(text);
            } catch (const nlohmann::json::exception& e) {
                throw DataError("line " + std::to_string(at) + ": " + e.what());
            }
            if (!j.is_object())
                throw DataError("line " + std::to_string(at) +
                                ": expected a JSON object");
            PublicationRecord r;
            try {
                r.paper_id = j.at("paper_id").get<std::string>();
                r.unit_id = j.at("unit_id").get<std::string>();
                r.citations = j.at("citations").get<std::int64_t>();
                if (j.contains("categories"))
                    r.categories =
                        j.at("categories").get<std::vector<std::string>>();
            } catch (const nlohmann::json::exception& e) {
                throw DataError("line " + std::to_string(at) + ": " + e.what());
            }
            records.push_back(std::move(r));
        }
    }
    IngestResult res;
    res.n_read = records.size();
    res.corpus = Corpus::from_records(std::move(records));
    return res;
}

// Reads per-unit external metrics: unit_id,n_pub,n_cit,jif2,jif5 with any
// value cell allowed to be empty.
inline std::vector<ExternalMetricsRecord> ingest_metrics(std::istream& in,
                                                         InputFormat format) {
    std::vector<ExternalMetricsRecord> out;
    std::unordered_set<std::string> seen;
    auto check_unit = [&](const ExternalMetricsRecord& r, std::size_t at) {
        if (r.unit_id.empty())
            throw DataError("line " + std::to_string(at) + ": empty unit_id");
        if (!seen.insert(r.unit_id).second)
            throw DataError("line " + std::to_string(at) +
                            ": duplicate unit '" + r.unit_id + "'");
    };
    if (format == InputFormat::csv) {
        std::vector<std::string> fields;
        std::size_t line = 1, at = 1;
        if (!csv::read_record(in, fields, line, at))
            throw DataError("metrics file is empty");
        detail::expect_header(fields,
                              {"unit_id", "n_pub", "n_cit", "jif2", "jif5"});
        while (csv::read_record(in, fields, line, at)) {
            if (fields.size() != 5)
                throw DataError("line " + std::to_string(at) + ": expected 5 "
                                "fields, got " + std::to_string(fields.size()));
            ExternalMetricsRecord r;
            r.unit_id = fields[0];
            r.n_pub = detail::parse_optional_double(fields[1], at, "n_pub");
            r.n_cit = detail::parse_optional_double(fields[2], at, "n_cit");
            r.jif2 = detail::parse_optional_double(fields[3], at, "jif2");
            r.jif5 = detail::parse_optional_double(fields[4], at, "jif5");
            check_unit(r, at);
            out.push_back(std::move(r));
        }
    } else {
        std::string text;
        std::size_t at = 0;
        while (std::getline(in, text)) {
            ++at;
            if (text.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(text);
            } catch (const nlohmann::json::exception& e) {
                throw DataError("line " + std::to_string(at) + ": " + e.what());
            }
            ExternalMetricsRecord r;
            try {
                r.unit_id = j.at("unit_id").get<std::string>();
                auto opt = [&](const char* key) -> std::optional<double> {
                    if (!j.contains(key) || j.at(key).is_null())
                        return std::nullopt;
                    return j.at(key).get<double>();
                };
                r.n_pub = opt("n_pub");
                r.n_cit = opt("n_cit");
                r.jif2 = opt("jif2");
                r.jif5 = opt("jif5");
            } catch (const nlohmann::json::exception& e) {
                throw DataError("line " + std::to_string(at) + ": " + e.what());
            }
            check_unit(r, at);
            out.push_back(std::move(r));
        }
    }
    return out;
}

inline void write_publications(std::ostream& out, const Corpus& corpus) {
    csv::write_record(out, {"paper_id", "unit_id", "citations", "categories"});
    for (const auto& r : corpus.records()) {
        std::string cats;
        for (std::size_t i = 0; i < r.categories.size(); ++i) {
            if (i) cats.push_back(';');
            cats += r.categories[i];
        }
        csv::write_record(
            out, {r.paper_id, r.unit_id, std::to_string(r.citations), cats});
    }
}

}  // namespace i3
