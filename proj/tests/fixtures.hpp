#pragma once

// Shared record-level fixtures. The three-unit corpus is engineered so that
// population thresholds land exactly on the citation values 1000 / 100 / 10
// with every tie group filled to its nominal share (the tie fraction is 1 at
// each boundary), which pins the per-unit class counts of the two units of
// interest to round, hand-checkable numbers.

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "i3/corpus.hpp"

namespace fixtures {

inline void append_block(std::vector<i3::PublicationRecord>& records,
                         const std::string& unit, std::int64_t citations,
                         std::size_t count,
                         std::vector<std::string> categories = {}) {
    for (std::size_t i = 0; i < count; ++i) {
        i3::PublicationRecord r;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%08zu", records.size() + 1);
        r.paper_id = "P" + std::string(buf);
        r.unit_id = unit;
        r.citations = citations;
        r.categories = categories;
        records.push_back(std::move(r));
    }
}

// 100,000 records across three units. Population layers: 1,000 papers at or
// above 1000 citations (top-1%), 10,000 at or above 100 (top-10%), 50,000 at
// or above 10 (top-50%). JOURNAL_L cumulative counts: 91 / 2,545 / 20,141
// over N = 30,042; JOURNAL_S: 30 / 909 / 5,919 over N = 8,435.
inline std::vector<i3::PublicationRecord> three_unit_records(
    bool with_categories = false) {
    std::vector<std::string> cat;
    if (with_categories) cat = {"GEN"};
    std::vector<i3::PublicationRecord> records;
    records.reserve(100000);
    append_block(records, "JOURNAL_L", 1000, 91, cat);
    append_block(records, "JOURNAL_L", 100, 2454, cat);
    append_block(records, "JOURNAL_L", 10, 17596, cat);
    append_block(records, "JOURNAL_L", 0, 9901, cat);
    append_block(records, "JOURNAL_S", 1000, 30, cat);
    append_block(records, "JOURNAL_S", 100, 879, cat);
    append_block(records, "JOURNAL_S", 10, 5010, cat);
    append_block(records, "JOURNAL_S", 0, 2516, cat);
    append_block(records, "REST", 2000, 879, cat);
    append_block(records, "REST", 500, 5667, cat);
    append_block(records, "REST", 50, 17394, cat);
    append_block(records, "REST", 0, 37583, cat);
    return records;
}

inline i3::Corpus three_unit_corpus(bool with_categories = false) {
    return i3::Corpus::from_records(three_unit_records(with_categories));
}

// Hand-checkable field-normalization fixture over boundaries {0, 50}.
// Category X = {100, 0, 0, 0}: threshold 0, tie share 1/3. Category Y =
// {100, 200, 300, 400}: threshold 300, tie share 1. Record a1 sits in both
// categories: top in X, bottom in Y, so it contributes 0.5 to each of unit
// A's classes.
inline std::vector<i3::PublicationRecord> two_category_records() {
    std::vector<i3::PublicationRecord> records;
    auto add = [&](std::string id, std::string unit, std::int64_t cit,
                   std::vector<std::string> cats) {
        i3::PublicationRecord r;
        r.paper_id = std::move(id);
        r.unit_id = std::move(unit);
        r.citations = cit;
        r.categories = std::move(cats);
        records.push_back(std::move(r));
    };
    add("a1", "A", 100, {"X", "Y"});
    add("x1", "B", 0, {"X"});
    add("x2", "B", 0, {"X"});
    add("x3", "B", 0, {"X"});
    add("y1", "C", 200, {"Y"});
    add("y2", "C", 300, {"Y"});
    add("y3", "C", 400, {"Y"});
    return records;
}

inline std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() /
               ("i3cite_tests_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir / name;
}

inline std::string write_corpus_csv(const i3::Corpus& corpus,
                                    const std::string& name) {
    auto path = temp_path(name);
    std::ofstream out(path);
    i3::write_publications(out, corpus);
    return path.string();
}

}  // namespace fixtures
