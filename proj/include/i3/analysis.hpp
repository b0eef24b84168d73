#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "i3/corpus.hpp"
#include "i3/error.hpp"

namespace i3 {

struct RankingRow {
    std::size_t rank = 0;  // 1-based position
    std::string unit_id;
    double value = 0.0;
};

struct RankingTable {
    std::string key;
    std::vector<RankingRow> rows;  // values non-increasing
};

// Descending by value; ties broken by unit_id so the order is a total one
// and permuting the input cannot change the table. Ranks are positions, not
// shared ranks. top_k = 0 keeps everything.
inline RankingTable rank_units(const std::map<std::string, double>& values,
                               std::string key, std::size_t top_k = 0) {
    if (values.empty()) throw DataError("nothing to rank");
    RankingTable table;
    table.key = std::move(key);
    for (const auto& [unit, value] : values)
        table.rows.push_back({0, unit, value});
    std::sort(table.rows.begin(), table.rows.end(),
              [](const RankingRow& a, const RankingRow& b) {
                  if (a.value != b.value) return a.value > b.value;
                  return a.unit_id < b.unit_id;
              });
    if (top_k > 0 && table.rows.size() > top_k) table.rows.resize(top_k);
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        table.rows[i].rank = i + 1;
    return table;
}

// Ascending 1-based ranks with ties averaged: (3,1,1) -> (3, 1.5, 1.5).
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(values.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               values[order[j + 1]] == values[order[i]])
            ++j;
        double shared = (static_cast<double>(i + 1) +
                         static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

// Spearman's rank-order correlation: Pearson correlation of the tie-averaged
// ranks. NaN when either rank vector has zero variance (undefined).
inline double spearman(const std::vector<double>& x,
                       const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("vectors differ in length");
    if (x.size() < 3) throw DataError("correlation needs at least 3 pairs");
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

struct CorrelationMatrix {
    std::vector<std::string> names;
    std::size_t n = 0;                     // rows per column
    std::vector<std::vector<double>> rho;  // symmetric; NaN marks undefined
};

// Pairwise Spearman over equally long named columns. The diagonal is 1
// except for constant columns, whose correlations are undefined throughout.
inline CorrelationMatrix correlation_matrix(
    const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
    if (columns.empty()) throw DataError("no columns to correlate");
    std::size_t n = columns.front().second.size();
    for (const auto& [name, col] : columns)
        if (col.size() != n)
            throw DataError("column '" + name + "' has a different length");
    CorrelationMatrix m;
    m.n = n;
    for (const auto& [name, col] : columns) m.names.push_back(name);
    m.rho.assign(columns.size(),
                 std::vector<double>(columns.size(),
                                     std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (std::size_t j = i; j < columns.size(); ++j) {
            double r = spearman(columns[i].second, columns[j].second);
            if (i == j && !std::isnan(r)) r = 1.0;
            m.rho[i][j] = r;
            m.rho[j][i] = r;
        }
    }
    return m;
}

// Largest h such that at least h papers have at least h citations each.
inline std::int64_t h_index(std::vector<std::int64_t> citations) {
    std::sort(citations.begin(), citations.end(), std::greater<>());
    std::int64_t h = 0;
    for (std::size_t i = 0; i < citations.size(); ++i) {
        if (citations[i] >= static_cast<std::int64_t>(i + 1))
            h = static_cast<std::int64_t>(i + 1);
        else
            break;
    }
    return h;
}

// Citations per publication (c/p).
inline double mean_citation_rate(double total_citations, double n) {
    if (!(n > 0.0)) throw DataError("c/p needs a positive paper count");
    return total_citations / n;
}

namespace detail {

// Seeded generator with hand-rolled draws on top of the standardized
// mt19937_64 stream. The std distributions are not sequence-stable across
// standard libraries, and generated fixtures must be identical everywhere.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // Uniform integer in [lo, hi], rejection sampled to avoid modulo bias.
    std::int64_t bounded(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw ConfigError("empty integer range");
        std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        if (range == 0) return static_cast<std::int64_t>(bits());  // full width
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t v = bits();
        while (v >= limit) v = bits();
        return lo + static_cast<std::int64_t>(v % range);
    }

    // Uniform in (0,1]; never 0, so it is safe under log.
    double unit_open() {
        return (static_cast<double>(bits() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (single branch; simplicity over speed).
    double normal() {
        double u1 = unit_open();
        double u2 = unit_open();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace detail

struct SyntheticSpec {
    std::uint64_t seed = 1;
    std::size_t units = 10;
    std::size_t papers_min = 50;
    std::size_t papers_max = 150;
    std::size_t categories = 3;
    double log_mean = 1.0;    // location of log citation counts
    double log_sigma = 1.25;  // spread; larger means a heavier tail
    double two_category_share = 0.3;  // papers listed under two categories
};

struct SyntheticCorpus {
    Corpus corpus;
    // Tallies recorded during generation, before any canonicalization, so
    // tests can check the corpus indexes against an independent source.
    std::map<std::string, std::size_t> unit_papers;
    std::map<std::string, std::int64_t> unit_citations;
    std::map<std::string, std::size_t> category_papers;
};

// Deterministic test corpus: citation counts follow a discretized lognormal
// (heavy-tailed, many ties in the low counts), units get a uniform random
// size in [papers_min, papers_max], and papers draw one or two categories
// from a fixed pool.
inline SyntheticCorpus synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.units == 0 || spec.papers_min == 0 ||
        spec.papers_min > spec.papers_max || spec.categories == 0)
        throw ConfigError("synthetic corpus needs positive sizes");
    detail::DeterministicRng rng(spec.seed);
    SyntheticCorpus out;
    std::vector<PublicationRecord> records;
    auto pad = [](std::size_t v, int width) {
        std::string s = std::to_string(v);
        while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
        return s;
    };
    std::size_t paper_seq = 0;
    for (std::size_t u = 0; u < spec.units; ++u) {
        std::string unit = "U" + pad(u + 1, 4);
        auto papers = static_cast<std::size_t>(rng.bounded(
            static_cast<std::int64_t>(spec.papers_min),
            static_cast<std::int64_t>(spec.papers_max)));
        for (std::size_t p = 0; p < papers; ++p) {
            PublicationRecord r;
            r.paper_id = "P" + pad(++paper_seq, 8);
            r.unit_id = unit;
            double lognormal =
                std::exp(spec.log_mean + spec.log_sigma * rng.normal());
            lognormal = std::min(lognormal, 9.0e18);  // cast stays in range
            r.citations =
                std::max<std::int64_t>(0, static_cast<std::int64_t>(lognormal) - 1);
            std::size_t k = 1;
            if (spec.categories > 1 &&
                rng.unit_open() <= spec.two_category_share)
                k = 2;
            std::int64_t first = rng.bounded(
                1, static_cast<std::int64_t>(spec.categories));
            r.categories.push_back("C" + pad(static_cast<std::size_t>(first), 2));
            if (k == 2) {
                std::int64_t second = first;
                while (second == first)
                    second = rng.bounded(
                        1, static_cast<std::int64_t>(spec.categories));
                r.categories.push_back(
                    "C" + pad(static_cast<std::size_t>(second), 2));
            }
            out.unit_papers[unit] += 1;
            out.unit_citations[unit] += r.citations;
            for (const auto& c : r.categories) out.category_papers[c] += 1;
            records.push_back(std::move(r));
        }
    }
    out.corpus = Corpus::from_records(std::move(records));
    return out;
}

}  // namespace i3
