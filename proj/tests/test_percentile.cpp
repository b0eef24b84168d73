#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "i3/percentile.hpp"
#include "fixtures.hpp"

using Catch::Matchers::WithinAbs;
using i3::BoundarySet;
using i3::CountingMode;

namespace {

// Threshold by the rank definition alone, written against a sorted copy so
// library and test cannot share a mistake.
std::int64_t oracle_threshold(std::vector<std::int64_t> values, double b) {
    std::sort(values.begin(), values.end(), std::greater<>());
    double x = static_cast<double>(values.size()) * (100.0 - b) / 100.0;
    auto rank = static_cast<std::size_t>(std::ceil(x - 1e-9));
    rank = std::max<std::size_t>(rank, 1);
    return values[rank - 1];
}

}  // namespace

TEST_CASE("boundary sets are ascending, start at 0, stay below 100") {
    auto b = BoundarySet::make({0, 50, 90, 99});
    REQUIRE(b.values() == std::vector<double>{0, 50, 90, 99});
    REQUIRE_THROWS_AS(BoundarySet::make({}), i3::ConfigError);
    REQUIRE_THROWS_AS(BoundarySet::make({50, 90}), i3::ConfigError);
    REQUIRE_THROWS_AS(BoundarySet::make({0, 50, 100}), i3::ConfigError);
    REQUIRE_THROWS_AS(BoundarySet::make({0, 90, 50}), i3::ConfigError);
    REQUIRE_THROWS_AS(BoundarySet::make({0, 50, 50}), i3::ConfigError);
    auto from = BoundarySet::from_scheme(i3::schemes::i3star());
    REQUIRE(from.values() == std::vector<double>{0, 50, 90, 99});
}

TEST_CASE("counting mode names parse") {
    REQUIRE(i3::parse_counting_mode("at-or-above") ==
            CountingMode::at_or_above);
    REQUIRE(i3::parse_counting_mode("fractional") == CountingMode::fractional);
    REQUIRE_THROWS_AS(i3::parse_counting_mode("exact"), i3::ConfigError);
}

TEST_CASE("all-tied population puts the median threshold on the tie") {
    auto set = i3::compute_thresholds({5, 5, 5, 5},
                                      BoundarySet::make({0, 50}));
    REQUIRE(set.n == 4);
    REQUIRE(set.entries.size() == 1);  // boundary 0 needs no threshold
    const auto& e = set.at(50.0);
    REQUIRE(e.threshold == 5);
    REQUIRE(e.above == 0);
    REQUIRE(e.tied == 4);
    REQUIRE(e.target_mass == 2.0);
    REQUIRE(i3::tie_fraction(e) == 0.5);
}

TEST_CASE("ten-paper example hits rank 1 at the 90th and rank 5 at the 50th") {
    std::vector<std::int64_t> values{10, 8, 8, 5, 3, 2, 1, 0, 0, 0};
    auto set = i3::compute_thresholds(values, BoundarySet::make({0, 50, 90}));
    const auto& p90 = set.at(90.0);
    REQUIRE(p90.threshold == 10);
    REQUIRE(p90.above == 0);
    REQUIRE(p90.tied == 1);
    REQUIRE(i3::tie_fraction(p90) == 1.0);
    const auto& p50 = set.at(50.0);
    REQUIRE(p50.threshold == 3);
    REQUIRE(p50.above == 4);
    REQUIRE(p50.tied == 1);
    REQUIRE(i3::tie_fraction(p50) == 1.0);
}

TEST_CASE("top-1% of a distinct 100k population is exactly 1000 papers") {
    std::vector<std::int64_t> values(100000);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = static_cast<std::int64_t>(i);
    auto set = i3::compute_thresholds(values, BoundarySet::make({0, 99}));
    const auto& e = set.at(99.0);
    REQUIRE(e.threshold == 99000);
    REQUIRE(e.above == 999);
    REQUIRE(e.tied == 1);
    REQUIRE(e.target_mass == 1000.0);
}

TEST_CASE("fractional boundaries fall back to real-valued ranks") {
    std::vector<std::int64_t> values(40);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = static_cast<std::int64_t>(i);
    auto set = i3::compute_thresholds(values, BoundarySet::make({0, 97.5}));
    const auto& e = set.at(97.5);
    REQUIRE(e.threshold == 39);  // rank 1 of 40
    REQUIRE(e.target_mass == 1.0);
}

TEST_CASE("threshold computation rejects an empty population") {
    REQUIRE_THROWS_AS(
        i3::compute_thresholds({}, BoundarySet::make({0, 50})),
        i3::DataError);
}

TEST_CASE("thresholds rise with the boundary and targets shrink") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 5 + gen() % 500;
        std::vector<std::int64_t> values(n);
        for (auto& v : values)
            v = static_cast<std::int64_t>(gen() % 40);
        auto set = i3::compute_thresholds(
            values, BoundarySet::make({0, 50, 90, 99}));
        for (std::size_t i = 1; i < set.entries.size(); ++i) {
            REQUIRE(set.entries[i].threshold >= set.entries[i - 1].threshold);
            REQUIRE(set.entries[i].target_mass < set.entries[i - 1].target_mass);
        }
        for (const auto& e : set.entries) {
            REQUIRE(e.threshold == oracle_threshold(values, e.boundary));
            double f = i3::tie_fraction(e);
            REQUIRE(f >= 0.0);
            REQUIRE(f <= 1.0);
            REQUIRE_THAT(static_cast<double>(e.above) +
                             static_cast<double>(e.tied) * f,
                         WithinAbs(e.target_mass, 1e-9));
        }
    }
}

TEST_CASE("tie shares reject contexts no population can produce") {
    i3::BoundaryThreshold no_ties{50.0, 7, 2, 0, 3.0};
    REQUIRE_THROWS_AS(i3::tie_fraction(no_ties), i3::DataError);
    i3::BoundaryThreshold too_low{50.0, 7, 5, 2, 1.0};
    REQUIRE_THROWS_AS(i3::tie_fraction(too_low), i3::DataError);
    i3::BoundaryThreshold too_high{50.0, 7, 0, 1, 2.0};
    REQUIRE_THROWS_AS(i3::tie_fraction(too_high), i3::DataError);
    i3::BoundaryThreshold third{50.0, 0, 1, 3, 2.0};
    REQUIRE_THAT(i3::tie_fraction(third), WithinAbs(1.0 / 3.0, 1e-15));
    i3::BoundaryThreshold zero{50.0, 7, 2, 3, 2.0};
    REQUIRE(i3::tie_fraction(zero) == 0.0);
}

TEST_CASE("counting a unit against a threshold honors the mode") {
    i3::BoundaryThreshold e{50.0, 5, 1, 2, 2.0};  // tie share 1/2
    std::vector<std::int64_t> unit{9, 5, 5, 1};
    REQUIRE(i3::count_top(unit, e, CountingMode::at_or_above) == 3.0);
    REQUIRE(i3::count_top(unit, e, CountingMode::fractional) == 2.0);
    REQUIRE(i3::top_mass(9, e, CountingMode::fractional) == 1.0);
    REQUIRE(i3::top_mass(1, e, CountingMode::at_or_above) == 0.0);
}

TEST_CASE("engineered corpus pins population thresholds and unit counts") {
    auto corpus = fixtures::three_unit_corpus();
    auto counts = i3::class_counts_global(
        corpus, BoundarySet::make({0, 50, 90, 99}), CountingMode::fractional);
    REQUIRE(counts.population_n == 100000.0);
    REQUIRE(counts.global_thresholds.at(99.0).threshold == 1000);
    REQUIRE(counts.global_thresholds.at(90.0).threshold == 100);
    REQUIRE(counts.global_thresholds.at(50.0).threshold == 10);
    for (const auto& e : counts.global_thresholds.entries)
        REQUIRE(i3::tie_fraction(e) == 1.0);

    const auto& lg = counts.units.at("JOURNAL_L");
    REQUIRE(lg.n == 30042.0);
    REQUIRE(lg.cumulative.at(99.0) == 91.0);
    REQUIRE(lg.cumulative.at(90.0) == 2545.0);
    REQUIRE(lg.cumulative.at(50.0) == 20141.0);
    REQUIRE(lg.distinct.at(99.0) == 91.0);
    REQUIRE(lg.distinct.at(90.0) == 2454.0);
    REQUIRE(lg.distinct.at(50.0) == 17596.0);
    REQUIRE(lg.distinct.at(0.0) == 9901.0);

    const auto& sm = counts.units.at("JOURNAL_S");
    REQUIRE(sm.n == 8435.0);
    REQUIRE(sm.cumulative.at(99.0) == 30.0);
    REQUIRE(sm.cumulative.at(90.0) == 909.0);
    REQUIRE(sm.cumulative.at(50.0) == 5919.0);

    // every tie group is exactly filled, so both modes agree here
    auto strict = i3::class_counts_global(
        corpus, BoundarySet::make({0, 50, 90, 99}), CountingMode::at_or_above);
    for (const auto& [unit, ucc] : counts.units) {
        REQUIRE(strict.units.at(unit).cumulative == ucc.cumulative);
        REQUIRE(strict.units.at(unit).distinct == ucc.distinct);
    }
}

TEST_CASE("fractional unit masses add up to the nominal population share") {
    std::mt19937_64 gen(11);
    auto boundaries = BoundarySet::make({0, 50, 90, 99});
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<i3::PublicationRecord> records;
        std::size_t units = 2 + gen() % 4;
        for (std::size_t u = 0; u < units; ++u) {
            std::size_t papers = 20 + gen() % 200;
            for (std::size_t p = 0; p < papers; ++p) {
                i3::PublicationRecord r;
                r.paper_id = "P" + std::to_string(records.size());
                r.unit_id = "U" + std::to_string(u);
                r.citations = static_cast<std::int64_t>(gen() % 15);
                records.push_back(std::move(r));
            }
        }
        auto corpus = i3::Corpus::from_records(std::move(records));
        auto counts = i3::class_counts_global(corpus, boundaries,
                                              CountingMode::fractional);
        auto strict = i3::class_counts_global(corpus, boundaries,
                                              CountingMode::at_or_above);
        for (const auto& e : counts.global_thresholds.entries) {
            double mass = 0.0;
            for (const auto& [unit, ucc] : counts.units)
                mass += ucc.cumulative.at(e.boundary);
            REQUIRE_THAT(mass, WithinAbs(e.target_mass, 1e-9));
            double strict_mass = 0.0;
            for (const auto& [unit, ucc] : strict.units)
                strict_mass += ucc.cumulative.at(e.boundary);
            REQUIRE(strict_mass >= e.target_mass - 1e-9);
        }
    }
}

TEST_CASE("at-or-above counting never undershoots the nominal share") {
    // three papers tied at the top of ten: the top-10% class holds all three
    std::vector<i3::PublicationRecord> records;
    fixtures::append_block(records, "U1", 8, 3);
    fixtures::append_block(records, "U1", 5, 1);
    fixtures::append_block(records, "U2", 4, 1);
    fixtures::append_block(records, "U2", 3, 1);
    fixtures::append_block(records, "U2", 2, 1);
    fixtures::append_block(records, "U2", 1, 1);
    fixtures::append_block(records, "U2", 0, 2);
    auto corpus = i3::Corpus::from_records(std::move(records));
    auto counts = i3::class_counts_global(
        corpus, BoundarySet::make({0, 90}), CountingMode::at_or_above);
    REQUIRE(counts.units.at("U1").cumulative.at(90.0) == 3.0);
    REQUIRE(counts.units.at("U2").cumulative.at(90.0) == 0.0);
    auto fractional = i3::class_counts_global(
        corpus, BoundarySet::make({0, 90}), CountingMode::fractional);
    REQUIRE_THAT(fractional.units.at("U1").cumulative.at(90.0),
                 WithinAbs(1.0, 1e-12));
}

TEST_CASE("per-unit class masses always conserve the unit size") {
    auto check = [](const i3::ClassCounts& counts) {
        for (const auto& [unit, ucc] : counts.units) {
            double sum = 0.0;
            for (const auto& [lower, mass] : ucc.distinct) sum += mass;
            REQUIRE_THAT(sum, WithinAbs(ucc.n, 1e-9));
        }
    };
    auto boundaries = BoundarySet::make({0, 50, 90, 99});
    auto corpus = fixtures::three_unit_corpus();
    check(i3::class_counts_global(corpus, boundaries,
                                  CountingMode::fractional));
    check(i3::class_counts_global(corpus, boundaries,
                                  CountingMode::at_or_above));
    auto two = i3::Corpus::from_records(fixtures::two_category_records());
    check(i3::class_counts_field_normalized(two,
                                            BoundarySet::make({0, 50})));
}

TEST_CASE("record order cannot change any class count") {
    auto records = fixtures::three_unit_records();
    std::mt19937_64 gen(3);
    std::shuffle(records.begin(), records.end(), gen);
    auto shuffled = i3::Corpus::from_records(std::move(records));
    auto boundaries = BoundarySet::make({0, 50, 90, 99});
    auto a = i3::class_counts_global(fixtures::three_unit_corpus(), boundaries,
                                     CountingMode::fractional);
    auto b = i3::class_counts_global(shuffled, boundaries,
                                     CountingMode::fractional);
    for (const auto& [unit, ucc] : a.units) {
        REQUIRE(b.units.at(unit).cumulative == ucc.cumulative);
        REQUIRE(b.units.at(unit).distinct == ucc.distinct);
    }
}

TEST_CASE("worker count cannot change a bit of any class count") {
    auto corpus = fixtures::three_unit_corpus();
    auto boundaries = BoundarySet::make({0, 50, 90, 99});
    auto one = i3::class_counts_global(corpus, boundaries,
                                       CountingMode::fractional, 1);
    auto four = i3::class_counts_global(corpus, boundaries,
                                        CountingMode::fractional, 4);
    REQUIRE(one.units.size() == four.units.size());
    for (const auto& [unit, ucc] : one.units) {
        const auto& other = four.units.at(unit);
        for (const auto& [lower, mass] : ucc.distinct)
            REQUIRE(std::bit_cast<std::uint64_t>(mass) ==
                    std::bit_cast<std::uint64_t>(other.distinct.at(lower)));
        for (const auto& [b, mass] : ucc.cumulative)
            REQUIRE(std::bit_cast<std::uint64_t>(mass) ==
                    std::bit_cast<std::uint64_t>(other.cumulative.at(b)));
    }

    auto two = i3::Corpus::from_records(fixtures::two_category_records());
    auto f1 = i3::class_counts_field_normalized(
        two, BoundarySet::make({0, 50}), 1);
    auto f4 = i3::class_counts_field_normalized(
        two, BoundarySet::make({0, 50}), 4);
    for (const auto& [unit, ucc] : f1.units)
        REQUIRE(f4.units.at(unit).distinct == ucc.distinct);
}

TEST_CASE("category-normalized counts split shared papers across fields") {
    auto corpus = i3::Corpus::from_records(fixtures::two_category_records());
    auto counts = i3::class_counts_field_normalized(
        corpus, BoundarySet::make({0, 50}));
    REQUIRE(counts.field_normalized);
    REQUIRE(counts.population_n == 7.0);

    const auto& x = counts.category_thresholds.at("X").at(50.0);
    REQUIRE(x.threshold == 0);
    REQUIRE_THAT(i3::tie_fraction(x), WithinAbs(1.0 / 3.0, 1e-15));
    const auto& y = counts.category_thresholds.at("Y").at(50.0);
    REQUIRE(y.threshold == 300);
    REQUIRE(i3::tie_fraction(y) == 1.0);

    REQUIRE(counts.units.at("A").n == 1.0);
    REQUIRE_THAT(counts.units.at("A").cumulative.at(50.0),
                 WithinAbs(0.5, 1e-12));
    REQUIRE_THAT(counts.units.at("B").cumulative.at(50.0),
                 WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(counts.units.at("C").cumulative.at(50.0),
                 WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(counts.units.at("A").distinct.at(0.0),
                 WithinAbs(0.5, 1e-12));
    REQUIRE_THAT(counts.units.at("B").distinct.at(0.0),
                 WithinAbs(2.0, 1e-12));
}

TEST_CASE("uncategorized records drop out of category-normalized counts") {
    auto records = fixtures::two_category_records();
    i3::PublicationRecord bare;
    bare.paper_id = "z1";
    bare.unit_id = "A";
    bare.citations = 999;
    records.push_back(bare);
    auto corpus = i3::Corpus::from_records(std::move(records));
    auto counts = i3::class_counts_field_normalized(
        corpus, BoundarySet::make({0, 50}));
    REQUIRE(counts.population_n == 7.0);
    REQUIRE(counts.units.at("A").n == 1.0);
}

TEST_CASE("one shared category reduces to global fractional counting") {
    auto corpus = fixtures::three_unit_corpus(true);
    auto boundaries = BoundarySet::make({0, 50, 90, 99});
    auto field = i3::class_counts_field_normalized(corpus, boundaries);
    auto global = i3::class_counts_global(corpus, boundaries,
                                          CountingMode::fractional);
    REQUIRE(field.population_n == global.population_n);
    for (const auto& [unit, ucc] : global.units) {
        const auto& f = field.units.at(unit);
        REQUIRE(f.n == ucc.n);
        for (const auto& [lower, mass] : ucc.distinct)
            REQUIRE_THAT(f.distinct.at(lower), WithinAbs(mass, 1e-9));
    }
}

TEST_CASE("one-class top-10% weighting recovers the cumulative count") {
    auto corpus = fixtures::three_unit_corpus();
    auto counts = i3::class_counts_global(
        corpus, BoundarySet::from_scheme(i3::schemes::i3star()),
        CountingMode::fractional);
    for (const auto& [unit, ucc] : counts.units)
        REQUIRE(i3::ptop10_equivalence(ucc) == ucc.cumulative.at(90.0));
    REQUIRE(i3::ptop10_equivalence(counts.units.at("JOURNAL_L")) == 2545.0);
    REQUIRE(i3::ptop10_equivalence(counts.units.at("JOURNAL_S")) == 909.0);

    auto narrow = i3::class_counts_global(
        corpus, BoundarySet::make({0, 50}), CountingMode::fractional);
    REQUIRE_THROWS_AS(
        i3::ptop10_equivalence(narrow.units.at("JOURNAL_L")),
        i3::DataError);
}

TEST_CASE("indicator values come straight off the class counts") {
    auto corpus = fixtures::three_unit_corpus();
    auto counts = i3::class_counts_global(
        corpus, BoundarySet::from_scheme(i3::schemes::i3star()),
        CountingMode::fractional);
    auto res = i3::indicator_result(counts.units.at("JOURNAL_L"),
                                    i3::schemes::i3star());
    REQUIRE(res.unit_id == "JOURNAL_L");
    REQUIRE(res.i3 == 78733.0);
    REQUIRE(res.n == 30042.0);
}

TEST_CASE("single-unit corpus owns the whole nominal share") {
    std::vector<i3::PublicationRecord> records;
    std::mt19937_64 gen(5);
    for (std::size_t i = 0; i < 400; ++i) {
        i3::PublicationRecord r;
        r.paper_id = "P" + std::to_string(i);
        r.unit_id = "ONLY";
        r.citations = static_cast<std::int64_t>(gen() % 9);
        records.push_back(std::move(r));
    }
    auto corpus = i3::Corpus::from_records(std::move(records));
    auto counts = i3::class_counts_global(
        corpus, BoundarySet::make({0, 50, 90, 99}), CountingMode::fractional);
    const auto& only = counts.units.at("ONLY");
    for (const auto& e : counts.global_thresholds.entries)
        REQUIRE_THAT(only.cumulative.at(e.boundary),
                     WithinAbs(e.target_mass, 1e-9));
}

TEST_CASE("unit counts match a brute-force reclassification") {
    std::mt19937_64 gen(13);
    auto boundaries = BoundarySet::make({0, 50, 90, 99});
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<i3::PublicationRecord> records;
        std::size_t units = 2 + gen() % 3;
        for (std::size_t u = 0; u < units; ++u) {
            std::size_t papers = 30 + gen() % 300;
            for (std::size_t p = 0; p < papers; ++p) {
                i3::PublicationRecord r;
                r.paper_id = "P" + std::to_string(records.size());
                r.unit_id = "U" + std::to_string(u);
                r.citations = static_cast<std::int64_t>(gen() % 25);
                records.push_back(std::move(r));
            }
        }
        std::vector<std::int64_t> all;
        for (const auto& r : records) all.push_back(r.citations);
        auto corpus = i3::Corpus::from_records(std::move(records));
        auto counts = i3::class_counts_global(corpus, boundaries,
                                              CountingMode::at_or_above);
        for (double b : {50.0, 90.0, 99.0}) {
            std::int64_t thr = oracle_threshold(all, b);
            for (const auto& [unit, indices] : corpus.units()) {
                double expected = 0.0;
                for (std::size_t idx : indices)
                    if (corpus.records()[idx].citations >= thr)
                        expected += 1.0;
                REQUIRE(counts.units.at(unit).cumulative.at(b) == expected);
            }
        }
    }
}
