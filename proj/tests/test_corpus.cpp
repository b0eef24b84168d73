#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "i3/corpus.hpp"
#include "fixtures.hpp"

using i3::Corpus;
using i3::InputFormat;

TEST_CASE("csv ingest reads records and sorts them canonically") {
    std::istringstream in(
        "paper_id,unit_id,citations,categories\n"
        "p3,J2,5,\"Chemistry, Physical;Materials\"\n"
        "p1,J1,0,\n"
        "p2,J1,12,Physics\n");
    auto res = i3::ingest_publications(in, InputFormat::csv);
    REQUIRE(res.n_read == 3);
    const auto& r = res.corpus.records();
    REQUIRE(r.size() == 3);
    REQUIRE(r[0].paper_id == "p1");
    REQUIRE(r[1].paper_id == "p2");
    REQUIRE(r[2].paper_id == "p3");
    REQUIRE(r[0].categories.empty());
    REQUIRE(r[2].categories ==
            std::vector<std::string>{"Chemistry, Physical", "Materials"});
    REQUIRE(res.corpus.units().at("J1").size() == 2);
    REQUIRE(res.corpus.categories().at("Physics") ==
            std::vector<std::size_t>{1});
}

TEST_CASE("ingest is order-independent") {
    auto records = fixtures::two_category_records();
    auto sorted = Corpus::from_records(records);
    std::reverse(records.begin(), records.end());
    auto reversed = Corpus::from_records(records);
    REQUIRE(sorted.records().size() == reversed.records().size());
    for (std::size_t i = 0; i < sorted.records().size(); ++i)
        REQUIRE(sorted.records()[i].paper_id ==
                reversed.records()[i].paper_id);
}

TEST_CASE("csv ingest reports the offending line") {
    std::istringstream header_only("paper_id,unit_id\n");
    REQUIRE_THROWS_WITH(i3::ingest_publications(header_only, InputFormat::csv),
                        Catch::Matchers::ContainsSubstring("header"));
    std::istringstream bad_count(
        "paper_id,unit_id,citations,categories\n"
        "p1,J1,twelve,\n");
    REQUIRE_THROWS_WITH(i3::ingest_publications(bad_count, InputFormat::csv),
                        Catch::Matchers::ContainsSubstring("line 2"));
    std::istringstream short_row(
        "paper_id,unit_id,citations,categories\n"
        "p1,J1,3,\n"
        "p2,J1\n");
    REQUIRE_THROWS_WITH(i3::ingest_publications(short_row, InputFormat::csv),
                        Catch::Matchers::ContainsSubstring("line 3"));
    std::istringstream empty;
    REQUIRE_THROWS_AS(i3::ingest_publications(empty, InputFormat::csv),
                      i3::DataError);
}

TEST_CASE("structural rules: ids unique and non-empty, citations >= 0") {
    std::istringstream dup(
        "paper_id,unit_id,citations,categories\n"
        "p1,J1,3,\n"
        "p1,J2,4,\n");
    REQUIRE_THROWS_WITH(i3::ingest_publications(dup, InputFormat::csv),
                        Catch::Matchers::ContainsSubstring("duplicate"));
    std::istringstream negative(
        "paper_id,unit_id,citations,categories\n"
        "p1,J1,-3,\n");
    REQUIRE_THROWS_WITH(i3::ingest_publications(negative, InputFormat::csv),
                        Catch::Matchers::ContainsSubstring("negative"));
    std::istringstream no_unit(
        "paper_id,unit_id,citations,categories\n"
        "p1,,3,\n");
    REQUIRE_THROWS_AS(i3::ingest_publications(no_unit, InputFormat::csv),
                      i3::DataError);
}

TEST_CASE("duplicate category labels on one record collapse") {
    std::istringstream in(
        "paper_id,unit_id,citations,categories\n"
        "p1,J1,3,X;X;Y\n");
    auto res = i3::ingest_publications(in, InputFormat::csv);
    REQUIRE(res.corpus.records()[0].categories ==
            std::vector<std::string>{"X", "Y"});
}

TEST_CASE("jsonl ingest mirrors csv semantics") {
    std::istringstream in(
        R"({"paper_id":"p2","unit_id":"J1","citations":4})"
        "\n\n"
        R"({"paper_id":"p1","unit_id":"J2","citations":0,"categories":["A","B"]})"
        "\n");
    auto res = i3::ingest_publications(in, InputFormat::jsonl);
    REQUIRE(res.corpus.size() == 2);
    REQUIRE(res.corpus.records()[0].paper_id == "p1");
    REQUIRE(res.corpus.records()[0].categories ==
            std::vector<std::string>{"A", "B"});

    std::istringstream bad("{\"paper_id\":\"p1\"}\n");
    REQUIRE_THROWS_WITH(i3::ingest_publications(bad, InputFormat::jsonl),
                        Catch::Matchers::ContainsSubstring("line 1"));
    std::istringstream not_json("p1,J1,3\n");
    REQUIRE_THROWS_AS(i3::ingest_publications(not_json, InputFormat::jsonl),
                      i3::DataError);
}

TEST_CASE("publications round-trip through write and ingest") {
    auto corpus = Corpus::from_records(fixtures::two_category_records());
    std::ostringstream out;
    i3::write_publications(out, corpus);
    std::istringstream in(out.str());
    auto back = i3::ingest_publications(in, InputFormat::csv);
    REQUIRE(back.corpus.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        REQUIRE(back.corpus.records()[i].paper_id ==
                corpus.records()[i].paper_id);
        REQUIRE(back.corpus.records()[i].citations ==
                corpus.records()[i].citations);
        REQUIRE(back.corpus.records()[i].categories ==
                corpus.records()[i].categories);
    }
}

TEST_CASE("metrics ingest allows empty cells and rejects duplicates") {
    std::istringstream in(
        "unit_id,n_pub,n_cit,jif2,jif5\n"
        "J1,862,617363,38.6,\n"
        "J2,,,2.1,2.4\n");
    auto metrics = i3::ingest_metrics(in, InputFormat::csv);
    REQUIRE(metrics.size() == 2);
    REQUIRE(metrics[0].n_pub == 862.0);
    REQUIRE_FALSE(metrics[0].jif5.has_value());
    REQUIRE_FALSE(metrics[1].n_pub.has_value());
    REQUIRE(metrics[1].jif2 == 2.1);

    std::istringstream dup(
        "unit_id,n_pub,n_cit,jif2,jif5\n"
        "J1,1,,,\n"
        "J1,2,,,\n");
    REQUIRE_THROWS_WITH(i3::ingest_metrics(dup, InputFormat::csv),
                        Catch::Matchers::ContainsSubstring("duplicate"));
    std::istringstream bad(
        "unit_id,n_pub,n_cit,jif2,jif5\n"
        "J1,abc,,,\n");
    REQUIRE_THROWS_WITH(i3::ingest_metrics(bad, InputFormat::csv),
                        Catch::Matchers::ContainsSubstring("n_pub"));
}

TEST_CASE("metrics ingest from jsonl with nulls") {
    std::istringstream in(
        R"({"unit_id":"J1","n_pub":10,"n_cit":null,"jif2":1.5})"
        "\n");
    auto metrics = i3::ingest_metrics(in, InputFormat::jsonl);
    REQUIRE(metrics.size() == 1);
    REQUIRE(metrics[0].n_pub == 10.0);
    REQUIRE_FALSE(metrics[0].n_cit.has_value());
    REQUIRE(metrics[0].jif2 == 1.5);
    REQUIRE_FALSE(metrics[0].jif5.has_value());
}

TEST_CASE("validation flags uncategorized records and tiny categories") {
    auto corpus = Corpus::from_records({
        {"p1", "J1", 3, {}},
        {"p2", "J1", 0, {"X"}},
    });
    auto rep = corpus.validate();
    REQUIRE(rep.ok());  // warnings only
    REQUIRE(rep.n_records == 2);
    REQUIRE(rep.n_units == 1);
    REQUIRE(rep.n_uncategorized == 1);
    REQUIRE(rep.n_zero_citation == 1);
    bool uncategorized = false, coarse = false;
    for (const auto& issue : rep.issues) {
        if (issue.message.find("no category") != std::string::npos)
            uncategorized = true;
        if (issue.message.find("coarse") != std::string::npos) coarse = true;
    }
    REQUIRE(uncategorized);
    REQUIRE(coarse);
}

TEST_CASE("validation of an empty corpus is an error") {
    auto rep = Corpus::from_records({}).validate();
    REQUIRE_FALSE(rep.ok());
}

TEST_CASE("quoted csv fields survive embedded separators and quotes") {
    std::istringstream in(
        "paper_id,unit_id,citations,categories\n"
        "\"p,1\",\"J\"\"1\",3,\"A;B\"\n");
    auto res = i3::ingest_publications(in, InputFormat::csv);
    REQUIRE(res.corpus.records()[0].paper_id == "p,1");
    REQUIRE(res.corpus.records()[0].unit_id == "J\"1");
    REQUIRE(res.corpus.records()[0].categories ==
            std::vector<std::string>{"A", "B"});

    std::ostringstream out;
    i3::write_publications(out, res.corpus);
    std::istringstream back(out.str());
    auto again = i3::ingest_publications(back, InputFormat::csv);
    REQUIRE(again.corpus.records()[0].paper_id == "p,1");
    REQUIRE(again.corpus.records()[0].unit_id == "J\"1");
}

TEST_CASE("unterminated quotes are rejected with a position") {
    std::istringstream in(
        "paper_id,unit_id,citations,categories\n"
        "\"p1,J1,3,\n");
    REQUIRE_THROWS_AS(i3::ingest_publications(in, InputFormat::csv),
                      i3::DataError);
}
