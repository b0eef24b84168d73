#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "i3/i3.hpp"

namespace {

struct CommonOpts {
    std::string publications;
    std::string input_format = "csv";
    std::string scheme = "I3STAR";
    std::string mode = "at-or-above";
    std::string normalize = "global";
    std::string format = "csv";
    unsigned threads = 1;
};

i3::Corpus load_corpus(const CommonOpts& opts) {
    std::ifstream in(opts.publications);
    if (!in)
        throw i3::DataError("cannot open '" + opts.publications + "'");
    auto result =
        i3::ingest_publications(in, i3::parse_input_format(opts.input_format));
    return std::move(result.corpus);
}

i3::ClassCounts count_classes(const i3::Corpus& corpus,
                              const i3::WeightingScheme& scheme,
                              const CommonOpts& opts) {
    auto boundaries = i3::BoundarySet::from_scheme(scheme);
    if (opts.normalize == "field")
        return i3::class_counts_field_normalized(corpus, boundaries,
                                                 opts.threads);
    if (opts.normalize == "global")
        return i3::class_counts_global(corpus, boundaries,
                                       i3::parse_counting_mode(opts.mode),
                                       opts.threads);
    throw i3::ConfigError("unknown normalization '" + opts.normalize +
                          "' (expected global or field)");
}

// Units with no countable papers (possible under field normalization when
// every record lacks categories) cannot carry an indicator; they are skipped
// with a diagnostic rather than failing the whole run.
std::vector<i3::UnitReport> unit_reports(const i3::ClassCounts& counts,
                                         const i3::WeightingScheme& scheme) {
    std::vector<i3::UnitReport> out;
    for (const auto& [unit_id, ucc] : counts.units) {
        if (!(ucc.n > 0.0)) {
            std::cerr << "warning: unit '" << unit_id
                      << "' has no categorized records; skipped\n";
            continue;
        }
        out.push_back({ucc, i3::indicator_result(ucc, scheme)});
    }
    if (out.empty()) throw i3::DataError("no unit has countable records");
    return out;
}

int cmd_compute(const CommonOpts& opts) {
    auto scheme = i3::WeightingScheme::parse(opts.scheme);
    auto corpus = load_corpus(opts);
    auto counts = count_classes(corpus, scheme, opts);
    i3::ComputeReport rep;
    rep.scheme_name = scheme.name();
    rep.scheme_notation = scheme.notation();
    rep.mode = counts.field_normalized ? "fractional" : opts.mode;
    rep.normalization = opts.normalize;
    rep.boundaries = scheme.boundary_values();
    rep.units = unit_reports(counts, scheme);
    rep.source = std::move(counts);
    i3::render_compute(std::cout, rep, i3::parse_output_format(opts.format));
    return 0;
}

int cmd_compare(const CommonOpts& opts, const std::vector<std::string>& units,
                bool expected) {
    auto scheme = i3::WeightingScheme::parse(opts.scheme);
    if (expected ? units.size() != 1 : units.size() != 2)
        throw i3::ConfigError(
            "compare needs two unit ids, or one unit id with --expected");
    auto corpus = load_corpus(opts);
    auto counts = count_classes(corpus, scheme, opts);
    auto unit_counts = [&](const std::string& id) -> const i3::UnitClassCounts& {
        auto it = counts.units.find(id);
        if (it == counts.units.end())
            throw i3::DataError("unknown unit '" + id + "'");
        if (!(it->second.n > 0.0))
            throw i3::DataError("unit '" + id + "' has no countable records");
        return it->second;
    };
    i3::ComparisonReport rep;
    if (expected) {
        const auto& obs = unit_counts(units[0]);
        rep = i3::compare_with_expected(obs.distinct, obs.n, scheme,
                                        obs.unit_id);
    } else {
        const auto& obs = unit_counts(units[0]);
        const auto& ref = unit_counts(units[1]);
        rep = i3::compare_profiles(obs.distinct, obs.n, ref.distinct, ref.n,
                                   scheme, obs.unit_id, ref.unit_id);
    }
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    i3::render_comparison(std::cout, rep, i3::parse_output_format(opts.format));
    return 0;
}

int cmd_rank(const CommonOpts& opts, const std::string& by, std::size_t top) {
    auto scheme = i3::WeightingScheme::parse(opts.scheme);
    auto corpus = load_corpus(opts);
    CommonOpts counting = opts;
    if (by == "i3_field") counting.normalize = "field";
    auto counts = count_classes(corpus, scheme, counting);
    std::map<std::string, double> values;
    for (const auto& rep : unit_reports(counts, scheme))
        values[rep.indicator.unit_id] =
            by == "i3_per_n" ? rep.indicator.i3_per_n : rep.indicator.i3;
    auto table = i3::rank_units(values, by, top);
    i3::render_ranking(std::cout, table, i3::parse_output_format(opts.format));
    return 0;
}

int cmd_correlate(const CommonOpts& opts, const std::string& metrics_path,
                  const std::string& metrics_format) {
    auto scheme = i3::WeightingScheme::parse(opts.scheme);
    auto corpus = load_corpus(opts);
    std::ifstream min(metrics_path);
    if (!min) throw i3::DataError("cannot open '" + metrics_path + "'");
    auto metrics =
        i3::ingest_metrics(min, i3::parse_input_format(metrics_format));

    auto boundaries = i3::BoundarySet::from_scheme(scheme);
    auto global = i3::class_counts_global(
        corpus, boundaries, i3::parse_counting_mode(opts.mode), opts.threads);
    std::optional<i3::ClassCounts> field;
    bool any_categories = !corpus.categories().empty();
    if (any_categories)
        field = i3::class_counts_field_normalized(corpus, boundaries,
                                                  opts.threads);

    // Joined rows: units present in both the corpus and the metrics file.
    std::vector<const i3::ExternalMetricsRecord*> joined;
    for (const auto& m : metrics)
        if (corpus.has_unit(m.unit_id)) joined.push_back(&m);
    if (joined.size() < 3)
        throw i3::DataError("metrics join to only " +
                            std::to_string(joined.size()) +
                            " unit(s); need at least 3");

    std::vector<std::pair<std::string, std::vector<double>>> columns;
    auto add_column = [&](const std::string& name, auto&& getter) {
        std::vector<double> col;
        for (const auto* m : joined) {
            auto v = getter(*m);
            if (!v) {
                std::cerr << "warning: column '" << name
                          << "' is missing for unit '" << m->unit_id
                          << "'; column dropped\n";
                return;
            }
            col.push_back(*v);
        }
        columns.emplace_back(name, std::move(col));
    };
    using Rec = i3::ExternalMetricsRecord;
    add_column("n_pub", [](const Rec& m) { return m.n_pub; });
    add_column("n_cit", [](const Rec& m) { return m.n_cit; });
    add_column("jif2", [](const Rec& m) { return m.jif2; });
    add_column("jif5", [](const Rec& m) { return m.jif5; });
    add_column("i3", [&](const Rec& m) -> std::optional<double> {
        return i3::indicator_result(global.units.at(m.unit_id), scheme).i3;
    });
    if (field) {
        add_column("i3_field", [&](const Rec& m) -> std::optional<double> {
            const auto& ucc = field->units.at(m.unit_id);
            if (!(ucc.n > 0.0)) return std::nullopt;
            return i3::indicator_result(ucc, scheme).i3;
        });
    } else {
        std::cerr << "warning: corpus has no categories; "
                     "column 'i3_field' dropped\n";
    }
    add_column("i3_per_n", [&](const Rec& m) -> std::optional<double> {
        return i3::indicator_result(global.units.at(m.unit_id), scheme)
            .i3_per_n;
    });

    auto matrix = i3::correlation_matrix(columns);
    i3::render_correlation(std::cout, matrix,
                           i3::parse_output_format(opts.format));
    return 0;
}

int cmd_simulate(const CommonOpts& opts, const i3::SyntheticSpec& spec,
                 const std::string& out_path) {
    auto synth = i3::synthetic_corpus(spec);
    std::ofstream out(out_path);
    if (!out) throw i3::DataError("cannot write '" + out_path + "'");
    i3::write_publications(out, synth.corpus);
    if (!out) throw i3::DataError("write to '" + out_path + "' failed");

    auto format = i3::parse_output_format(opts.format);
    if (format == i3::OutputFormat::json) {
        nlohmann::json units = nlohmann::json::object();
        for (const auto& [unit, papers] : synth.unit_papers)
            units[unit] = {{"papers", papers},
                           {"citations", synth.unit_citations.at(unit)}};
        nlohmann::json cats = nlohmann::json::object();
        for (const auto& [cat, papers] : synth.category_papers)
            cats[cat] = papers;
        nlohmann::json doc = {{"seed", spec.seed},
                              {"records", synth.corpus.size()},
                              {"path", out_path},
                              {"units", units},
                              {"categories", cats}};
        std::cout << doc.dump(2) << '\n';
        return 0;
    }
    if (format == i3::OutputFormat::markdown) {
        std::cout << "## Synthetic corpus (seed " << spec.seed << ", "
                  << synth.corpus.size() << " records)\n\n";
        i3::detail::md_header(std::cout, {"Unit", "Papers", "Citations"});
        for (const auto& [unit, papers] : synth.unit_papers)
            i3::detail::md_row(
                std::cout,
                {unit, std::to_string(papers),
                 std::to_string(synth.unit_citations.at(unit))});
        return 0;
    }
    i3::csv::write_record(std::cout, {"unit_id", "papers", "citations"});
    for (const auto& [unit, papers] : synth.unit_papers)
        i3::csv::write_record(
            std::cout, {unit, std::to_string(papers),
                        std::to_string(synth.unit_citations.at(unit))});
    return 0;
}

int cmd_validate(const CommonOpts& opts) {
    auto corpus = load_corpus(opts);
    auto report = corpus.validate();
    i3::render_validation(std::cout, report,
                          i3::parse_output_format(opts.format));
    return report.ok() ? 0 : 1;
}

void add_common(CLI::App* sub, CommonOpts& opts, bool with_counting = true) {
    sub->add_option("publications", opts.publications,
                    "Publications file (paper_id,unit_id,citations,categories)")
        ->required();
    sub->add_option("--input-format", opts.input_format,
                    "Input encoding: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--format", opts.format,
                    "Output format: csv, json or markdown")
        ->check(CLI::IsMember({"csv", "json", "markdown"}));
    if (with_counting) {
        sub->add_option("--scheme", opts.scheme,
                        "Weighting scheme: preset name or PR-W list "
                        "(e.g. 99-100,90-10,50-2,0-1)");
        sub->add_option("--mode", opts.mode,
                        "Tie handling for global counting")
            ->check(CLI::IsMember({"at-or-above", "fractional"}));
        sub->add_option("--normalize", opts.normalize,
                        "Threshold population: global or per-category field")
            ->check(CLI::IsMember({"global", "field"}));
        sub->add_option("--threads", opts.threads,
                        "Worker threads (results are identical for any count)")
            ->check(CLI::PositiveNumber);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Percentile-class citation impact indicators"};
    app.require_subcommand(1);

    CommonOpts compute_opts;
    auto* compute = app.add_subcommand(
        "compute", "Per-unit class counts and indicator values");
    add_common(compute, compute_opts);

    CommonOpts compare_opts;
    compare_opts.format = "markdown";
    std::vector<std::string> compare_units;
    bool compare_expected = false;
    auto* compare = app.add_subcommand(
        "compare", "Statistical comparison of two units, or one unit "
                   "against expectation");
    add_common(compare, compare_opts);
    compare->add_option("units", compare_units, "Unit id(s)")
        ->expected(1, 2)
        ->required();
    compare->add_flag("--expected", compare_expected,
                      "Compare against the class-width expectation");

    CommonOpts rank_opts;
    std::string rank_by = "i3";
    std::size_t rank_top = 0;
    auto* rank = app.add_subcommand("rank", "Rank units by indicator value");
    add_common(rank, rank_opts);
    rank->add_option("--by", rank_by, "Sort key")
        ->check(CLI::IsMember({"i3", "i3_per_n", "i3_field"}));
    rank->add_option("--top", rank_top, "Keep only the first k rows");

    CommonOpts correlate_opts;
    std::string metrics_path;
    std::string metrics_format = "csv";
    auto* correlate = app.add_subcommand(
        "correlate",
        "Spearman correlations between indicators and external metrics");
    add_common(correlate, correlate_opts);
    correlate
        ->add_option("metrics", metrics_path,
                     "Metrics file (unit_id,n_pub,n_cit,jif2,jif5)")
        ->required();
    correlate->add_option("--metrics-format", metrics_format,
                          "Metrics encoding: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    CommonOpts simulate_opts;
    i3::SyntheticSpec spec;
    std::string simulate_out;
    auto* simulate = app.add_subcommand(
        "simulate", "Write a deterministic synthetic publications file");
    simulate->add_option("output", simulate_out, "Destination path")
        ->required();
    simulate->add_option("--seed", spec.seed, "Generator seed")->required();
    simulate->add_option("--units", spec.units, "Number of units")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--papers-min", spec.papers_min,
                         "Smallest unit size")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--papers-max", spec.papers_max, "Largest unit size")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--categories", spec.categories,
                         "Size of the category pool")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--log-mean", spec.log_mean,
                         "Location of log citation counts");
    simulate->add_option("--log-sigma", spec.log_sigma,
                         "Spread of log citation counts");
    simulate->add_option("--format", simulate_opts.format,
                         "Summary format: csv, json or markdown")
        ->check(CLI::IsMember({"csv", "json", "markdown"}));

    CommonOpts validate_opts;
    auto* validate = app.add_subcommand(
        "validate", "Structural checks over a publications file");
    add_common(validate, validate_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (compute->parsed()) return cmd_compute(compute_opts);
        if (compare->parsed())
            return cmd_compare(compare_opts, compare_units, compare_expected);
        if (rank->parsed()) return cmd_rank(rank_opts, rank_by, rank_top);
        if (correlate->parsed())
            return cmd_correlate(correlate_opts, metrics_path, metrics_format);
        if (simulate->parsed())
            return cmd_simulate(simulate_opts, spec, simulate_out);
        if (validate->parsed()) return cmd_validate(validate_opts);
    } catch (const i3::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const i3::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
