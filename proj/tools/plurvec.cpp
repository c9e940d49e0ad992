// plurvec command line tool. Exit codes: 0 success, 2 usage error, 3 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plurvec/analogy.hpp"
#include "plurvec/classify.hpp"
#include "plurvec/dlcomp.hpp"
#include "plurvec/error.hpp"
#include "plurvec/fracss.hpp"
#include "plurvec/pipeline.hpp"
#include "plurvec/report.hpp"
#include "plurvec/shifts.hpp"
#include "plurvec/stats.hpp"
#include "plurvec/synth.hpp"
#include "plurvec/vecspace.hpp"

namespace fs = std::filesystem;
using namespace plurvec;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_data = 3;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw UsageError("empty item in list '" + text + "'");
        out.push_back(item);
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::vector<std::size_t> parse_ns(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || v == 0) throw UsageError("--topn wants positive integers, got '" + item + "'");
        out.push_back(v);
    }
    return out;
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " '" + path.string() + "' does not exist");
}

// Options shared by the pipeline-style subcommands.
struct Common {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string metric;
    std::string topn;
    double ridge = 0.0;
    std::size_t min_class_size = 5;
    bool filter_singulars = false;
    unsigned threads = 0;
    std::string out_dir = "plurvec-out";

    RunConfig config() const {
        RunConfig c;
        c.seed = seed;
        if (!metric.empty()) c.metric = parse_metric(metric);
        if (!topn.empty()) c.ns = parse_ns(topn);
        if (!(ridge >= 0.0)) throw UsageError("--ridge must be >= 0");
        c.ridge = ridge;
        if (min_class_size == 0) throw UsageError("--min-class-size must be >= 1");
        c.min_class_size = min_class_size;
        c.filter_singulars = filter_singulars;
        c.threads = threads;
        return c;
    }
};

void add_seed(CLI::App* app, Common& c, bool required) {
    auto* opt = app->add_option("--seed", c.seed, "Seed for every randomized step");
    if (required) opt->required();
}
void add_metric(CLI::App* app, Common& c) {
    app->add_option("--metric", c.metric, "cosine, euclidean or pearson")
        ->check(CLI::IsMember({"cosine", "euclidean", "pearson"}));
}
void add_topn(CLI::App* app, Common& c) { app->add_option("--topn", c.topn, "Comma-separated n values, e.g. 2,3,10,20"); }
void add_ridge(CLI::App* app, Common& c) { app->add_option("--ridge", c.ridge, "Ridge weight (default 0)"); }
void add_threads(CLI::App* app, Common& c) { app->add_option("--threads", c.threads, "Worker threads (0 = all cores)"); }
void add_out_dir(CLI::App* app, Common& c) { app->add_option("--out-dir", c.out_dir, "Report directory"); }

struct Inputs {
    std::string embeddings, pairs, lexicon, pair_info, map;
    std::optional<std::size_t> dim;
};

Provenance provenance(const std::string& command, const Common* common, const RunConfig* config) {
    Provenance p;
    p.command = command;
    if (config) config->describe(p);
    if (common && !config && common->seed_given) p.seed = common->seed;
    return p;
}

void note(const fs::path& path) { std::cout << path.string() << '\n'; }

EmbeddingTable load_table(const std::string& path, Provenance& prov, std::optional<std::size_t> dim = {}) {
    require_file(path, "embeddings");
    prov.add_input("embeddings", path);
    return load_embeddings(path, dim);
}

PairSet load_bound_pairs(const std::string& path, const EmbeddingTable& table, Provenance& prov,
                         std::size_t* misses_out = nullptr) {
    require_file(path, "pairs");
    prov.add_input("pairs", path);
    auto bound = bind_pairs(load_pairs(path), table, fs::path(path).filename().string());
    for (const auto& miss : bound.misses) {
        std::cerr << "warning: pair " << miss.pair_index + 1 << ": '" << miss.word << "' not in embeddings\n";
    }
    if (misses_out) *misses_out = bound.misses.size();
    prov.set("pair_misses", std::to_string(bound.misses.size()));
    return std::move(bound.set);
}

// --- embed -------------------------------------------------------------------

void run_embed_load(const Inputs& in, bool normalize, const std::string& output, const Common& common) {
    auto prov = provenance("embed load", nullptr, nullptr);
    prov.set("normalize", normalize ? "true" : "false");
    auto table = load_table(in.embeddings, prov, in.dim);
    if (normalize) table = table.normalized();
    if (!output.empty()) save_embeddings(output, table);
    ojson result;
    result["words"] = table.size();
    result["dim"] = table.dim();
    double min_norm = 0.0, max_norm = 0.0;
    for (WordId i = 0; i < table.size(); ++i) {
        const double n = norm(table.vector(i));
        if (i == 0 || n < min_norm) min_norm = n;
        if (i == 0 || n > max_norm) max_norm = n;
    }
    result["min_norm"] = min_norm;
    result["max_norm"] = max_norm;
    note(write_json_report(common.out_dir, "embed_summary.json", prov, result));
}

// --- shifts ------------------------------------------------------------------

void run_shifts_stats(const Inputs& in, std::optional<std::size_t> axis_index, const Common& common) {
    auto prov = provenance("shifts stats", nullptr, nullptr);
    const auto table = load_table(in.embeddings, prov, in.dim);
    const auto pairs = load_bound_pairs(in.pairs, table, prov);
    if (pairs.empty()) throw UsageError("no pairs to analyze");
    const auto axis = axis_index ? AxisRef(table.dim(), *axis_index) : AxisRef::last(table.dim());
    prov.set("axis", std::to_string(axis.index));
    const auto stats = shift_stats(pairs, table, axis);
    note(write_csv_report(common.out_dir, "shift_records.csv", prov,
                          [&](std::ostream& o) { write_shift_records_csv(o, stats, table); }));
    note(write_csv_report(common.out_dir, "shift_summary.csv", prov,
                          [&](std::ostream& o) { write_shift_summary_csv(o, stats); }));

    // Length comparisons: singular vs plural vs shift.
    std::vector<std::vector<double>> groups(3);
    for (const auto& r : stats.records) {
        groups[0].push_back(r.singular_length);
        groups[1].push_back(r.plural_length);
        groups[2].push_back(r.shift_length);
    }
    const char* names[] = {"singular_length", "plural_length", "shift_length"};
    ojson result;
    if (stats.records.size() >= 2) {
        const auto f = friedman(groups);
        result["friedman"] = {{"statistic", f.statistic}, {"p_value", f.p_value}, {"method", method_name(f.method)},
                              {"n", f.n}};
    }
    const auto md = medians_and_deltas(groups);
    ojson comparisons = ojson::array();
    std::vector<double> raw_p;
    std::vector<TestResult> tests;
    for (const auto& d : md.deltas) {
        std::vector<double> diffs;
        for (std::size_t i = 0; i < groups[d.first].size(); ++i) diffs.push_back(groups[d.second][i] - groups[d.first][i]);
        try {
            tests.push_back(wilcoxon_signed_rank(diffs));
        } catch (const Error&) {
            tests.push_back(TestResult{});
            tests.back().p_value = 1.0;
        }
        raw_p.push_back(tests.back().p_value);
    }
    const auto adjusted = bonferroni(raw_p, raw_p.size());
    for (std::size_t i = 0; i < md.deltas.size(); ++i) {
        const auto& d = md.deltas[i];
        comparisons.push_back({{"first", names[d.first]},
                               {"second", names[d.second]},
                               {"median_delta", d.delta},
                               {"W", tests[i].statistic},
                               {"p_value", tests[i].p_value},
                               {"p_bonferroni", adjusted[i]},
                               {"method", method_name(tests[i].method)},
                               {"dropped_zeros", tests[i].dropped_zeros}});
    }
    ojson medians;
    for (std::size_t g = 0; g < 3; ++g) medians[names[g]] = md.medians[g];
    result["medians"] = medians;
    result["wilcoxon"] = comparisons;
    note(write_json_report(common.out_dir, "shift_tests.json", prov, result));
}

void run_shifts_classavg(const Inputs& in, const Common& common) {
    const auto config = common.config();
    auto prov = provenance("shifts classavg", &common, &config);
    const auto table = load_table(in.embeddings, prov, in.dim);
    const auto pairs = load_bound_pairs(in.pairs, table, prov);
    if (pairs.empty()) throw UsageError("no pairs to analyze");
    const auto classes = class_avg_shifts(pairs, table, config.min_class_size);
    for (const auto& label : classes.under_threshold()) {
        std::cerr << "warning: class '" << label << "' has fewer than " << config.min_class_size << " members\n";
    }
    note(write_csv_report(common.out_dir, "class_shifts.csv", prov,
                          [&](std::ostream& o) { write_class_shifts_csv(o, classes); }));
}

void run_shifts_export(const Inputs& in, const Common& common) {
    auto prov = provenance("shifts export-tsne-input", nullptr, nullptr);
    const auto table = load_table(in.embeddings, prov, in.dim);
    const auto pairs = load_bound_pairs(in.pairs, table, prov);
    if (pairs.empty()) throw UsageError("no pairs to export");
    note(write_csv_report(common.out_dir, "labeled_shifts.tsv", prov,
                          [&](std::ostream& o) { write_labeled_shifts(o, pairs, table); }));
}

// --- analogy -----------------------------------------------------------------

void run_analogy(const Inputs& in, const std::vector<std::string>& methods, const std::string& prime,
                 const Common& common) {
    const auto config = common.config();
    auto prov = provenance("analogy evaluate", &common, &config);
    AnalogyRun run;
    for (const auto& m : methods) run.methods.push_back(parse_method(m));
    if (!prime.empty()) {
        const auto words = split_list(prime);
        if (words.size() != 2) throw UsageError("--prime wants singular,plural");
        run.prime = std::make_pair(words[0], words[1]);
        prov.set("prime", prime);
    }
    std::string m_text;
    for (const auto& m : methods) m_text += (m_text.empty() ? "" : ",") + m;
    prov.set("methods", m_text.empty() ? "default" : m_text);
    const auto table = load_table(in.embeddings, prov, in.dim);
    const auto pairs = load_bound_pairs(in.pairs, table, prov);
    const auto report = pipeline_analogy(table, pairs, config, run);
    note(write_csv_report(common.out_dir, "analogy_topn.csv", prov,
                          [&](std::ostream& o) { write_analogy_topn_csv(o, report); }));
    note(write_csv_report(common.out_dir, "analogy_ranks.csv", prov,
                          [&](std::ostream& o) { write_analogy_ranks_csv(o, report, pairs, table); }));
}

// --- fracss ------------------------------------------------------------------

void run_fracss_fit(const Inputs& in, const std::string& output, bool inverse, const Common& common) {
    const auto config = common.config();
    auto prov = provenance(inverse ? "fracss invert" : "fracss fit", &common, &config);
    const auto table = load_table(in.embeddings, prov, in.dim);
    const auto pairs = load_bound_pairs(in.pairs, table, prov);
    if (pairs.empty()) throw UsageError("no pairs to fit");
    const Matrix x = singular_rows(pairs, table);
    const Matrix y = plural_rows(pairs, table);
    const auto map = inverse ? fit_inverse(x, y, config.ridge) : fit_linear_map(x, y, config.ridge);
    const fs::path map_path = output.empty() ? fs::path(common.out_dir) / (inverse ? "inverse_map.txt" : "map.txt")
                                             : fs::path(output);
    if (map_path.has_parent_path()) fs::create_directories(map_path.parent_path());
    save_linear_map(map_path, map);
    note(map_path);
    ojson result;
    result["direction"] = inverse ? "plural-to-singular" : "singular-to-plural";
    result["pairs"] = pairs.size();
    result["rank"] = map.rank;
    result["rank_tolerance"] = map.rank_tolerance;
    result["residual"] = map.residual;
    result["map"] = map_path.string();
    result["map_sha256"] = sha256_file(map_path);
    note(write_json_report(common.out_dir, inverse ? "fracss_invert.json" : "fracss_fit.json", prov, result));
}

void run_fracss_apply(const Inputs& in, const std::string& words_arg, std::size_t k, const Common& common) {
    const auto config = common.config();
    auto prov = provenance("fracss apply", &common, &config);
    require_file(in.map, "map");
    prov.add_input("map", in.map);
    const auto map = load_linear_map(in.map);
    const auto table = load_table(in.embeddings, prov, in.dim);
    if (map.d_in() != table.dim() || map.d_out() != table.dim()) throw DataError("map and embeddings differ in dim");
    std::vector<std::string> words;
    if (words_arg.empty()) {
        words = table.words();
    } else if (fs::is_regular_file(words_arg)) {
        prov.add_input("words", words_arg);
        std::ifstream f(words_arg);
        std::string w;
        while (f >> w) words.push_back(w);
    } else {
        words = split_list(words_arg);
    }
    const Metric metric = config.metric.value_or(Metric::cosine);
    prov.set("k", std::to_string(k));
    const CandidatePool pool(table, metric);
    note(write_csv_report(common.out_dir, "fracss_apply_neighbors.csv", prov, [&](std::ostream& o) {
        bool header = true;
        for (const auto& w : words) {
            const Vector v = apply_map(map, table.vector(table.require(w)));
            write_neighbors_csv(o, w, top_k(pool, v, std::min(k, table.size())), table, header);
            header = false;
        }
    }));
}

void run_fracss_profile(const Inputs& in, double scale, const Common& common) {
    auto prov = provenance("fracss profile", nullptr, nullptr);
    require_file(in.map, "map");
    prov.add_input("map", in.map);
    const auto map = load_linear_map(in.map);
    if (map.d_in() != map.d_out()) throw DataError("profile needs a square map");
    const auto p = diagonal_profile(map);
    note(write_csv_report(common.out_dir, "fracss_diagonal.csv", prov,
                          [&](std::ostream& o) { write_fracss_diagonal_csv(o, map); }));
    ojson result{{"diag_mean", p.diag_mean},
                 {"diag_sd", p.diag_sd},
                 {"offdiag_mean", p.offdiag_mean},
                 {"offdiag_sd", p.offdiag_sd}};
    if (!in.embeddings.empty() && !in.pairs.empty()) {
        const auto table = load_table(in.embeddings, prov, in.dim);
        const auto pairs = load_bound_pairs(in.pairs, table, prov);
        if (!pairs.empty()) {
            prov.set("scale", format_double(scale));
            const auto r = residual_profile(map, singular_rows(pairs, table), scale);
            result["residual"] = {{"scale", r.scale},
                                  {"element_mean", r.element_mean},
                                  {"element_sd", r.element_sd},
                                  {"row_mean_of_means", r.row_mean_of_means},
                                  {"row_mean_of_sds", r.row_mean_of_sds}};
            result["fraction_shorter"] = fraction_shorter(map, pairs, table);
            note(write_csv_report(common.out_dir, "fracss_residuals.csv", prov, [&](std::ostream& o) {
                o << "singular";
                for (Eigen::Index j = 0; j < r.residuals.cols(); ++j) o << ",e" << j + 1;
                o << '\n';
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    o << csv_field(table.word(pairs.pairs[i].singular));
                    for (Eigen::Index j = 0; j < r.residuals.cols(); ++j) {
                        o << ',' << format_double(r.residuals(static_cast<Eigen::Index>(i), j));
                    }
                    o << '\n';
                }
            }));
        }
    }
    note(write_json_report(common.out_dir, "fracss_profile.json", prov, result));
}

void run_fracss_evaluate(const Inputs& in, double train_fraction, double scale, const Common& common) {
    const auto config = common.config();
    auto prov = provenance("fracss evaluate", &common, &config);
    prov.set("train_fraction", format_double(train_fraction));
    prov.set("scale", format_double(scale));
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw UsageError("--train-fraction must lie in (0, 1]");
    const auto table = load_table(in.embeddings, prov, in.dim);
    const auto pairs = load_bound_pairs(in.pairs, table, prov);
    const auto r = pipeline_fracss(table, pairs, config, train_fraction, scale);
    const fs::path dir = common.out_dir;
    note(write_csv_report(dir, "fracss_topn.csv", prov, [&](std::ostream& o) { write_fracss_topn_csv(o, r); }));
    note(write_csv_report(dir, "fracss_diagonal.csv", prov,
                          [&](std::ostream& o) { write_fracss_diagonal_csv(o, r.forward); }));
    note(write_csv_report(dir, "fracss_profile.csv", prov, [&](std::ostream& o) { write_fracss_profile_csv(o, r); }));
    note(write_csv_report(dir, "fracss_lengths.csv", prov,
                          [&](std::ostream& o) { write_fracss_lengths_csv(o, r, pairs, table); }));
    fs::create_directories(dir);
    save_linear_map(dir / "fracss_map.txt", r.forward);
    save_linear_map(dir / "fracss_inverse_map.txt", r.inverse);
    note(dir / "fracss_map.txt");
    note(dir / "fracss_inverse_map.txt");
}

// --- classify ----------------------------------------------------------------

void run_classify_lda(const std::string& input, std::size_t label_column, std::size_t folds, double shrinkage,
                      const std::string& small, const std::string& mode, const Common& common) {
    auto prov = provenance("classify lda", &common, nullptr);
    prov.seed = common.seed;
    prov.set("labels", std::to_string(label_column));
    prov.set("folds", std::to_string(folds));
    prov.set("shrinkage", format_double(shrinkage));
    prov.set("small_classes", small);
    prov.set("mode", mode);
    if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) throw UsageError("--shrinkage must lie in [0, 1]");
    require_file(input, "input");
    prov.add_input("vectors", input);
    const auto data = load_labeled_vectors(input, label_column);
    if (mode == "train" || mode == "both") {
        const auto ev = evaluate_on_training(data.vectors, data.labels, shrinkage);
        ojson result{{"samples", data.labels.size()},
                     {"lda_accuracy", ev.lda.accuracy},
                     {"lda_weighted_f", ev.lda.weighted_f},
                     {"baseline_accuracy", ev.baseline.accuracy},
                     {"baseline_weighted_f", ev.baseline.weighted_f},
                     {"ratio", ev.ratio}};
        note(write_json_report(common.out_dir, "lda_training.json", prov, result));
    }
    if (mode == "cv" || mode == "both") {
        CvSpec spec;
        spec.k = folds;
        spec.seed = common.seed;
        spec.small_classes = small == "train-only" ? SmallClassPolicy::train_only : SmallClassPolicy::strict;
        const auto cv = stratified_cv(data.vectors, data.labels, spec, shrinkage, common.threads);
        for (const auto& c : cv.small_classes) std::cerr << "warning: class '" << c << "' kept in training only\n";
        note(write_csv_report(common.out_dir, "lda_cv.csv", prov, [&](std::ostream& o) { write_cv_csv(o, cv); }));
    }
}

// --- dl ----------------------------------------------------------------------

struct DlData {
    EmbeddingTable embeddings;
    PairSet pairs;
    PronLexicon lexicon;
    PairInfo info;
};

DlData load_dl(const Inputs& in, Provenance& prov, bool need_pairs) {
    require_file(in.lexicon, "lexicon");
    require_file(in.pair_info, "pair info");
    auto table = load_table(in.embeddings, prov, in.dim);
    prov.add_input("lexicon", in.lexicon);
    auto lexicon = load_lexicon(in.lexicon);
    prov.add_input("pair_info", in.pair_info);
    auto info = load_pair_info(in.pair_info);
    PairSet pairs;
    if (!in.pairs.empty()) {
        pairs = load_bound_pairs(in.pairs, table, prov);
    } else if (need_pairs) {
        throw UsageError("--pairs is required for cosclassavg and fracss targets");
    }
    return {std::move(table), std::move(pairs), std::move(lexicon), std::move(info)};
}

std::vector<SemanticSource> parse_sources(const std::vector<std::string>& names) {
    std::vector<SemanticSource> out;
    for (const auto& n : names) {
        for (const auto& item : split_list(n)) out.push_back(parse_source(item));
    }
    return out;
}

bool sources_need_pairs(const std::vector<SemanticSource>& s) {
    return std::any_of(s.begin(), s.end(), [](SemanticSource x) { return x != SemanticSource::raw; });
}

void run_dl_split(const Inputs& in, double fraction, const Common& common) {
    auto prov = provenance("dl split", &common, nullptr);
    prov.seed = common.seed;
    prov.set("fraction", format_double(fraction));
    const auto data = load_dl(in, prov, false);
    const auto layout = dl_layout(data.embeddings, data.lexicon, data.info, common.seed, fraction);
    note(write_csv_report(common.out_dir, "dl_split.tsv", prov, [&](std::ostream& o) {
        write_split_tsv(o, layout.form.form, layout.split, layout.roles);
    }));
    note(write_csv_report(common.out_dir, "dl_triphones.csv", prov, [&](std::ostream& o) {
        o << "column,triphone\n";
        const auto& names = layout.form.space.names();
        for (std::size_t i = 0; i < names.size(); ++i) o << i << ',' << csv_field(names[i]) << '\n';
    }));
}

void run_dl_fit(const Inputs& in, const std::string& source_name_arg, double fraction, const std::string& output,
                const Common& common) {
    const auto config = common.config();
    auto prov = provenance("dl fit", &common, &config);
    prov.set("source", source_name_arg);
    prov.set("fraction", format_double(fraction));
    const auto source = parse_source(source_name_arg);
    const auto data = load_dl(in, prov, source != SemanticSource::raw);
    const auto layout = dl_layout(data.embeddings, data.lexicon, data.info, config.seed, fraction);
    const auto sem = dl_semantics(source, layout.words, data.embeddings, data.pairs, data.info, config);
    const auto rows = rows_in(layout.split, Part::train);
    Matrix s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(sem.table.dim()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s.row(static_cast<Eigen::Index>(i)) = sem.table.vector(sem.table.require(layout.form.form.tokens[rows[i]].word)).transpose();
    }
    const auto f = fit_comprehension(layout.form.form.dense(rows), s, config.ridge);
    const fs::path map_path = output.empty() ? fs::path(common.out_dir) / "comprehension_map.txt" : fs::path(output);
    if (map_path.has_parent_path()) fs::create_directories(map_path.parent_path());
    save_linear_map(map_path, f);
    note(map_path);
    ojson result{{"source", source_name(source)},
                 {"train_tokens", rows.size()},
                 {"triphones", layout.form.form.columns},
                 {"rank", f.rank},
                 {"residual", f.residual},
                 {"fallbacks", sem.fallbacks},
                 {"map", map_path.string()},
                 {"map_sha256", sha256_file(map_path)}};
    note(write_json_report(common.out_dir, "dl_fit.json", prov, result));
}

void run_dl_evaluate(const Inputs& in, const std::vector<std::string>& source_args, double fraction,
                     const Common& common) {
    const auto config = common.config();
    auto prov = provenance("dl evaluate", &common, &config);
    const auto sources = parse_sources(source_args.empty() ? std::vector<std::string>{"raw"} : source_args);
    std::string text;
    for (auto s : sources) text += (text.empty() ? "" : ",") + std::string(source_name(s));
    prov.set("sources", text);
    prov.set("fraction", format_double(fraction));
    const auto data = load_dl(in, prov, sources_need_pairs(sources));
    const auto report = pipeline_dl(data.embeddings, data.pairs, data.lexicon, data.info, sources, config, fraction);
    const fs::path dir = common.out_dir;
    note(write_csv_report(dir, "dl_accuracy.csv", prov, [&](std::ostream& o) { write_dl_accuracy_csv(o, report); }));
    note(write_csv_report(dir, "dl_categories.csv", prov, [&](std::ostream& o) { write_dl_categories_csv(o, report); }));
    note(write_csv_report(dir, "dl_error_counts.csv", prov,
                          [&](std::ostream& o) { write_dl_error_counts_csv(o, report); }));
    note(write_csv_report(dir, "dl_errors.csv", prov, [&](std::ostream& o) { write_dl_errors_csv(o, report); }));
    note(write_csv_report(dir, "dl_multipron.csv", prov, [&](std::ostream& o) { write_dl_multipron_csv(o, report); }));
    note(write_csv_report(dir, "dl_comparison.csv", prov, [&](std::ostream& o) { write_dl_comparison_csv(o, report); }));
    note(write_csv_report(dir, "dl_split.tsv", prov, [&](std::ostream& o) {
        write_split_tsv(o, report.layout.form.form, report.layout.split, report.layout.roles);
    }));
}

// --- stats -------------------------------------------------------------------

void emit_json(const std::string& output, const Provenance& prov, const ojson& result) {
    if (output.empty()) {
        ojson j;
        j["provenance"] = prov.to_json();
        j["result"] = result;
        std::cout << j.dump(2) << '\n';
        return;
    }
    const fs::path path(output);
    note(write_json_report(path.has_parent_path() ? path.parent_path() : fs::path("."), path.filename().string(), prov,
                           result));
}

ojson result_json(const TestResult& r) {
    std::ostringstream s;
    write_test_result_json(s, r);
    return ojson::parse(s.str());
}

void run_stats(bool is_friedman, const std::string& input, const std::string& cols_arg, const std::string& alternative,
               const std::string& output) {
    Provenance prov;
    prov.command = is_friedman ? "stats friedman" : "stats wilcoxon";
    prov.set("cols", cols_arg);
    require_file(input, "input");
    prov.add_input("data", input);
    const auto cols = split_list(cols_arg);
    const auto table = load_csv(input);
    std::vector<std::vector<double>> groups;
    for (const auto& c : cols) groups.push_back(table.numeric(c));
    if (is_friedman) {
        if (groups.size() < 3) throw UsageError("friedman needs at least three columns");
        const auto r = friedman(groups);
        auto j = result_json(r);
        const auto md = medians_and_deltas(groups);
        ojson medians;
        for (std::size_t i = 0; i < cols.size(); ++i) medians[cols[i]] = md.medians[i];
        j["medians"] = medians;
        emit_json(output, prov, j);
        return;
    }
    prov.set("alternative", alternative);
    if (groups.size() == 1) {
        emit_json(output, prov, result_json(wilcoxon_signed_rank(groups[0], parse_alternative(alternative))));
        return;
    }
    if (groups.size() != 2) throw UsageError("wilcoxon takes one column of differences or two paired columns");
    std::vector<double> diffs(groups[0].size());
    for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = groups[0][i] - groups[1][i];
    auto j = result_json(wilcoxon_signed_rank(diffs, parse_alternative(alternative)));
    j["difference"] = cols[0] + " - " + cols[1];
    j["median_delta"] = median(groups[1]) - median(groups[0]);
    emit_json(output, prov, j);
}

// --- synth -------------------------------------------------------------------

void run_synth(const SynthSpec& spec, bool lexicon, const SynthLexiconSpec& lex_spec, const Common& common) {
    Provenance prov;
    prov.command = "synth gen";
    prov.seed = spec.seed;
    prov.set("classes", std::to_string(spec.classes));
    prov.set("lexemes", std::to_string(spec.lexemes_per_class));
    prov.set("dim", std::to_string(spec.dim));
    prov.set("centroid_scale", format_double(spec.centroid_scale));
    prov.set("lexeme_spread", format_double(spec.lexeme_spread));
    prov.set("shift_scale", format_double(spec.class_shift_scale));
    prov.set("shared_shift", format_double(spec.shared_shift));
    prov.set("sigma_lex", format_double(spec.lexeme_noise));
    prov.set("sigma", format_double(spec.measurement_noise));
    const auto data = gen_synth(spec);
    const fs::path dir = common.out_dir;
    fs::create_directories(dir);
    save_embeddings(dir / "embeddings.txt", data.table);
    note(dir / "embeddings.txt");
    {
        std::ofstream f(dir / "pairs.tsv", std::ios::binary);
        write_pairs(f, data.pairs);
    }
    note(dir / "pairs.tsv");
    note(write_csv_report(dir, "true_shifts.csv", prov, [&](std::ostream& o) {
        o << "label";
        for (std::size_t j = 0; j < spec.dim; ++j) o << ",v" << j + 1;
        o << '\n';
        for (const auto& [label, v] : data.true_shifts) {
            o << label;
            for (Eigen::Index j = 0; j < v.size(); ++j) o << ',' << format_double(v[j]);
            o << '\n';
        }
    }));
    if (lexicon) {
        const auto lex = gen_synth_lexicon(data.pairs, lex_spec);
        {
            std::ofstream f(dir / "lexicon.txt", std::ios::binary);
            write_lexicon(f, lex.lexicon);
        }
        {
            std::ofstream f(dir / "pair_info.tsv", std::ios::binary);
            write_pair_info(f, lex.pair_info);
        }
        note(dir / "lexicon.txt");
        note(dir / "pair_info.tsv");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"plurvec: vector-space models of English noun pluralization"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Common common;
    Inputs in;
    std::optional<std::size_t> axis;
    bool normalize = false;
    std::string output, prime, words, cols, alternative = "two-sided", small = "strict", mode = "cv", source = "raw";
    std::vector<std::string> methods, sources;
    std::size_t k = 10, label_column = 2, folds = 5;
    double train_fraction = 0.9, scale = 0.57, shrinkage = 1e-3, dl_fraction = 0.70;
    SynthSpec synth;
    SynthLexiconSpec lex_spec;
    bool with_lexicon = false;

    auto add_emb = [&](CLI::App* a, bool required = true) {
        auto* o = a->add_option("--embeddings", in.embeddings, "word2vec text embeddings");
        if (required) o->required();
        a->add_option("--dim", in.dim, "Expected dimensionality");
    };
    auto add_pairs = [&](CLI::App* a, bool required = true) {
        auto* o = a->add_option("--pairs", in.pairs, "singular<TAB>plural[<TAB>class] pairs");
        if (required) o->required();
    };

    // embed
    auto* embed = app.add_subcommand("embed", "Embedding tables");
    embed->require_subcommand(1);
    auto* embed_load = embed->add_subcommand("load", "Validate a table and report its shape");
    add_emb(embed_load);
    embed_load->add_flag("--normalize", normalize, "Scale vectors to unit length before writing");
    embed_load->add_option("--output", output, "Write the (normalized) table here");
    add_out_dir(embed_load, common);

    // shifts
    auto* shifts = app.add_subcommand("shifts", "Shift vectors");
    shifts->require_subcommand(1);
    auto* sh_stats = shifts->add_subcommand("stats", "Length and angle statistics");
    add_emb(sh_stats);
    add_pairs(sh_stats);
    sh_stats->add_option("--axis", axis, "0-based reference axis (default: last)");
    add_out_dir(sh_stats, common);
    auto* sh_class = shifts->add_subcommand("classavg", "Per-class average shift vectors");
    add_emb(sh_class);
    add_pairs(sh_class);
    sh_class->add_option("--min-class-size", common.min_class_size, "Classes below this size are flagged");
    add_out_dir(sh_class, common);
    auto* sh_export = shifts->add_subcommand("export-tsne-input", "word<TAB>class<TAB>shift vector rows");
    add_emb(sh_export);
    add_pairs(sh_export);
    add_out_dir(sh_export, common);

    // analogy
    auto* analogy = app.add_subcommand("analogy", "Analogy-based pluralizers");
    analogy->require_subcommand(1);
    auto* an_eval = analogy->add_subcommand("evaluate", "Top-n evaluation of the pluralizers");
    add_emb(an_eval);
    add_pairs(an_eval);
    an_eval->add_option("--method", methods, "only-b, 3cosadd, 3cosavg or cosclassavg (repeatable)")
        ->check(CLI::IsMember({"only-b", "3cosadd", "3cosavg", "cosclassavg"}));
    an_eval->add_option("--prime", prime, "Prime pair for 3CosAdd: singular,plural");
    add_seed(an_eval, common, false);
    add_metric(an_eval, common);
    add_topn(an_eval, common);
    an_eval->add_option("--min-class-size", common.min_class_size, "Minimum class size for CosClassAvg");
    an_eval->add_flag("--filter-singulars", common.filter_singulars, "Remove dataset singulars from the pool");
    add_threads(an_eval, common);
    add_out_dir(an_eval, common);

    // fracss
    auto* fracss = app.add_subcommand("fracss", "Linear singular/plural mappings");
    fracss->require_subcommand(1);
    auto* fr_fit = fracss->add_subcommand("fit", "Fit B on all pairs");
    auto* fr_inv = fracss->add_subcommand("invert", "Fit the plural-to-singular map on all pairs");
    for (auto* a : {fr_fit, fr_inv}) {
        add_emb(a);
        add_pairs(a);
        add_ridge(a, common);
        a->add_option("--output", output, "Map file");
        add_out_dir(a, common);
    }
    auto* fr_apply = fracss->add_subcommand("apply", "Apply a map and list neighbors of the predictions");
    fr_apply->add_option("--map", in.map, "Map file")->required();
    add_emb(fr_apply);
    fr_apply->add_option("--words", words, "Comma-separated words or a file of words (default: all)");
    fr_apply->add_option("--k", k, "Neighbors per word");
    add_metric(fr_apply, common);
    add_out_dir(fr_apply, common);
    auto* fr_profile = fracss->add_subcommand("profile", "Diagonal profile and residuals of a map");
    fr_profile->add_option("--map", in.map, "Map file")->required();
    add_emb(fr_profile, false);
    add_pairs(fr_profile, false);
    fr_profile->add_option("--scale", scale, "Scaled-identity reference for residuals");
    add_out_dir(fr_profile, common);
    auto* fr_eval = fracss->add_subcommand("evaluate", "Seeded split, forward and inverse evaluation");
    add_emb(fr_eval);
    add_pairs(fr_eval);
    add_seed(fr_eval, common, true);
    add_ridge(fr_eval, common);
    add_metric(fr_eval, common);
    add_topn(fr_eval, common);
    fr_eval->add_flag("--filter-singulars", common.filter_singulars, "Remove dataset singulars from the forward pool");
    fr_eval->add_option("--train-fraction", train_fraction, "Training share of the pairs");
    fr_eval->add_option("--scale", scale, "Scaled-identity reference for residuals");
    add_threads(fr_eval, common);
    add_out_dir(fr_eval, common);

    // classify
    auto* classify = app.add_subcommand("classify", "Class structure of vectors");
    classify->require_subcommand(1);
    auto* lda = classify->add_subcommand("lda", "Linear discriminant analysis");
    lda->add_option("--input", output, "word<TAB>label<TAB>v1..vd rows")->required();
    lda->add_option("--labels", label_column, "1-based label column");
    lda->add_option("--folds", folds, "Cross-validation folds");
    add_seed(lda, common, true);
    lda->add_option("--shrinkage", shrinkage, "Covariance shrinkage in [0, 1]");
    lda->add_option("--small-classes", small, "strict or train-only")->check(CLI::IsMember({"strict", "train-only"}));
    lda->add_option("--mode", mode, "cv, train or both")->check(CLI::IsMember({"cv", "train", "both"}));
    add_threads(lda, common);
    add_out_dir(lda, common);

    // dl
    auto* dl = app.add_subcommand("dl", "Discriminative-lexicon comprehension");
    dl->require_subcommand(1);
    auto* dl_split_cmd = dl->add_subcommand("split", "Build the form matrix and the train/test split");
    auto* dl_fit_cmd = dl->add_subcommand("fit", "Fit the form-to-meaning map");
    auto* dl_eval_cmd = dl->add_subcommand("evaluate", "Fit, evaluate and classify errors");
    for (auto* a : {dl_split_cmd, dl_fit_cmd, dl_eval_cmd}) {
        add_emb(a);
        a->add_option("--lexicon", in.lexicon, "WORD<TAB>PHONES lexicon")->required();
        a->add_option("--pair-info", in.pair_info, "word<TAB>singular|plural<TAB>partner")->required();
        add_seed(a, common, true);
        a->add_option("--fraction", dl_fraction, "Training share of seen-stem plural types");
        add_out_dir(a, common);
    }
    for (auto* a : {dl_fit_cmd, dl_eval_cmd}) {
        add_pairs(a, false);
        add_ridge(a, common);
        a->add_option("--min-class-size", common.min_class_size, "Minimum class size for cosclassavg targets");
    }
    dl_fit_cmd->add_option("--source", source, "raw, cosclassavg or fracss");
    dl_fit_cmd->add_option("--output", output, "Map file");
    dl_eval_cmd->add_option("--source", sources, "raw, cosclassavg, fracss (repeatable or comma-separated)");
    add_metric(dl_eval_cmd, common);
    add_topn(dl_eval_cmd, common);
    add_threads(dl_eval_cmd, common);

    // stats
    auto* stats = app.add_subcommand("stats", "Nonparametric tests on CSV columns");
    stats->require_subcommand(1);
    auto* wil = stats->add_subcommand("wilcoxon", "Signed-rank test on one difference column or two paired columns");
    auto* fri = stats->add_subcommand("friedman", "Friedman test on three or more matched columns");
    for (auto* a : {wil, fri}) {
        a->add_option("--input", in.embeddings, "CSV file with a header row")->required();
        a->add_option("--cols", cols, "Comma-separated column names")->required();
        a->add_option("--output", output, "JSON file (default: stdout)");
    }
    wil->add_option("--alternative", alternative, "two-sided, greater or less")
        ->check(CLI::IsMember({"two-sided", "greater", "less"}));

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Synthetic data");
    synth_cmd->require_subcommand(1);
    auto* gen = synth_cmd->add_subcommand("gen", "Class-structured embeddings and pairs");
    gen->add_option("--classes", synth.classes, "Number of classes");
    gen->add_option("--lexemes", synth.lexemes_per_class, "Lexemes per class");
    gen->add_option("--dim", synth.dim, "Dimensionality");
    gen->add_option("--centroid-scale", synth.centroid_scale, "Length of class centroids");
    gen->add_option("--spread", synth.lexeme_spread, "Length of singular offsets from the centroid");
    gen->add_option("--shift-scale", synth.class_shift_scale, "Length of class shifts");
    gen->add_option("--shared-shift", synth.shared_shift, "Weight of a shift direction common to all classes");
    gen->add_option("--sigma-lex", synth.lexeme_noise, "Lexeme-specific noise length");
    gen->add_option("--sigma", synth.measurement_noise, "Measurement noise length");
    gen->add_option("--seed", synth.seed, "Seed")->required();
    gen->add_flag("--lexicon", with_lexicon, "Also write a pronunciation lexicon and pair info");
    gen->add_option("--unseen-stems", lex_spec.unseen_stems, "Pairs written without their singular");
    gen->add_option("--variant-fraction", lex_spec.variant_fraction, "Share of words with a second pronunciation");
    add_out_dir(gen, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    for (auto* a : {an_eval, fr_eval, lda, dl_split_cmd, dl_fit_cmd, dl_eval_cmd}) {
        if (a->parsed() && a->count("--seed")) common.seed_given = true;
    }

    try {
        if (embed_load->parsed()) run_embed_load(in, normalize, output, common);
        else if (sh_stats->parsed()) run_shifts_stats(in, axis, common);
        else if (sh_class->parsed()) run_shifts_classavg(in, common);
        else if (sh_export->parsed()) run_shifts_export(in, common);
        else if (an_eval->parsed()) run_analogy(in, methods, prime, common);
        else if (fr_fit->parsed()) run_fracss_fit(in, output, false, common);
        else if (fr_inv->parsed()) run_fracss_fit(in, output, true, common);
        else if (fr_apply->parsed()) run_fracss_apply(in, words, k, common);
        else if (fr_profile->parsed()) run_fracss_profile(in, scale, common);
        else if (fr_eval->parsed()) run_fracss_evaluate(in, train_fraction, scale, common);
        else if (lda->parsed()) run_classify_lda(output, label_column, folds, shrinkage, small, mode, common);
        else if (dl_split_cmd->parsed()) run_dl_split(in, dl_fraction, common);
        else if (dl_fit_cmd->parsed()) run_dl_fit(in, source, dl_fraction, output, common);
        else if (dl_eval_cmd->parsed()) run_dl_evaluate(in, sources, dl_fraction, common);
        else if (wil->parsed()) run_stats(false, in.embeddings, cols, alternative, output);
        else if (fri->parsed()) run_stats(true, in.embeddings, cols, alternative, output);
        else if (gen->parsed()) {
            lex_spec.seed = synth.seed + 1;
            run_synth(synth, with_lexicon, lex_spec, common);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_data;
    }
    return 0;
}
