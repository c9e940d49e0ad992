#include "plurvec/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "plurvec/error.hpp"

namespace plurvec {

namespace {

std::string join_ns(const std::vector<std::size_t>& ns) {
    std::string s;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(ns[i]);
    }
    return s;
}

void write_top_header(std::ostream& out, const std::vector<std::size_t>& ns) {
    for (std::size_t n : ns) out << ",top" << n;
}

void write_percent(std::ostream& out, const std::vector<double>& percent) {
    for (double p : percent) out << ',' << fixed(p, 4);
}

std::string rank_text(const std::optional<RankResult>& r) { return r ? std::to_string(r->rank) : std::string("NA"); }

} // namespace

void RunConfig::describe(Provenance& provenance) const {
    provenance.seed = seed;
    provenance.set("metric", metric ? std::string(metric_name(*metric)) : std::string("default"));
    provenance.set("topn", ns.empty() ? std::string("default") : join_ns(ns));
    provenance.set("ridge", format_double(ridge));
    provenance.set("min_class_size", std::to_string(min_class_size));
    provenance.set("filter_singulars", filter_singulars ? "true" : "false");
}

// --- analogy -----------------------------------------------------------------

AnalogyReport pipeline_analogy(const EmbeddingTable& table, const PairSet& pairs, const RunConfig& config,
                               const AnalogyRun& run) {
    if (pairs.empty()) throw UsageError("analogy: no pairs to evaluate");
    const bool labeled = std::all_of(pairs.pairs.begin(), pairs.pairs.end(), [](const Pair& p) { return p.label.has_value(); });

    std::vector<Method> methods = run.methods;
    if (methods.empty()) {
        methods = {Method::only_b};
        if (run.prime) methods.push_back(Method::three_cos_add);
        methods.push_back(Method::three_cos_avg);
        if (labeled) methods.push_back(Method::cos_class_avg);
    }

    EvalOptions opts;
    opts.metric = config.metric.value_or(Metric::cosine);
    if (!config.ns.empty()) opts.ns = config.ns;
    opts.filter_singulars = config.filter_singulars;
    opts.threads = config.threads;

    AnalogyReport report;
    report.metric = opts.metric;
    report.ns = opts.ns;
    const auto pool = analogy_pool(table, pairs, {}, config.filter_singulars);
    report.pool_size = pool.size();

    for (Method m : methods) {
        PluralizerSpec spec;
        switch (m) {
        case Method::only_b: spec = PluralizerSpec::make_only_b(); break;
        case Method::three_cos_add:
            if (!run.prime) throw UsageError("3CosAdd needs a prime pair");
            spec = PluralizerSpec::make_three_cos_add(table.require(run.prime->first), table.require(run.prime->second));
            break;
        case Method::three_cos_avg: spec = PluralizerSpec::make_three_cos_avg(avg_shift(pairs, table)); break;
        case Method::cos_class_avg:
            spec = PluralizerSpec::make_cos_class_avg(class_avg_shifts(pairs, table, config.min_class_size),
                                                      class_assignment(pairs, table));
            break;
        }
        report.rows.push_back(evaluate_pluralizer(spec, pairs, table, pool, opts));
    }
    return report;
}

void write_analogy_topn_csv(std::ostream& out, const AnalogyReport& report) {
    out << "method";
    write_top_header(out, report.ns);
    out << ",failures,pool\n";
    for (const auto& row : report.rows) {
        out << method_label(row.method);
        write_percent(out, row.report.percent);
        out << ',' << row.report.failures << ',' << report.pool_size << '\n';
    }
}

void write_analogy_ranks_csv(std::ostream& out, const AnalogyReport& report, const PairSet& pairs,
                             const EmbeddingTable& table) {
    out << "method,singular,plural,rank,candidates,best,failure\n";
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.report.outcomes.size(); ++i) {
            const auto& o = row.report.outcomes[i];
            const auto& p = pairs.pairs.at(i);
            out << method_label(row.method) << ',' << csv_field(table.word(p.singular)) << ','
                << csv_field(table.word(p.plural)) << ',' << rank_text(o.rank) << ','
                << (o.rank ? std::to_string(o.rank->candidate_count) : std::string("NA")) << ','
                << (o.best ? csv_field(table.word(*o.best)) : std::string()) << ',' << csv_field(o.failure) << '\n';
        }
    }
}

// --- fracss ------------------------------------------------------------------

FracssReport pipeline_fracss(const EmbeddingTable& table, const PairSet& pairs, const RunConfig& config,
                             double train_fraction, double residual_scale) {
    if (pairs.empty()) throw UsageError("fracss: no pairs");
    FracssReport r;
    r.metric = config.metric.value_or(Metric::cosine);
    r.ns = config.ns.empty() ? std::vector<std::size_t>{1, 2, 3, 10} : config.ns;
    r.train_fraction = train_fraction;
    r.split = split_pairs(pairs.size(), train_fraction, config.seed);
    if (r.split.train.empty()) throw UsageError("fracss: the training part is empty");

    const PairSet train = subset(pairs, r.split.train);
    const PairSet test = subset(pairs, r.split.test);
    const Matrix x = singular_rows(train, table);
    const Matrix y = plural_rows(train, table);
    r.forward = fit_linear_map(x, y, config.ridge);
    r.inverse = fit_inverse(x, y, config.ridge);
    if (r.forward.d_in() == r.forward.d_out()) {
        r.forward_profile = diagonal_profile(r.forward);
        r.inverse_profile = diagonal_profile(r.inverse);
    }
    r.residuals = residual_profile(r.forward, x, residual_scale);

    EvalOptions opts;
    opts.metric = r.metric;
    opts.ns = r.ns;
    opts.filter_singulars = config.filter_singulars;
    opts.threads = config.threads;
    const auto forward_pool = analogy_pool(table, pairs, {}, config.filter_singulars);
    std::vector<WordId> all(table.size());
    for (WordId i = 0; i < all.size(); ++i) all[i] = i;

    r.forward_train = evaluate_map(r.forward, train, table, forward_pool, opts);
    r.inverse_train = evaluate_inverse_map(r.inverse, train, table, all, opts);
    r.shorter_train = fraction_shorter(r.forward, train, table);
    if (!test.empty()) {
        r.forward_test = evaluate_map(r.forward, test, table, forward_pool, opts);
        r.inverse_test = evaluate_inverse_map(r.inverse, test, table, all, opts);
        r.shorter_test = fraction_shorter(r.forward, test, table);
    }
    return r;
}

void write_fracss_diagonal_csv(std::ostream& out, const LinearMap& map) {
    out << "entry,row,col,value\n";
    const auto d = std::min(map.matrix.rows(), map.matrix.cols());
    for (Eigen::Index i = 0; i < d; ++i) {
        out << "diag," << i << ',' << i << ',' << format_double(map.matrix(i, i)) << '\n';
    }
}

void write_fracss_profile_csv(std::ostream& out, const FracssReport& report) {
    out << "map,quantity,value\n";
    auto profile = [&](const char* name, const LinearMap& m, const DiagonalProfile& p) {
        out << name << ",diag_mean," << format_double(p.diag_mean) << '\n'
            << name << ",diag_sd," << format_double(p.diag_sd) << '\n'
            << name << ",offdiag_mean," << format_double(p.offdiag_mean) << '\n'
            << name << ",offdiag_sd," << format_double(p.offdiag_sd) << '\n'
            << name << ",train_rows," << m.train_rows << '\n'
            << name << ",rank," << m.rank << '\n'
            << name << ",residual," << format_double(m.residual) << '\n';
    };
    profile("forward", report.forward, report.forward_profile);
    profile("inverse", report.inverse, report.inverse_profile);
    const auto& e = report.residuals;
    out << "residual,scale," << format_double(e.scale) << '\n'
        << "residual,element_mean," << format_double(e.element_mean) << '\n'
        << "residual,element_sd," << format_double(e.element_sd) << '\n'
        << "residual,row_mean_of_means," << format_double(e.row_mean_of_means) << '\n'
        << "residual,row_mean_of_sds," << format_double(e.row_mean_of_sds) << '\n'
        << "lengths,shorter_train," << format_double(report.shorter_train) << '\n'
        << "lengths,shorter_test," << format_double(report.shorter_test) << '\n';
}

void write_fracss_topn_csv(std::ostream& out, const FracssReport& report) {
    out << "direction,part,count";
    write_top_header(out, report.ns);
    out << '\n';
    auto row = [&](const char* dir, const char* part, const TopNReport& t) {
        if (t.outcomes.empty()) return;
        out << dir << ',' << part << ',' << t.outcomes.size();
        write_percent(out, t.percent);
        out << '\n';
    };
    row("forward", "train", report.forward_train);
    row("forward", "test", report.forward_test);
    row("inverse", "train", report.inverse_train);
    row("inverse", "test", report.inverse_test);
}

void write_fracss_lengths_csv(std::ostream& out, const FracssReport& report, const PairSet& pairs,
                              const EmbeddingTable& table) {
    out << "singular,plural,part,singular_length,predicted_length,shorter\n";
    auto rows = [&](const std::vector<std::size_t>& idx, const char* part) {
        for (std::size_t i : idx) {
            const auto& p = pairs.pairs.at(i);
            const auto sg = table.vector(p.singular);
            const double a = sg.norm();
            const double b = apply_map(report.forward, sg).norm();
            out << csv_field(table.word(p.singular)) << ',' << csv_field(table.word(p.plural)) << ',' << part << ','
                << fixed(a, 6) << ',' << fixed(b, 6) << ',' << (b < a ? 1 : 0) << '\n';
        }
    };
    rows(report.split.train, "train");
    rows(report.split.test, "test");
}

// --- discriminative lexicon --------------------------------------------------

std::string_view source_name(SemanticSource source) {
    switch (source) {
    case SemanticSource::raw: return "raw";
    case SemanticSource::cosclassavg: return "cosclassavg";
    case SemanticSource::fracss: return "fracss";
    }
    return "unknown";
}

SemanticSource parse_source(std::string_view name) {
    if (name == "raw") return SemanticSource::raw;
    if (name == "cosclassavg") return SemanticSource::cosclassavg;
    if (name == "fracss") return SemanticSource::fracss;
    throw UsageError("unknown semantic source '" + std::string(name) + "'");
}

std::vector<std::string> dl_words(const EmbeddingTable& embeddings, const PronLexicon& lexicon,
                                  const PairInfo& info) {
    std::vector<std::string> words;
    for (const auto& [word, entry] : info) {
        if (lexicon.contains(word) && embeddings.lookup(word)) words.push_back(word);
    }
    if (words.empty()) throw DataError("no word is present in the pair info, the lexicon and the embeddings");
    return words;
}

DlSemantics dl_semantics(SemanticSource source, const std::vector<std::string>& words,
                         const EmbeddingTable& embeddings, const PairSet& pairs, const PairInfo& info,
                         const RunConfig& config) {
    std::optional<ClassShiftTable> classes;
    ClassAssignment class_of;
    std::optional<LinearMap> map;
    if (source == SemanticSource::cosclassavg) {
        if (pairs.empty()) throw UsageError("cosclassavg targets need labeled pairs");
        classes = class_avg_shifts(pairs, embeddings, config.min_class_size);
        class_of = class_assignment(pairs, embeddings);
    } else if (source == SemanticSource::fracss) {
        if (pairs.empty()) throw UsageError("fracss targets need pairs");
        map = fit_linear_map(singular_rows(pairs, embeddings), plural_rows(pairs, embeddings), config.ridge);
    }

    Matrix s(static_cast<Eigen::Index>(embeddings.dim()), static_cast<Eigen::Index>(words.size()));
    std::size_t fallbacks = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const Vector own = embeddings.vector(embeddings.require(words[i]));
        s.col(col) = own;
        const auto& entry = info.at(words[i]);
        if (!entry.plural || source == SemanticSource::raw) continue;
        const auto partner = entry.partner ? embeddings.lookup(*entry.partner) : std::nullopt;
        bool done = false;
        if (partner) {
            const Vector sg = embeddings.vector(*partner);
            if (source == SemanticSource::fracss) {
                s.col(col) = apply_map(*map, sg);
                done = true;
            } else if (auto c = class_of.find(*entry.partner); c != class_of.end()) {
                const auto* shift = classes->find(c->second);
                if (shift && !shift->under_threshold) {
                    s.col(col) = sg + shift->shift;
                    done = true;
                }
            }
        }
        if (!done) ++fallbacks;
    }
    return {source, EmbeddingTable(words, std::move(s)), fallbacks};
}

DlLayout dl_layout(const EmbeddingTable& embeddings, const PronLexicon& lexicon, const PairInfo& info,
                   std::uint64_t seed, double fraction) {
    DlLayout layout;
    layout.words = dl_words(embeddings, lexicon, info);
    layout.form = build_form_matrix(lexicon, layout.words);
    layout.roles = assign_roles(layout.words, info);
    layout.split = make_split(layout.form.form, layout.roles, seed, fraction);
    return layout;
}

DlReport pipeline_dl(const EmbeddingTable& embeddings, const PairSet& pairs, const PronLexicon& lexicon,
                     const PairInfo& info, const std::vector<SemanticSource>& sources, const RunConfig& config,
                     double fraction) {
    if (sources.empty()) throw UsageError("dl: no semantic source selected");
    DlReport report;
    report.layout = dl_layout(embeddings, lexicon, info, config.seed, fraction);
    const auto& form = report.layout.form.form;
    const auto train_rows = rows_in(report.layout.split, Part::train);
    const auto test_rows = rows_in(report.layout.split, Part::test);
    const Matrix c_train = form.dense(train_rows);
    const Metric metric = config.metric.value_or(Metric::pearson);
    const std::vector<std::size_t> ns = config.ns.empty() ? std::vector<std::size_t>{1, 2, 3, 4, 5} : config.ns;

    for (SemanticSource source : sources) {
        const auto sem = dl_semantics(source, report.layout.words, embeddings, pairs, info, config);
        DlRun run;
        run.source = source;
        run.fallbacks = sem.fallbacks;

        Matrix s_train(static_cast<Eigen::Index>(train_rows.size()), static_cast<Eigen::Index>(sem.table.dim()));
        std::set<WordId> types;
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            const WordId id = sem.table.require(form.tokens[train_rows[i]].word);
            s_train.row(static_cast<Eigen::Index>(i)) = sem.table.vector(id).transpose();
            types.insert(id);
        }
        run.comprehension = fit_comprehension(c_train, s_train, config.ridge);
        const std::vector<WordId> candidates(types.begin(), types.end());
        run.candidate_types = candidates.size();

        auto errors = [&](const EvalReport& rep) {
            std::vector<ErrorRecord> out;
            for (const auto& o : rep.outcomes) {
                if (o.rank && o.rank->rank == 1) continue;
                if (o.predicted.empty()) continue;
                out.push_back(classify_error(form.tokens[o.row], o.predicted, info, lexicon));
            }
            return out;
        };
        run.train = evaluate_comprehension(run.comprehension, form, train_rows, sem.table, candidates, lexicon,
                                           metric, ns, config.threads);
        run.train_errors = errors(run.train);
        if (!test_rows.empty()) {
            run.test = evaluate_comprehension(run.comprehension, form, test_rows, sem.table, candidates, lexicon,
                                              metric, ns, config.threads);
            run.test_errors = errors(run.test);
        }
        report.runs.push_back(std::move(run));
    }
    return report;
}

namespace {

template <typename F>
void each_part(const DlReport& report, F&& f) {
    for (const auto& run : report.runs) {
        f(run, "train", run.train, run.train_errors);
        if (!run.test.outcomes.empty()) f(run, "test", run.test, run.test_errors);
    }
}

std::vector<std::size_t> report_ns(const DlReport& report) {
    return report.runs.empty() ? std::vector<std::size_t>{} : report.runs.front().train.ns;
}

} // namespace

void write_dl_accuracy_csv(std::ostream& out, const DlReport& report) {
    out << "source,part,tokens,candidates";
    write_top_header(out, report_ns(report));
    out << ",fallbacks\n";
    each_part(report, [&](const DlRun& run, const char* part, const EvalReport& rep, const auto&) {
        out << source_name(run.source) << ',' << part << ',' << rep.outcomes.size() << ','
            << run.candidate_types + (std::string_view(part) == "test" ? 1 : 0);
        write_percent(out, rep.percent);
        out << ',' << run.fallbacks << '\n';
    });
}

void write_dl_categories_csv(std::ostream& out, const DlReport& report) {
    out << "source,part,role,tokens,top1\n";
    each_part(report, [&](const DlRun& run, const char* part, const EvalReport& rep, const auto&) {
        std::map<WordRole, std::pair<std::size_t, std::size_t>> tally;
        for (const auto& o : rep.outcomes) {
            auto& t = tally[report.layout.roles.at(o.gold)];
            ++t.first;
            if (o.rank && o.rank->rank == 1) ++t.second;
        }
        for (const auto& [role, t] : tally) {
            out << source_name(run.source) << ',' << part << ',' << role_name(role) << ',' << t.first << ','
                << fixed(100.0 * static_cast<double>(t.second) / static_cast<double>(t.first), 4) << '\n';
        }
    });
}

void write_dl_error_counts_csv(std::ostream& out, const DlReport& report) {
    out << "source,part,category,count\n";
    each_part(report, [&](const DlRun& run, const char* part, const EvalReport&, const std::vector<ErrorRecord>& errs) {
        for (auto c : {ErrorCategory::singular_confusion, ErrorCategory::similar_sounding, ErrorCategory::other}) {
            const auto n = std::count_if(errs.begin(), errs.end(), [c](const ErrorRecord& e) { return e.category == c; });
            out << source_name(run.source) << ',' << part << ',' << category_name(c) << ',' << n << '\n';
        }
    });
}

void write_dl_errors_csv(std::ostream& out, const DlReport& report) {
    out << "source,part,token,gold,predicted,category,recall,overlap\n";
    each_part(report, [&](const DlRun& run, const char* part, const EvalReport&, const std::vector<ErrorRecord>& errs) {
        for (const auto& e : errs) {
            out << source_name(run.source) << ',' << part << ',' << csv_field(e.token) << ',' << csv_field(e.gold) << ','
                << csv_field(e.predicted) << ',' << category_name(e.category) << ',' << fixed(e.recall, 6) << ','
                << fixed(e.overlap, 6) << '\n';
        }
    });
}

void write_dl_multipron_csv(std::ostream& out, const DlReport& report) {
    out << "source,part,types,recognized\n";
    each_part(report, [&](const DlRun& run, const char* part, const EvalReport& rep, const auto&) {
        out << source_name(run.source) << ',' << part << ',' << rep.multi_pron_types << ','
            << rep.multi_pron_recognized << '\n';
    });
}

void write_dl_comparison_csv(std::ostream& out, const DlReport& report) {
    out << "part,n";
    for (const auto& run : report.runs) out << ',' << source_name(run.source);
    out << '\n';
    const auto ns = report_ns(report);
    for (const char* part : {"train", "test"}) {
        const bool train = std::string_view(part) == "train";
        if (!train && (report.runs.empty() || report.runs.front().test.outcomes.empty())) continue;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            out << part << ',' << ns[k];
            for (const auto& run : report.runs) out << ',' << fixed((train ? run.train : run.test).percent[k], 4);
            out << '\n';
        }
    }
}

} // namespace plurvec
