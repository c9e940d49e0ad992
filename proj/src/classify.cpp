#include "plurvec/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "plurvec/error.hpp"
#include "plurvec/parallel.hpp"
#include "plurvec/stats.hpp"

namespace plurvec {

LdaModel fit_lda(const Matrix& vectors, std::span<const std::string> labels, double shrinkage) {
    if (static_cast<std::size_t>(vectors.rows()) != labels.size()) {
        throw UsageError("fit_lda: " + std::to_string(vectors.rows()) + " vectors but " +
                         std::to_string(labels.size()) + " labels");
    }
    if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) throw UsageError("shrinkage must lie in [0, 1]");
    if (!vectors.allFinite()) throw DataError("fit_lda: non-finite input");

    std::map<std::string, std::vector<Eigen::Index>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(static_cast<Eigen::Index>(i));
    if (members.size() < 2) throw UsageError("LDA needs at least two classes");
    for (const auto& [label, rows] : members) {
        if (rows.size() < 2) throw UsageError("class '" + label + "' has a single sample");
    }

    const Eigen::Index d = vectors.cols();
    const auto n = static_cast<double>(labels.size());
    const auto k = static_cast<Eigen::Index>(members.size());

    LdaModel model;
    model.shrinkage = shrinkage;
    model.means.resize(d, k);
    Matrix scatter = Matrix::Zero(d, d);
    Eigen::Index c = 0;
    for (const auto& [label, rows] : members) {
        model.labels.push_back(label);
        model.priors.push_back(static_cast<double>(rows.size()) / n);
        Vector mu = Vector::Zero(d);
        for (auto r : rows) mu += vectors.row(r).transpose();
        mu /= static_cast<double>(rows.size());
        model.means.col(c++) = mu;
        for (auto r : rows) {
            const Vector centered = vectors.row(r).transpose() - mu;
            scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered);
        }
    }
    scatter = scatter.selfadjointView<Eigen::Lower>();
    const Matrix pooled = scatter / (n - static_cast<double>(k));
    const double avg_var = pooled.trace() / static_cast<double>(d);
    model.covariance = (1.0 - shrinkage) * pooled;
    model.covariance.diagonal().array() += shrinkage * avg_var;

    Eigen::LLT<Matrix> llt(model.covariance);
    if (llt.info() != Eigen::Success || avg_var <= 0.0) {
        throw DataError("LDA covariance is not positive definite; increase shrinkage");
    }
    model.weights = llt.solve(model.means);
    model.intercepts.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        model.intercepts[j] = -0.5 * model.means.col(j).dot(model.weights.col(j)) +
                              std::log(model.priors[static_cast<std::size_t>(j)]);
    }
    return model;
}

LdaPrediction predict_lda(const LdaModel& model, const VecRef& x) {
    if (x.size() != model.means.rows()) throw UsageError("predict_lda: dimension mismatch");
    LdaPrediction out;
    out.scores.resize(model.labels.size());
    std::size_t best = 0;
    for (std::size_t j = 0; j < model.labels.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out.scores[j] = x.dot(model.weights.col(jj)) + model.intercepts[jj];
        if (out.scores[j] > out.scores[best]) best = j;
    }
    out.label = model.labels[best];
    return out;
}

std::vector<std::string> predict_lda_rows(const LdaModel& model, const Matrix& vectors) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(vectors.rows()));
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
        out.push_back(predict_lda(model, vectors.row(i).transpose()).label);
    }
    return out;
}

ClassMetrics weighted_f(std::span<const std::string> predicted, std::span<const std::string> gold) {
    if (predicted.size() != gold.size()) throw UsageError("weighted_f: length mismatch");
    if (gold.empty()) throw UsageError("weighted_f: empty input");
    ClassMetrics m;
    std::map<std::string, std::size_t> tp, pred_count;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        m.per_class[gold[i]].support++;
        m.per_class.try_emplace(predicted[i]);
        pred_count[predicted[i]]++;
        if (predicted[i] == gold[i]) {
            ++correct;
            tp[gold[i]]++;
        }
    }
    double weighted = 0.0;
    for (auto& [label, s] : m.per_class) {
        const double t = static_cast<double>(tp[label]);
        s.precision = pred_count[label] ? t / static_cast<double>(pred_count[label]) : 0.0;
        s.recall = s.support ? t / static_cast<double>(s.support) : 0.0;
        s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
        weighted += s.f1 * static_cast<double>(s.support);
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
    m.weighted_f = weighted / static_cast<double>(gold.size());
    return m;
}

MostFrequentBaseline baseline_most_frequent(std::span<const std::string> labels) {
    if (labels.empty()) throw UsageError("baseline of an empty label list");
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) counts[l]++;
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return {best->first};
}

TrainingEvaluation evaluate_on_training(const Matrix& vectors, std::span<const std::string> labels,
                                        double shrinkage) {
    TrainingEvaluation out;
    const auto model = fit_lda(vectors, labels, shrinkage);
    out.lda = weighted_f(predict_lda_rows(model, vectors), labels);
    out.baseline = weighted_f(baseline_most_frequent(labels).predict(labels.size()), labels);
    out.ratio = out.baseline.weighted_f > 0.0 ? out.lda.weighted_f / out.baseline.weighted_f : 0.0;
    return out;
}

std::vector<std::vector<std::size_t>> make_folds(std::span<const std::string> labels, const CvSpec& spec) {
    if (spec.k < 2) throw UsageError("cross-validation needs k >= 2");
    if (labels.size() < spec.k) throw UsageError("fewer samples than folds");
    std::vector<std::vector<std::size_t>> folds(spec.k);
    std::mt19937_64 rng(spec.seed);

    if (!spec.stratified) {
        std::vector<std::size_t> order(labels.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < order.size(); ++i) folds[i % spec.k].push_back(order[i]);
    } else {
        std::map<std::string, std::vector<std::size_t>> members;
        for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
        // Continue dealing where the previous class stopped so fold totals stay balanced.
        std::size_t next = 0;
        for (auto& [label, idx] : members) {
            if (idx.size() < spec.k) {
                if (spec.small_classes == SmallClassPolicy::strict) {
                    throw UsageError("class '" + label + "' has " + std::to_string(idx.size()) +
                                     " samples, fewer than k = " + std::to_string(spec.k));
                }
                continue;
            }
            std::shuffle(idx.begin(), idx.end(), rng);
            for (std::size_t i : idx) folds[next++ % spec.k].push_back(i);
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

namespace {

MeanSd mean_sd(const std::vector<double>& v) { return {mean(v), sample_sd(v)}; }

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

std::vector<std::string> take(std::span<const std::string> v, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

} // namespace

CvResult stratified_cv(const Matrix& vectors, std::span<const std::string> labels, const CvSpec& spec,
                       double shrinkage, unsigned threads) {
    if (static_cast<std::size_t>(vectors.rows()) != labels.size()) throw UsageError("stratified_cv: size mismatch");
    const auto folds = make_folds(labels, spec);

    CvResult result;
    {
        std::map<std::string, std::size_t> counts;
        for (const auto& l : labels) counts[l]++;
        for (const auto& [l, c] : counts) {
            if (spec.stratified && c < spec.k) result.small_classes.push_back(l);
        }
    }

    result.folds.resize(folds.size());
    parallel_for(folds.size(), threads, [&](std::size_t f) {
        std::vector<char> in_test(labels.size(), 0);
        for (std::size_t i : folds[f]) in_test[i] = 1;
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (!in_test[i]) train_idx.push_back(i);
        }
        auto train_labels = take(labels, train_idx);

        // Classes with fewer than two training samples cannot be modelled in this fold.
        std::map<std::string, std::size_t> counts;
        for (const auto& l : train_labels) counts[l]++;
        std::vector<std::size_t> fit_idx;
        for (std::size_t i : train_idx) {
            if (counts[labels[i]] >= 2) fit_idx.push_back(i);
        }
        FoldResult& fr = result.folds[f];
        for (const auto& [l, c] : counts) fr.dropped_classes += c < 2 ? 1 : 0;

        const auto model = fit_lda(take_rows(vectors, fit_idx), take(labels, fit_idx), shrinkage);
        const auto test_labels = take(labels, folds[f]);
        fr.train_n = train_idx.size();
        fr.test_n = folds[f].size();
        fr.train = weighted_f(predict_lda_rows(model, take_rows(vectors, train_idx)), train_labels);
        fr.test = weighted_f(predict_lda_rows(model, take_rows(vectors, folds[f])), test_labels);
        const auto base = baseline_most_frequent(train_labels);
        fr.baseline_train_f = weighted_f(base.predict(train_labels.size()), train_labels).weighted_f;
        fr.baseline_test_f = weighted_f(base.predict(test_labels.size()), test_labels).weighted_f;
    });

    std::vector<double> tra, tea, trf, tef, btr, bte, rtr, rte;
    for (const auto& f : result.folds) {
        tra.push_back(f.train.accuracy);
        tea.push_back(f.test.accuracy);
        trf.push_back(f.train.weighted_f);
        tef.push_back(f.test.weighted_f);
        btr.push_back(f.baseline_train_f);
        bte.push_back(f.baseline_test_f);
        rtr.push_back(f.baseline_train_f > 0 ? f.train.weighted_f / f.baseline_train_f : 0.0);
        rte.push_back(f.baseline_test_f > 0 ? f.test.weighted_f / f.baseline_test_f : 0.0);
    }
    result.train_accuracy = mean_sd(tra);
    result.test_accuracy = mean_sd(tea);
    result.train_f = mean_sd(trf);
    result.test_f = mean_sd(tef);
    result.baseline_train_f = mean_sd(btr);
    result.baseline_test_f = mean_sd(bte);
    result.train_ratio = mean_sd(rtr);
    result.test_ratio = mean_sd(rte);
    return result;
}

void write_cv_csv(std::ostream& out, const CvResult& r) {
    out << "fold,train_n,test_n,train_accuracy,train_f,test_accuracy,test_f,baseline_train_f,baseline_test_f\n";
    for (std::size_t i = 0; i < r.folds.size(); ++i) {
        const auto& f = r.folds[i];
        out << i + 1 << ',' << f.train_n << ',' << f.test_n << ',' << format_double(f.train.accuracy) << ','
            << format_double(f.train.weighted_f) << ',' << format_double(f.test.accuracy) << ','
            << format_double(f.test.weighted_f) << ',' << format_double(f.baseline_train_f) << ','
            << format_double(f.baseline_test_f) << '\n';
    }
    auto row = [&](const char* name, double (MeanSd::*field)) {
        out << name << ",,," << format_double(r.train_accuracy.*field) << ',' << format_double(r.train_f.*field)
            << ',' << format_double(r.test_accuracy.*field) << ',' << format_double(r.test_f.*field) << ','
            << format_double(r.baseline_train_f.*field) << ',' << format_double(r.baseline_test_f.*field) << '\n';
    };
    row("mean", &MeanSd::mean);
    row("sd", &MeanSd::sd);
}

LabeledVectors parse_labeled_vectors(std::istream& in, std::size_t label_column) {
    if (label_column < 2) throw UsageError("label column must be >= 2 (column 1 is the word)");
    LabeledVectors out;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0, width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, '\t')) f.push_back(field);
        if (f.size() < label_column || f.size() < 3) {
            throw DataError("vectors line " + std::to_string(lineno) + ": too few columns");
        }
        std::vector<double> v;
        for (std::size_t c = 1; c < f.size(); ++c) {
            if (c == label_column - 1) continue;
            double x = 0;
            auto [p, ec] = std::from_chars(f[c].data(), f[c].data() + f[c].size(), x);
            if (ec != std::errc() || p != f[c].data() + f[c].size() || !std::isfinite(x)) {
                throw DataError("vectors line " + std::to_string(lineno) + ": bad value '" + f[c] + "'");
            }
            v.push_back(x);
        }
        if (width == 0) width = v.size();
        if (v.size() != width || width == 0) throw DataError("vectors line " + std::to_string(lineno) + ": ragged row");
        out.words.push_back(f[0]);
        out.labels.push_back(f[label_column - 1]);
        rows.push_back(std::move(v));
    }
    out.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) out.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return out;
}

LabeledVectors load_labeled_vectors(const std::filesystem::path& path, std::size_t label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vectors '" + path.string() + "'");
    return parse_labeled_vectors(in, label_column);
}

} // namespace plurvec
