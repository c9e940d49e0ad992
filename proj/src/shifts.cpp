#include "plurvec/shifts.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "plurvec/error.hpp"
#include "plurvec/stats.hpp"

namespace plurvec {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) out.push_back(field);
    if (!line.empty() && line.back() == '\t') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
}

GroupSummary summarize(const std::vector<double>& values) {
    GroupSummary g;
    g.n = values.size();
    if (values.empty()) return g;
    g.median = median(values);
    g.mean = mean(values);
    g.sd = sample_sd(values);
    return g;
}

} // namespace

std::vector<WordPair> parse_pairs(std::istream& in) {
    std::vector<WordPair> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        auto f = split_tabs(line);
        for (auto& s : f) s = trim(s);
        if (f.size() < 2 || f.size() > 3 || f[0].empty() || f[1].empty()) {
            throw DataError("pairs line " + std::to_string(lineno) +
                            ": expected singular<TAB>plural[<TAB>class]");
        }
        WordPair p{f[0], f[1], std::nullopt};
        if (f.size() == 3) {
            if (f[2].empty()) throw DataError("pairs line " + std::to_string(lineno) + ": empty class");
            p.label = f[2];
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<WordPair> load_pairs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open pairs '" + path.string() + "'");
    return parse_pairs(in);
}

void write_pairs(std::ostream& out, const std::vector<WordPair>& pairs) {
    for (const auto& p : pairs) {
        out << p.singular << '\t' << p.plural;
        if (p.label) out << '\t' << *p.label;
        out << '\n';
    }
}

BoundPairs bind_pairs(const std::vector<WordPair>& pairs, const EmbeddingTable& table,
                      std::string source) {
    BoundPairs out;
    out.set.source = std::move(source);
    std::set<std::pair<WordId, WordId>> seen;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto sg = table.lookup(pairs[i].singular);
        const auto pl = table.lookup(pairs[i].plural);
        if (!sg) out.misses.push_back({i, pairs[i].singular});
        if (!pl) out.misses.push_back({i, pairs[i].plural});
        if (!sg || !pl) continue;
        if (!seen.emplace(*sg, *pl).second) {
            throw DataError("duplicate pair " + pairs[i].singular + "/" + pairs[i].plural);
        }
        out.set.pairs.push_back({*sg, *pl, pairs[i].label});
    }
    return out;
}

Vector shift_vector(const Pair& pair, const EmbeddingTable& table) {
    return table.vector(pair.plural) - table.vector(pair.singular);
}

Vector avg_shift(const PairSet& pairs, const EmbeddingTable& table) {
    if (pairs.empty()) throw UsageError("avg_shift of an empty pair set");
    Vector sg = Vector::Zero(static_cast<Eigen::Index>(table.dim()));
    Vector pl = sg;
    for (const auto& p : pairs.pairs) {
        sg += table.vector(p.singular);
        pl += table.vector(p.plural);
    }
    const double m = static_cast<double>(pairs.size());
    return pl / m - sg / m;
}

Vector mean_of_shifts(const PairSet& pairs, const EmbeddingTable& table) {
    if (pairs.empty()) throw UsageError("mean_of_shifts of an empty pair set");
    Vector acc = Vector::Zero(static_cast<Eigen::Index>(table.dim()));
    for (const auto& p : pairs.pairs) acc += shift_vector(p, table);
    return acc / static_cast<double>(pairs.size());
}

const ClassShift* ClassShiftTable::find(const std::string& label) const {
    auto it = classes.find(label);
    return it == classes.end() ? nullptr : &it->second;
}

std::vector<std::string> ClassShiftTable::under_threshold() const {
    std::vector<std::string> out;
    for (const auto& [label, c] : classes) {
        if (c.under_threshold) out.push_back(label);
    }
    return out;
}

ClassShiftTable class_avg_shifts(const PairSet& pairs, const EmbeddingTable& table,
                                 std::size_t min_members) {
    if (min_members == 0) throw UsageError("min_members must be positive");
    ClassShiftTable out;
    out.min_members = min_members;
    for (const auto& p : pairs.pairs) {
        if (!p.label) {
            throw DataError("unlabeled pair " + table.word(p.singular) + "/" + table.word(p.plural));
        }
        auto [it, fresh] = out.classes.try_emplace(*p.label);
        if (fresh) it->second.shift = Vector::Zero(static_cast<Eigen::Index>(table.dim()));
        it->second.shift += shift_vector(p, table);
        ++it->second.count;
    }
    for (auto& [label, c] : out.classes) {
        c.shift /= static_cast<double>(c.count);
        c.under_threshold = c.count < min_members;
    }
    return out;
}

std::unordered_map<std::string, std::string> class_assignment(const PairSet& pairs,
                                                              const EmbeddingTable& table) {
    std::unordered_map<std::string, std::string> out;
    for (const auto& p : pairs.pairs) {
        if (!p.label) continue;
        auto [it, fresh] = out.emplace(table.word(p.singular), *p.label);
        if (!fresh && it->second != *p.label) {
            throw DataError("singular '" + table.word(p.singular) + "' has conflicting classes");
        }
    }
    return out;
}

ShiftStats shift_stats(const PairSet& pairs, const EmbeddingTable& table, const AxisRef& axis) {
    if (pairs.empty()) throw UsageError("shift_stats of an empty pair set");
    if (axis.dim != table.dim()) throw UsageError("axis dim does not match table");
    ShiftStats out;
    std::vector<double> sg_len, pl_len, sh_len, sg_ang, pl_ang, sh_ang;
    auto angle = [&](const Vector& v) -> std::optional<double> {
        if (v.norm() == 0.0) {
            ++out.undefined_angles;
            return std::nullopt;
        }
        return angle_to_axis(v, axis);
    };
    for (const auto& p : pairs.pairs) {
        const Vector sg = table.vector(p.singular);
        const Vector pl = table.vector(p.plural);
        const Vector sh = pl - sg;
        PairShiftRecord r;
        r.singular = p.singular;
        r.plural = p.plural;
        r.singular_length = norm(sg);
        r.plural_length = norm(pl);
        r.shift_length = norm(sh);
        r.singular_angle = angle(sg);
        r.plural_angle = angle(pl);
        r.shift_angle = angle(sh);
        sg_len.push_back(r.singular_length);
        pl_len.push_back(r.plural_length);
        sh_len.push_back(r.shift_length);
        if (r.singular_angle) sg_ang.push_back(*r.singular_angle);
        if (r.plural_angle) pl_ang.push_back(*r.plural_angle);
        if (r.shift_angle) sh_ang.push_back(*r.shift_angle);
        out.records.push_back(r);
    }
    out.singular_length = summarize(sg_len);
    out.plural_length = summarize(pl_len);
    out.shift_length = summarize(sh_len);
    out.singular_angle = summarize(sg_ang);
    out.plural_angle = summarize(pl_ang);
    out.shift_angle = summarize(sh_ang);
    out.average_shift = avg_shift(pairs, table);
    out.average_shift_length = norm(out.average_shift);
    if (out.average_shift_length > 0.0) out.average_shift_angle = angle_to_axis(out.average_shift, axis);
    return out;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

} // namespace

void write_shift_records_csv(std::ostream& out, const ShiftStats& stats, const EmbeddingTable& table) {
    out << "singular,plural,sg_length,pl_length,shift_length,sg_angle,pl_angle,shift_angle\n";
    for (const auto& r : stats.records) {
        out << table.word(r.singular) << ',' << table.word(r.plural) << ','
            << format_double(r.singular_length) << ',' << format_double(r.plural_length) << ','
            << format_double(r.shift_length) << ',' << opt(r.singular_angle) << ','
            << opt(r.plural_angle) << ',' << opt(r.shift_angle) << '\n';
    }
}

void write_shift_summary_csv(std::ostream& out, const ShiftStats& stats) {
    out << "quantity,n,median,mean,sd\n";
    auto row = [&](const char* name, const GroupSummary& g) {
        out << name << ',' << g.n << ',' << format_double(g.median) << ',' << format_double(g.mean)
            << ',' << format_double(g.sd) << '\n';
    };
    row("singular_length", stats.singular_length);
    row("plural_length", stats.plural_length);
    row("shift_length", stats.shift_length);
    row("singular_angle", stats.singular_angle);
    row("plural_angle", stats.plural_angle);
    row("shift_angle", stats.shift_angle);
    out << "average_shift_length,1," << format_double(stats.average_shift_length) << ','
        << format_double(stats.average_shift_length) << ",0\n";
    out << "average_shift_angle,1," << opt(stats.average_shift_angle) << ','
        << opt(stats.average_shift_angle) << ",0\n";
    out << "undefined_angles," << stats.undefined_angles << ",NA,NA,NA\n";
}

void write_class_shifts_csv(std::ostream& out, const ClassShiftTable& classes) {
    out << "class,count,under_threshold,length";
    const Eigen::Index d = classes.classes.empty() ? 0 : classes.classes.begin()->second.shift.size();
    for (Eigen::Index k = 0; k < d; ++k) out << ",v" << k + 1;
    out << '\n';
    for (const auto& [label, c] : classes.classes) {
        out << label << ',' << c.count << ',' << (c.under_threshold ? 1 : 0) << ','
            << format_double(c.shift.norm());
        for (Eigen::Index k = 0; k < c.shift.size(); ++k) out << ',' << format_double(c.shift[k]);
        out << '\n';
    }
}

void write_labeled_shifts(std::ostream& out, const PairSet& pairs, const EmbeddingTable& table) {
    for (const auto& p : pairs.pairs) {
        const Vector s = shift_vector(p, table);
        out << table.word(p.singular) << '\t' << (p.label ? *p.label : "-");
        for (Eigen::Index k = 0; k < s.size(); ++k) out << '\t' << format_double(s[k]);
        out << '\n';
    }
}

} // namespace plurvec
