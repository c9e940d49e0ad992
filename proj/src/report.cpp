#include "plurvec/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <istream>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include <openssl/evp.h>

#include "plurvec/error.hpp"

namespace plurvec {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    }
    void update(const void* data, std::size_t n) {
        if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("sha256 update failed");
    }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw Error("sha256 final failed");
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (unsigned i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 0xF];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

} // namespace

std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

void Provenance::set(std::string key, std::string value) {
    for (auto& kv : config) {
        if (kv.first == key) {
            kv.second = std::move(value);
            return;
        }
    }
    config.emplace_back(std::move(key), std::move(value));
}

void Provenance::add_input(std::string name, std::filesystem::path path) {
    inputs.emplace_back(std::move(name), std::move(path));
}

void Provenance::write_header(std::ostream& out) const {
    out << "# command=" << command << '\n';
    for (const auto& [k, v] : config) out << "# config." << k << '=' << v << '\n';
    out << "# seed=" << (seed ? std::to_string(*seed) : std::string("none")) << '\n';
    for (const auto& [name, path] : inputs) {
        out << "# input." << name << '=' << path.string() << " sha256=" << sha256_file(path) << '\n';
    }
}

nlohmann::ordered_json Provenance::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json in = nlohmann::ordered_json::array();
    for (const auto& [name, path] : inputs) {
        in.push_back({{"name", name}, {"path", path.string()}, {"sha256", sha256_file(path)}});
    }
    j["inputs"] = in;
    return j;
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
    return s;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw DataError("csv line " + std::to_string(line_no) + ": unterminated quote");
    out.push_back(std::move(field));
    return out;
}

} // namespace

std::size_t CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw UsageError("no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numeric(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& cell = rows[r].at(c);
        double v = 0.0;
        const char* end = cell.data() + cell.size();
        auto [ptr, ec] = std::from_chars(cell.data(), end, v);
        if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
            throw DataError("column '" + std::string(name) + "' row " + std::to_string(r + 1) + ": not a number: '" +
                            cell + "'");
        }
        out.push_back(v);
    }
    return out;
}

CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto fields = split_csv_line(line, line_no);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw DataError("csv line " + std::to_string(line_no) + ": " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (!have_header) throw DataError("csv input has no header");
    return t;
}

CsvTable load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    return parse_csv(in);
}

namespace {

std::ofstream open_report(const std::filesystem::path& dir, const std::string& name, std::filesystem::path& path) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
    path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

std::filesystem::path write_csv_report(const std::filesystem::path& dir, const std::string& name,
                                       const Provenance& provenance,
                                       const std::function<void(std::ostream&)>& body) {
    std::filesystem::path path;
    auto out = open_report(dir, name, path);
    provenance.write_header(out);
    body(out);
    if (!out) throw DataError("write failed for '" + path.string() + "'");
    return path;
}

std::filesystem::path write_json_report(const std::filesystem::path& dir, const std::string& name,
                                        const Provenance& provenance,
                                        const nlohmann::ordered_json& result) {
    std::filesystem::path path;
    auto out = open_report(dir, name, path);
    nlohmann::ordered_json j;
    j["provenance"] = provenance.to_json();
    j["result"] = result;
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed for '" + path.string() + "'");
    return path;
}

} // namespace plurvec
