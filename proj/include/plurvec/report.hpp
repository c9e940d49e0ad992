#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace plurvec {

std::string sha256_hex(std::string_view data);
/// Digest of a file's bytes; a missing or unreadable file is a DataError.
std::string sha256_file(const std::filesystem::path& path);

/// What produced a report: the command, its settings, the seed and the
/// digests of every input file. Entries keep insertion order.
struct Provenance {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::optional<std::uint64_t> seed;
    std::vector<std::pair<std::string, std::filesystem::path>> inputs;

    void set(std::string key, std::string value);
    /// Records a file and computes its digest at write time.
    void add_input(std::string name, std::filesystem::path path);

    /// "# key=value" lines placed above CSV output.
    void write_header(std::ostream& out) const;
    nlohmann::ordered_json to_json() const;
};

/// Fixed-point rendering with the given number of decimals ("C" locale).
std::string fixed(double value, int decimals);

/// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(std::string_view text);

/// A parsed CSV file. Lines starting with '#' and blank lines are skipped;
/// the first remaining line is the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const; // UsageError when absent
    /// Column values as doubles; an unparsable cell is a DataError.
    std::vector<double> numeric(std::string_view name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable load_csv(const std::filesystem::path& path);

/// Writes the provenance header and then the body to dir/name, creating dir.
std::filesystem::path write_csv_report(const std::filesystem::path& dir, const std::string& name,
                                       const Provenance& provenance,
                                       const std::function<void(std::ostream&)>& body);

/// Writes {"provenance": ..., "result": ...} with two-space indentation.
std::filesystem::path write_json_report(const std::filesystem::path& dir, const std::string& name,
                                        const Provenance& provenance,
                                        const nlohmann::ordered_json& result);

} // namespace plurvec
