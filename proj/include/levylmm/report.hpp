#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "levylmm/common.hpp"

namespace levylmm {

// CSV with a versioned schema comment, stable headers and fixed
// 12-significant-digit numerics. Golden-file tests pin the exact bytes.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns) {
        text_ = "# levylmm csv schema 1\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            text_ += (i ? "," : "") + columns[i];
        text_ += "\n";
        n_cols_ = columns.size();
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != n_cols_)
            throw std::invalid_argument("CsvWriter: cell count does not match header");
        for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
        text_ += "\n";
    }

    const std::string& text() const { return text_; }

    std::uint64_t content_hash() const { return fnv1a64(text_); }

  private:
    std::string text_;
    std::size_t n_cols_ = 0;
};

inline std::string cell(double x) { return format_sig(x); }
inline std::string cell(int x) { return strfmt("%d", x); }
inline std::string cell(std::int64_t x) { return strfmt("%lld", (long long)x); }
inline std::string cell(std::uint64_t x) { return strfmt("%llu", (unsigned long long)x); }

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Sectioned run manifest written beside each CSV: resolved config echo,
// version, timings, cost counters, and a content hash of every output file.
struct ManifestBuilder {
    std::string command;
    std::string config_echo;
    double wall_ms = 0.0;
    std::uint64_t cumulant_evals = 0;
    std::uint64_t multiply_adds = 0;
    std::vector<std::pair<std::string, std::uint64_t>> outputs;  // filename, fnv1a64

    std::string text() const {
        std::string s;
        s += "[run]\n";
        s += strfmt("tool = levylmm %s\n", kVersion);
        s += "command = " + command + "\n";
        s += strfmt("wall_ms = %.3f\n", wall_ms);
        s += "[cost]\n";
        s += strfmt("cumulant_evals = %llu\n", (unsigned long long)cumulant_evals);
        s += strfmt("multiply_adds = %llu\n", (unsigned long long)multiply_adds);
        s += "[outputs]\n";
        for (const auto& [name, hash] : outputs)
            s += name + " = fnv1a64:" + strfmt("%016llx", (unsigned long long)hash) + "\n";
        s += "[config]\n";
        s += config_echo;
        return s;
    }
};

}  // namespace levylmm
