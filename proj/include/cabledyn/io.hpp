#pragma once

// Result files: CSV tables, JSON reports and the run manifest.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "cabledyn/errors.hpp"

namespace cabledyn::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kVersion = "1.0.0";

/// Shortest-stable decimal form used in every CSV cell.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("SHA-256 computation failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

/// In-memory CSV with a fixed header.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& values) {
        if (values.size() != header_.size()) throw IoError("CSV row width does not match header");
        std::vector<std::string> row;
        for (double v : values) row.push_back(fmt(v));
        rows_.push_back(std::move(row));
    }

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw IoError("CSV row width does not match header");
        rows_.push_back(std::move(cells));
    }

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }

    std::string str() const {
        std::string out = join(header_);
        for (const auto& r : rows_) out += join(r);
        return out;
    }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        return line + '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct OutputEntry {
    std::string name;
    std::string sha256;
    std::size_t bytes = 0;
    std::vector<std::string> header;  // CSV only
    std::size_t rows = 0;             // CSV data rows
};

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Collects outputs of one run; write_manifest() is called last.
class RunWriter {
public:
    RunWriter(fs::path dir, std::string command, Json config)
        : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)), started_(utc_now()) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void csv(const std::string& name, const CsvTable& table) {
        put(name, table.str(), table.header(), table.rows());
    }

    void json(const std::string& name, const Json& j) { put(name, j.dump(2) + "\n", {}, 0); }

    void text(const std::string& name, const std::string& content) { put(name, content, {}, 0); }

    void seed(std::uint64_t s) { seed_ = s; }
    void status(std::string s) { status_ = std::move(s); }

    const fs::path& dir() const { return dir_; }

    Json manifest() const {
        Json outs = Json::array();
        for (const auto& e : outputs_) {
            Json o{{"name", e.name}, {"sha256", e.sha256}, {"bytes", e.bytes}};
            if (!e.header.empty()) {
                o["header"] = e.header;
                o["rows"] = e.rows;
            }
            outs.push_back(o);
        }
        Json m{{"artifact", "cabledyn"},
               {"version", kVersion},
               {"command", command_},
               {"status", status_},
               {"config", config_},
               {"started_utc", started_},
               {"finished_utc", utc_now()},
               {"outputs", outs}};
        m["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
        return m;
    }

    void write_manifest() const { write_atomic(dir_ / "manifest.json", manifest().dump(2) + "\n"); }

private:
    void put(const std::string& name, const std::string& content, std::vector<std::string> header, std::size_t rows) {
        write_atomic(dir_ / name, content);
        outputs_.push_back({name, sha256_hex(content), content.size(), std::move(header), rows});
    }

    fs::path dir_;
    std::string command_;
    Json config_;
    std::string started_;
    std::string status_ = "ok";
    std::optional<std::uint64_t> seed_;
    std::vector<OutputEntry> outputs_;
};

}  // namespace cabledyn::io
