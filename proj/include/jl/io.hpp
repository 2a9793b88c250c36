// File formats for the command-line tools. The vector container is binary
// and byte-stable across platforms: magic "JLV1", then little-endian u32
// dim and u64 count, then count*dim IEEE-754 doubles (little-endian,
// row-major). Stream files are text, one "index,value" update per line.
#pragma once

#include <bit>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jl/core.hpp"
#include "jl/streaming.hpp"

namespace jl {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

inline void put_u64_le(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

inline std::uint32_t get_u32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw ParseError("vector file: truncated header");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

inline std::uint64_t get_u64_le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw ParseError("vector file: truncated header");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

}  // namespace detail

constexpr char kVectorFileMagic[4] = {'J', 'L', 'V', '1'};

inline void write_vectors(std::ostream& out, const std::vector<Vector>& rows) {
    if (rows.empty()) throw std::invalid_argument("write_vectors: count must be >= 1");
    const std::size_t dim = rows.front().size();
    if (dim == 0) throw std::invalid_argument("write_vectors: dim must be >= 1");
    out.write(kVectorFileMagic, 4);
    detail::put_u32_le(out, static_cast<std::uint32_t>(dim));
    detail::put_u64_le(out, rows.size());
    for (const auto& row : rows) {
        if (row.size() != dim) throw std::invalid_argument("write_vectors: ragged rows");
        for (double v : row) detail::put_u64_le(out, std::bit_cast<std::uint64_t>(v));
    }
    if (!out) throw IoError("write_vectors: write failed");
}

inline std::vector<Vector> read_vectors(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(kVectorFileMagic, 4))
        throw ParseError("vector file: bad magic");
    const std::uint32_t dim = detail::get_u32_le(in);
    const std::uint64_t count = detail::get_u64_le(in);
    if (dim < 1 || count < 1) throw ParseError("vector file: dim and count must be >= 1");
    std::vector<Vector> rows(count, Vector(dim));
    for (auto& row : rows) {
        for (auto& v : row) {
            v = std::bit_cast<double>(detail::get_u64_le(in));
            if (!std::isfinite(v)) throw ParseError("vector file: non-finite entry");
        }
    }
    return rows;
}

inline void write_vectors_file(const std::string& path, const std::vector<Vector>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_vectors(out, rows);
}

inline std::vector<Vector> read_vectors_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    return read_vectors(in);
}

// One vector per line, comma-separated decimals.
inline std::vector<Vector> read_vectors_csv(std::istream& in) {
    std::vector<Vector> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Vector row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError("csv: bad number '" + cell + "'");
            }
        }
        if (row.empty()) throw ParseError("csv: empty row");
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("csv: no rows");
    return rows;
}

inline void write_vectors_csv(std::ostream& out, const std::vector<Vector>& rows) {
    out.precision(17);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Stream files: text lines "index,value"; blank lines ignored; an optional
// header comment "#d=<d> M=<M>" declares the dimension and update bound.
// ---------------------------------------------------------------------------

struct StreamFile {
    std::vector<TurnstileUpdate> updates;
    std::size_t declared_d = 0;  // 0 when no header present
    long long declared_m = 0;
};

inline StreamFile read_stream(std::istream& in) {
    StreamFile sf;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            std::size_t dpos = line.find("d=");
            std::size_t mpos = line.find("M=");
            if (dpos != std::string::npos)
                sf.declared_d = std::strtoull(line.c_str() + dpos + 2, nullptr, 10);
            if (mpos != std::string::npos)
                sf.declared_m = std::strtoll(line.c_str() + mpos + 2, nullptr, 10);
            continue;
        }
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos)
            throw ParseError("stream line " + std::to_string(line_no) + ": expected 'index,value'");
        try {
            std::size_t used = 0;
            const std::string idx_s = line.substr(start, comma - start);
            const std::string val_s = line.substr(comma + 1);
            const long long idx = std::stoll(idx_s, &used);
            if (idx < 0) throw std::invalid_argument("negative index");
            const long long val = std::stoll(val_s);
            sf.updates.push_back({static_cast<std::size_t>(idx), val});
        } catch (const std::exception&) {
            throw ParseError("stream line " + std::to_string(line_no) + ": bad integers");
        }
        if (sf.declared_d && sf.updates.back().index >= sf.declared_d)
            throw ParseError("stream line " + std::to_string(line_no) + ": index >= d");
        if (sf.declared_m && std::llabs(sf.updates.back().value) > sf.declared_m)
            throw ParseError("stream line " + std::to_string(line_no) + ": |value| > M");
    }
    return sf;
}

inline StreamFile read_stream_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    return read_stream(in);
}

// ---------------------------------------------------------------------------
// JSON report for failure-probability runs.
// ---------------------------------------------------------------------------

inline nlohmann::json distortion_report_json(const std::string& kind, const JlParams& p,
                                             const DistortionStats& stats) {
    return nlohmann::json{{"kind", kind},
                          {"d", p.d},
                          {"m", p.m},
                          {"eps", p.eps},
                          {"delta", p.delta},
                          {"trials", stats.trials},
                          {"failures", stats.failures},
                          {"failure_rate", stats.failure_rate},
                          {"ci95", stats.ci95_halfwidth},
                          {"mean_sq_ratio", stats.mean_sq_ratio},
                          {"seed", p.seed}};
}

}  // namespace jl
