#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "horst/core.hpp"
#include "horst/problems.hpp"
#include "horst/rng.hpp"
#include "horst/sparsify.hpp"

namespace horst {

using json = nlohmann::ordered_json;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip text for a double.
inline std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw io_error("cannot write " + p.string());
    f << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw io_error("cannot read " + p.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline void write_json(const std::filesystem::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

inline json read_json(const std::filesystem::path& p) {
    try {
        return json::parse(read_text(p));
    } catch (const json::parse_error& e) {
        throw io_error(p.string() + ": " + e.what());
    }
}

// Minimal CSV table writer: header row, then rows of doubles or strings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : cols_(header.size()) { row(header); }

    template <class T>
    CsvWriter& row(const std::vector<T>& cells) {
        if (cells.size() != cols_) throw io_error("csv: row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            if constexpr (std::is_arithmetic_v<T>)
                os_ << fmt_double(static_cast<double>(cells[i]));
            else
                os_ << cells[i];
        }
        os_ << '\n';
        return *this;
    }
    std::string str() const { return os_.str(); }
    void save(const std::filesystem::path& p) const { write_text(p, str()); }

private:
    std::size_t cols_;
    std::ostringstream os_;
};

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

// ---- sparse-teacher dataset: <stem>.csv (y, x0..) and <stem>.json sidecar ----

inline void save_dataset(const std::filesystem::path& stem, const SparseTeacherDataset& ds) {
    std::vector<std::string> header{"y"};
    for (std::size_t j = 0; j < ds.D; ++j) header.push_back("x" + std::to_string(j));
    CsvWriter w(header);
    for (std::size_t i = 0; i < ds.N; ++i) {
        Vec r{ds.y[i]};
        r.insert(r.end(), ds.X[i].begin(), ds.X[i].end());
        w.row(r);
    }
    w.save(stem.string() + ".csv");
    json j;
    j["seed"] = ds.seed;
    j["D"] = ds.D;
    j["N"] = ds.N;
    j["s_star"] = ds.s_star;
    j["teacher"] = ds.teacher;
    j["rng"] = Rng::algorithm;
    write_json(stem.string() + ".json", j);
}

inline SparseTeacherDataset load_dataset(const std::filesystem::path& stem) {
    json j = read_json(stem.string() + ".json");
    SparseTeacherDataset ds;
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.D = j.at("D").get<std::size_t>();
    ds.N = j.at("N").get<std::size_t>();
    ds.s_star = j.at("s_star").get<std::size_t>();
    ds.teacher = j.at("teacher").get<Vec>();
    auto rows = parse_csv(read_text(stem.string() + ".csv"));
    if (rows.size() != ds.N + 1) throw io_error("dataset csv: expected " + std::to_string(ds.N) + " rows");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != ds.D + 1) throw io_error("dataset csv: bad row width");
        ds.y.push_back(std::stod(rows[i][0]));
        Vec x(ds.D);
        for (std::size_t j2 = 0; j2 < ds.D; ++j2) x[j2] = std::stod(rows[i][j2 + 1]);
        ds.X.push_back(std::move(x));
    }
    return ds;
}

// ---- checkpoints: <stem>.bin (raw little-endian float64) + <stem>.json ----

inline json segments_json(const ParamVector& p) {
    json a = json::array();
    for (const auto& s : p.segments()) a.push_back({{"name", s.name}, {"start", s.start}, {"length", s.length}});
    return a;
}

inline std::vector<Segment> segments_from_json(const json& a) {
    std::vector<Segment> segs;
    for (const auto& s : a)
        segs.push_back({s.at("name").get<std::string>(), s.at("start").get<std::size_t>(),
                        s.at("length").get<std::size_t>()});
    return segs;
}

inline std::string checkpoint_bytes(const ParamVector& p) {
    return std::string(reinterpret_cast<const char*>(p.values().data()), p.size() * sizeof(double));
}

inline json checkpoint_sidecar(const ParamVector& p, json meta = json::object()) {
    meta["format"] = "float64-le";
    meta["length"] = p.size();
    meta["segments"] = segments_json(p);
    return meta;
}

inline void save_checkpoint(const std::filesystem::path& stem, const ParamVector& p, json meta = json::object()) {
    write_text(stem.string() + ".bin", checkpoint_bytes(p));
    write_json(stem.string() + ".json", checkpoint_sidecar(p, std::move(meta)));
}

inline ParamVector load_checkpoint(const std::filesystem::path& stem, json* meta_out = nullptr) {
    json meta = read_json(stem.string() + ".json");
    const auto n = meta.at("length").get<std::size_t>();
    Vec v(n);
    std::ifstream f(stem.string() + ".bin", std::ios::binary);
    if (!f) throw io_error("cannot read checkpoint " + stem.string());
    f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (f.gcount() != static_cast<std::streamsize>(n * sizeof(double))) throw io_error("checkpoint truncated");
    if (meta_out) *meta_out = meta;
    return ParamVector(std::move(v), segments_from_json(meta.at("segments")));
}

// ---- masks: <stem>.mask (bit-packed, LSB first) + <stem>.json ----

inline std::vector<std::uint8_t> pack_bits(const std::vector<std::uint8_t>& bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    return out;
}

inline std::vector<std::uint8_t> unpack_bits(const std::vector<std::uint8_t>& packed, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = (packed[i / 8] >> (i % 8)) & 1u;
    return bits;
}

inline std::string mask_bytes(const SparsityMask& m) {
    auto packed = pack_bits(m.bits);
    return std::string(packed.begin(), packed.end());
}

inline json mask_sidecar(const SparsityMask& m, const ParamVector& layout, json meta = json::object()) {
    meta["format"] = "bitpacked-lsb";
    meta["length"] = m.bits.size();
    meta["segments"] = segments_json(layout);
    meta["target_sparsity"] = m.target_sparsity;
    meta["scope"] = m.scope;
    meta["event"] = {{"iteration", m.event.iteration}, {"rule", m.event.rule}};
    return meta;
}

inline void save_mask(const std::filesystem::path& stem, const SparsityMask& m, const ParamVector& layout,
                      json meta = json::object()) {
    write_text(stem.string() + ".mask", mask_bytes(m));
    write_json(stem.string() + ".json", mask_sidecar(m, layout, std::move(meta)));
}

inline SparsityMask load_mask(const std::filesystem::path& stem) {
    json meta = read_json(stem.string() + ".json");
    const auto n = meta.at("length").get<std::size_t>();
    std::vector<std::uint8_t> packed((n + 7) / 8);
    std::ifstream f(stem.string() + ".mask", std::ios::binary);
    if (!f) throw io_error("cannot read mask " + stem.string());
    f.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    SparsityMask m;
    m.bits = unpack_bits(packed, n);
    m.target_sparsity = meta.at("target_sparsity").get<double>();
    m.scope = meta.at("scope").get<std::vector<std::string>>();
    m.event.iteration = meta.at("event").at("iteration").get<std::size_t>();
    m.event.rule = meta.at("event").at("rule").get<std::string>();
    return m;
}

} // namespace horst
