#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlsdiag/diagnostics.hpp"
#include "nlsdiag/errors.hpp"
#include "nlsdiag/grid.hpp"

namespace nlsdiag {

// ---------------------------------------------------------------------------
// Series CSV

inline constexpr const char* kSeriesHeader =
    "t,pairing_re,pairing_im,main_re,main_im,pot_re,pot_im,resid_l2,mod_resid,mass,l_q_norm";

namespace detail {

inline std::string cell(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string cell(const std::optional<double>& x) { return x ? cell(*x) : std::string(); }

}  // namespace detail

/// Fixed columns; diagnostics that do not apply are empty cells.
inline std::string series_csv(const std::vector<SeriesRow>& rows) {
    using detail::cell;
    std::string out = std::string(kSeriesHeader) + "\n";
    for (const auto& r : rows) {
        out += cell(r.t) + "," + cell(r.pairing.real()) + "," + cell(r.pairing.imag()) + ",";
        out += (r.main ? cell(r.main->real()) + "," + cell(r.main->imag()) : std::string(",")) + ",";
        out += (r.potential ? cell(r.potential->real()) + "," + cell(r.potential->imag()) : std::string(",")) + ",";
        out += cell(r.resid_l2) + "," + cell(r.mod_resid) + "," + cell(r.mass) + "," + cell(r.l_q_norm) + "\n";
    }
    return out;
}

inline std::vector<SeriesRow> parse_series_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kSeriesHeader) throw DataIntegrityError("series CSV: unexpected header");
    std::vector<SeriesRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            f.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (f.size() != 11) throw DataIntegrityError("series CSV: expected 11 columns");
        auto num = [&](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            try {
                std::size_t used = 0;
                const double x = std::stod(s, &used);
                if (used != s.size()) throw DataIntegrityError("series CSV: bad number '" + s + "'");
                return x;
            } catch (const std::logic_error&) {
                throw DataIntegrityError("series CSV: bad number '" + s + "'");
            }
        };
        auto req = [&](const std::string& s) {
            auto v = num(s);
            if (!v) throw DataIntegrityError("series CSV: required cell is empty");
            return *v;
        };
        auto pair = [&](const std::string& a, const std::string& b) -> std::optional<complex> {
            auto x = num(a), y = num(b);
            if (!x && !y) return std::nullopt;
            if (!x || !y) throw DataIntegrityError("series CSV: half-empty complex cell");
            return complex(*x, *y);
        };
        SeriesRow r;
        r.t = req(f[0]);
        r.pairing = {req(f[1]), req(f[2])};
        r.main = pair(f[3], f[4]);
        r.potential = pair(f[5], f[6]);
        r.resid_l2 = num(f[7]);
        r.mod_resid = num(f[8]);
        r.mass = req(f[9]);
        r.l_q_norm = num(f[10]);
        rows.push_back(r);
    }
    return rows;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---------------------------------------------------------------------------
// NLSF snapshots
//
// "NLSF", u32 version, u32 dim, u32 n per axis (dim entries), f64 box length
// per axis (dim entries), f64 time (NaN when unlabeled), then row-major
// interleaved re/im f64. Everything little-endian.

inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    if (pos + sizeof(U) > in.size()) throw DataIntegrityError("NLSF: truncated file");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        bits |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += sizeof(U);
    return std::bit_cast<T>(bits);
}

}  // namespace detail

inline std::string encode_snapshot(const GridField& f) {
    const auto& g = f.grid();
    std::string out = "NLSF";
    detail::put_le<std::uint32_t>(out, kSnapshotVersion);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.points_per_axis()));
    for (int a = 0; a < g.dim(); ++a) detail::put_le<double>(out, g.box_length(a));
    detail::put_le<double>(out, f.time_label().value_or(std::numeric_limits<double>::quiet_NaN()));
    for (const auto& z : f.values()) {
        detail::put_le<double>(out, z.real());
        detail::put_le<double>(out, z.imag());
    }
    return out;
}

inline GridField decode_snapshot(const std::string& in) {
    if (in.size() < 4 || in.compare(0, 4, "NLSF") != 0) throw DataIntegrityError("NLSF: bad magic");
    std::size_t pos = 4;
    const auto version = detail::get_le<std::uint32_t>(in, pos);
    if (version != kSnapshotVersion) throw DataIntegrityError("NLSF: unsupported version " + std::to_string(version));
    const auto dim = detail::get_le<std::uint32_t>(in, pos);
    if (dim != 1 && dim != 2) throw DataIntegrityError("NLSF: bad dimension");
    std::uint32_t n[2] = {0, 0};
    for (std::uint32_t a = 0; a < dim; ++a) n[a] = detail::get_le<std::uint32_t>(in, pos);
    if (dim == 2 && n[0] != n[1]) throw DataIntegrityError("NLSF: unequal axis sizes are not supported");
    Vec box{0.0, 0.0};
    for (std::uint32_t a = 0; a < dim; ++a) box[a] = detail::get_le<double>(in, pos);
    const double t = detail::get_le<double>(in, pos);
    SpatialGrid g(static_cast<int>(dim), n[0], box);
    if (in.size() - pos != g.size() * 16) throw DataIntegrityError("NLSF: payload length does not match the header");
    std::vector<complex> v(g.size());
    for (auto& z : v) {
        const double re = detail::get_le<double>(in, pos);
        z = {re, detail::get_le<double>(in, pos)};
    }
    std::optional<double> label;
    if (!std::isnan(t)) label = t;
    return GridField(g, std::move(v), Space::physical, label);
}

inline void write_snapshot(const std::filesystem::path& path, const GridField& f) { write_text(path, encode_snapshot(f)); }

inline GridField read_snapshot(const std::filesystem::path& path) { return decode_snapshot(read_text(path)); }

}  // namespace nlsdiag
