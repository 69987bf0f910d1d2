#pragma once

#include <cstdio>
#include <cstring>
#include <fstream>

#include "wigner.hpp"

namespace efresnel {

// ---------------------------------------------------------------------------
// Flat binary field and table files. One ASCII header line, then raw
// little-endian f64 payload, row-major, complex interleaved re,im:
//
//   CF64 v1 n=<int> L=<decimal> kind=<complex|real>\n
//   WF64 v1 ns=<int> Ls=<decimal> ng=<int> Lg=<decimal>\n
//
// Headers print decimals with %.17g so values round-trip bit-exactly and a
// given object always serializes to identical bytes.

static_assert(sizeof(double) == 8 && sizeof(cd) == 16, "payload layout assumes 8-byte doubles");

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    return os;
}

// reads the header line; returns it without the newline, leaves the stream at
// the payload. `offset` is advanced past the newline.
inline std::string read_header_line(std::ifstream& is, const std::string& path, const char* magic,
                                    size_t& offset) {
    std::string line;
    char ch;
    while (is.get(ch)) {
        ++offset;
        if (ch == '\n') {
            if (line.compare(0, std::strlen(magic), magic) != 0)
                throw IoError(path + ": expected magic " + magic + " at byte 0");
            return line;
        }
        line.push_back(ch);
        if (line.size() > 256)
            throw IoError(path + ": header longer than 256 bytes; expected magic " + magic);
    }
    throw IoError(path + ": truncated header at byte " + std::to_string(offset) + "; expected magic " +
                  magic);
}

inline void read_payload(std::ifstream& is, const std::string& path, double* dst, size_t count,
                         size_t offset) {
    is.read(reinterpret_cast<char*>(dst), std::streamsize(count * 8));
    size_t got = size_t(is.gcount());
    if (got != count * 8)
        throw IoError(path + ": payload truncated at byte " + std::to_string(offset + got) + "; expected " +
                      std::to_string(count * 8) + " payload bytes");
    if (is.peek() != std::ifstream::traits_type::eof())
        throw IoError(path + ": trailing bytes after payload at byte " + std::to_string(offset + got));
}

inline GridSpec parse_grid(const std::string& path, int n, double L) {
    try {
        return GridSpec(n, L);
    } catch (const InvalidGrid& e) {
        throw IoError(path + ": header declares an invalid grid: " + e.what());
    }
}

}  // namespace detail

inline void write_cf64(const std::string& path, const ComplexField& f) {
    f.spec.validate();
    auto os = detail::open_out(path);
    os << "CF64 v1 n=" << f.spec.n << " L=" << detail::fmt_g17(f.spec.L) << " kind=complex\n";
    os.write(reinterpret_cast<const char*>(f.samples.data()), std::streamsize(f.samples.size() * 16));
    if (!os) throw IoError("write failed on '" + path + "'");
}

inline void write_cf64(const std::string& path, const RealField& f) {
    f.spec.validate();
    auto os = detail::open_out(path);
    os << "CF64 v1 n=" << f.spec.n << " L=" << detail::fmt_g17(f.spec.L) << " kind=real\n";
    os.write(reinterpret_cast<const char*>(f.samples.data()), std::streamsize(f.samples.size() * 8));
    if (!os) throw IoError("write failed on '" + path + "'");
}

struct LoadedField {
    bool is_complex = true;
    ComplexField c;  // set when is_complex
    RealField r;     // set otherwise

    const GridSpec& spec() const { return is_complex ? c.spec : r.spec; }

    ComplexField as_complex() const {
        if (is_complex) return c;
        ComplexField out(r.spec);
        for (size_t k = 0; k < r.samples.size(); ++k) out.samples[k] = r.samples[k];
        return out;
    }
};

inline LoadedField read_cf64(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    size_t offset = 0;
    std::string header = detail::read_header_line(is, path, "CF64", offset);
    int n = 0;
    double L = 0;
    char kind[16] = {0};
    if (std::sscanf(header.c_str(), "CF64 v1 n=%d L=%lf kind=%15s", &n, &L, kind) != 3)
        throw IoError(path + ": malformed CF64 header '" + header + "'");
    GridSpec spec = detail::parse_grid(path, n, L);

    LoadedField out;
    if (std::strcmp(kind, "complex") == 0) {
        out.is_complex = true;
        out.c = ComplexField(spec);
        detail::read_payload(is, path, reinterpret_cast<double*>(out.c.samples.data()),
                             out.c.samples.size() * 2, offset);
    } else if (std::strcmp(kind, "real") == 0) {
        out.is_complex = false;
        out.r = RealField(spec);
        detail::read_payload(is, path, out.r.samples.data(), out.r.samples.size(), offset);
    } else {
        throw IoError(path + ": unknown kind '" + std::string(kind) + "' (want complex|real)");
    }
    return out;
}

inline void write_wf64(const std::string& path, const WignerTable& tab) {
    tab.sigma_grid.validate();
    tab.gamma_grid.validate();
    auto os = detail::open_out(path);
    os << "WF64 v1 ns=" << tab.sigma_grid.n << " Ls=" << detail::fmt_g17(tab.sigma_grid.L)
       << " ng=" << tab.gamma_grid.n << " Lg=" << detail::fmt_g17(tab.gamma_grid.L) << "\n";
    os.write(reinterpret_cast<const char*>(tab.w.data()), std::streamsize(tab.w.size() * 8));
    if (!os) throw IoError("write failed on '" + path + "'");
}

inline WignerTable read_wf64(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    size_t offset = 0;
    std::string header = detail::read_header_line(is, path, "WF64", offset);
    int ns = 0, ng = 0;
    double Ls = 0, Lg = 0;
    if (std::sscanf(header.c_str(), "WF64 v1 ns=%d Ls=%lf ng=%d Lg=%lf", &ns, &Ls, &ng, &Lg) != 4)
        throw IoError(path + ": malformed WF64 header '" + header + "'");
    WignerTable tab(detail::parse_grid(path, ns, Ls), detail::parse_grid(path, ng, Lg));
    detail::read_payload(is, path, tab.w.data(), tab.w.size(), offset);
    return tab;
}

}  // namespace efresnel
