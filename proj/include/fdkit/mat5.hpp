#pragma once

// Reader for the MAT-v5 subset the CWRU bearing archive actually uses:
// double-precision matrices (mxDOUBLE_CLASS), optionally zlib-compressed
// (miCOMPRESSED). Everything else is a typed error, never a silent skip.
//
// Layout: 128-byte header (116 bytes text, 8 bytes subsystem offset, u16
// version 0x0100, 2-byte endian marker "IM"/"MI"), then 8-byte-aligned data
// elements. A tag is u32 type + u32 byte count; elements whose payload fits
// in 4 bytes use the packed "small data element" form with the size in the
// upper 16 bits of the first word.

#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include <zlib.h>

#include "fdkit/error.hpp"

namespace fdkit::mat5 {

constexpr std::uint32_t kMiInt8 = 1;
constexpr std::uint32_t kMiInt32 = 5;
constexpr std::uint32_t kMiUInt32 = 6;
constexpr std::uint32_t kMiDouble = 9;
constexpr std::uint32_t kMiMatrix = 14;
constexpr std::uint32_t kMiCompressed = 15;

constexpr std::uint32_t kMxDoubleClass = 6;
constexpr std::uint32_t kFlagComplex = 0x0800;

namespace detail {

inline std::uint16_t swap16(std::uint16_t v) {
    return static_cast<std::uint16_t>((v >> 8) | (v << 8));
}

inline std::uint32_t swap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0x0000ff00u) | ((v << 8) & 0x00ff0000u) | (v << 24);
}

inline std::uint64_t swap64(std::uint64_t v) {
    v = ((v >> 8) & 0x00ff00ff00ff00ffull) | ((v & 0x00ff00ff00ff00ffull) << 8);
    v = ((v >> 16) & 0x0000ffff0000ffffull) | ((v & 0x0000ffff0000ffffull) << 16);
    return (v >> 32) | (v << 32);
}

// Cursor over a byte buffer with file-order integer reads.
struct Cursor {
    const unsigned char* data;
    std::size_t size;
    std::size_t pos = 0;
    bool swap = false;  // file endianness != host

    std::size_t remaining() const { return size - pos; }

    void need(std::size_t n, const char* what) const {
        if (remaining() < n) fail("TruncatedFile", std::string("unexpected end of data while reading ") + what);
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v;
        std::memcpy(&v, data + pos, 4);
        pos += 4;
        return swap ? swap32(v) : v;
    }

    const unsigned char* bytes(std::size_t n, const char* what) {
        need(n, what);
        const unsigned char* p = data + pos;
        pos += n;
        return p;
    }

    void align8() {
        std::size_t rem = pos % 8;
        if (rem) {
            std::size_t pad = 8 - rem;
            if (remaining() < pad) pos = size;  // trailing pad may be absent at EOF
            else pos += pad;
        }
    }
};

// One data element: tag plus a view of its payload.
struct Element {
    std::uint32_t type;
    std::uint32_t nbytes;
    const unsigned char* payload;
};

inline Element read_element(Cursor& c) {
    std::uint32_t first = c.u32("element tag");
    if (first & 0xffff0000u) {
        // Small data element: size in the upper 16 bits, payload in the next word.
        Element e;
        e.type = first & 0xffffu;
        e.nbytes = first >> 16;
        if (e.nbytes > 4) fail("UnsupportedElement", "small element claims more than 4 bytes");
        e.payload = c.bytes(4, "small element payload");
        return e;
    }
    Element e;
    e.type = first;
    e.nbytes = c.u32("element size");
    e.payload = c.bytes(e.nbytes, "element payload");
    return e;
}

inline std::vector<unsigned char> inflate_payload(const unsigned char* data, std::size_t size) {
    std::vector<unsigned char> out;
    out.resize(size * 4 + 1024);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) fail("ChecksumOrInflateFailure", "zlib init failed");
    zs.next_in = const_cast<Bytef*>(data);
    zs.avail_in = static_cast<uInt>(size);
    std::size_t written = 0;
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        if (written == out.size()) out.resize(out.size() * 2);
        zs.next_out = out.data() + written;
        zs.avail_out = static_cast<uInt>(out.size() - written);
        rc = inflate(&zs, Z_NO_FLUSH);
        written = out.size() - zs.avail_out;
        if (rc == Z_STREAM_END) break;
        if (rc != Z_OK) {
            inflateEnd(&zs);
            fail("ChecksumOrInflateFailure", "zlib inflate failed (rc " + std::to_string(rc) + ")");
        }
        if (zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            fail("ChecksumOrInflateFailure", "compressed element ended before stream end");
        }
    }
    inflateEnd(&zs);
    out.resize(written);
    return out;
}

inline void parse_matrix(const Element& elem, bool swap,
                         std::map<std::string, std::vector<double>>& out) {
    Cursor c{elem.payload, elem.nbytes, 0, swap};

    Element flags = read_element(c);
    if (flags.type != kMiUInt32 || flags.nbytes < 8)
        fail("UnsupportedElement", "array flags sub-element has tag " + std::to_string(flags.type));
    std::uint32_t flagword;
    std::memcpy(&flagword, flags.payload, 4);
    if (swap) flagword = swap32(flagword);
    std::uint32_t array_class = flagword & 0xffu;
    if (array_class != kMxDoubleClass)
        fail("UnsupportedElement", "array class " + std::to_string(array_class) + " (only mxDOUBLE_CLASS supported)");
    if (flagword & kFlagComplex)
        fail("UnsupportedElement", "complex arrays are not supported");
    c.align8();

    Element dims = read_element(c);
    if (dims.type != kMiInt32)
        fail("UnsupportedElement", "dimensions sub-element has tag " + std::to_string(dims.type));
    std::size_t total = 1;
    for (std::uint32_t i = 0; i < dims.nbytes / 4; ++i) {
        std::uint32_t d;
        std::memcpy(&d, dims.payload + 4 * i, 4);
        if (swap) d = swap32(d);
        total *= d;
    }
    c.align8();

    Element name_el = read_element(c);
    if (name_el.type != kMiInt8)
        fail("UnsupportedElement", "array name sub-element has tag " + std::to_string(name_el.type));
    std::string name(reinterpret_cast<const char*>(name_el.payload), name_el.nbytes);
    c.align8();

    Element real = read_element(c);
    if (real.type != kMiDouble)
        fail("UnsupportedElement", "real part stored as tag " + std::to_string(real.type) + " (only miDOUBLE supported)");
    if (real.nbytes != total * 8)
        fail("UnsupportedElement", "data size does not match declared dimensions");

    std::vector<double> values(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, real.payload + 8 * i, 8);
        if (swap) bits = swap64(bits);
        std::memcpy(&values[i], &bits, 8);
    }
    out[name] = std::move(values);
}

inline void parse_element_stream(Cursor& c, std::map<std::string, std::vector<double>>& out);

inline void parse_top_element(Cursor& c, std::map<std::string, std::vector<double>>& out) {
    std::size_t tag_start = c.pos;
    Element e = read_element(c);
    if (e.type == kMiCompressed) {
        std::vector<unsigned char> inflated = inflate_payload(e.payload, e.nbytes);
        Cursor inner{inflated.data(), inflated.size(), 0, c.swap};
        parse_element_stream(inner, out);
        // MATLAB does not pad compressed elements; do not realign here.
        return;
    }
    if (e.type == kMiMatrix) {
        parse_matrix(e, c.swap, out);
        c.align8();
        return;
    }
    (void)tag_start;
    fail("UnsupportedElement", "top-level element tag " + std::to_string(e.type));
}

inline void parse_element_stream(Cursor& c, std::map<std::string, std::vector<double>>& out) {
    while (c.remaining() >= 8) parse_top_element(c, out);
    if (c.remaining() != 0)
        fail("TruncatedFile", "trailing bytes do not form a complete element tag");
}

}  // namespace detail

// Parse a MAT-v5 byte buffer into name -> column-flattened double values.
// Values are bit-exact reinterpretations of the stored IEEE-754 doubles,
// honoring the file's declared endianness.
inline std::map<std::string, std::vector<double>> parse_mat_v5(const unsigned char* data,
                                                               std::size_t size) {
    if (size < 128) fail("TruncatedFile", "shorter than the 128-byte MAT-v5 header");
    if (std::memcmp(data, "MATLAB 5.0", 10) != 0)
        fail("BadMagic", "header text does not begin with 'MATLAB 5.0'");

    char e0 = static_cast<char>(data[126]);
    char e1 = static_cast<char>(data[127]);
    bool file_big_endian;
    if (e0 == 'I' && e1 == 'M') file_big_endian = false;
    else if (e0 == 'M' && e1 == 'I') file_big_endian = true;
    else fail("BadMagic", "endianness marker is neither 'IM' nor 'MI'");

    const std::uint16_t probe = 0x0102;
    bool host_big_endian = (*reinterpret_cast<const unsigned char*>(&probe) == 0x01);
    bool swap = (file_big_endian != host_big_endian);

    std::uint16_t version;
    std::memcpy(&version, data + 124, 2);
    if (swap) version = detail::swap16(version);
    if (version != 0x0100)
        fail("BadMagic", "unsupported MAT version word");

    std::map<std::string, std::vector<double>> out;
    detail::Cursor c{data, size, 128, swap};
    detail::parse_element_stream(c, out);
    return out;
}

inline std::map<std::string, std::vector<double>> parse_mat_v5(const std::vector<unsigned char>& bytes) {
    return parse_mat_v5(bytes.data(), bytes.size());
}

}  // namespace fdkit::mat5
