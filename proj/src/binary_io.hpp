#pragma once

// Little-endian fixed-width encoding shared by the checkpoint and split
// file formats.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "hypercf/error.hpp"
#include "hypercf/matrix.hpp"

namespace hypercf::binary {

inline void write_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
    out.write(bytes, 8);
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
    char bytes[4];
    for (int k = 0; k < 4; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
    out.write(bytes, 4);
}

inline void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline void write_string(std::ostream& out, std::string_view s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
    write_u64(out, m.rows());
    write_u64(out, m.cols());
    for (const double v : m.values()) write_f64(out, v);
}

class Reader {
public:
    Reader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

    void expect_magic(std::string_view magic) {
        std::string got(magic.size(), '\0');
        in_.read(got.data(), static_cast<std::streamsize>(got.size()));
        if (!in_ || got != magic) {
            throw FormatError(what_ + ": missing '" + std::string(magic) + "' header");
        }
    }

    std::uint64_t u64() {
        unsigned char bytes[8];
        read(bytes, 8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
        return v;
    }

    std::uint32_t u32() {
        unsigned char bytes[4];
        read(bytes, 4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[k]) << (8 * k);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::uint64_t bounded(std::uint64_t limit, std::string_view field) {
        const auto v = u64();
        if (v > limit) {
            throw FormatError(what_ + ": implausible " + std::string(field) + " " + std::to_string(v));
        }
        return v;
    }

    std::string string() {
        const auto n = bounded(1ULL << 30, "string length");
        std::string s(n, '\0');
        read(s.data(), n);
        return s;
    }

    Matrix matrix() {
        const auto rows = bounded(1ULL << 32, "row count");
        const auto cols = bounded(1ULL << 32, "column count");
        if (rows * cols > (1ULL << 34)) {
            throw FormatError(what_ + ": matrix too large");
        }
        Matrix m(rows, cols);
        for (auto& v : m.values()) v = f64();
        return m;
    }

    void expect_end() {
        if (in_.peek() != std::char_traits<char>::eof()) {
            throw FormatError(what_ + ": trailing bytes after payload");
        }
    }

private:
    void read(void* dst, std::size_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (!in_) {
            throw FormatError(what_ + ": truncated file");
        }
    }

    std::istream& in_;
    std::string what_;
};

}  // namespace hypercf::binary
