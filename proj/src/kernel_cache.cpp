#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "phonon/errors.hpp"
#include "phonon/kernel.hpp"

namespace phonon {

namespace {

constexpr char magic[4] = {'P', 'H', 'N', 'K'};
constexpr std::uint8_t version = 0x01;

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double x) {
        const auto v = std::bit_cast<std::uint64_t>(x);
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t>& data() { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    Reader(const std::vector<std::uint8_t>& b, std::size_t end) : buf_(b), end_(end) {}
    void need(std::size_t n) const {
        if (pos_ + n > end_) throw io_error("kernel cache is truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_++]) << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_++]) << (8 * i);
        return std::bit_cast<double>(v);
    }
    std::size_t pos() const { return pos_; }
    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }

private:
    const std::vector<std::uint8_t>& buf_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32(const std::uint8_t* p, std::size_t n) {
    boost::crc_32_type crc;
    crc.process_bytes(p, n);
    return crc.checksum();
}

}  // namespace

void write_kernel_cache(const KernelTable& t, const std::string& path) {
    const int n = t.n();
    if (t.K.rows() != n || t.K.cols() != n || t.V.size() != n)
        throw validation_error("kernel table dimensions are inconsistent");
    Writer w;
    w.bytes(magic, 4);
    w.bytes(&version, 1);
    w.u32(static_cast<std::uint32_t>(n));
    w.f64(t.quad_tol);
    for (double x : t.grid.nodes) w.f64(x);
    for (double x : t.grid.weights) w.f64(x);
    for (int i = 0; i < n; ++i) w.f64(t.V(i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w.f64(t.K(i, j));
    w.f64(t.v0);
    w.f64(t.c1);
    w.f64(t.c2);
    w.u32(crc32(w.data().data(), w.data().size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open kernel cache for writing: " + path);
    out.write(reinterpret_cast<const char*>(w.data().data()),
              static_cast<std::streamsize>(w.data().size()));
    if (!out) throw io_error("failed writing kernel cache: " + path);
}

KernelTable read_kernel_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open kernel cache: " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 9 + 4) throw io_error("kernel cache is truncated: " + path);
    if (std::memcmp(buf.data(), magic, 4) != 0) throw io_error("not a kernel cache file: " + path);
    if (buf[4] != version) throw io_error("unsupported kernel cache version in " + path);

    const std::size_t payload = buf.size() - 4;
    Reader crc_reader(buf, buf.size());
    crc_reader.skip(payload);
    if (crc_reader.u32() != crc32(buf.data(), payload))
        throw io_error("kernel cache CRC-32 mismatch: " + path);

    Reader r(buf, payload);
    r.skip(5);
    const std::uint32_t n = r.u32();
    if (n < 2 || n % 2 != 0 || n > 100000) throw io_error("kernel cache has an invalid size: " + path);
    const std::size_t expected = 5 + 4 + 8 * (1 + 3 * std::size_t{n} + std::size_t{n} * n + 3);
    if (payload != expected) throw io_error("kernel cache length does not match n: " + path);

    KernelTable t;
    t.grid = WaveGrid(static_cast<int>(n));
    t.quad_tol = r.f64();
    for (std::uint32_t i = 0; i < n; ++i) {
        const double x = r.f64();
        if (x != t.grid.nodes[i]) throw io_error("kernel cache nodes differ from the midpoint grid");
    }
    for (std::uint32_t i = 0; i < n; ++i) t.grid.weights[i] = r.f64();
    t.V.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) t.V(i) = r.f64();
    t.K.resize(n, n);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j) t.K(i, j) = r.f64();
    const double v0 = r.f64(), c1 = r.f64(), c2 = r.f64();
    finalize_table(t);
    t.v0 = v0;
    t.c1 = c1;
    t.c2 = c2;
    return t;
}

}  // namespace phonon
