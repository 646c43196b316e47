#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fogsim {

// Little-endian byte writer/reader for the canonical encodings (outcome
// payloads, ledger records, block headers, checkpoints). Encodings written
// through these are platform-independent and bijective for fixed-width
// fields, which the tamper-sweep tests rely on.
class ByteWriter {
public:
    void u8(uint8_t v) { out_.push_back(v); }

    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }

    void raw(std::span<const uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }

    // Length-prefixed string.
    void str(std::string_view s) {
        u32(static_cast<uint32_t>(s.size()));
        out_.insert(out_.end(), s.begin(), s.end());
    }

    std::vector<uint8_t> take() { return std::move(out_); }
    const std::vector<uint8_t>& bytes() const { return out_; }

private:
    std::vector<uint8_t> out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() { return take(1)[0]; }

    uint32_t u32() {
        auto b = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
        return v;
    }

    uint64_t u64() {
        auto b = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
        return v;
    }

    double f64() {
        const uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::string str() {
        const uint32_t n = u32();
        auto b = take(n);
        return std::string(reinterpret_cast<const char*>(b.data()), b.size());
    }

    std::span<const uint8_t> take(size_t n) {
        if (pos_ + n > data_.size()) throw std::runtime_error("byte reader: truncated input");
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == data_.size(); }

private:
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace fogsim
