#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rngsentinel/bitvec.hpp"

namespace rngsentinel {

enum class SourceKind { File, StandardInput, Generator };

struct BitSourceSpec {
    SourceKind kind = SourceKind::Generator;
    std::filesystem::path path;
    std::uint64_t seed = 0;

    static BitSourceSpec file(std::filesystem::path p) {
        BitSourceSpec s;
        s.kind = SourceKind::File;
        s.path = std::move(p);
        return s;
    }
    static BitSourceSpec standard_input() {
        BitSourceSpec s;
        s.kind = SourceKind::StandardInput;
        return s;
    }
    static BitSourceSpec generator(std::uint64_t seed) {
        BitSourceSpec s;
        s.kind = SourceKind::Generator;
        s.seed = seed;
        return s;
    }
};

class ByteSource {
public:
    virtual ~ByteSource() = default;
    // Fills as much of out as possible; returns bytes written (< out.size()
    // only at end of stream).
    virtual std::size_t read(std::span<std::uint8_t> out) = 0;
};

class FileByteSource final : public ByteSource {
public:
    explicit FileByteSource(const std::filesystem::path& path)
        : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open input file: " + path.string());
    }

    std::size_t read(std::span<std::uint8_t> out) override {
        in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
        return static_cast<std::size_t>(in_.gcount());
    }

private:
    std::ifstream in_;
};

class StdinByteSource final : public ByteSource {
public:
    std::size_t read(std::span<std::uint8_t> out) override {
        if (out.empty()) return 0;
        return std::fread(out.data(), 1, out.size(), stdin);
    }
};

// Deterministic seeded source: std::mt19937_64 output words serialized
// little-endian, so the byte (and bit) sequence is portable for a given seed.
class GeneratorByteSource final : public ByteSource {
public:
    explicit GeneratorByteSource(std::uint64_t seed) : engine_(seed) {}

    std::size_t read(std::span<std::uint8_t> out) override {
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (stash_bytes_ == 0) {
                stash_ = engine_();
                stash_bytes_ = 8;
            }
            out[i] = static_cast<std::uint8_t>(stash_ & 0xff);
            stash_ >>= 8;
            --stash_bytes_;
        }
        return out.size();
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t stash_ = 0;
    unsigned stash_bytes_ = 0;
};

inline std::unique_ptr<ByteSource> make_byte_source(const BitSourceSpec& spec) {
    switch (spec.kind) {
        case SourceKind::File: return std::make_unique<FileByteSource>(spec.path);
        case SourceKind::StandardInput: return std::make_unique<StdinByteSource>();
        case SourceKind::Generator: return std::make_unique<GeneratorByteSource>(spec.seed);
    }
    throw std::logic_error("make_byte_source: bad kind");
}

// Streams bits (LSB-first per byte) out of a ByteSource through an internal
// byte buffer. Results never depend on the buffer size: the reader's state is
// a byte offset plus a bit offset within the current byte.
class BitReader {
public:
    explicit BitReader(std::unique_ptr<ByteSource> src, std::size_t buffer_bytes = 65536)
        : src_(std::move(src)), buf_(buffer_bytes ? buffer_bytes : 1) {
        if (!src_) throw std::invalid_argument("BitReader: null source");
    }

    // Fills out (cleared first) with up to count bits. Returns true iff the
    // full count was delivered; on a short read out holds the bits that were
    // available.
    bool read_bits(std::size_t count, BitVec& out) {
        out.clear();
        std::size_t got = 0;
        bool exhausted = false;
        // Byte-aligned fast path: copy whole bytes straight into words.
        if (bit_in_byte_ == 0 && count >= 8) {
            BitVec staging(count);
            auto words = staging.words();
            std::size_t wi = 0;
            std::uint64_t acc = 0;
            unsigned acc_bytes = 0;
            while (got + 8 <= count) {
                if (pos_ == fill_ && !refill()) {
                    exhausted = true;
                    break;
                }
                acc |= static_cast<std::uint64_t>(buf_[pos_++]) << (8 * acc_bytes);
                got += 8;
                if (++acc_bytes == 8) {
                    words[wi++] = acc;
                    acc = 0;
                    acc_bytes = 0;
                }
            }
            if (acc_bytes != 0) words[wi] = acc;
            if (got == count) {
                staging.mask_tail();
                out = std::move(staging);
                bits_consumed_ += got;
                return true;
            }
            out = truncated(staging, got);
        }
        // Ragged remainder (count % 8) or leftover bit offset from symbol reads.
        while (!exhausted && got < count) {
            const std::optional<bool> b = next_bit();
            if (!b) break;
            out.push_back(*b);
            ++got;
        }
        bits_consumed_ += got;
        return got == count;
    }

    // Next b-bit symbol, LSB-first: the first bit read is the symbol's bit 0.
    std::optional<std::uint32_t> next_symbol(unsigned bits) {
        if (bits == 0 || bits > 32) throw std::invalid_argument("next_symbol: bits must be 1..32");
        std::uint32_t sym = 0;
        for (unsigned i = 0; i < bits; ++i) {
            const std::optional<bool> b = next_bit();
            if (!b) return std::nullopt; // partial symbols are discarded
            sym |= static_cast<std::uint32_t>(*b) << i;
        }
        bits_consumed_ += bits;
        return sym;
    }

    std::uint64_t bits_consumed() const { return bits_consumed_; }

private:
    std::optional<bool> next_bit() {
        // bit_in_byte_ != 0 implies pos_ < fill_ (a partially read byte is
        // always resident), so refill is only ever needed on byte boundaries.
        if (pos_ == fill_ && bit_in_byte_ == 0 && !refill()) return std::nullopt;
        const bool b = (buf_[pos_] >> bit_in_byte_) & 1u;
        if (++bit_in_byte_ == 8) {
            bit_in_byte_ = 0;
            ++pos_;
        }
        return b;
    }

    bool refill() {
        fill_ = src_->read(buf_);
        pos_ = 0;
        return fill_ > 0;
    }

    static BitVec truncated(const BitVec& v, std::size_t nbits) {
        BitVec t(nbits);
        for (std::size_t i = 0; i < nbits; ++i) t.set(i, v.get(i));
        return t;
    }

    std::unique_ptr<ByteSource> src_;
    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
    std::size_t fill_ = 0;
    unsigned bit_in_byte_ = 0;
    std::uint64_t bits_consumed_ = 0;
};

// Deterministic tamper model: every period-th sequence (indices 0, period,
// 2*period, ...) has its first forced_ones bits overwritten with ones.
struct BiasModel {
    std::uint64_t forced_ones = 0; // j
    std::uint64_t period = 1;      // f

    void validate() const {
        if (period == 0) throw std::invalid_argument("BiasModel: period must be >= 1");
    }

    bool tampers(std::uint64_t sequence_index) const { return sequence_index % period == 0; }
};

inline void apply_bias_inplace(BitVec& seq, const BiasModel& bias, std::uint64_t sequence_index) {
    bias.validate();
    if (bias.forced_ones > seq.size())
        throw std::invalid_argument("apply_bias: forced_ones exceeds sequence length");
    if (!bias.tampers(sequence_index)) return;
    auto words = seq.words();
    std::uint64_t left = bias.forced_ones;
    for (std::size_t w = 0; left > 0 && w < words.size(); ++w) {
        if (left >= 64) {
            words[w] = ~std::uint64_t{0};
            left -= 64;
        } else {
            words[w] |= (std::uint64_t{1} << left) - 1;
            left = 0;
        }
    }
    seq.mask_tail();
}

inline BitVec apply_bias(const BitVec& seq, const BiasModel& bias, std::uint64_t sequence_index) {
    BitVec out = seq;
    apply_bias_inplace(out, bias, sequence_index);
    return out;
}

} // namespace rngsentinel
