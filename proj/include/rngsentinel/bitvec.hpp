#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace rngsentinel {

// Packed bit buffer, LSB-first within each 64-bit word. Unused high bits of
// the last word are kept zero so popcount can run over whole words.
class BitVec {
public:
    BitVec() = default;

    explicit BitVec(std::size_t nbits) : nbits_(nbits), words_(word_count(nbits), 0) {}

    static BitVec zeros(std::size_t nbits) { return BitVec(nbits); }

    static BitVec from_bits(std::initializer_list<int> bits) {
        BitVec v(bits.size());
        std::size_t i = 0;
        for (int b : bits) v.set(i++, b != 0);
        return v;
    }

    // Unpacks nbits from a byte buffer, LSB-first per byte.
    static BitVec from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
        if (nbits > bytes.size() * 8)
            throw std::invalid_argument("from_bytes: buffer shorter than requested bit count");
        BitVec v(nbits);
        const std::size_t nwords = v.words_.size();
        for (std::size_t w = 0; w < nwords; ++w) {
            std::uint64_t acc = 0;
            const std::size_t base = w * 8;
            const std::size_t lim = std::min<std::size_t>(8, (bytes.size() > base) ? bytes.size() - base : 0);
            for (std::size_t b = 0; b < lim; ++b)
                acc |= static_cast<std::uint64_t>(bytes[base + b]) << (8 * b);
            v.words_[w] = acc;
        }
        v.mask_tail();
        return v;
    }

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i, bool value) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void push_back(bool value) {
        if ((nbits_ & 63) == 0) words_.push_back(0);
        ++nbits_;
        set(nbits_ - 1, value);
    }

    void clear() {
        nbits_ = 0;
        words_.clear();
    }

    // Number of set bits.
    std::uint64_t popcount() const {
        std::uint64_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
        return c;
    }

    // Number of adjacent positions i with bit[i] != bit[i+1].
    std::uint64_t flip_count() const {
        if (nbits_ < 2) return 0;
        std::uint64_t c = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            const std::size_t valid = std::min<std::size_t>(64, nbits_ - w * 64);
            const std::uint64_t x = words_[w] ^ (words_[w] >> 1);
            // valid-1 adjacent pairs lie inside this word; valid is in [1, 64].
            const std::uint64_t mask = (std::uint64_t{1} << (valid - 1)) - 1;
            c += static_cast<std::uint64_t>(std::popcount(x & mask));
            if (w + 1 < words_.size())
                c += ((words_[w] >> 63) ^ (words_[w + 1] & 1));
        }
        return c;
    }

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    // Re-establishes the zero-tail invariant after direct word writes.
    void mask_tail() {
        const std::size_t rem = nbits_ & 63;
        if (rem != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << rem) - 1;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.nbits_ == b.nbits_ && a.words_ == b.words_;
    }

private:
    static std::size_t word_count(std::size_t nbits) { return (nbits + 63) / 64; }

    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace rngsentinel
