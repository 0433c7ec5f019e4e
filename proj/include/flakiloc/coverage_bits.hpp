#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flakiloc {

// Fixed-length bitset over universe positions. Rows of the fault-localization
// matrix are stored this way so intersection/union run a word at a time.
class CoverageBits {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    CoverageBits() = default;
    explicit CoverageBits(std::size_t size) : size_(size), words_(word_count(size), 0) {}

    static constexpr std::size_t word_count(std::size_t bits) {
        return (bits + kWordBits - 1) / kWordBits;
    }

    std::size_t size() const noexcept { return size_; }

    bool test(std::size_t pos) const noexcept {
        return (words_[pos / kWordBits] >> (pos % kWordBits)) & 1u;
    }
    void set(std::size_t pos) noexcept { words_[pos / kWordBits] |= Word{1} << (pos % kWordBits); }
    void reset(std::size_t pos) noexcept {
        words_[pos / kWordBits] &= ~(Word{1} << (pos % kWordBits));
    }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    bool none() const noexcept {
        for (Word w : words_)
            if (w) return false;
        return true;
    }

    // Both operands must have the same size.
    CoverageBits& operator&=(const CoverageBits& other) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
        return *this;
    }
    CoverageBits& operator|=(const CoverageBits& other) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    // true iff every bit set here is also set in other
    bool is_subset_of(const CoverageBits& other) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }

    std::span<const Word> words() const noexcept { return words_; }

    template <typename F>
    void for_each_set(F&& fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word bits = words_[w];
            while (bits) {
                const int tz = std::countr_zero(bits);
                fn(w * kWordBits + static_cast<std::size_t>(tz));
                bits &= bits - 1;
            }
        }
    }

    std::vector<std::size_t> positions() const {
        std::vector<std::size_t> out;
        for_each_set([&](std::size_t p) { out.push_back(p); });
        return out;
    }

    friend bool operator==(const CoverageBits&, const CoverageBits&) = default;

private:
    std::size_t size_ = 0;
    std::vector<Word> words_;
};

}  // namespace flakiloc
