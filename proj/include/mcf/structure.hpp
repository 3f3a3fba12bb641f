#pragma once

#include "mcf/vocabulary.hpp"

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mcf {

/// Bit positions of every relation tuple over a universe of size N.
/// Relations are laid out in vocabulary order; tuples of one relation in lexicographic
/// order of their 0-based elements. A nullary relation occupies one bit.
class BitLayout {
public:
    BitLayout(const Vocabulary& vocab, int universe_size);

    int universe_size() const noexcept { return universe_; }
    std::int64_t total_bits() const noexcept { return total_; }
    std::int64_t offset(int relation) const { return offsets_.at(static_cast<std::size_t>(relation)); }
    std::int64_t tuple_count(int relation) const { return sizes_.at(static_cast<std::size_t>(relation)); }
    /// Index of a tuple of 0-based elements within its relation.
    std::int64_t tuple_index(std::span<const int> tuple) const;
    std::int64_t power(int exponent) const;

private:
    int universe_;
    std::vector<std::int64_t> offsets_;
    std::vector<std::int64_t> sizes_;
    std::int64_t total_ = 0;
};

/// A finite interpretation of a vocabulary over the universe {1..N}.
/// With k constants, constant i denotes element N - k + i.
class Structure {
public:
    Structure(Vocabulary vocab, int universe_size);

    const Vocabulary& vocab() const noexcept { return vocab_; }
    int universe_size() const noexcept { return layout_.universe_size(); }
    const BitLayout& layout() const noexcept { return layout_; }

    /// 1-based element denoted by constant `index`.
    int constant_element(int index) const;

    /// Tuples use 1-based elements.
    bool holds(const std::string& relation, std::span<const int> tuple) const;
    bool holds(const std::string& relation, std::initializer_list<int> tuple) const
    {
        return holds(relation, std::span<const int>(tuple.begin(), tuple.size()));
    }
    void set(const std::string& relation, std::span<const int> tuple, bool value = true);
    void set(const std::string& relation, std::initializer_list<int> tuple, bool value = true)
    {
        set(relation, std::span<const int>(tuple.begin(), tuple.size()), value);
    }

    bool bit(std::int64_t index) const;
    void set_bit(std::int64_t index, bool value);
    std::span<const std::uint64_t> words() const noexcept { return words_; }
    std::span<std::uint64_t> words() noexcept { return words_; }

    /// All true tuples of one relation (1-based), lexicographic.
    std::vector<std::vector<int>> tuples(const std::string& relation) const;

    friend bool operator==(const Structure& a, const Structure& b)
    {
        return a.vocab_ == b.vocab_ && a.universe_size() == b.universe_size() && a.words_ == b.words_;
    }

private:
    std::int64_t bit_index(const std::string& relation, std::span<const int> tuple) const;

    Vocabulary vocab_;
    BitLayout layout_;
    std::vector<std::uint64_t> words_;
};

} // namespace mcf
