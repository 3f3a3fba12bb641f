#include "mcf/structure.hpp"

#include "mcf/error.hpp"

namespace mcf {

namespace {

std::int64_t checked_power(int base, int exponent)
{
    std::int64_t v = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && v > (std::int64_t{1} << 40) / base)
            throw BudgetExceeded("tuple space too large: " + std::to_string(base) + "^" +
                                 std::to_string(exponent));
        v *= base;
    }
    return v;
}

} // namespace

BitLayout::BitLayout(const Vocabulary& vocab, int universe_size) : universe_(universe_size)
{
    if (universe_size < 0)
        throw PreconditionError("negative universe size");
    for (const auto& r : vocab.relations) {
        offsets_.push_back(total_);
        std::int64_t size = checked_power(universe_size, r.arity);
        sizes_.push_back(size);
        total_ += size;
    }
}

std::int64_t BitLayout::power(int exponent) const { return checked_power(universe_, exponent); }

std::int64_t BitLayout::tuple_index(std::span<const int> tuple) const
{
    std::int64_t idx = 0;
    for (int e : tuple)
        idx = idx * universe_ + e;
    return idx;
}

Structure::Structure(Vocabulary vocab, int universe_size)
    : vocab_(std::move(vocab)), layout_(vocab_, universe_size)
{
    if (universe_size < vocab_.num_constants)
        throw PreconditionError("universe of size " + std::to_string(universe_size) +
                                " cannot hold " + std::to_string(vocab_.num_constants) +
                                " constants");
    words_.assign(static_cast<std::size_t>((layout_.total_bits() + 63) / 64), 0);
}

int Structure::constant_element(int index) const
{
    if (index < 1 || index > vocab_.num_constants)
        throw PreconditionError("constant index out of range: " + std::to_string(index));
    return universe_size() - vocab_.num_constants + index;
}

std::int64_t Structure::bit_index(const std::string& relation, std::span<const int> tuple) const
{
    auto idx = vocab_.index_of(relation);
    if (!idx)
        throw ValidationError("unknown relation " + relation);
    const auto& sym = vocab_.relations[static_cast<std::size_t>(*idx)];
    if (static_cast<int>(tuple.size()) != sym.arity)
        throw ValidationError("arity mismatch for " + relation);
    std::int64_t t = 0;
    for (int e : tuple) {
        if (e < 1 || e > universe_size())
            throw ValidationError("element " + std::to_string(e) + " outside universe");
        t = t * universe_size() + (e - 1);
    }
    return layout_.offset(*idx) + t;
}

bool Structure::holds(const std::string& relation, std::span<const int> tuple) const
{
    return bit(bit_index(relation, tuple));
}

void Structure::set(const std::string& relation, std::span<const int> tuple, bool value)
{
    set_bit(bit_index(relation, tuple), value);
}

bool Structure::bit(std::int64_t index) const
{
    return (words_[static_cast<std::size_t>(index >> 6)] >> (index & 63)) & 1U;
}

void Structure::set_bit(std::int64_t index, bool value)
{
    auto& w = words_[static_cast<std::size_t>(index >> 6)];
    const std::uint64_t mask = std::uint64_t{1} << (index & 63);
    w = value ? (w | mask) : (w & ~mask);
}

std::vector<std::vector<int>> Structure::tuples(const std::string& relation) const
{
    auto idx = vocab_.index_of(relation);
    if (!idx)
        throw ValidationError("unknown relation " + relation);
    const int arity = vocab_.relations[static_cast<std::size_t>(*idx)].arity;
    const int n = universe_size();
    std::vector<std::vector<int>> out;
    const std::int64_t base = layout_.offset(*idx);
    for (std::int64_t t = 0; t < layout_.tuple_count(*idx); ++t) {
        if (!bit(base + t))
            continue;
        std::vector<int> tuple(static_cast<std::size_t>(arity));
        std::int64_t rest = t;
        for (int k = arity - 1; k >= 0; --k) {
            tuple[static_cast<std::size_t>(k)] = static_cast<int>(rest % n) + 1;
            rest /= n;
        }
        out.push_back(std::move(tuple));
    }
    return out;
}

} // namespace mcf
