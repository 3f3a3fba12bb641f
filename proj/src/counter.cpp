#include "mcf/counter.hpp"

#include "mcf/error.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <mutex>
#include <thread>

namespace mcf {

namespace {

using Clock = std::chrono::steady_clock;

void collect_conjuncts(const Formula& f, std::vector<Formula>& out)
{
    if (f.kind() == FormulaKind::And) {
        collect_conjuncts(f.child(0), out);
        collect_conjuncts(f.child(1), out);
    } else {
        out.push_back(f);
    }
}

/// Bit vector of the walk, bit i stored at word i/64.
class Bits {
public:
    explicit Bits(std::int64_t total) : total_(total), words_(static_cast<std::size_t>((total + 63) / 64), 0) {}

    bool get(std::int64_t i) const { return (words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1U; }
    void set(std::int64_t i) { words_[static_cast<std::size_t>(i >> 6)] |= std::uint64_t{1} << (i & 63); }

    /// Clears bits [from, total).
    void clear_from(std::int64_t from)
    {
        if (from >= total_)
            return;
        std::size_t w = static_cast<std::size_t>(from >> 6);
        const int b = static_cast<int>(from & 63);
        words_[w] &= b == 0 ? 0 : ((std::uint64_t{1} << b) - 1);
        for (++w; w < words_.size(); ++w)
            words_[w] = 0;
    }

    /// Largest index j in [lo, hi] with bit j clear, or -1.
    std::int64_t last_zero(std::int64_t lo, std::int64_t hi) const
    {
        for (std::int64_t j = hi; j >= lo;) {
            const std::uint64_t word = ~words_[static_cast<std::size_t>(j >> 6)];
            const int top = static_cast<int>(j & 63);
            const std::uint64_t mask = top == 63 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (top + 1)) - 1);
            const std::uint64_t zeros = word & mask;
            if (zeros != 0) {
                const std::int64_t found = (j & ~std::int64_t{63}) + 63 - std::countl_zero(zeros);
                return found >= lo ? found : -1;
            }
            j = (j & ~std::int64_t{63}) - 1;
        }
        return -1;
    }

    std::span<const std::uint64_t> words() const { return words_; }

private:
    std::int64_t total_;
    std::vector<std::uint64_t> words_;
};

/// hist[e] = number of satisfied blocks of size 2^e.
using Histogram = std::vector<std::uint64_t>;

void walk_shard(const Evaluator& ev, std::int64_t total, int prefix_len, std::uint64_t shard,
                Histogram& hist)
{
    Bits bits(total);
    for (int i = 0; i < prefix_len; ++i)
        if ((shard >> (prefix_len - 1 - i)) & 1U)
            bits.set(i);
    auto scratch = ev.make_scratch();
    std::int64_t floor = prefix_len - 1;
    for (;;) {
        scratch.floor = floor;
        const Outcome out = ev.run(bits.words(), scratch);
        const std::int64_t k = std::max(out.certificate, floor);
        if (out.value)
            ++hist[static_cast<std::size_t>(total - 1 - k)];
        const std::int64_t j = bits.last_zero(prefix_len, k);
        if (j < 0)
            break;
        bits.set(j);
        bits.clear_from(j + 1);
        floor = j;
    }
}

struct Prepared {
    Formula sentence;
    std::int64_t total = 0;
    int universe = 0;
};

Prepared prepare(const ClassSpec& spec, int n, const CountOptions& opts)
{
    if (n < 0)
        throw PreconditionError("negative n");
    if (auto problems = validate_class_spec(spec); !problems.empty())
        throw ValidationError(problems.front());
    Prepared p;
    p.universe = n + spec.vocab.num_constants;
    p.total = BitLayout(spec.vocab, p.universe).total_bits();
    if (p.total > opts.budget_bits)
        throw BudgetExceeded(std::to_string(p.total) + " interpretation bits over universe size " +
                             std::to_string(p.universe) + " exceed the budget of " +
                             std::to_string(opts.budget_bits));
    p.sentence = opts.reorder ? reorder_conjuncts(spec.sentence) : spec.sentence;
    return p;
}

Histogram count_histogram(const ClassSpec& spec, const Prepared& p, const CountOptions& opts)
{
    const Evaluator ev(p.sentence, spec.vocab, p.universe, {}, opts.limits);
    const int workers = std::max(1, opts.workers);
    int prefix_len = 0;
    if (workers > 1)
        prefix_len = static_cast<int>(std::min<std::int64_t>(p.total, std::bit_width(static_cast<unsigned>(workers - 1)) + 4));
    const std::uint64_t shards = std::uint64_t{1} << prefix_len;

    Histogram total(static_cast<std::size_t>(p.total) + 1, 0);
    std::atomic<std::uint64_t> next{0};
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
        Histogram local(total.size(), 0);
        try {
            for (std::uint64_t s; (s = next.fetch_add(1)) < shards;)
                walk_shard(ev, p.total, prefix_len, s, local);
        } catch (...) {
            std::lock_guard lock(mu);
            if (!failure)
                failure = std::current_exception();
            next = shards;
        }
        std::lock_guard lock(mu);
        for (std::size_t e = 0; e < local.size(); ++e)
            total[e] += local[e];
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return total;
}

} // namespace

Formula reorder_conjuncts(const Formula& sentence)
{
    std::vector<Formula> parts;
    collect_conjuncts(sentence, parts);
    std::stable_sort(parts.begin(), parts.end(), [](const Formula& a, const Formula& b) {
        const int da = quantifier_depth(a), db = quantifier_depth(b);
        if (da != db)
            return da < db;
        return formula_size(a) < formula_size(b);
    });
    return Formula::conj_all(parts);
}

nlohmann::json CountResult::to_json() const
{
    return {{"class", class_name},
            {"n", n},
            {"universe", universe},
            {"count", count.str()},
            {"method", method},
            {"elapsedMs", elapsed.count()}};
}

CountResult count_models(const ClassSpec& spec, int n, const CountOptions& opts, std::string class_name)
{
    const auto start = Clock::now();
    const Prepared p = prepare(spec, n, opts);
    const Histogram hist = count_histogram(spec, p, opts);
    CountResult r;
    r.class_name = std::move(class_name);
    r.n = n;
    r.universe = p.universe;
    for (std::size_t e = 0; e < hist.size(); ++e)
        if (hist[e] != 0)
            r.count += BigInt(hist[e]) << static_cast<unsigned>(e);
    r.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    return r;
}

std::uint64_t count_models_mod(const ClassSpec& spec, int n, std::uint64_t m, const CountOptions& opts)
{
    if (m < 2)
        throw PreconditionError("modulus must be at least 2");
    const Prepared p = prepare(spec, n, opts);
    const Histogram hist = count_histogram(spec, p, opts);
    using u128 = unsigned __int128;
    std::uint64_t result = 0;
    std::uint64_t power = 1 % m;
    for (std::size_t e = 0; e < hist.size(); ++e) {
        result = static_cast<std::uint64_t>((result + static_cast<u128>(hist[e] % m) * power) % m);
        power = static_cast<std::uint64_t>(static_cast<u128>(power) * 2 % m);
    }
    return result;
}

void for_each_model(const ClassSpec& spec, int n, const std::function<bool(const Structure&)>& visit,
                    const CountOptions& opts)
{
    const Prepared p = prepare(spec, n, opts);
    const Evaluator ev(p.sentence, spec.vocab, p.universe, {}, opts.limits);
    Structure current(spec.vocab, p.universe);
    Bits bits(p.total);
    auto scratch = ev.make_scratch();
    std::int64_t floor = -1;
    for (;;) {
        scratch.floor = floor;
        const Outcome out = ev.run(bits.words(), scratch);
        std::int64_t k = std::max(out.certificate, floor);
        if (out.value) {
            std::copy(bits.words().begin(), bits.words().end(), current.words().begin());
            if (!visit(current))
                return;
            k = p.total - 1;
        }
        const std::int64_t j = bits.last_zero(0, k);
        if (j < 0)
            return;
        bits.set(j);
        bits.clear_from(j + 1);
        floor = j;
    }
}

} // namespace mcf
