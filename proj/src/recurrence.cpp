#include "mcf/recurrence.hpp"

#include "mcf/counterexample.hpp"
#include "mcf/error.hpp"

#include <charconv>
#include <sstream>

namespace mcf {

ResidueSequence residue_series(const ClassSpec& spec, int from, int to, std::uint64_t m,
                               const CountOptions& opts, std::string source)
{
    if (from < 0 || to < from)
        throw PreconditionError("empty or negative range");
    ResidueSequence seq;
    seq.modulus = m;
    seq.start_index = from;
    seq.source = std::move(source);
    for (int n = from; n <= to; ++n) {
        try {
            seq.values.push_back(count_models_mod(spec, n, m, opts));
        } catch (const BudgetExceeded& e) {
            seq.truncated = true;
            seq.truncation = "stopped at n=" + std::to_string(n) + ": " + e.what();
            break;
        }
    }
    return seq;
}

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m)
{
    std::uint64_t r = 1 % m;
    for (b %= m; e; e >>= 1, b = mulmod(b, b, m))
        if (e & 1U)
            r = mulmod(r, b, m);
    return r;
}

} // namespace

ResidueSequence oracle_series(const std::string& name, int from, int to, std::uint64_t m)
{
    if (from < 0 || to < from)
        throw PreconditionError("empty or negative range");
    if (m < 2)
        throw PreconditionError("modulus must be at least 2");
    ResidueSequence seq;
    seq.modulus = m;
    seq.start_index = from;
    seq.source = name;
    if (name == "fibonacci") {
        std::uint64_t f0 = 0, f1 = 1 % m;
        for (int n = 0; n <= to; ++n) {
            if (n >= from)
                seq.values.push_back(f0);
            const std::uint64_t next = (f0 + f1) % m;
            f0 = f1;
            f1 = next;
        }
    } else if (name == "powersOfTwo") {
        for (int n = from; n <= to; ++n)
            seq.values.push_back(powmod(2, static_cast<std::uint64_t>(n), m));
    } else if (name == "bell") {
        // Bell triangle: each row starts with the last entry of the previous row.
        std::vector<std::uint64_t> row{1 % m};
        for (int n = 0; n <= to; ++n) {
            if (n >= from)
                seq.values.push_back(row.front());
            std::vector<std::uint64_t> next{row.back()};
            for (auto x : row)
                next.push_back((next.back() + x) % m);
            row = std::move(next);
        }
    } else if (name.rfind("iteratedMatchings", 0) == 0) {
        int p = 2;
        if (name.size() > 17) {
            if (name[17] != ':')
                throw ValidationError("unknown oracle '" + name + "'");
            auto [ptr, ec] = std::from_chars(name.data() + 18, name.data() + name.size(), p);
            if (ec != std::errc() || ptr != name.data() + name.size())
                throw ValidationError("bad prime in '" + name + "'");
        }
        if (from < 1)
            throw PreconditionError("iterated matchings start at n = 1");
        for (int n = from; n <= to; ++n)
            seq.values.push_back(static_cast<std::uint64_t>(oracle_iterated_matchings(n, p) % m));
    } else {
        throw ValidationError("unknown oracle '" + name + "'");
    }
    return seq;
}

const char* to_string(VerdictKind kind)
{
    switch (kind) {
    case VerdictKind::Periodic: return "periodic";
    case VerdictKind::AperiodicWitness: return "aperiodicWitness";
    case VerdictKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

nlohmann::json PeriodicityVerdict::to_json() const
{
    nlohmann::json j{{"kind", to_string(kind)}};
    if (kind == VerdictKind::Periodic) {
        j["preperiod"] = preperiod;
        j["period"] = period;
        j["witnessRepeats"] = witness_repeats;
    } else {
        j["preperiod"] = nullptr;
        j["period"] = nullptr;
    }
    return j;
}

PeriodicityVerdict detect_ultimate_periodicity(const ResidueSequence& seq, int threshold,
                                               std::optional<PeriodBound> bound)
{
    const auto& v = seq.values;
    const int len = static_cast<int>(v.size());
    if (len < 4)
        throw PreconditionError("sequence too short: need at least 4 values, got " + std::to_string(len));
    if (threshold < 1)
        throw PreconditionError("witness threshold must be at least 1");

    // tail_ok(r, p): values[i] == values[i + p] for every r <= i < len - p.
    auto tail_ok = [&](int r, int p) {
        for (int i = r; i + p < len; ++i)
            if (v[static_cast<std::size_t>(i)] != v[static_cast<std::size_t>(i + p)])
                return false;
        return true;
    };

    PeriodicityVerdict out;
    for (int r = 0; r < len; ++r) {
        for (int p = 1; r + threshold * p <= len; ++p) {
            if (tail_ok(r, p)) {
                out.kind = VerdictKind::Periodic;
                out.preperiod = r;
                out.period = p;
                out.witness_repeats = (len - r) / p;
                return out;
            }
        }
    }
    if (bound) {
        bool refuted = true;
        for (int p = 1; p <= bound->max_period && refuted; ++p) {
            const int r = std::max(0, bound->max_preperiod);
            if (r + p >= len || tail_ok(r, p))
                refuted = false;
        }
        if (refuted)
            out.kind = VerdictKind::AperiodicWitness;
    }
    return out;
}

std::optional<std::vector<std::uint64_t>> find_linear_recurrence_mod_prime(const ResidueSequence& seq,
                                                                           std::uint64_t p, int max_order)
{
    if (!is_prime(static_cast<int>(p)) || p > 1'000'000'007ULL)
        throw PreconditionError("modulus " + std::to_string(p) + " is not a supported prime");
    if (max_order < 0)
        throw PreconditionError("negative maximum order");
    const int len = static_cast<int>(seq.values.size());
    if (len < 2 * max_order + 2)
        throw PreconditionError("need at least " + std::to_string(2 * max_order + 2) + " values for order " +
                                std::to_string(max_order) + ", got " + std::to_string(len));
    std::vector<std::uint64_t> s;
    for (auto x : seq.values)
        s.push_back(x % p);

    for (int d = 0; d <= max_order; ++d) {
        // Rows n = 0 .. len-d-1 of [s(n) .. s(n+d-1) | s(n+d)], reduced over GF(p).
        std::vector<std::vector<std::uint64_t>> rows;
        for (int n = 0; n + d < len; ++n) {
            std::vector<std::uint64_t> row(s.begin() + n, s.begin() + n + d + 1);
            rows.push_back(std::move(row));
        }
        std::vector<int> pivot_col;
        std::size_t rank = 0;
        bool consistent = true;
        for (int col = 0; col <= d && consistent; ++col) {
            std::size_t pick = rank;
            while (pick < rows.size() && rows[pick][static_cast<std::size_t>(col)] == 0)
                ++pick;
            if (pick == rows.size())
                continue;
            if (col == d) {
                consistent = false; // a row 0 .. 0 | nonzero
                break;
            }
            std::swap(rows[rank], rows[pick]);
            const std::uint64_t inv = powmod(rows[rank][static_cast<std::size_t>(col)], p - 2, p);
            for (auto& x : rows[rank])
                x = mulmod(x, inv, p);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (r == rank || rows[r][static_cast<std::size_t>(col)] == 0)
                    continue;
                const std::uint64_t factor = rows[r][static_cast<std::size_t>(col)];
                for (int c = 0; c <= d; ++c)
                    rows[r][static_cast<std::size_t>(c)] =
                        (rows[r][static_cast<std::size_t>(c)] + p - mulmod(factor, rows[rank][static_cast<std::size_t>(c)], p)) % p;
            }
            pivot_col.push_back(col);
            ++rank;
        }
        if (!consistent)
            continue;
        std::vector<std::uint64_t> c(static_cast<std::size_t>(d), 0);
        for (std::size_t r = 0; r < pivot_col.size(); ++r)
            c[static_cast<std::size_t>(pivot_col[r])] = rows[r][static_cast<std::size_t>(d)];
        return c;
    }
    return std::nullopt;
}

std::vector<std::uint64_t> decompose_modulus(std::uint64_t m)
{
    if (m < 2)
        throw PreconditionError("modulus must be at least 2");
    std::vector<std::uint64_t> out;
    for (std::uint64_t q = 2; q * q <= m; ++q) {
        if (m % q != 0)
            continue;
        std::uint64_t power = 1;
        while (m % q == 0) {
            m /= q;
            power *= q;
        }
        out.push_back(power);
    }
    if (m > 1)
        out.push_back(m);
    return out;
}

std::string sequence_to_csv(const ResidueSequence& seq)
{
    std::ostringstream os;
    os << "n,residue\n";
    for (std::size_t i = 0; i < seq.values.size(); ++i)
        os << seq.start_index + static_cast<int>(i) << ',' << seq.values[i] << '\n';
    return os.str();
}

ResidueSequence sequence_from_csv(const std::string& text, std::uint64_t modulus)
{
    if (modulus < 2)
        throw ValidationError("modulus must be at least 2");
    ResidueSequence seq;
    seq.modulus = modulus;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("line " + std::to_string(line_no) + ": expected 'n,residue'");
        const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
        long long n = 0;
        unsigned long long r = 0;
        auto [pa, ea] = std::from_chars(a.data(), a.data() + a.size(), n);
        auto [pb, eb] = std::from_chars(b.data(), b.data() + b.size(), r);
        const bool numeric = ea == std::errc() && pa == a.data() + a.size() && eb == std::errc() &&
                             pb == b.data() + b.size() && !a.empty() && !b.empty();
        if (!numeric) {
            if (first && seq.values.empty()) {
                first = false;
                continue; // header
            }
            throw ValidationError("line " + std::to_string(line_no) + ": malformed row '" + line + "'");
        }
        first = false;
        if (seq.values.empty())
            seq.start_index = static_cast<int>(n);
        else if (n != seq.start_index + static_cast<long long>(seq.values.size()))
            throw ValidationError("line " + std::to_string(line_no) + ": n values must be contiguous");
        if (r >= modulus)
            throw ValidationError("line " + std::to_string(line_no) + ": residue " + std::to_string(r) +
                                  " not below modulus " + std::to_string(modulus));
        seq.values.push_back(r);
    }
    if (seq.values.empty())
        throw ValidationError("no rows in sequence CSV");
    return seq;
}

} // namespace mcf
