#pragma once

#include "mcf/class_spec.hpp"
#include "mcf/counter.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mcf {

/// Residues s(start), s(start+1), ... modulo `modulus`.
struct ResidueSequence {
    std::vector<std::uint64_t> values;
    std::uint64_t modulus = 2;
    int start_index = 0;
    std::string source;
    /// Set when the series stopped early; `truncation` says why.
    bool truncated = false;
    std::string truncation;
};

/// Count residues of a class for n in [from, to]. Stops at the first n over budget and marks
/// the result truncated.
ResidueSequence residue_series(const ClassSpec& spec, int from, int to, std::uint64_t m,
                               const CountOptions& opts = {}, std::string source = {});

/// Residues of a named sequence: "fibonacci" (F0 = 0), "bell", "powersOfTwo",
/// "iteratedMatchings" or "iteratedMatchings:p".
ResidueSequence oracle_series(const std::string& name, int from, int to, std::uint64_t m);

enum class VerdictKind { Periodic, AperiodicWitness, Inconclusive };

const char* to_string(VerdictKind kind);

struct PeriodicityVerdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    int preperiod = 0;
    int period = 0;
    int witness_repeats = 0; // full periods observed after the preperiod

    nlohmann::json to_json() const;
};

/// Bound on the (preperiod, period) a sequence is claimed to respect.
struct PeriodBound {
    int max_preperiod = 0;
    int max_period = 1;
};

/// Lexicographically least (preperiod, period) such that values[i] == values[i + period] for
/// every i >= preperiod in the prefix and the period fits at least `threshold` times after the
/// preperiod. Without such a pair the verdict is inconclusive, unless `bound` is given and the
/// prefix refutes every pair within it. Throws PreconditionError for fewer than 4 values.
PeriodicityVerdict detect_ultimate_periodicity(const ResidueSequence& seq, int threshold = 2,
                                               std::optional<PeriodBound> bound = std::nullopt);

/// Least-order c with s(n + d) = sum_{i < d} c[i] * s(n + i) (mod p) over the whole prefix, or
/// nullopt when no order <= max_order fits. Order 0 (the empty vector) means all values are 0.
/// Throws PreconditionError unless p is prime and the prefix has at least 2 * max_order + 2 values.
std::optional<std::vector<std::uint64_t>> find_linear_recurrence_mod_prime(const ResidueSequence& seq,
                                                                           std::uint64_t p, int max_order);

/// Maximal prime-power divisors, by increasing prime: 360 -> 8, 9, 5.
std::vector<std::uint64_t> decompose_modulus(std::uint64_t m);

/// "n,residue" with a header line.
std::string sequence_to_csv(const ResidueSequence& seq);

/// Reads "n,residue" rows (header optional, n contiguous). Throws ValidationError when malformed.
ResidueSequence sequence_from_csv(const std::string& text, std::uint64_t modulus);

} // namespace mcf
