#pragma once

#include "mcf/bigint.hpp"
#include "mcf/class_spec.hpp"
#include "mcf/evaluator.hpp"
#include "mcf/structure.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

namespace mcf {

struct CountOptions {
    int workers = 1;
    /// Largest number of interpretation bits (sum of N^arity) the counter will walk.
    std::int64_t budget_bits = 40;
    EvalLimits limits;
    /// Put cheap top-level conjuncts first.
    bool reorder = true;
};

struct CountResult {
    std::string class_name;
    int n = 0;        // universe size minus the number of constants
    int universe = 0;
    BigInt count;
    std::chrono::milliseconds elapsed{0};
    std::string method = "enumeration";

    nlohmann::json to_json() const;
};

/// Number of interpretations over [n + constants] satisfying the sentence.
/// Interpretations are walked as a bitmask counter (bit 0 most significant); whenever the
/// evaluator certifies that a prefix decides the sentence, the whole block is added or
/// skipped at once. Work is sharded on a fixed prefix across opts.workers threads.
CountResult count_models(const ClassSpec& spec, int n, const CountOptions& opts = {},
                         std::string class_name = {});

/// count_models(spec, n) mod m without building the big integer.
std::uint64_t count_models_mod(const ClassSpec& spec, int n, std::uint64_t m,
                               const CountOptions& opts = {});

/// Calls visit on every model over [n + constants] in enumeration order, single-threaded.
/// Returning false from visit stops the walk.
void for_each_model(const ClassSpec& spec, int n, const std::function<bool(const Structure&)>& visit,
                    const CountOptions& opts = {});

/// Top-level conjuncts ordered by quantifier depth, then size.
Formula reorder_conjuncts(const Formula& sentence);

} // namespace mcf
