#pragma once

#include "mcf/bigint.hpp"
#include "mcf/class_spec.hpp"
#include "mcf/structure.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mcf {

/// Sentence over one constant a and one ternary R whose models over [n] (a = n) are the
/// canonical encodings of full iterated matching sequences.
ClassSpec build_phi_m();

/// The p-matching variant; build_phi_mp(2) == build_phi_m(). Requires a prime 2 <= p <= 5.
ClassSpec build_phi_mp(int p);

bool is_prime(int p);

/// Levels E_1..E_l of edges {u, v} (1-based, u < v, sorted) over [n].
struct IteratedMatchingSequence {
    int n = 0;
    int p = 2;
    std::vector<std::vector<std::pair<int, int>>> levels;

    friend bool operator==(const IteratedMatchingSequence&, const IteratedMatchingSequence&) = default;
};

/// Checks the level conditions and that every pair of vertices is covered.
bool is_full_sequence(const IteratedMatchingSequence& seq);

/// Number of full iterated p-matching sequences over [n]: each level groups the current
/// components p at a time, so f(1) = 1 and f(n) = PM_p(n) * f(n / p).
BigInt oracle_iterated_matchings(int n, int p = 2);

/// Every full iterated p-matching sequence over [n].
std::vector<IteratedMatchingSequence> enumerate_iterated_matchings(int n, int p = 2);

/// (x, y, z) in R iff {x, y} is in E_i and z lies in the component of a = n in the union of
/// the levels below i. Throws PreconditionError if seq is not full.
Structure encode_canonical(const IteratedMatchingSequence& seq, bool with_constant = true);

struct TrimStage {
    int stage = 8; // number of relations left
    ClassSpec spec;
};

/// Stages 8, 6, 4, 3, 2, 1 starting from the higher-arity elimination of build_phi_m(),
/// each removing relations whose interpretation is forced by the sentence.
std::vector<TrimStage> trim_pipeline(const ClassSpec& spec8);

} // namespace mcf
