#pragma once

// Fooling-set machinery: ranking signatures and representatives, canonical
// hard profiles for the plain, single-peaked, and transferable-vote settings,
// exact and logarithmic cardinality counts, and verification of the defining
// fooling-set properties.

#include "irvcomm/ballot.hpp"
#include "irvcomm/numeric.hpp"
#include "irvcomm/rules.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace irvcomm {

// A signature is the subsequence of running minima of a ranking, read from
// the most preferred candidate down to candidate 0; it is strictly decreasing
// and ends in 0.  The truncated variant for k seats cuts the list at the
// first entry below k.
using Signature = std::vector<Candidate>;

bool is_valid_signature(const Signature& s, int m);
bool is_valid_stv_signature(const Signature& s, int m, int k);

Signature signature(const Ranking& r);
Signature stv_signature(const Ranking& r, int k);

// Canonical ranking with a given signature: after each entry, the still
// unplaced candidates above it follow in decreasing order.
Ranking representative(const Signature& s, int m);

// Truncated-signature counterpart: each entry except the last is followed by
// the single largest unplaced candidate above it (when one exists), and the
// final entry by everything left in decreasing order.
Ranking stv_representative(const Signature& s, int m, int k);

// Number of rankings with the given signature.
BigInt count_signature(const Signature& s, int m);
BigInt count_stv_signature(const Signature& s, int m, int k);

enum class Family { Irv, Sp, Stv };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct FoolingSpec {
    Family family = Family::Irv;
    int m = 1;         // candidates
    long long ell = 1;  // per-signature (or per-peak) multiplicity
    int k = 1;          // seats; Stv only
    bool tiebreak_voters = false;  // append the tie-breaking block

    void validate() const;               // throws invalid_argument
    BigInt significant_voters() const;   // voters before any tie-breaking block
    long long voter_count() const;       // total voters; throws length_error if
                                         // too large to materialize
    double log_voters() const;           // ln of the significant voter count
};

// The canonical profile: ell * count(s) copies of each signature's
// representative, in lexicographic signature order (single-peaked: ell copies
// of each peak ranking, by peak).
Profile canonical_fooling_profile(const FoolingSpec& spec);

// Extra voters that make every round's loser unique without changing it.
Profile tie_breaking_block(int m, Family family);

// Streams the distinct voter orderings of the canonical profile in
// lexicographic order (any tie-breaking block stays fixed at the end).
// The sink returns false to stop early; returns how many were produced.
long long enumerate_fooling_profiles(
    const FoolingSpec& spec, std::optional<long long> limit,
    const std::function<bool(const Profile&)>& sink);

// |F|: the number of distinct voter orderings, exactly.  Guarded by a size
// cap; use log_cardinality beyond it.
BigInt fooling_cardinality(const FoolingSpec& spec);

// ln |F| and its per-voter density ln|F| / n.  The absolute value overflows
// to +inf once n itself leaves double range; the density never does.
double log_cardinality(const FoolingSpec& spec);
double log_cardinality_per_voter(const FoolingSpec& spec);

struct AsymptoticEstimate {
    double finite_sum;            // n * sum of ln j/(j+1) over the family's range
    double leading_term;          // n (ln m)^2 / 2, or n ln m when single-peaked
    double finite_sum_per_voter;  // the same divided by n
    double leading_per_voter;
};

AsymptoticEstimate asymptotic_estimate(const FoolingSpec& spec);

// Social outcome as a sorted candidate set; single winners are singletons.
using VotingRule = std::function<std::vector<Candidate>(const Profile&)>;

// The rule each family's profiles are hard for: majority-stopped IRV, or
// k-seat STV.
VotingRule default_rule(const FoolingSpec& spec);

struct FoolingWitness {
    enum Kind {
        PqSingle,  // one voter of p replaced by their q ranking
        QpSingle,  // one voter of q replaced by their p ranking
        Multi,     // a larger exchanged set (full search only)
    };
    Kind kind;
    std::vector<int> voters;          // exchanged voter indices, ascending
    std::vector<Candidate> outcome;   // outcome of the mixed profile
};

// A witness that mixing p and q changes the outcome, or nullopt if none is
// found.  Tries single-voter exchanges in both directions first; full_search
// then covers every exchanged subset of the differing voters.
std::optional<FoolingWitness> verify_fooling_pair(const Profile& p,
                                                  const Profile& q,
                                                  const VotingRule& rule,
                                                  bool full_search = false);

struct VerifyMode {
    bool exhaustive = true;
    long long sample_profiles = 0;  // sampled mode: outcome checks
    long long sample_pairs = 0;     // sampled mode: pair checks
    std::uint64_t seed = 0;
    long long ceiling = 100000;     // exhaustive refuses larger families
    int threads = 0;                // 0: IRV_COMMLAB_THREADS, else hardware
    bool full_mix_search = false;
    long long max_failure_details = 20;
};

struct VerifyReport {
    FoolingSpec spec;
    bool exhaustive = true;
    double log_card = 0;
    std::vector<Candidate> expected_outcome;
    long long profiles_checked = 0;
    long long pairs_checked = 0;
    long long outcome_failures = 0;
    long long pair_failures = 0;
    long long witness_pq = 0;     // pairs settled by a p-side single exchange
    long long witness_qp = 0;
    long long witness_multi = 0;
    std::vector<std::string> failure_details;  // capped
    double elapsed_seconds = 0;
    int threads_used = 1;

    bool ok() const { return outcome_failures == 0 && pair_failures == 0; }
};

// Checks that every enumerated (or sampled) profile yields the expected
// outcome and that every pair admits a fooling witness.
VerifyReport verify_fooling_set(const FoolingSpec& spec, const VotingRule& rule,
                                const VerifyMode& mode);

std::string serialize_report(const VerifyReport& r);

}  // namespace irvcomm
