#pragma once

// Voting rules on full profiles: instant-runoff, the average-elimination
// variant, and single transferable vote with fractional Gregory transfers.
// All scores and weights are exact rationals and every run produces a
// round-by-round trace.

#include "irvcomm/ballot.hpp"
#include "irvcomm/numeric.hpp"

#include <map>
#include <string>
#include <vector>

namespace irvcomm {

// Who survives a tie.  The default favors lower indices, i.e. among tied
// minimal scores the largest index is eliminated, and among tied maximal
// scores the smallest index is elected first.
struct TieBreakPolicy {
    enum Kind { LowerIndexWins, HigherIndexWins, ExplicitOrder };
    Kind kind = LowerIndexWins;
    std::vector<Candidate> order;  // ExplicitOrder only: most favored first

    static TieBreakPolicy lower_index_wins() { return {}; }
    static TieBreakPolicy higher_index_wins() { return {HigherIndexWins, {}}; }
    static TieBreakPolicy explicit_order(std::vector<Candidate> o) {
        return {ExplicitOrder, std::move(o)};
    }

    void validate(int m) const;
    bool favors(Candidate a, Candidate b) const;  // a survives ties against b
};

struct RoundEvent {
    enum Kind {
        Eliminated,        // candidates removed from the active set
        Elected,           // reached quota (STV) or is the last survivor (IRV)
        MajorityStop,      // IRV early stop: score > n/2
        DeclaredWinner,    // IRV-Average exception declared a winner outright
        RemainingElected,  // STV: |E|+|A| = k filled the remaining seats
    };
    Kind kind;
    std::vector<Candidate> candidates;  // ascending; singleton except where noted
};

struct TallyRound {
    std::vector<Candidate> active;        // ascending, at scoring time
    std::map<Candidate, Rational> scores;  // over the active candidates
    RoundEvent event;
};

struct TallyTrace {
    std::vector<TallyRound> rounds;
};

struct IrvResult {
    Candidate winner;
    TallyTrace trace;
};

struct AvgConfig {
    enum Variant { Strict, Weak };  // eliminate score < avg, or score <= avg
    enum Exception { DeclareSmallestIndexWinner, EliminateLargestIndex };
    Variant variant = Strict;
    Exception exception = EliminateLargestIndex;
};

struct StvConfig {
    int k = 1;  // seats; Droop quota and fractional Gregory transfers are fixed
};

struct StvResult {
    std::vector<Candidate> winners;  // ascending, size k
    long long quota;
    TallyTrace trace;
};

// Droop quota: floor(n/(k+1)) + 1.
long long droop_quota(long long n, int k);

// Rounds eliminate the minimal-score active candidate until one remains; with
// majority_stop the count ends as soon as some score exceeds n/2.
IrvResult irv_tally(const Profile& p, const TieBreakPolicy& tb = {},
                    bool majority_stop = false);

// Per round, all candidates below (strict) or at/below (weak) the average
// score n/|A| are eliminated together; an empty or full elimination set
// triggers the configured exception.
IrvResult irv_average_tally(const Profile& p, const AvgConfig& cfg = {},
                            const TieBreakPolicy& tb = {});

// Elects the max-score candidate whenever it reaches the quota (supporters'
// weights scaled by (score-Q)/score, zero-weight voters dropped), otherwise
// eliminates the min-score candidate; stops at |E| = k, or |E|+|A| = k with
// the remaining actives elected.
StvResult stv_tally(const Profile& p, const StvConfig& cfg,
                    const TieBreakPolicy& tb = {});

std::string rational_to_string(const Rational& r);
std::string serialize_trace(const TallyTrace& t);

}  // namespace irvcomm
