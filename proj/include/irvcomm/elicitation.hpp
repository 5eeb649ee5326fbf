#pragma once

// Query-driven elicitation protocols.  Each run simulates the communication
// between a coordinator and the voters: the coordinator only learns what the
// recorded queries answer, and the transcript accounts for every bit sent.

#include "irvcomm/ballot.hpp"
#include "irvcomm/rules.hpp"

#include <string>
#include <vector>

namespace irvcomm {

struct Query {
    enum Kind {
        TopAmong,    // "which of these candidates do you rank highest?"
        Direction,   // "is your next choice left or right of the removed one?"
    };
    enum Side { None, Left, Right };

    int voter = -1;
    Kind kind = TopAmong;
    std::vector<Candidate> active;  // TopAmong: the queried set, ascending
    Candidate pivot = -1;           // Direction: the just-removed candidate
    Candidate left = -1;            // Direction: nearest active on each side
    Candidate right = -1;
    Candidate answer_candidate = -1;  // TopAmong answer
    Side answer_side = None;          // Direction answer
    int bits = 0;
};

// One protocol event: the initial elicitation, or an elimination/election
// together with the re-queries it triggered.
struct TranscriptRound {
    enum Kind { Initial, Eliminated, Elected, MajorityStop, RemainingElected };
    Kind kind = Initial;
    std::vector<Candidate> candidates;  // event subject(s); empty for Initial
    int active_before = 0;              // |A| when this round was scored
    int first_query = 0;                // slice into Transcript::queries
    int query_count = 0;
    long long bits = 0;
};

struct Transcript {
    std::string protocol;  // "ppr" | "sp-ppr" | "stv-ppr"
    int m = 0;
    int n = 0;
    std::vector<Query> queries;
    std::vector<TranscriptRound> rounds;
    long long total_bits = 0;
};

struct PprResult {
    Candidate winner;
    Transcript transcript;
};

struct StvPprResult {
    std::vector<Candidate> winners;  // ascending, size k
    long long quota;
    Transcript transcript;
};

// Smallest b with 2^b >= x; ceil_log2(1) = 0.
int ceil_log2(long long x);

// Piecemeal preference revelation: top-among queries at ceil(log2 |A|) bits,
// only the eliminated candidate's supporters are re-queried, and the count
// stops as soon as a candidate holds a strict majority.
PprResult run_ppr(const Profile& p, const TieBreakPolicy& tb = {});

// Single-peaked variant: a re-query is a 1-bit left/right answer relative to
// the axis, asked only when active candidates remain on both sides of the
// eliminated candidate; forced answers cost nothing and are not queries.
PprResult run_sp_ppr(const Profile& p, const Axis& axis);

// Transferable-vote variant: supporters are re-queried both when their
// candidate is elected (after the Gregory weight update drops zero-weight
// voters) and when it is eliminated.
StvPprResult run_stv_ppr(const Profile& p, const StvConfig& cfg,
                         const TieBreakPolicy& tb = {});

// Validates a ppr / sp-ppr transcript against the per-round re-query cap
// (at most floor(n/j) re-queries when j candidates were active) and the
// closed-form worst-case bit bound for its protocol.
bool transcript_bound_check(const Transcript& t, int m, int n);

std::string serialize_transcript(const Transcript& t);

}  // namespace irvcomm
