#include <doctest.h>

#include "irvcomm/ballot.hpp"
#include "irvcomm/elicitation.hpp"
#include "irvcomm/rules.hpp"

#include <algorithm>
#include <string>
#include <vector>

using namespace irvcomm;

namespace {

Profile from_orders(std::vector<std::vector<Candidate>> orders) {
    std::vector<Ranking> voters;
    for (auto& o : orders) voters.emplace_back(std::move(o));
    return Profile(std::move(voters));
}

Profile profile_p() {
    return from_orders({{0, 2, 1}, {0, 2, 1}, {1, 2, 0}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}});
}

const char* kEighteenVoterProfile =
    "4 x 0 > 1 > 2 > 3 > 4\n"
    "2 x 1 > 0 > 2 > 3 > 4\n"
    "2 x 2 > 1 > 0 > 3 > 4\n"
    "3 x 2 > 3 > 4 > 1 > 0\n"
    "4 x 3 > 4 > 2 > 1 > 0\n"
    "3 x 4 > 3 > 2 > 1 > 0\n";

// Oracle: every recorded answer must be recomputable from the hidden ballot.
// Top answers are the voter's favorite inside the queried set; direction
// answers say which of the two flanking candidates the voter prefers.
void check_answers(const Profile& p, const Transcript& t) {
    long long bits = 0;
    for (const Query& q : t.queries) {
        REQUIRE(q.voter >= 0);
        REQUIRE(q.voter < p.voter_count());
        const Ranking& r = p.voter(q.voter);
        if (q.kind == Query::TopAmong) {
            std::vector<char> mask(p.candidate_count(), 0);
            for (Candidate c : q.active) mask[c] = 1;
            CHECK(q.answer_candidate == r.top_among(mask));
            CHECK(q.bits == ceil_log2(static_cast<long long>(q.active.size())));
        } else {
            REQUIRE(q.left >= 0);
            REQUIRE(q.right >= 0);
            bool prefers_left = r.position_of(q.left) < r.position_of(q.right);
            CHECK(q.answer_side == (prefers_left ? Query::Left : Query::Right));
            CHECK(q.bits == 1);
        }
        bits += q.bits;
    }
    CHECK(bits == t.total_bits);

    // Round slices tile the query list; after the initial elicitation the
    // scored active sets shrink strictly (the first event round still sees
    // all m candidates).
    REQUIRE(!t.rounds.empty());
    CHECK(t.rounds[0].kind == TranscriptRound::Initial);
    CHECK(t.rounds[0].active_before == t.m);
    long long covered = 0;
    int last_active = t.m + 1;
    for (std::size_t i = 0; i < t.rounds.size(); ++i) {
        const TranscriptRound& round = t.rounds[i];
        CHECK(round.first_query == covered);
        covered += round.query_count;
        if (i >= 1) {
            CHECK(round.active_before < last_active);
            last_active = round.active_before;
        }
    }
    CHECK(covered == static_cast<long long>(t.queries.size()));
}

std::vector<int> elimination_query_counts(const Transcript& t) {
    std::vector<int> counts;
    for (const TranscriptRound& round : t.rounds)
        if (round.kind == TranscriptRound::Eliminated) counts.push_back(round.query_count);
    return counts;
}

}  // namespace

TEST_CASE("ceil_log2") {
    CHECK(ceil_log2(1) == 0);
    CHECK(ceil_log2(2) == 1);
    CHECK(ceil_log2(3) == 2);
    CHECK(ceil_log2(4) == 2);
    CHECK(ceil_log2(5) == 3);
    CHECK(ceil_log2(1024) == 10);
    CHECK(ceil_log2(1025) == 11);
    CHECK_THROWS_AS(ceil_log2(0), std::invalid_argument);
}

TEST_CASE("ppr on the worked six-voter profile costs 14 bits") {
    Profile p = profile_p();
    PprResult res = run_ppr(p);
    CHECK(res.winner == 0);
    CHECK(res.transcript.total_bits == 14);
    CHECK(res.transcript.protocol == "ppr");
    CHECK(res.transcript.m == 3);
    CHECK(res.transcript.n == 6);
    check_answers(p, res.transcript);

    // 6 initial queries at 2 bits; re-queries at 1 bit after dropping 2, then
    // at 0 bits once a single candidate remains; majority stop closes it.
    REQUIRE(res.transcript.rounds.size() == 4);
    const auto& rounds = res.transcript.rounds;
    CHECK(rounds[0].kind == TranscriptRound::Initial);
    CHECK(rounds[0].query_count == 6);
    CHECK(rounds[0].bits == 12);
    CHECK(rounds[1].kind == TranscriptRound::Eliminated);
    CHECK(rounds[1].candidates == std::vector<Candidate>{2});
    CHECK(rounds[1].active_before == 3);
    CHECK(rounds[1].query_count == 2);
    CHECK(rounds[1].bits == 2);
    CHECK(rounds[2].candidates == std::vector<Candidate>{1});
    CHECK(rounds[2].query_count == 3);
    CHECK(rounds[2].bits == 0);
    CHECK(rounds[3].kind == TranscriptRound::MajorityStop);
    CHECK(rounds[3].candidates == std::vector<Candidate>{0});
    CHECK(rounds[3].query_count == 0);

    CHECK(transcript_bound_check(res.transcript, 3, 6));
}

TEST_CASE("ppr transcript serialization") {
    PprResult res = run_ppr(profile_p());
    std::string text = serialize_transcript(res.transcript);
    CHECK(text.find("format: irvcomm/1\n") == 0);
    CHECK(text.find("protocol: ppr\n") != std::string::npos);
    CHECK(text.find("total_bits: 14\n") != std::string::npos);
    CHECK(text.find("round: 2 kind=eliminated candidates={2} active=3 queries=2 bits=2\n") !=
          std::string::npos);
    CHECK(text.find("query: voter=4 kind=top active={0,1} answer=0 bits=1\n") !=
          std::string::npos);
    CHECK(text.find("query: voter=5 kind=top active={0,1} answer=1 bits=1\n") !=
          std::string::npos);
}

TEST_CASE("ppr single voter answers one query") {
    Profile p = from_orders({{4, 0, 3, 1, 2}});
    PprResult res = run_ppr(p);
    CHECK(res.winner == 4);
    CHECK(res.transcript.total_bits == 3);  // ceil(log2 5)
    CHECK(res.transcript.queries.size() == 1);
    CHECK(transcript_bound_check(res.transcript, 5, 1));
}

TEST_CASE("ppr matches the tally on exhaustive and random profiles") {
    std::vector<std::vector<Candidate>> orders{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int n = 1; n <= 3; ++n) {
        std::vector<int> pick(n, 0);
        while (true) {
            std::vector<std::vector<Candidate>> chosen;
            for (int v = 0; v < n; ++v) chosen.push_back(orders[pick[v]]);
            Profile p = from_orders(std::move(chosen));
            PprResult ppr = run_ppr(p);
            REQUIRE(ppr.winner == irv_tally(p, {}, true).winner);
            check_answers(p, ppr.transcript);
            REQUIRE(transcript_bound_check(ppr.transcript, 3, n));

            int i = n - 1;
            while (i >= 0 && pick[i] == 5) pick[i--] = 0;
            if (i < 0) break;
            ++pick[i];
        }
    }

    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        int m = 2 + static_cast<int>(seed % 7);
        int n = 1 + static_cast<int>((seed * 13) % 50);
        Profile p = random_profile(m, n, 21000 + seed);
        PprResult ppr = run_ppr(p);
        REQUIRE(ppr.winner == irv_tally(p, {}, true).winner);
        check_answers(p, ppr.transcript);
        REQUIRE(transcript_bound_check(ppr.transcript, m, n));
    }
}

TEST_CASE("ppr respects explicit tie-break orders") {
    Profile tied = from_orders({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
    CHECK(run_ppr(tied, TieBreakPolicy::higher_index_wins()).winner == 1);
    CHECK(run_ppr(tied, TieBreakPolicy::explicit_order({2, 0, 1})).winner == 2);
}

TEST_CASE("single-peaked protocol reproduces the worked 18-voter run") {
    Profile sp18 = parse_profile(kEighteenVoterProfile);
    PprResult res = run_sp_ppr(sp18, Axis::identity(5));
    CHECK(res.winner == 3);
    CHECK(res.transcript.total_bits == 61);
    CHECK(res.transcript.protocol == "sp-ppr");
    check_answers(sp18, res.transcript);

    // 18 voters at 3 bits, then per-elimination direction queries: both
    // flanks active around 1 (two queries), 4 extreme (none), 2 interior
    // with five supporters.
    REQUIRE(res.transcript.rounds.size() == 5);
    CHECK(res.transcript.rounds[0].bits == 54);
    CHECK(elimination_query_counts(res.transcript) == std::vector<int>{2, 0, 5});
    CHECK(res.transcript.rounds[1].candidates == std::vector<Candidate>{1});
    CHECK(res.transcript.rounds[2].candidates == std::vector<Candidate>{4});
    CHECK(res.transcript.rounds[3].candidates == std::vector<Candidate>{2});
    CHECK(res.transcript.rounds[4].kind == TranscriptRound::MajorityStop);
    CHECK(res.transcript.rounds[4].candidates == std::vector<Candidate>{3});

    for (const Query& q : res.transcript.queries)
        if (q.kind == Query::Direction) CHECK(q.bits == 1);

    CHECK(transcript_bound_check(res.transcript, 5, 18));
}

TEST_CASE("single-peaked protocol agrees with the tally on seeded profiles") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        int m = 2 + static_cast<int>(seed % 15);
        int n = 1 + static_cast<int>((seed * 7) % 100);
        Profile p = random_single_peaked_profile(m, n, 23000 + seed);
        PprResult sp = run_sp_ppr(p, Axis::identity(m));
        REQUIRE(sp.winner == irv_tally(p, {}, true).winner);
        check_answers(p, sp.transcript);
        REQUIRE(transcript_bound_check(sp.transcript, m, n));
    }
}

TEST_CASE("single-peaked protocol rejects other profiles") {
    Profile not_sp = from_orders({{0, 2, 1}});
    CHECK_THROWS_WITH_AS(run_sp_ppr(not_sp, Axis::identity(3)),
                         doctest::Contains("not single-peaked"), std::invalid_argument);
    // The worked six-voter profile is not single-peaked on the identity axis.
    CHECK_THROWS_AS(run_sp_ppr(profile_p(), Axis::identity(3)), std::invalid_argument);
}

TEST_CASE("single-peaked protocol with one voter") {
    Profile p = from_orders({{2, 3, 1, 0}});
    PprResult res = run_sp_ppr(p, Axis::identity(4));
    CHECK(res.winner == 2);
    CHECK(res.transcript.total_bits == 2);
    CHECK(res.transcript.queries.size() == 1);
    CHECK(transcript_bound_check(res.transcript, 4, 1));
}

TEST_CASE("stv protocol trivial quota") {
    Profile p = from_orders({{0, 1}, {0, 1}, {0, 1}, {1, 0}});
    StvPprResult res = run_stv_ppr(p, StvConfig{1});
    CHECK(res.winners == std::vector<Candidate>{0});
    CHECK(res.quota == 3);
    CHECK(res.transcript.total_bits == 4);  // four 1-bit initial queries
    CHECK(res.transcript.protocol == "stv-ppr");
    REQUIRE(res.transcript.rounds.size() == 2);
    CHECK(res.transcript.rounds[1].kind == TranscriptRound::Elected);
}

TEST_CASE("stv protocol on the worked two-seat profile") {
    Profile p = from_orders({{0, 2, 1, 3}, {0, 2, 1, 3}, {0, 2, 1, 3}, {0, 2, 1, 3},
                             {1, 2, 0, 3}, {1, 2, 0, 3}, {1, 2, 0, 3},
                             {3, 1, 2, 0}, {3, 1, 2, 0}});
    StvPprResult res = run_stv_ppr(p, StvConfig{2});
    CHECK(res.winners == std::vector<Candidate>{0, 1});
    CHECK(res.quota == 4);
    check_answers(p, res.transcript);

    // Electing 0 uses up its supporters entirely (surplus factor 0), so the
    // only bits are the 9 initial 2-bit queries.
    CHECK(res.transcript.total_bits == 18);
    bool saw_remaining = false;
    for (const TranscriptRound& round : res.transcript.rounds)
        if (round.kind == TranscriptRound::RemainingElected) {
            saw_remaining = true;
            CHECK(round.candidates == std::vector<Candidate>{1});
            CHECK(round.query_count == 0);
        }
    CHECK(saw_remaining);
}

TEST_CASE("stv protocol matches stv_tally on seeded profiles") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        int m = 3 + static_cast<int>(seed % 4);
        int k = 1 + static_cast<int>(seed % std::min(3, m - 1));
        int n = 2 + static_cast<int>((seed * 5) % 40);
        Profile p = random_profile(m, n, 27000 + seed);
        StvPprResult proto = run_stv_ppr(p, StvConfig{k});
        StvResult tally = stv_tally(p, StvConfig{k});
        REQUIRE(proto.winners == tally.winners);
        REQUIRE(proto.quota == tally.quota);
        check_answers(p, proto.transcript);
    }
}

TEST_CASE("stv protocol with one seat mirrors ppr query for query") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        int m = 2 + static_cast<int>(seed % 6);
        int n = 1 + 2 * static_cast<int>((seed * 3) % 25);  // odd
        Profile p = random_profile(m, n, 29000 + seed);
        PprResult ppr = run_ppr(p);
        StvPprResult stv = run_stv_ppr(p, StvConfig{1});
        REQUIRE(stv.winners == std::vector<Candidate>{ppr.winner});
        REQUIRE(stv.transcript.total_bits == ppr.transcript.total_bits);
        REQUIRE(stv.transcript.queries.size() == ppr.transcript.queries.size());
        for (std::size_t i = 0; i < ppr.transcript.queries.size(); ++i) {
            const Query &a = ppr.transcript.queries[i], &b = stv.transcript.queries[i];
            REQUIRE(a.voter == b.voter);
            REQUIRE(a.active == b.active);
            REQUIRE(a.answer_candidate == b.answer_candidate);
            REQUIRE(a.bits == b.bits);
        }
    }
}

TEST_CASE("bound check validates caps and rejects foreign transcripts") {
    Profile sp18 = parse_profile(kEighteenVoterProfile);
    Transcript good = run_sp_ppr(sp18, Axis::identity(5)).transcript;
    CHECK(transcript_bound_check(good, 5, 18));

    // Closed-form budget for this shape: 54 initial + 6 + 4 + 3 = 67 bits.
    Transcript fat = good;
    fat.total_bits = 68;
    CHECK_FALSE(transcript_bound_check(fat, 5, 18));
    fat.total_bits = 67;
    CHECK(transcript_bound_check(fat, 5, 18));

    // An elimination round with j actives may re-query at most n/j voters.
    Transcript busy = good;
    for (TranscriptRound& round : busy.rounds)
        if (round.kind == TranscriptRound::Eliminated && round.active_before == 5)
            round.query_count = 4;  // 18/5 allows 3
    CHECK_FALSE(transcript_bound_check(busy, 5, 18));

    Transcript empty;
    empty.protocol = "ppr";
    CHECK_THROWS_AS(transcript_bound_check(empty, 3, 2), std::invalid_argument);

    Profile p = from_orders({{0, 1}, {0, 1}, {1, 0}});
    Transcript stv = run_stv_ppr(p, StvConfig{1}).transcript;
    CHECK_THROWS_AS(transcript_bound_check(stv, 2, 3), std::invalid_argument);
}
