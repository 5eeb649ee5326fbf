#pragma once

// Ballot primitives: strict total-order rankings, voter profiles, the text
// format used by the command line tool, profile mixing, single-peakedness
// checks and seeded random generators.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace irvcomm {

// Candidates are indices 0..m-1.
using Candidate = int;

// A strict total order over m candidates, stored top-first together with its
// inverse so position lookups are O(1).
class Ranking {
public:
    explicit Ranking(std::vector<Candidate> order);
    static Ranking identity(int m);

    int size() const { return static_cast<int>(order_.size()); }
    Candidate at(int pos) const { return order_[pos]; }
    Candidate top() const { return order_[0]; }
    int position_of(Candidate c) const;
    const std::vector<Candidate>& order() const { return order_; }

    // Most preferred candidate c with active[c] != 0; -1 if none.
    Candidate top_among(const std::vector<char>& active) const;

    bool operator==(const Ranking& other) const { return order_ == other.order_; }
    bool operator!=(const Ranking& other) const { return !(*this == other); }
    bool operator<(const Ranking& other) const { return order_ < other.order_; }

private:
    std::vector<Candidate> order_;  // order_[i] = candidate in preference position i
    std::vector<int> pos_;          // pos_[c]   = preference position of candidate c
};

// A non-empty sequence of rankings over a common candidate set.  Voter order
// is significant (mixing is defined voter-wise).
class Profile {
public:
    explicit Profile(std::vector<Ranking> voters);

    int candidate_count() const { return m_; }
    int voter_count() const { return static_cast<int>(voters_.size()); }
    const Ranking& voter(int v) const { return voters_[v]; }
    const std::vector<Ranking>& voters() const { return voters_; }

    bool operator==(const Profile& other) const { return voters_ == other.voters_; }
    bool operator!=(const Profile& other) const { return !(*this == other); }

private:
    int m_;
    std::vector<Ranking> voters_;
};

// Left-to-right arrangement of the candidates used by single-peakedness.
class Axis {
public:
    explicit Axis(std::vector<Candidate> order);
    static Axis identity(int m);

    int size() const { return static_cast<int>(order_.size()); }
    Candidate at(int pos) const { return order_[pos]; }
    int position_of(Candidate c) const { return pos_[c]; }

private:
    std::vector<Candidate> order_;
    std::vector<int> pos_;
};

// Raised by the profile text parser; carries the 1-based offending line.
class ProfileParseError : public std::runtime_error {
public:
    ProfileParseError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

// Text format, one ballot group per line:   [count x ] c0 > c1 > ... > c(m-1)
// '#' starts a comment, blank lines are skipped, m is inferred from the data.
Profile parse_profile(std::string_view text);
Profile parse_profile_file(const std::string& path);

// Ungrouped: one line per voter, in voter order.  Grouped: identical rankings
// are collected (stable, by first occurrence) and emitted as "count x ...".
std::string serialize_profile(const Profile& p, bool grouped = false);

// Voter-wise mix: voters in take_from_q get q's ranking, everyone else p's.
Profile mix(const Profile& p, const Profile& q, const std::set<int>& take_from_q);

bool is_single_peaked(const Profile& p, const Axis& axis);

// First witness that a profile is not single-peaked: some voter ranks the
// middle of an axis triple below both endpoints.
struct SinglePeakedViolation {
    int voter;
    Candidate left, mid, right;  // in axis order
};
std::optional<SinglePeakedViolation> find_single_peaked_violation(const Profile& p,
                                                                  const Axis& axis);

// Uniform i.i.d. rankings; deterministic for a fixed seed.
Profile random_profile(int m, int n, std::uint64_t seed);

// Single-peaked w.r.t. the identity axis: grow an interval outward from a
// uniformly chosen peak, picking uniformly among the available sides.
Profile random_single_peaked_profile(int m, int n, std::uint64_t seed);

}  // namespace irvcomm
