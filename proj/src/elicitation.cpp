#include "irvcomm/elicitation.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace irvcomm {

namespace {

std::vector<Candidate> active_list(const std::vector<char>& active) {
    std::vector<Candidate> out;
    for (int c = 0; c < static_cast<int>(active.size()); ++c)
        if (active[c]) out.push_back(c);
    return out;
}

// Ask voter v for their favorite among the active set and record the answer.
Candidate ask_top(Transcript& t, const Profile& p, int v,
                  const std::vector<char>& active,
                  const std::vector<Candidate>& alist, int bits) {
    Query q;
    q.voter = v;
    q.kind = Query::TopAmong;
    q.active = alist;
    q.answer_candidate = p.voter(v).top_among(active);
    q.bits = bits;
    t.queries.push_back(q);
    t.total_bits += bits;
    return q.answer_candidate;
}

template <typename Score>
Candidate most_favored_max(const std::map<Candidate, Score>& scores,
                           const TieBreakPolicy& tb) {
    Candidate best = -1;
    for (const auto& [c, s] : scores)
        if (best < 0 || s > scores.at(best) ||
            (s == scores.at(best) && tb.favors(c, best)))
            best = c;
    return best;
}

template <typename Score>
Candidate least_favored_min(const std::map<Candidate, Score>& scores,
                            const TieBreakPolicy& tb) {
    Candidate elim = -1;
    for (const auto& [c, s] : scores)
        if (elim < 0 || s < scores.at(elim) ||
            (s == scores.at(elim) && tb.favors(elim, c)))
            elim = c;
    return elim;
}

}  // namespace

int ceil_log2(long long x) {
    if (x < 1) throw std::invalid_argument("ceil_log2: argument must be positive");
    int b = 0;
    while ((1LL << b) < x) ++b;
    return b;
}

PprResult run_ppr(const Profile& p, const TieBreakPolicy& tb) {
    const int m = p.candidate_count();
    const int n = p.voter_count();
    tb.validate(m);

    Transcript t;
    t.protocol = "ppr";
    t.m = m;
    t.n = n;

    std::vector<char> active(m, 1);
    int active_count = m;
    std::vector<Candidate> tops(n);

    std::vector<Candidate> alist = active_list(active);
    TranscriptRound init;
    init.kind = TranscriptRound::Initial;
    init.active_before = m;
    init.first_query = 0;
    const int init_bits = ceil_log2(m);
    for (int v = 0; v < n; ++v) {
        tops[v] = ask_top(t, p, v, active, alist, init_bits);
        init.bits += init_bits;
    }
    init.query_count = n;
    t.rounds.push_back(init);

    while (true) {
        std::map<Candidate, long long> scores;
        for (Candidate c : alist) scores[c] = 0;
        for (int v = 0; v < n; ++v) ++scores[tops[v]];

        Candidate leader = most_favored_max(scores, tb);
        if (2 * scores.at(leader) > n) {
            TranscriptRound r;
            r.kind = TranscriptRound::MajorityStop;
            r.candidates = {leader};
            r.active_before = active_count;
            r.first_query = static_cast<int>(t.queries.size());
            t.rounds.push_back(r);
            return {leader, std::move(t)};
        }

        Candidate elim = least_favored_min(scores, tb);
        active[elim] = 0;
        --active_count;
        alist = active_list(active);

        TranscriptRound r;
        r.kind = TranscriptRound::Eliminated;
        r.candidates = {elim};
        r.active_before = active_count + 1;
        r.first_query = static_cast<int>(t.queries.size());
        const int bits = ceil_log2(active_count);
        for (int v = 0; v < n; ++v) {
            if (tops[v] != elim) continue;
            tops[v] = ask_top(t, p, v, active, alist, bits);
            ++r.query_count;
            r.bits += bits;
        }
        t.rounds.push_back(r);
    }
}

PprResult run_sp_ppr(const Profile& p, const Axis& axis) {
    const int m = p.candidate_count();
    const int n = p.voter_count();
    if (auto viol = find_single_peaked_violation(p, axis)) {
        throw std::invalid_argument(
            "profile is not single-peaked on the given axis: voter " +
            std::to_string(viol->voter) + " ranks " + std::to_string(viol->mid) +
            " below both " + std::to_string(viol->left) + " and " +
            std::to_string(viol->right));
    }
    const TieBreakPolicy tb;  // lower index wins

    Transcript t;
    t.protocol = "sp-ppr";
    t.m = m;
    t.n = n;

    std::vector<char> active(m, 1);
    int active_count = m;
    std::vector<Candidate> tops(n);

    std::vector<Candidate> alist = active_list(active);
    TranscriptRound init;
    init.kind = TranscriptRound::Initial;
    init.active_before = m;
    init.first_query = 0;
    const int init_bits = ceil_log2(m);
    for (int v = 0; v < n; ++v) {
        tops[v] = ask_top(t, p, v, active, alist, init_bits);
        init.bits += init_bits;
    }
    init.query_count = n;
    t.rounds.push_back(init);

    while (true) {
        std::map<Candidate, long long> scores;
        for (Candidate c : alist) scores[c] = 0;
        for (int v = 0; v < n; ++v) ++scores[tops[v]];

        Candidate leader = most_favored_max(scores, tb);
        if (2 * scores.at(leader) > n) {
            TranscriptRound r;
            r.kind = TranscriptRound::MajorityStop;
            r.candidates = {leader};
            r.active_before = active_count;
            r.first_query = static_cast<int>(t.queries.size());
            t.rounds.push_back(r);
            return {leader, std::move(t)};
        }

        Candidate elim = least_favored_min(scores, tb);
        active[elim] = 0;
        --active_count;
        alist = active_list(active);

        // Nearest surviving candidates on each side of the eliminated one.
        const int pos = axis.position_of(elim);
        Candidate left = -1, right = -1;
        for (int i = pos - 1; i >= 0; --i)
            if (active[axis.at(i)]) { left = axis.at(i); break; }
        for (int i = pos + 1; i < m; ++i)
            if (active[axis.at(i)]) { right = axis.at(i); break; }

        TranscriptRound r;
        r.kind = TranscriptRound::Eliminated;
        r.candidates = {elim};
        r.active_before = active_count + 1;
        r.first_query = static_cast<int>(t.queries.size());
        for (int v = 0; v < n; ++v) {
            if (tops[v] != elim) continue;
            if (left >= 0 && right >= 0) {
                Candidate truth = p.voter(v).top_among(active);
                if (truth != left && truth != right)
                    throw std::logic_error("single-peaked invariant broken");
                Query q;
                q.voter = v;
                q.kind = Query::Direction;
                q.pivot = elim;
                q.left = left;
                q.right = right;
                q.answer_side = truth == left ? Query::Left : Query::Right;
                q.bits = 1;
                t.queries.push_back(q);
                t.total_bits += 1;
                ++r.query_count;
                r.bits += 1;
                tops[v] = truth;
            } else {
                // Only one side survives: the answer is forced, nothing is sent.
                tops[v] = left >= 0 ? left : right;
                if (tops[v] != p.voter(v).top_among(active))
                    throw std::logic_error("single-peaked invariant broken");
            }
        }
        t.rounds.push_back(r);
    }
}

StvPprResult run_stv_ppr(const Profile& p, const StvConfig& cfg,
                         const TieBreakPolicy& tb) {
    const int m = p.candidate_count();
    const int n = p.voter_count();
    const int k = cfg.k;
    if (k < 1 || k >= m)
        throw std::invalid_argument("run_stv_ppr: seats must satisfy 1 <= k < m, got k=" +
                                    std::to_string(k) + " with m=" + std::to_string(m));
    tb.validate(m);

    const long long quota = droop_quota(n, k);
    const Rational quota_r(quota);

    Transcript t;
    t.protocol = "stv-ppr";
    t.m = m;
    t.n = n;

    std::vector<char> active(m, 1);
    std::vector<char> alive(n, 1);
    std::vector<Rational> weight(n, 1);
    int active_count = m;
    std::vector<Candidate> elected;

    std::vector<Candidate> alist = active_list(active);
    TranscriptRound init;
    init.kind = TranscriptRound::Initial;
    init.active_before = m;
    init.first_query = 0;
    const int init_bits = ceil_log2(m);
    std::vector<Candidate> tops(n);
    for (int v = 0; v < n; ++v) {
        tops[v] = ask_top(t, p, v, active, alist, init_bits);
        init.bits += init_bits;
    }
    init.query_count = n;
    t.rounds.push_back(init);

    while (true) {
        std::map<Candidate, Rational> scores;
        for (Candidate c : alist) scores[c] = 0;
        for (int v = 0; v < n; ++v)
            if (alive[v]) scores[tops[v]] += weight[v];

        Candidate top = most_favored_max(scores, tb);
        if (scores.at(top) >= quota_r) {
            const Rational score = scores.at(top);
            std::vector<int> supporters;
            for (int v = 0; v < n; ++v)
                if (alive[v] && tops[v] == top) supporters.push_back(v);
            elected.push_back(top);
            active[top] = 0;
            --active_count;

            TranscriptRound r;
            r.kind = TranscriptRound::Elected;
            r.candidates = {top};
            r.active_before = active_count + 1;
            r.first_query = static_cast<int>(t.queries.size());
            if (static_cast<int>(elected.size()) == k) {
                t.rounds.push_back(r);
                break;
            }
            alist = active_list(active);
            const int bits = ceil_log2(active_count);
            const Rational factor = (score - quota_r) / score;
            for (int v : supporters) {
                weight[v] *= factor;
                if (weight[v] == 0) {
                    alive[v] = 0;  // spent; never asked again
                    continue;
                }
                tops[v] = ask_top(t, p, v, active, alist, bits);
                ++r.query_count;
                r.bits += bits;
            }
            t.rounds.push_back(r);
        } else {
            Candidate elim = least_favored_min(scores, tb);
            active[elim] = 0;
            --active_count;

            TranscriptRound r;
            r.kind = TranscriptRound::Eliminated;
            r.candidates = {elim};
            r.active_before = active_count + 1;
            r.first_query = static_cast<int>(t.queries.size());
            if (static_cast<int>(elected.size()) + active_count == k) {
                t.rounds.push_back(r);
                TranscriptRound rest;
                rest.kind = TranscriptRound::RemainingElected;
                rest.candidates = active_list(active);
                rest.active_before = active_count;
                rest.first_query = static_cast<int>(t.queries.size());
                for (Candidate c : rest.candidates) elected.push_back(c);
                t.rounds.push_back(rest);
                break;
            }
            alist = active_list(active);
            const int bits = ceil_log2(active_count);
            for (int v = 0; v < n; ++v) {
                if (!alive[v] || tops[v] != elim) continue;
                tops[v] = ask_top(t, p, v, active, alist, bits);
                ++r.query_count;
                r.bits += bits;
            }
            t.rounds.push_back(r);
        }
    }

    std::sort(elected.begin(), elected.end());
    return {std::move(elected), quota, std::move(t)};
}

bool transcript_bound_check(const Transcript& t, int m, int n) {
    if (t.rounds.empty())
        throw std::invalid_argument("transcript has no round structure to check");
    long long cap;
    if (t.protocol == "ppr") {
        long long requeries = 0;
        for (int j = 2; j <= m; ++j) requeries += n / j;
        cap = static_cast<long long>(ceil_log2(m)) * (n + requeries);
    } else if (t.protocol == "sp-ppr") {
        long long directions = 0;
        for (int j = 3; j <= m; ++j) directions += n / j;
        cap = static_cast<long long>(n) * ceil_log2(m) + directions;
    } else {
        throw std::invalid_argument(
            "transcript_bound_check covers ppr and sp-ppr transcripts, got '" +
            t.protocol + "'");
    }

    for (const TranscriptRound& r : t.rounds)
        if (r.kind == TranscriptRound::Eliminated &&
            r.query_count > n / r.active_before)
            return false;
    return t.total_bits <= cap;
}

namespace {

const char* round_kind_name(TranscriptRound::Kind k) {
    switch (k) {
        case TranscriptRound::Initial: return "initial";
        case TranscriptRound::Eliminated: return "eliminated";
        case TranscriptRound::Elected: return "elected";
        case TranscriptRound::MajorityStop: return "majority_stop";
        case TranscriptRound::RemainingElected: return "remaining_elected";
    }
    return "?";
}

void append_set(std::ostringstream& os, const std::vector<Candidate>& cs) {
    os << '{';
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) os << ',';
        os << cs[i];
    }
    os << '}';
}

}  // namespace

std::string serialize_transcript(const Transcript& t) {
    std::ostringstream os;
    os << "format: irvcomm/1\n";
    os << "protocol: " << t.protocol << '\n';
    os << "m: " << t.m << '\n';
    os << "n: " << t.n << '\n';
    os << "total_bits: " << t.total_bits << '\n';
    os << "rounds: " << t.rounds.size() << '\n';
    for (std::size_t i = 0; i < t.rounds.size(); ++i) {
        const TranscriptRound& r = t.rounds[i];
        os << "round: " << (i + 1) << " kind=" << round_kind_name(r.kind);
        if (!r.candidates.empty()) {
            os << " candidates=";
            append_set(os, r.candidates);
        }
        os << " active=" << r.active_before << " queries=" << r.query_count
           << " bits=" << r.bits << '\n';
        for (int qi = r.first_query; qi < r.first_query + r.query_count; ++qi) {
            const Query& q = t.queries[qi];
            os << "query: voter=" << q.voter;
            if (q.kind == Query::TopAmong) {
                os << " kind=top active=";
                append_set(os, q.active);
                os << " answer=" << q.answer_candidate;
            } else {
                os << " kind=direction pivot=" << q.pivot << " left=" << q.left
                   << " right=" << q.right << " answer="
                   << (q.answer_side == Query::Left ? 'L' : 'R');
            }
            os << " bits=" << q.bits << '\n';
        }
    }
    return os.str();
}

}  // namespace irvcomm
