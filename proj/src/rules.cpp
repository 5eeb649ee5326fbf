#include "irvcomm/rules.hpp"

#include <algorithm>
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

// First-preference scores over the active set.  STV passes per-voter weights;
// the plain rules weight every voter 1.
std::map<Candidate, Rational> first_pref_scores(const Profile& p,
                                                const std::vector<char>& active,
                                                const std::vector<Rational>* weights,
                                                const std::vector<char>* alive) {
    std::map<Candidate, Rational> scores;
    for (Candidate c : active_list(active)) scores[c] = 0;
    for (int v = 0; v < p.voter_count(); ++v) {
        if (alive && !(*alive)[v]) continue;
        Candidate top = p.voter(v).top_among(active);
        if (top < 0) continue;
        scores[top] += weights ? (*weights)[v] : Rational(1);
    }
    return scores;
}

// Least favored among the minimal scores: the candidate the policy would
// let lose every tie.
Candidate pick_elimination(const std::map<Candidate, Rational>& scores,
                           const TieBreakPolicy& tb) {
    Candidate elim = -1;
    for (const auto& [c, s] : scores) {
        if (elim < 0 || s < scores.at(elim) ||
            (s == scores.at(elim) && tb.favors(elim, c)))
            elim = c;
    }
    return elim;
}

// Most favored among the maximal scores.
Candidate pick_election(const std::map<Candidate, Rational>& scores,
                        const TieBreakPolicy& tb) {
    Candidate best = -1;
    for (const auto& [c, s] : scores) {
        if (best < 0 || s > scores.at(best) ||
            (s == scores.at(best) && tb.favors(c, best)))
            best = c;
    }
    return best;
}

}  // namespace

void TieBreakPolicy::validate(int m) const {
    if (kind != ExplicitOrder) return;
    if (static_cast<int>(order.size()) != m)
        throw std::invalid_argument("tie-break order must rank all " +
                                    std::to_string(m) + " candidates");
    std::vector<char> seen(m, 0);
    for (Candidate c : order) {
        if (c < 0 || c >= m)
            throw std::invalid_argument("tie-break order mentions candidate " +
                                        std::to_string(c) +
                                        " outside 0.." + std::to_string(m - 1));
        if (seen[c]++)
            throw std::invalid_argument("tie-break order repeats candidate " +
                                        std::to_string(c));
    }
}

bool TieBreakPolicy::favors(Candidate a, Candidate b) const {
    switch (kind) {
        case LowerIndexWins: return a < b;
        case HigherIndexWins: return a > b;
        case ExplicitOrder: {
            auto pos = [this](Candidate c) {
                return std::find(order.begin(), order.end(), c) - order.begin();
            };
            return pos(a) < pos(b);
        }
    }
    return a < b;
}

long long droop_quota(long long n, int k) {
    if (n < 1) throw std::invalid_argument("droop_quota: need at least one voter");
    if (k < 1) throw std::invalid_argument("droop_quota: need at least one seat");
    return n / (k + 1) + 1;
}

IrvResult irv_tally(const Profile& p, const TieBreakPolicy& tb,
                    bool majority_stop) {
    const int m = p.candidate_count();
    const long long n = p.voter_count();
    tb.validate(m);

    std::vector<char> active(m, 1);
    int alive = m;
    TallyTrace trace;
    while (true) {
        TallyRound round;
        round.active = active_list(active);
        round.scores = first_pref_scores(p, active, nullptr, nullptr);

        if (majority_stop) {
            Candidate leader = pick_election(round.scores, tb);
            if (2 * round.scores.at(leader) > Rational(n)) {
                round.event = {RoundEvent::MajorityStop, {leader}};
                trace.rounds.push_back(std::move(round));
                return {leader, std::move(trace)};
            }
        }
        if (alive == 1) {
            Candidate winner = round.active.front();
            round.event = {RoundEvent::Elected, {winner}};
            trace.rounds.push_back(std::move(round));
            return {winner, std::move(trace)};
        }

        Candidate elim = pick_elimination(round.scores, tb);
        round.event = {RoundEvent::Eliminated, {elim}};
        trace.rounds.push_back(std::move(round));
        active[elim] = 0;
        --alive;
    }
}

IrvResult irv_average_tally(const Profile& p, const AvgConfig& cfg,
                            const TieBreakPolicy& tb) {
    const int m = p.candidate_count();
    const long long n = p.voter_count();
    tb.validate(m);

    std::vector<char> active(m, 1);
    int alive = m;
    TallyTrace trace;
    while (true) {
        TallyRound round;
        round.active = active_list(active);
        round.scores = first_pref_scores(p, active, nullptr, nullptr);

        if (alive == 1) {
            Candidate winner = round.active.front();
            round.event = {RoundEvent::Elected, {winner}};
            trace.rounds.push_back(std::move(round));
            return {winner, std::move(trace)};
        }

        const Rational avg(n, alive);
        std::vector<Candidate> below;
        for (const auto& [c, s] : round.scores) {
            bool out = cfg.variant == AvgConfig::Strict ? s < avg : s <= avg;
            if (out) below.push_back(c);
        }

        if (below.empty() || static_cast<int>(below.size()) == alive) {
            if (cfg.exception == AvgConfig::DeclareSmallestIndexWinner) {
                Candidate winner = round.active.front();
                round.event = {RoundEvent::DeclaredWinner, {winner}};
                trace.rounds.push_back(std::move(round));
                return {winner, std::move(trace)};
            }
            below = {round.active.back()};
        }

        round.event = {RoundEvent::Eliminated, below};
        trace.rounds.push_back(std::move(round));
        for (Candidate c : below) active[c] = 0;
        alive -= static_cast<int>(below.size());
    }
}

StvResult stv_tally(const Profile& p, const StvConfig& cfg,
                    const TieBreakPolicy& tb) {
    const int m = p.candidate_count();
    const long long n = p.voter_count();
    const int k = cfg.k;
    if (k < 1 || k >= m)
        throw std::invalid_argument("stv_tally: seats must satisfy 1 <= k < m, got k=" +
                                    std::to_string(k) + " with m=" + std::to_string(m));
    tb.validate(m);

    const long long quota = droop_quota(n, k);
    const Rational quota_r(quota);

    std::vector<char> active(m, 1);
    std::vector<char> alive(p.voter_count(), 1);
    std::vector<Rational> weight(p.voter_count(), 1);
    int active_count = m;
    std::vector<Candidate> elected;
    TallyTrace trace;

    while (true) {
        TallyRound round;
        round.active = active_list(active);
        round.scores = first_pref_scores(p, active, &weight, &alive);

        Candidate top = pick_election(round.scores, tb);
        if (round.scores.at(top) >= quota_r) {
            const Rational score = round.scores.at(top);
            round.event = {RoundEvent::Elected, {top}};
            trace.rounds.push_back(std::move(round));
            std::vector<int> supporters;
            for (int v = 0; v < p.voter_count(); ++v)
                if (alive[v] && p.voter(v).top_among(active) == top)
                    supporters.push_back(v);
            elected.push_back(top);
            active[top] = 0;
            --active_count;
            if (static_cast<int>(elected.size()) == k) break;

            // Gregory transfer: every supporter keeps the surplus fraction.
            const Rational factor = (score - quota_r) / score;
            for (int v : supporters) {
                weight[v] *= factor;
                if (weight[v] == 0) alive[v] = 0;
            }
        } else {
            Candidate elim = pick_elimination(round.scores, tb);
            round.event = {RoundEvent::Eliminated, {elim}};
            trace.rounds.push_back(std::move(round));
            active[elim] = 0;
            --active_count;
            if (static_cast<int>(elected.size()) + active_count == k) {
                TallyRound rest;
                rest.active = active_list(active);
                rest.scores = first_pref_scores(p, active, &weight, &alive);
                rest.event = {RoundEvent::RemainingElected, rest.active};
                for (Candidate c : rest.active) elected.push_back(c);
                trace.rounds.push_back(std::move(rest));
                break;
            }
        }
    }

    std::sort(elected.begin(), elected.end());
    return {std::move(elected), quota, std::move(trace)};
}

std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    if (denominator(r) == 1) {
        os << numerator(r);
    } else {
        os << numerator(r) << '/' << denominator(r);
    }
    return os.str();
}

namespace {

const char* event_name(RoundEvent::Kind k) {
    switch (k) {
        case RoundEvent::Eliminated: return "eliminated";
        case RoundEvent::Elected: return "elected";
        case RoundEvent::MajorityStop: return "majority_stop";
        case RoundEvent::DeclaredWinner: return "declared_winner";
        case RoundEvent::RemainingElected: return "remaining_elected";
    }
    return "?";
}

void append_candidates(std::ostringstream& os, const std::vector<Candidate>& cs) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) os << ',';
        os << cs[i];
    }
}

}  // namespace

std::string serialize_trace(const TallyTrace& t) {
    std::ostringstream os;
    os << "format: irvcomm/1\n";
    os << "rounds: " << t.rounds.size() << '\n';
    for (std::size_t i = 0; i < t.rounds.size(); ++i) {
        const TallyRound& r = t.rounds[i];
        os << "round: " << (i + 1) << " active={";
        append_candidates(os, r.active);
        os << "} scores={";
        bool first = true;
        for (const auto& [c, s] : r.scores) {
            if (!first) os << ' ';
            first = false;
            os << c << ':' << rational_to_string(s);
        }
        os << "} event=" << event_name(r.event.kind) << '(';
        append_candidates(os, r.event.candidates);
        os << ")\n";
    }
    return os.str();
}

}  // namespace irvcomm
