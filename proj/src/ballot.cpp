#include "irvcomm/ballot.hpp"

#include "irvcomm/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace irvcomm {

namespace {

std::vector<int> inverse_permutation(const std::vector<Candidate>& order, const char* what) {
    const int m = static_cast<int>(order.size());
    if (m == 0) throw std::invalid_argument(std::string(what) + ": empty candidate list");
    std::vector<int> pos(m, -1);
    for (int i = 0; i < m; ++i) {
        const Candidate c = order[i];
        if (c < 0 || c >= m)
            throw std::invalid_argument(std::string(what) + ": candidate index " +
                                        std::to_string(c) + " out of range for m=" +
                                        std::to_string(m));
        if (pos[c] != -1)
            throw std::invalid_argument(std::string(what) + ": duplicate candidate " +
                                        std::to_string(c));
        pos[c] = i;
    }
    return pos;  // every slot filled: m distinct values in [0,m)
}

}  // namespace

Ranking::Ranking(std::vector<Candidate> order)
    : order_(std::move(order)), pos_(inverse_permutation(order_, "Ranking")) {}

Ranking Ranking::identity(int m) {
    std::vector<Candidate> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    return Ranking(std::move(order));
}

int Ranking::position_of(Candidate c) const {
    if (c < 0 || c >= size()) throw std::out_of_range("Ranking::position_of: bad candidate");
    return pos_[c];
}

Candidate Ranking::top_among(const std::vector<char>& active) const {
    for (const Candidate c : order_)
        if (active[c]) return c;
    return -1;
}

Profile::Profile(std::vector<Ranking> voters) : voters_(std::move(voters)) {
    if (voters_.empty()) throw std::invalid_argument("Profile: needs at least one voter");
    m_ = voters_.front().size();
    for (const Ranking& r : voters_)
        if (r.size() != m_)
            throw std::invalid_argument("Profile: rankings disagree on candidate count");
}

Axis::Axis(std::vector<Candidate> order)
    : order_(std::move(order)), pos_(inverse_permutation(order_, "Axis")) {}

Axis Axis::identity(int m) {
    std::vector<Candidate> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    return Axis(std::move(order));
}

ProfileParseError::ProfileParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

struct LineToken {
    enum Kind { Int, Gt, Times } kind;
    long long value = 0;  // for Int
};

std::vector<LineToken> lex_line(const std::string& line, int lineno) {
    std::vector<LineToken> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char ch = line[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (ch == '>') {
            out.push_back({LineToken::Gt});
            ++i;
        } else if (ch == 'x') {
            out.push_back({LineToken::Times});
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '-') {
            std::size_t j = i + 1;
            while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
            if (j == i + 1 && ch == '-')
                throw ProfileParseError(lineno, "stray '-'");
            out.push_back({LineToken::Int, std::stoll(line.substr(i, j - i))});
            i = j;
        } else {
            throw ProfileParseError(lineno,
                                    std::string("unexpected character '") + ch + "'");
        }
    }
    return out;
}

// Parses one data line into (multiplicity, candidate list).
std::pair<long long, std::vector<Candidate>> parse_line(const std::string& line, int lineno) {
    const std::vector<LineToken> toks = lex_line(line, lineno);
    std::size_t i = 0;
    long long mult = 1;
    if (toks.size() >= 2 && toks[0].kind == LineToken::Int && toks[1].kind == LineToken::Times) {
        mult = toks[0].value;
        if (mult <= 0) throw ProfileParseError(lineno, "multiplicity must be positive");
        i = 2;
    }
    std::vector<Candidate> cands;
    bool expect_int = true;
    for (; i < toks.size(); ++i) {
        if (expect_int) {
            if (toks[i].kind != LineToken::Int)
                throw ProfileParseError(lineno, "expected a candidate index");
            if (toks[i].value < 0)
                throw ProfileParseError(lineno, "candidate index must be non-negative");
            cands.push_back(static_cast<Candidate>(toks[i].value));
        } else if (toks[i].kind != LineToken::Gt) {
            throw ProfileParseError(lineno, "expected '>' between candidates");
        }
        expect_int = !expect_int;
    }
    if (cands.empty()) throw ProfileParseError(lineno, "no candidates on line");
    if (expect_int) throw ProfileParseError(lineno, "dangling '>' at end of line");

    // Each line must list every candidate exactly once.
    const int m = static_cast<int>(cands.size());
    std::vector<char> seen(m, 0);
    for (const Candidate c : cands) {
        if (c >= m)
            throw ProfileParseError(lineno, "candidate " + std::to_string(c) +
                                                " out of range: line lists " +
                                                std::to_string(m) +
                                                " candidates (missing index?)");
        if (seen[c])
            throw ProfileParseError(lineno, "duplicate candidate " + std::to_string(c));
        seen[c] = 1;
    }
    return {mult, std::move(cands)};
}

}  // namespace

Profile parse_profile(std::string_view text) {
    std::vector<Ranking> voters;
    int m = -1;
    int m_line = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const std::size_t hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        auto [mult, cands] = parse_line(line, lineno);
        if (m == -1) {
            m = static_cast<int>(cands.size());
            m_line = lineno;
        } else if (static_cast<int>(cands.size()) != m) {
            throw ProfileParseError(lineno, "line has " + std::to_string(cands.size()) +
                                                " candidates but line " +
                                                std::to_string(m_line) + " has " +
                                                std::to_string(m));
        }
        const Ranking r{cands};
        for (long long i = 0; i < mult; ++i) voters.push_back(r);
    }
    if (voters.empty()) throw ProfileParseError(lineno, "empty profile: no data lines");
    return Profile(std::move(voters));
}

Profile parse_profile_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open profile file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_profile(buf.str());
}

namespace {

void append_ranking(std::string& out, const Ranking& r) {
    for (int i = 0; i < r.size(); ++i) {
        if (i) out += " > ";
        out += std::to_string(r.at(i));
    }
}

}  // namespace

std::string serialize_profile(const Profile& p, bool grouped) {
    std::string out;
    if (!grouped) {
        for (const Ranking& r : p.voters()) {
            append_ranking(out, r);
            out += '\n';
        }
        return out;
    }
    // Stable grouping by first occurrence.
    std::vector<std::pair<Ranking, long long>> groups;
    for (const Ranking& r : p.voters()) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == r; });
        if (it == groups.end())
            groups.emplace_back(r, 1);
        else
            ++it->second;
    }
    for (const auto& [r, count] : groups) {
        out += std::to_string(count);
        out += " x ";
        append_ranking(out, r);
        out += '\n';
    }
    return out;
}

Profile mix(const Profile& p, const Profile& q, const std::set<int>& take_from_q) {
    if (p.candidate_count() != q.candidate_count() || p.voter_count() != q.voter_count())
        throw std::invalid_argument("mix: profiles have different dimensions");
    for (const int v : take_from_q)
        if (v < 0 || v >= p.voter_count())
            throw std::invalid_argument("mix: voter index " + std::to_string(v) +
                                        " out of range");
    std::vector<Ranking> voters;
    voters.reserve(p.voter_count());
    for (int v = 0; v < p.voter_count(); ++v)
        voters.push_back(take_from_q.count(v) ? q.voter(v) : p.voter(v));
    return Profile(std::move(voters));
}

bool is_single_peaked(const Profile& p, const Axis& axis) {
    const int m = p.candidate_count();
    if (axis.size() != m)
        throw std::invalid_argument("is_single_peaked: axis does not cover the candidates");
    // Every prefix of a single-peaked ranking occupies a contiguous stretch of
    // the axis, so each next candidate must extend the stretch by one.
    for (const Ranking& r : p.voters()) {
        int lo = axis.position_of(r.at(0));
        int hi = lo;
        for (int i = 1; i < m; ++i) {
            const int q = axis.position_of(r.at(i));
            if (q == lo - 1)
                --lo;
            else if (q == hi + 1)
                ++hi;
            else
                return false;
        }
    }
    return true;
}

std::optional<SinglePeakedViolation> find_single_peaked_violation(const Profile& p,
                                                                  const Axis& axis) {
    const int m = p.candidate_count();
    if (axis.size() != m)
        throw std::invalid_argument(
            "find_single_peaked_violation: axis does not cover the candidates");
    for (int v = 0; v < p.voter_count(); ++v) {
        const Ranking& r = p.voter(v);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int k = j + 1; k < m; ++k) {
                    const Candidate a = axis.at(i), b = axis.at(j), c = axis.at(k);
                    if (r.position_of(b) > r.position_of(a) &&
                        r.position_of(b) > r.position_of(c))
                        return SinglePeakedViolation{v, a, b, c};
                }
    }
    return std::nullopt;
}

Profile random_profile(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("random_profile: need m >= 1, n >= 1");
    std::mt19937_64 gen(seed);
    std::vector<Ranking> voters;
    voters.reserve(n);
    std::vector<Candidate> order(m);
    for (int v = 0; v < n; ++v) {
        for (int i = 0; i < m; ++i) order[i] = i;
        for (int i = m - 1; i > 0; --i)  // Fisher-Yates
            std::swap(order[i], order[bounded_rand(gen, i + 1)]);
        voters.push_back(Ranking(order));
    }
    return Profile(std::move(voters));
}

Profile random_single_peaked_profile(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("random_single_peaked_profile: need m >= 1, n >= 1");
    std::mt19937_64 gen(seed);
    std::vector<Ranking> voters;
    voters.reserve(n);
    std::vector<Candidate> order;
    for (int v = 0; v < n; ++v) {
        order.clear();
        int lo = static_cast<int>(bounded_rand(gen, m));  // the peak
        int hi = lo;
        order.push_back(lo);
        while (static_cast<int>(order.size()) < m) {
            const bool can_left = lo > 0, can_right = hi < m - 1;
            bool go_left = can_left;
            if (can_left && can_right) go_left = bounded_rand(gen, 2) == 0;
            order.push_back(go_left ? --lo : ++hi);
        }
        voters.push_back(Ranking(order));
    }
    return Profile(std::move(voters));
}

}  // namespace irvcomm
