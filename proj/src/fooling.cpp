#include "irvcomm/fooling.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace irvcomm {

namespace {

// Canonical profiles are materialized voter-by-voter; beyond this many voters
// callers must stay in counting/log space.
constexpr long long kMaterializeCap = 2'000'000;
// Exact |F| needs n! with n significant voters; past this cap the factorials
// stop being worth computing and log_cardinality is the right tool.
constexpr long long kExactCap = 100'000;

std::string set_str(const std::vector<Candidate>& cs) {
    std::string out = "{";
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(cs[i]);
    }
    return out + "}";
}

// All signatures for m candidates, lexicographically sorted: every subset of
// [1, m-1] in decreasing order, closed with 0.
std::vector<Signature> all_signatures(int m) {
    if (m > 24)
        throw std::length_error("cannot enumerate the 2^" + std::to_string(m - 1) +
                                " signatures of m=" + std::to_string(m));
    std::vector<Signature> sigs;
    sigs.reserve(1ull << (m - 1));
    for (std::uint64_t mask = 0; mask < (1ull << (m - 1)); ++mask) {
        Signature s;
        for (int c = m - 1; c >= 1; --c)
            if (mask >> (c - 1) & 1) s.push_back(c);
        s.push_back(0);
        sigs.push_back(std::move(s));
    }
    std::sort(sigs.begin(), sigs.end());
    return sigs;
}

// All k-truncated signatures: a decreasing subset of [k, m-1] closed with any
// single candidate below k.
std::vector<Signature> all_stv_signatures(int m, int k) {
    if (m - k > 24)
        throw std::length_error("cannot enumerate the k*2^" + std::to_string(m - k) +
                                " truncated signatures of m=" + std::to_string(m));
    std::vector<Signature> sigs;
    sigs.reserve(static_cast<std::size_t>(k) << (m - k));
    for (std::uint64_t mask = 0; mask < (1ull << (m - k)); ++mask)
        for (Candidate last = 0; last < k; ++last) {
            Signature s;
            for (int c = m - 1; c >= k; --c)
                if (mask >> (c - k) & 1) s.push_back(c);
            s.push_back(last);
            sigs.push_back(std::move(s));
        }
    std::sort(sigs.begin(), sigs.end());
    return sigs;
}

Ranking peak_ranking(int m, Candidate peak) {
    std::vector<Candidate> order;
    order.reserve(m);
    for (int c = peak; c >= 0; --c) order.push_back(c);
    for (int c = peak + 1; c < m; ++c) order.push_back(c);
    return Ranking(std::move(order));
}

bool is_power_of_two(long long x) { return x >= 1 && (x & (x - 1)) == 0; }

int resolve_threads(int requested) {
    long long cap = std::numeric_limits<int>::max();
    if (const char* env = std::getenv("IRV_COMMLAB_THREADS")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) cap = v;
    }
    long long hw = std::thread::hardware_concurrency();
    if (hw < 1) hw = 1;
    long long want = requested >= 1 ? requested : hw;
    return static_cast<int>(std::min(want, cap));
}

// Dynamic work dispatch over [0, items); rethrows the first worker exception.
void parallel_for(long long items, int threads,
                  const std::function<void(long long)>& fn) {
    if (items <= 0) return;
    long long T = std::min<long long>(threads, items);
    if (T <= 1) {
        for (long long i = 0; i < items; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (long long t = 0; t < T; ++t)
        pool.emplace_back([&] {
            try {
                for (;;) {
                    long long i = next.fetch_add(1);
                    if (i >= items) return;
                    fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

bool is_valid_signature(const Signature& s, int m) {
    if (s.empty() || s.back() != 0) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= m) return false;
        if (i && s[i] >= s[i - 1]) return false;
    }
    return true;
}

bool is_valid_stv_signature(const Signature& s, int m, int k) {
    if (k < 1 || k >= m) return false;
    if (s.empty() || s.back() >= k) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= m) return false;
        if (i && s[i] >= s[i - 1]) return false;
        if (i + 1 < s.size() && s[i] < k) return false;
    }
    return true;
}

Signature signature(const Ranking& r) {
    Signature s;
    Candidate lowest = r.size();
    for (Candidate c : r.order()) {
        if (c < lowest) {
            s.push_back(c);
            lowest = c;
            if (c == 0) break;
        }
    }
    return s;
}

Signature stv_signature(const Ranking& r, int k) {
    if (k < 1 || k >= r.size())
        throw std::invalid_argument("stv_signature: seats must satisfy 1 <= k < m, got k=" +
                                    std::to_string(k) + " with m=" + std::to_string(r.size()));
    Signature s;
    Candidate lowest = r.size();
    for (Candidate c : r.order()) {
        if (c < lowest) {
            s.push_back(c);
            lowest = c;
            if (c < k) break;
        }
    }
    return s;
}

Ranking representative(const Signature& s, int m) {
    if (!is_valid_signature(s, m))
        throw std::invalid_argument("representative: " + set_str(s) +
                                    " is not a signature for m=" + std::to_string(m));
    std::vector<char> used(m, 0);
    std::vector<Candidate> order;
    order.reserve(m);
    for (Candidate si : s) {
        order.push_back(si);
        used[si] = 1;
        for (Candidate c = m - 1; c > si; --c)
            if (!used[c]) {
                order.push_back(c);
                used[c] = 1;
            }
    }
    return Ranking(std::move(order));
}

Ranking stv_representative(const Signature& s, int m, int k) {
    if (!is_valid_stv_signature(s, m, k))
        throw std::invalid_argument("stv_representative: " + set_str(s) +
                                    " is not a k=" + std::to_string(k) +
                                    " signature for m=" + std::to_string(m));
    std::vector<char> used(m, 0);
    std::vector<Candidate> order;
    order.reserve(m);
    for (std::size_t i = 0; i < s.size(); ++i) {
        order.push_back(s[i]);
        used[s[i]] = 1;
        if (i + 1 < s.size()) {
            // One filler: the largest unplaced candidate above this entry.
            for (Candidate c = m - 1; c > s[i]; --c)
                if (!used[c]) {
                    order.push_back(c);
                    used[c] = 1;
                    break;
                }
        } else {
            for (Candidate c = m - 1; c >= 0; --c)
                if (!used[c]) {
                    order.push_back(c);
                    used[c] = 1;
                }
        }
    }
    return Ranking(std::move(order));
}

BigInt count_signature(const Signature& s, int m) {
    if (!is_valid_signature(s, m))
        throw std::invalid_argument("count_signature: " + set_str(s) +
                                    " is not a signature for m=" + std::to_string(m));
    std::vector<char> in_sig(m, 0);
    for (Candidate c : s) in_sig[c] = 1;
    BigInt prod = 1;
    for (Candidate c = 1; c < m; ++c)
        if (!in_sig[c]) prod *= c;
    return prod;
}

BigInt count_stv_signature(const Signature& s, int m, int k) {
    if (!is_valid_stv_signature(s, m, k))
        throw std::invalid_argument("count_stv_signature: " + set_str(s) +
                                    " is not a k=" + std::to_string(k) +
                                    " signature for m=" + std::to_string(m));
    std::vector<char> in_prefix(m, 0);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) in_prefix[s[i]] = 1;
    BigInt prod = 1;
    for (Candidate c = 1; c < m; ++c)
        if (!in_prefix[c]) prod *= c;
    return prod;
}

const char* family_name(Family f) {
    switch (f) {
        case Family::Irv: return "irv";
        case Family::Sp: return "sp";
        case Family::Stv: return "stv";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "irv") return Family::Irv;
    if (name == "sp") return Family::Sp;
    if (name == "stv") return Family::Stv;
    throw std::invalid_argument("unknown family '" + name +
                                "' (expected irv, sp, or stv)");
}

void FoolingSpec::validate() const {
    if (m < 1) throw std::invalid_argument("fooling spec: need m >= 1 candidates");
    if (ell < 1) throw std::invalid_argument("fooling spec: need multiplicity ell >= 1");
    if (family == Family::Stv) {
        if (m < 2 || k < 1 || k >= m)
            throw std::invalid_argument(
                "fooling spec: stv needs 1 <= k < m, got k=" + std::to_string(k) +
                " with m=" + std::to_string(m));
        if (tiebreak_voters)
            throw std::invalid_argument(
                "fooling spec: tie-breaking voters exist for the irv and sp families only");
    }
    if (family == Family::Sp) {
        if (!is_power_of_two(m))
            throw std::invalid_argument(
                "fooling spec: the sp family needs m to be a power of two (the halving "
                "cascade fails otherwise), got m=" + std::to_string(m));
        if (ell <= 2)
            throw std::invalid_argument(
                "fooling spec: the sp family needs ell > 2, got ell=" +
                std::to_string(ell));
    }
    // Tie-breaking blocks only leave the winner alone above these multiplicities.
    if (tiebreak_voters && family == Family::Irv &&
        ell <= static_cast<long long>(m) * (m + 1) / 2)
        throw std::invalid_argument(
            "fooling spec: tie-breaking voters need ell > m(m+1)/2 = " +
            std::to_string(static_cast<long long>(m) * (m + 1) / 2));
    if (tiebreak_voters && family == Family::Sp && BigInt(ell) < (BigInt(1) << m))
        throw std::invalid_argument(
            "fooling spec: sp tie-breaking voters need ell >= 2^m");
}

BigInt FoolingSpec::significant_voters() const {
    if (family == Family::Sp) return BigInt(ell) * m;
    return BigInt(ell) * big_factorial(m);
}

long long FoolingSpec::voter_count() const {
    BigInt total = significant_voters();
    if (tiebreak_voters) {
        if (family == Family::Irv)
            total += static_cast<long long>(m) * (m + 1) / 2;
        else
            total += (BigInt(1) << m) - 1;
    }
    if (total > kMaterializeCap)
        throw std::length_error("canonical profile has " + total.str() +
                                " voters; the materialization cap is " +
                                std::to_string(kMaterializeCap));
    return total.convert_to<long long>();
}

double FoolingSpec::log_voters() const {
    if (family == Family::Sp)
        return std::log(static_cast<double>(ell)) + std::log(static_cast<double>(m));
    return std::log(static_cast<double>(ell)) + std::lgamma(m + 1.0);
}

Profile canonical_fooling_profile(const FoolingSpec& spec) {
    spec.validate();
    const long long total = spec.voter_count();
    std::vector<Ranking> voters;
    voters.reserve(total);

    if (spec.family == Family::Sp) {
        for (Candidate peak = 0; peak < spec.m; ++peak) {
            Ranking r = peak_ranking(spec.m, peak);
            for (long long i = 0; i < spec.ell; ++i) voters.push_back(r);
        }
    } else {
        const bool stv = spec.family == Family::Stv;
        std::vector<Signature> sigs =
            stv ? all_stv_signatures(spec.m, spec.k) : all_signatures(spec.m);
        for (const Signature& s : sigs) {
            BigInt copies_big = spec.ell * (stv ? count_stv_signature(s, spec.m, spec.k)
                                                : count_signature(s, spec.m));
            long long copies = copies_big.convert_to<long long>();
            Ranking r = stv ? stv_representative(s, spec.m, spec.k)
                            : representative(s, spec.m);
            for (long long i = 0; i < copies; ++i) voters.push_back(r);
        }
    }

    if (spec.tiebreak_voters) {
        Profile block = tie_breaking_block(spec.m, spec.family);
        voters.insert(voters.end(), block.voters().begin(), block.voters().end());
    }
    return Profile(std::move(voters));
}

Profile tie_breaking_block(int m, Family family) {
    if (m < 1) throw std::invalid_argument("tie_breaking_block: need m >= 1");
    std::vector<Ranking> voters;
    if (family == Family::Irv) {
        // (m - i) voters topping candidate i, the rest ascending.
        for (Candidate i = m - 1; i >= 0; --i) {
            std::vector<Candidate> order{i};
            for (Candidate c = 0; c < m; ++c)
                if (c != i) order.push_back(c);
            Ranking r{std::move(order)};
            for (int copies = 0; copies < m - i; ++copies) voters.push_back(r);
        }
    } else if (family == Family::Sp) {
        if (m > 40)
            throw std::length_error("tie_breaking_block: 2^m - 1 voters do not fit for m=" +
                                    std::to_string(m));
        for (Candidate peak = m - 1; peak >= 0; --peak) {
            Ranking r = peak_ranking(m, peak);
            long long copies = 1LL << (m - 1 - peak);
            for (long long i = 0; i < copies; ++i) voters.push_back(r);
        }
    } else {
        throw std::invalid_argument(
            "tie_breaking_block: defined for the irv and sp families only");
    }
    return Profile(std::move(voters));
}

long long enumerate_fooling_profiles(
    const FoolingSpec& spec, std::optional<long long> limit,
    const std::function<bool(const Profile&)>& sink) {
    spec.validate();
    if (limit && *limit <= 0) return 0;
    const Profile canon = canonical_fooling_profile(spec);
    const long long n_sig = spec.significant_voters().convert_to<long long>();
    std::vector<Ranking> sig(canon.voters().begin(), canon.voters().begin() + n_sig);
    const std::vector<Ranking> block(canon.voters().begin() + n_sig,
                                     canon.voters().end());
    std::sort(sig.begin(), sig.end());  // canonical order is the lex minimum

    long long produced = 0;
    do {
        std::vector<Ranking> all = sig;
        all.insert(all.end(), block.begin(), block.end());
        ++produced;
        if (!sink(Profile(std::move(all)))) break;
        if (limit && produced >= *limit) break;
    } while (std::next_permutation(sig.begin(), sig.end()));
    return produced;
}

BigInt fooling_cardinality(const FoolingSpec& spec) {
    spec.validate();
    const BigInt n_big = spec.significant_voters();
    if (n_big > kExactCap)
        throw std::length_error("fooling_cardinality: exact counting stops at " +
                                std::to_string(kExactCap) +
                                " significant voters (here " + n_big.str() +
                                "); use log_cardinality");
    const long long n = n_big.convert_to<long long>();

    // Multiset group sizes of the significant voters.
    std::vector<long long> groups;
    if (spec.family == Family::Sp) {
        groups.assign(spec.m, spec.ell);
    } else if (spec.family == Family::Stv) {
        for (const Signature& s : all_stv_signatures(spec.m, spec.k))
            groups.push_back(
                (spec.ell * count_stv_signature(s, spec.m, spec.k)).convert_to<long long>());
    } else {
        for (const Signature& s : all_signatures(spec.m))
            groups.push_back((spec.ell * count_signature(s, spec.m)).convert_to<long long>());
    }

    BigInt denom = 1;
    for (long long g : groups) denom *= big_factorial(g);
    return big_factorial(n) / denom;
}

double log_cardinality_per_voter(const FoolingSpec& spec) {
    spec.validate();
    const int m = spec.m;
    const double ell = static_cast<double>(spec.ell);
    const double ln_ell = std::log(ell);

    if (spec.family == Family::Sp) {
        const double n = ell * m;
        return (std::lgamma(n + 1) - m * std::lgamma(ell + 1)) / n;
    }

    const int k = spec.family == Family::Stv ? spec.k : 1;
    const int t = m - k;  // size of the subset universe [k, m-1]
    const double ln_n = ln_ell + std::lgamma(m + 1.0);
    const double ln_base = ln_ell + std::lgamma(static_cast<double>(k));
    const double ln_max_group = ln_ell + std::lgamma(static_cast<double>(m));

    if (t <= 21 && ln_max_group <= 700.0) {
        // Direct evaluation over all subsets; group sizes fit in doubles.
        double base = ell;
        for (int i = 2; i < k; ++i) base *= i;  // ell * (k-1)!
        double denom = 0;
        for (std::uint64_t mask = 0; mask < (1ull << t); ++mask) {
            double y = base;
            for (int c = k; c <= m - 1; ++c)
                if (mask >> (c - k) & 1) y *= c;
            denom += std::lgamma(y + 1);
        }
        double n = ell;
        for (int i = 2; i <= m; ++i) n *= i;  // ell * m!
        return (std::lgamma(n + 1) - k * denom) / n;
    }

    // Regrouped Stirling expansion: the main terms of ln n! - k * sum over
    // subsets of ln(group!) collapse to a per-voter sum, and the sqrt and
    // 1/(12y) corrections have closed subset sums.
    double sum_main = 0;
    for (int c = k; c <= m - 1; ++c)
        sum_main += c * std::log(static_cast<double>(c)) / (c + 1.0);
    double per = ln_n - ln_ell - std::lgamma(static_cast<double>(k)) - sum_main;

    if (ln_n <= 700.0) {
        const double n = std::exp(ln_n);
        const double pow2t = std::exp2(static_cast<double>(t));
        double sum_ln_c = 0;
        for (int c = k; c <= m - 1; ++c) sum_ln_c += std::log(static_cast<double>(c));
        const double ln_2pi = std::log(2 * M_PI);
        const double inv_base = ln_base <= 700.0 ? std::exp(-ln_base) : 0.0;
        const double corr = 0.5 * (ln_2pi + ln_n) + 1.0 / (12 * n) -
                            k * (pow2t * 0.5 * (ln_2pi + ln_base) +
                                 pow2t * 0.25 * sum_ln_c) -
                            inv_base * m / 12.0;
        per += corr / n;
    }
    return per;
}

double log_cardinality(const FoolingSpec& spec) {
    const double per = log_cardinality_per_voter(spec);
    if (spec.log_voters() > 709.0) return per > 0 ? INFINITY : 0.0;
    const double n = spec.significant_voters().convert_to<double>();
    return per * n;
}

AsymptoticEstimate asymptotic_estimate(const FoolingSpec& spec) {
    spec.validate();
    const double lnm = std::log(static_cast<double>(spec.m));
    double per_finite, per_leading;
    if (spec.family == Family::Sp) {
        per_finite = lnm;
        per_leading = lnm;
    } else {
        const int k = spec.family == Family::Stv ? spec.k : 1;
        per_finite = 0;
        for (int j = k; j <= spec.m - 1; ++j)
            per_finite += std::log(static_cast<double>(j)) / (j + 1);
        per_leading = lnm * lnm / 2;
    }
    double n = spec.log_voters() > 709.0
                   ? INFINITY
                   : spec.significant_voters().convert_to<double>();
    return {per_finite * n, per_leading * n, per_finite, per_leading};
}

VotingRule default_rule(const FoolingSpec& spec) {
    spec.validate();
    if (spec.family == Family::Stv) {
        const StvConfig cfg{spec.k};
        return [cfg](const Profile& p) { return stv_tally(p, cfg).winners; };
    }
    return [](const Profile& p) {
        return std::vector<Candidate>{irv_tally(p, {}, true).winner};
    };
}

std::optional<FoolingWitness> verify_fooling_pair(const Profile& p,
                                                  const Profile& q,
                                                  const VotingRule& rule,
                                                  bool full_search) {
    if (p.candidate_count() != q.candidate_count() ||
        p.voter_count() != q.voter_count())
        throw std::invalid_argument("verify_fooling_pair: profiles differ in dimensions");
    std::vector<int> diff;
    for (int v = 0; v < p.voter_count(); ++v)
        if (p.voter(v) != q.voter(v)) diff.push_back(v);
    if (diff.empty())
        throw std::invalid_argument("verify_fooling_pair: the profiles are equal");

    const std::vector<Candidate> w = rule(p);
    if (rule(q) != w)
        throw std::invalid_argument(
            "verify_fooling_pair: the profiles already disagree on the outcome");

    for (int v : diff) {
        auto out = rule(mix(p, q, {v}));
        if (out != w) return FoolingWitness{FoolingWitness::PqSingle, {v}, out};
    }
    for (int v : diff) {
        auto out = rule(mix(q, p, {v}));
        if (out != w) return FoolingWitness{FoolingWitness::QpSingle, {v}, out};
    }

    if (full_search) {
        const int d = static_cast<int>(diff.size());
        if (d > 24)
            throw std::length_error("verify_fooling_pair: full search over 2^" +
                                    std::to_string(d) + " mixes is infeasible");
        for (std::uint32_t mask = 1; mask + 1 < (1u << d); ++mask) {
            int bits = __builtin_popcount(mask);
            if (bits == 1 || bits == d - 1) continue;  // single swaps done above
            std::set<int> take;
            for (int i = 0; i < d; ++i)
                if (mask >> i & 1) take.insert(diff[i]);
            auto out = rule(mix(p, q, take));
            if (out != w)
                return FoolingWitness{FoolingWitness::Multi,
                                      std::vector<int>(take.begin(), take.end()), out};
        }
    }
    return std::nullopt;
}

VerifyReport verify_fooling_set(const FoolingSpec& spec, const VotingRule& rule,
                                const VerifyMode& mode) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();

    VerifyReport rep;
    rep.spec = spec;
    rep.exhaustive = mode.exhaustive;
    rep.log_card = log_cardinality(spec);
    if (spec.family == Family::Stv)
        for (Candidate c = 0; c < spec.k; ++c) rep.expected_outcome.push_back(c);
    else
        rep.expected_outcome = {0};
    rep.threads_used = resolve_threads(mode.threads);

    std::mutex agg;
    std::atomic<long long> outcome_failures{0}, pair_failures{0};
    std::atomic<long long> w_pq{0}, w_qp{0}, w_multi{0};
    auto add_detail = [&](const std::string& line) {
        std::lock_guard<std::mutex> lock(agg);
        if (static_cast<long long>(rep.failure_details.size()) <
            mode.max_failure_details)
            rep.failure_details.push_back(line);
    };
    auto check_pair = [&](const Profile& a, const Profile& b,
                          const std::string& label) {
        auto witness = verify_fooling_pair(a, b, rule, mode.full_mix_search);
        if (!witness) {
            ++pair_failures;
            add_detail("pair " + label + ": no fooling witness");
            return;
        }
        switch (witness->kind) {
            case FoolingWitness::PqSingle: ++w_pq; break;
            case FoolingWitness::QpSingle: ++w_qp; break;
            case FoolingWitness::Multi: ++w_multi; break;
        }
    };

    if (mode.exhaustive) {
        if (spec.significant_voters() > kExactCap)
            throw std::length_error(
                "exhaustive verification cannot enumerate this family; use sampled mode");
        const BigInt card = fooling_cardinality(spec);
        if (card > mode.ceiling)
            throw std::length_error("exhaustive verification would visit " + card.str() +
                                    " profiles, above the ceiling of " +
                                    std::to_string(mode.ceiling));
        std::vector<Profile> profiles;
        profiles.reserve(card.convert_to<std::size_t>());
        enumerate_fooling_profiles(spec, std::nullopt, [&](const Profile& p) {
            profiles.push_back(p);
            return true;
        });
        const long long N = static_cast<long long>(profiles.size());
        rep.profiles_checked = N;

        parallel_for(N, rep.threads_used, [&](long long i) {
            auto out = rule(profiles[i]);
            if (out != rep.expected_outcome) {
                ++outcome_failures;
                add_detail("profile " + std::to_string(i) + ": outcome " +
                           set_str(out) + ", expected " + set_str(rep.expected_outcome));
            }
        });

        if (outcome_failures == 0) {
            rep.pairs_checked = N * (N - 1) / 2;
            parallel_for(N, rep.threads_used, [&](long long i) {
                for (long long j = i + 1; j < N; ++j)
                    check_pair(profiles[i], profiles[j],
                               "(" + std::to_string(i) + "," + std::to_string(j) + ")");
            });
        } else {
            add_detail("pair phase skipped: outcome checks already failed");
        }
    } else {
        if (mode.sample_profiles < 0 || mode.sample_pairs < 0)
            throw std::invalid_argument("sampled verification needs nonnegative sample counts");

        const Profile canon = canonical_fooling_profile(spec);
        const long long n_sig = spec.significant_voters().convert_to<long long>();
        const std::vector<Ranking> base(canon.voters().begin(),
                                        canon.voters().begin() + n_sig);
        const std::vector<Ranking> block(canon.voters().begin() + n_sig,
                                         canon.voters().end());
        std::mt19937_64 rng(mode.seed);
        auto draw = [&] {
            std::vector<Ranking> v = base;
            for (long long i = static_cast<long long>(v.size()) - 1; i > 0; --i)
                std::swap(v[i], v[bounded_rand(rng, static_cast<std::uint64_t>(i) + 1)]);
            v.insert(v.end(), block.begin(), block.end());
            return Profile(std::move(v));
        };

        // Draw everything up front so the seed alone fixes the workload.
        std::vector<Profile> singles;
        singles.reserve(mode.sample_profiles);
        for (long long i = 0; i < mode.sample_profiles; ++i) singles.push_back(draw());
        std::vector<std::pair<Profile, Profile>> pairs;
        pairs.reserve(mode.sample_pairs);
        for (long long i = 0; i < mode.sample_pairs; ++i) {
            Profile a = draw();
            Profile b = draw();
            for (int tries = 0; a == b && tries < 64; ++tries) b = draw();
            if (a == b) continue;  // family too small to sample a distinct pair
            pairs.emplace_back(std::move(a), std::move(b));
        }
        rep.profiles_checked = static_cast<long long>(singles.size());
        rep.pairs_checked = static_cast<long long>(pairs.size());

        parallel_for(rep.profiles_checked, rep.threads_used, [&](long long i) {
            auto out = rule(singles[i]);
            if (out != rep.expected_outcome) {
                ++outcome_failures;
                add_detail("sampled profile " + std::to_string(i) + ": outcome " +
                           set_str(out) + ", expected " + set_str(rep.expected_outcome));
            }
        });
        parallel_for(rep.pairs_checked, rep.threads_used, [&](long long i) {
            const auto& [a, b] = pairs[i];
            if (rule(a) != rep.expected_outcome || rule(b) != rep.expected_outcome) {
                ++outcome_failures;
                add_detail("sampled pair " + std::to_string(i) +
                           ": a member misses the expected outcome");
                return;
            }
            check_pair(a, b, "sample " + std::to_string(i));
        });
    }

    rep.outcome_failures = outcome_failures;
    rep.pair_failures = pair_failures;
    rep.witness_pq = w_pq;
    rep.witness_qp = w_qp;
    rep.witness_multi = w_multi;
    std::sort(rep.failure_details.begin(), rep.failure_details.end());
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

std::string serialize_report(const VerifyReport& r) {
    std::ostringstream os;
    os << "format: irvcomm/1\n";
    os << "report: fooling-verify\n";
    os << "family: " << family_name(r.spec.family) << '\n';
    os << "m: " << r.spec.m << '\n';
    os << "ell: " << r.spec.ell << '\n';
    if (r.spec.family == Family::Stv) os << "k: " << r.spec.k << '\n';
    os << "tiebreak_voters: " << (r.spec.tiebreak_voters ? "yes" : "no") << '\n';
    os << "mode: " << (r.exhaustive ? "exhaustive" : "sampled") << '\n';
    os << "log_cardinality: " << r.log_card << '\n';
    os << "expected: ";
    for (std::size_t i = 0; i < r.expected_outcome.size(); ++i)
        os << (i ? " " : "") << r.expected_outcome[i];
    os << '\n';
    os << "profiles_checked: " << r.profiles_checked << '\n';
    os << "pairs_checked: " << r.pairs_checked << '\n';
    os << "outcome_failures: " << r.outcome_failures << '\n';
    os << "pair_failures: " << r.pair_failures << '\n';
    os << "witness_single_pq: " << r.witness_pq << '\n';
    os << "witness_single_qp: " << r.witness_qp << '\n';
    os << "witness_multi: " << r.witness_multi << '\n';
    os << "threads: " << r.threads_used << '\n';
    os << "elapsed_seconds: " << r.elapsed_seconds << '\n';
    for (const std::string& line : r.failure_details) os << "failure: " << line << '\n';
    return os.str();
}

}  // namespace irvcomm
