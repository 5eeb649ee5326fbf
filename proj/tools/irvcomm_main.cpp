// Command line front end: tallying, protocol simulation, fooling-set
// construction / counting / verification, and asymptotics tables.
//
// Exit codes: 0 success, 1 a verification found failures, 2 usage or input
// errors (bad flags, malformed profiles, violated preconditions).

#include "irvcomm/ballot.hpp"
#include "irvcomm/elicitation.hpp"
#include "irvcomm/fooling.hpp"
#include "irvcomm/numeric.hpp"
#include "irvcomm/rules.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace irvcomm;

std::vector<Candidate> parse_candidate_list(const std::string& text) {
    std::vector<Candidate> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stoi(item));
    return out;
}

TieBreakPolicy tb_from_option(const std::string& text) {
    if (text == "lower") return TieBreakPolicy::lower_index_wins();
    if (text == "higher") return TieBreakPolicy::higher_index_wins();
    return TieBreakPolicy::explicit_order(parse_candidate_list(text));
}

std::string winners_str(const std::vector<Candidate>& ws) {
    std::string out;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(ws[i]);
    }
    return out;
}

// Plain decimal when the value fits comfortably in a double, scientific
// notation reconstructed from the natural log otherwise.
std::string fmt_from_log(double ln_value) {
    if (ln_value <= 700.0) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.10g", std::exp(ln_value));
        return buf;
    }
    return sci_from_log(ln_value);
}

struct TallyOptions {
    std::string path;
    std::string rule = "irv";
    std::string tb = "lower";
    bool majority_stop = false;
    std::string variant = "strict";
    std::string exception = "eliminate-largest";
    int k = 1;
    bool trace = false;
};

int run_tally(const TallyOptions& opt) {
    const Profile p = parse_profile_file(opt.path);
    const TieBreakPolicy tb = tb_from_option(opt.tb);
    TallyTrace trace;
    if (opt.rule == "irv") {
        IrvResult res = irv_tally(p, tb, opt.majority_stop);
        std::cout << "winner: " << res.winner << '\n';
        trace = std::move(res.trace);
    } else if (opt.rule == "avg") {
        AvgConfig cfg;
        cfg.variant = opt.variant == "weak" ? AvgConfig::Weak : AvgConfig::Strict;
        cfg.exception = opt.exception == "declare-smallest"
                            ? AvgConfig::DeclareSmallestIndexWinner
                            : AvgConfig::EliminateLargestIndex;
        IrvResult res = irv_average_tally(p, cfg, tb);
        std::cout << "winner: " << res.winner << '\n';
        trace = std::move(res.trace);
    } else {  // stv
        StvResult res = stv_tally(p, StvConfig{opt.k}, tb);
        std::cout << "winners: " << winners_str(res.winners) << '\n';
        std::cout << "quota: " << res.quota << '\n';
        trace = std::move(res.trace);
    }
    if (opt.trace) std::cout << serialize_trace(trace);
    return 0;
}

struct ProtocolOptions {
    std::string path;
    bool sp = false;
    bool stv = false;
    int k = 1;
    std::string tb = "lower";
    std::string axis;
    bool transcript = false;
    bool check_bounds = false;
};

int run_protocol(const ProtocolOptions& opt) {
    const Profile p = parse_profile_file(opt.path);
    Transcript t;
    if (opt.stv) {
        StvPprResult res = run_stv_ppr(p, StvConfig{opt.k}, tb_from_option(opt.tb));
        std::cout << "winners: " << winners_str(res.winners)
                  << ", bits: " << res.transcript.total_bits << '\n';
        std::cout << "quota: " << res.quota << '\n';
        t = std::move(res.transcript);
    } else if (opt.sp) {
        Axis axis = opt.axis.empty() ? Axis::identity(p.candidate_count())
                                     : Axis(parse_candidate_list(opt.axis));
        PprResult res = run_sp_ppr(p, axis);
        std::cout << "winner: " << res.winner
                  << ", bits: " << res.transcript.total_bits << '\n';
        t = std::move(res.transcript);
    } else {
        PprResult res = run_ppr(p, tb_from_option(opt.tb));
        std::cout << "winner: " << res.winner
                  << ", bits: " << res.transcript.total_bits << '\n';
        t = std::move(res.transcript);
    }
    if (opt.transcript) std::cout << serialize_transcript(t);
    if (opt.check_bounds) {
        const bool ok = transcript_bound_check(t, p.candidate_count(), p.voter_count());
        std::cout << "bounds: " << (ok ? "ok" : "violated") << '\n';
        if (!ok) return 1;
    }
    return 0;
}

struct FoolingOptions {
    std::string action;  // emit | count | verify
    std::string family = "irv";
    int m = 0;
    long long ell = 1;
    int k = 1;
    bool tiebreak = false;
    std::string out_path;
    bool exhaustive = false;
    long long sampled = -1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    long long ceiling = 100000;
    int threads = 0;
    bool full_search = false;
    std::string rule = "default";
    bool print_report = false;
};

FoolingSpec spec_from_options(const FoolingOptions& opt) {
    FoolingSpec spec;
    spec.family = family_from_name(opt.family);
    spec.m = opt.m;
    spec.ell = opt.ell;
    spec.k = opt.k;
    spec.tiebreak_voters = opt.tiebreak;
    spec.validate();
    return spec;
}

VotingRule rule_from_options(const FoolingOptions& opt, const FoolingSpec& spec) {
    if (opt.rule == "default") return default_rule(spec);
    if (opt.rule == "irv")
        return [](const Profile& p) {
            return std::vector<Candidate>{irv_tally(p, {}, true).winner};
        };
    if (opt.rule == "avg-strict" || opt.rule == "avg-weak") {
        AvgConfig cfg;
        cfg.variant = opt.rule == "avg-weak" ? AvgConfig::Weak : AvgConfig::Strict;
        return [cfg](const Profile& p) {
            return std::vector<Candidate>{irv_average_tally(p, cfg).winner};
        };
    }
    if (opt.rule == "stv") {
        const StvConfig cfg{spec.k};
        return [cfg](const Profile& p) { return stv_tally(p, cfg).winners; };
    }
    throw std::invalid_argument("unknown rule '" + opt.rule +
                                "' (expected default, irv, avg-strict, avg-weak, or stv)");
}

int run_fooling(const FoolingOptions& opt) {
    const FoolingSpec spec = spec_from_options(opt);

    if (opt.action == "emit") {
        const Profile p = canonical_fooling_profile(spec);
        const std::string text = serialize_profile(p, /*grouped=*/false);
        if (opt.out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(opt.out_path);
            if (!out) throw std::invalid_argument("cannot write to " + opt.out_path);
            out << text;
            std::cout << "wrote " << p.voter_count() << " voters (m=" << spec.m
                      << ") to " << opt.out_path << '\n';
        }
        return 0;
    }

    if (opt.action == "count") {
        const double ln = log_cardinality(spec);
        const AsymptoticEstimate est = asymptotic_estimate(spec);
        char lnbuf[48];
        // Four decimals for human scales, scientific for the astronomical ones.
        std::snprintf(lnbuf, sizeof(lnbuf), std::fabs(ln) < 1e15 ? "%.4f" : "%.6g", ln);
        if (spec.significant_voters() <= 100000) {
            const BigInt card = fooling_cardinality(spec);
            std::cout << "|F| = " << card.str() << ", ln = " << lnbuf << '\n';
        } else {
            std::cout << "|F| = " << (std::isinf(ln) ? "(beyond double range)"
                                                     : sci_from_log(ln))
                      << ", ln = "
                      << (std::isinf(ln)
                              ? sci_from_log(std::log(log_cardinality_per_voter(spec)) +
                                             spec.log_voters())
                              : std::string(lnbuf))
                      << '\n';
        }
        std::cout << "per_voter = " << log_cardinality_per_voter(spec) << '\n';
        std::cout << "finite_sum = " << est.finite_sum << '\n';
        std::cout << "leading_term = " << est.leading_term << '\n';
        return 0;
    }

    // verify
    if (opt.exhaustive == (opt.sampled >= 0))
        throw std::invalid_argument("choose exactly one of --exhaustive and --sampled N");
    if (opt.sampled >= 0 && !opt.seed_given)
        throw std::invalid_argument("--sampled needs --seed for reproducibility");
    VerifyMode mode;
    mode.exhaustive = opt.exhaustive;
    mode.sample_profiles = opt.sampled > 0 ? opt.sampled : 0;
    mode.sample_pairs = mode.sample_profiles;
    mode.seed = opt.seed;
    mode.ceiling = opt.ceiling;
    mode.threads = opt.threads;
    mode.full_mix_search = opt.full_search;

    const VerifyReport rep =
        verify_fooling_set(spec, rule_from_options(opt, spec), mode);
    std::cout << rep.profiles_checked << " profiles, " << rep.pairs_checked
              << " pairs, " << (rep.outcome_failures + rep.pair_failures)
              << " failures\n";
    if (opt.print_report) std::cout << serialize_report(rep);
    return rep.ok() ? 0 : 1;
}

struct AsymptoticsOptions {
    std::string family = "irv";
    long long ell = 1;
    int k = 1;
    std::string m_values;
};

int run_asymptotics(const AsymptoticsOptions& opt) {
    const std::vector<Candidate> ms = parse_candidate_list(opt.m_values);
    if (ms.empty()) throw std::invalid_argument("--m-values must list at least one m");
    std::cout << "m,n,ln_cardinality,finite_sum,leading_term,"
                 "ratio_exact_leading,ratio_finite_leading\n";
    for (int m : ms) {
        FoolingSpec spec;
        spec.family = family_from_name(opt.family);
        spec.m = m;
        spec.ell = opt.ell;
        spec.k = opt.k;
        spec.validate();
        const double per_exact = log_cardinality_per_voter(spec);
        const AsymptoticEstimate est = asymptotic_estimate(spec);
        const double ln_n = spec.log_voters();
        char ratios[96];
        std::snprintf(ratios, sizeof(ratios), "%.10g,%.10g",
                      per_exact / est.leading_per_voter,
                      est.finite_sum_per_voter / est.leading_per_voter);
        std::cout << m << ',' << fmt_from_log(ln_n) << ','
                  << fmt_from_log(std::log(per_exact) + ln_n) << ','
                  << (est.finite_sum_per_voter > 0
                          ? fmt_from_log(std::log(est.finite_sum_per_voter) + ln_n)
                          : "0")
                  << ',' << fmt_from_log(std::log(est.leading_per_voter) + ln_n)
                  << ',' << ratios << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRV / STV rules, elicitation protocols, and fooling sets"};
    app.require_subcommand(1);

    TallyOptions tally;
    CLI::App* cmd_tally = app.add_subcommand("tally", "Count a ballot profile");
    cmd_tally->add_option("profile", tally.path, "profile file")->required();
    cmd_tally->add_option("--rule", tally.rule, "irv | avg | stv")
        ->check(CLI::IsMember({"irv", "avg", "stv"}));
    cmd_tally->add_option("--tb", tally.tb, "lower | higher | explicit order c0,c1,...");
    cmd_tally->add_flag("--majority-stop", tally.majority_stop,
                        "stop once a candidate passes n/2 (irv)");
    cmd_tally->add_option("--variant", tally.variant, "strict | weak (avg)")
        ->check(CLI::IsMember({"strict", "weak"}));
    cmd_tally->add_option("--exception", tally.exception,
                          "declare-smallest | eliminate-largest (avg)")
        ->check(CLI::IsMember({"declare-smallest", "eliminate-largest"}));
    cmd_tally->add_option("-k,--seats", tally.k, "seats (stv)");
    cmd_tally->add_flag("--trace", tally.trace, "print the round-by-round trace");

    ProtocolOptions proto;
    CLI::App* cmd_proto = app.add_subcommand("protocol", "Simulate an elicitation protocol");
    cmd_proto->add_option("profile", proto.path, "profile file")->required();
    CLI::Option* sp_flag = cmd_proto->add_flag("--sp", proto.sp, "single-peaked protocol");
    cmd_proto->add_flag("--stv", proto.stv, "transferable-vote protocol")->excludes(sp_flag);
    cmd_proto->add_option("-k,--seats", proto.k, "seats (stv)");
    cmd_proto->add_option("--tb", proto.tb, "lower | higher | explicit order");
    cmd_proto->add_option("--axis", proto.axis, "axis order c0,c1,... (sp; default identity)");
    cmd_proto->add_flag("--transcript", proto.transcript, "print the full query log");
    cmd_proto->add_flag("--check-bounds", proto.check_bounds,
                        "validate the transcript against the worst-case bit bounds");

    FoolingOptions fool;
    CLI::App* cmd_fool = app.add_subcommand("fooling", "Fooling-set construction and checks");
    cmd_fool->require_subcommand(1);
    auto add_spec_flags = [&fool](CLI::App* sub) {
        sub->add_option("--family", fool.family, "irv | sp | stv")->required();
        sub->add_option("-m", fool.m, "candidates")->required();
        sub->add_option("-l,--ell", fool.ell, "per-signature multiplicity");
        sub->add_option("-k,--seats", fool.k, "seats (stv)");
        sub->add_flag("--tiebreak", fool.tiebreak, "append the tie-breaking block");
    };
    CLI::App* fool_emit = cmd_fool->add_subcommand("emit", "write the canonical profile");
    add_spec_flags(fool_emit);
    fool_emit->add_option("-o,--output", fool.out_path, "output file (default stdout)");
    CLI::App* fool_count = cmd_fool->add_subcommand("count", "cardinality and estimates");
    add_spec_flags(fool_count);
    CLI::App* fool_verify = cmd_fool->add_subcommand("verify", "check the fooling property");
    add_spec_flags(fool_verify);
    fool_verify->add_flag("--exhaustive", fool.exhaustive, "enumerate every profile and pair");
    fool_verify->add_option("--sampled", fool.sampled, "check N sampled profiles and pairs");
    CLI::Option* seed_opt =
        fool_verify->add_option("--seed", fool.seed, "sampling seed (required with --sampled)");
    fool_verify->add_option("--ceiling", fool.ceiling, "max |F| for exhaustive mode");
    fool_verify->add_option("--threads", fool.threads,
                            "worker threads (0 = auto, capped by IRV_COMMLAB_THREADS)");
    fool_verify->add_flag("--full-search", fool.full_search,
                          "fall back to all 2^d mixes per pair");
    fool_verify->add_option("--rule", fool.rule,
                            "default | irv | avg-strict | avg-weak | stv");
    fool_verify->add_flag("--report", fool.print_report, "print the full report");

    AsymptoticsOptions asym;
    CLI::App* cmd_asym = app.add_subcommand("asymptotics", "CSV table of counts vs estimates");
    cmd_asym->add_option("--family", asym.family, "irv | sp | stv");
    cmd_asym->add_option("-l,--ell", asym.ell, "per-signature multiplicity");
    cmd_asym->add_option("-k,--seats", asym.k, "seats (stv)");
    cmd_asym->add_option("--m-values", asym.m_values, "comma-separated list of m")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_tally->parsed()) return run_tally(tally);
        if (cmd_proto->parsed()) return run_protocol(proto);
        if (cmd_fool->parsed()) {
            fool.seed_given = seed_opt->count() > 0;
            if (fool_emit->parsed()) fool.action = "emit";
            if (fool_count->parsed()) fool.action = "count";
            if (fool_verify->parsed()) fool.action = "verify";
            return run_fooling(fool);
        }
        if (cmd_asym->parsed()) return run_asymptotics(asym);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
