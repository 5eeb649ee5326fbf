#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct CliResult {
    int exit_code;
    std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(IRVCOMM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, out};
}

std::string data(const std::string& name) {
    return std::string(IRVCOMM_DATA_DIR) + "/" + name;
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/irvcomm_test_") + name;
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
    return path;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

}  // namespace

TEST_CASE("cli tally") {
    CliResult p = run_cli("tally --rule irv " + data("six_voters_p.profile"));
    CHECK(p.exit_code == 0);
    CHECK(p.output == "winner: 0\n");

    CliResult q = run_cli("tally --rule irv " + data("six_voters_q.profile"));
    CHECK(q.exit_code == 0);
    CHECK(q.output == "winner: 0\n");

    CliResult stv = run_cli("tally --rule stv -k 2 " + data("stv_two_seats.profile"));
    CHECK(stv.exit_code == 0);
    CHECK(stv.output == "winners: 0 1\nquota: 4\n");

    CliResult avg = run_cli("tally --rule avg --variant weak " + data("avg_example.profile"));
    CHECK(avg.exit_code == 0);
    CHECK(avg.output == "winner: 0\n");

    CliResult traced = run_cli("tally --rule irv --trace " + data("six_voters_p.profile"));
    CHECK(traced.exit_code == 0);
    CHECK(traced.output.find("winner: 0\n") != std::string::npos);
    CHECK(traced.output.find("format: irvcomm/1\n") != std::string::npos);
    CHECK(traced.output.find("round: 1 active={0,1,2} scores={0:2 1:2 2:2} "
                             "event=eliminated(2)\n") != std::string::npos);
}

TEST_CASE("cli tally tie-break flag") {
    std::string tied = write_temp("tied.profile", "0 > 1 > 2\n1 > 2 > 0\n2 > 0 > 1\n");
    CHECK(run_cli("tally " + tied).output == "winner: 0\n");
    CHECK(run_cli("tally --tb higher " + tied).output == "winner: 1\n");
    CHECK(run_cli("tally --tb 2,0,1 " + tied).output == "winner: 2\n");
    CHECK(run_cli("tally --tb 1,1,0 " + tied).exit_code == 2);
}

TEST_CASE("cli tally rejects malformed input") {
    std::string bad = write_temp("bad.profile", "0 > 0 > 1\n");
    CliResult res = run_cli("tally " + bad);
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("line 1") != std::string::npos);

    CliResult missing = run_cli("tally /tmp/irvcomm_test_does_not_exist.profile");
    CHECK(missing.exit_code == 2);
    CHECK(missing.output.find("error") != std::string::npos);
}

TEST_CASE("cli protocol") {
    CliResult ppr = run_cli("protocol " + data("six_voters_p.profile"));
    CHECK(ppr.exit_code == 0);
    CHECK(ppr.output == "winner: 0, bits: 14\n");

    CliResult sp = run_cli("protocol --sp " + data("single_peaked_18.profile"));
    CHECK(sp.exit_code == 0);
    CHECK(sp.output == "winner: 3, bits: 61\n");

    CliResult bounds = run_cli("protocol --sp --check-bounds " + data("single_peaked_18.profile"));
    CHECK(bounds.exit_code == 0);
    CHECK(bounds.output == "winner: 3, bits: 61\nbounds: ok\n");

    CliResult stv = run_cli("protocol --stv -k 2 " + data("stv_two_seats.profile"));
    CHECK(stv.exit_code == 0);
    CHECK(stv.output == "winners: 0 1, bits: 18\nquota: 4\n");

    CliResult full = run_cli("protocol --transcript " + data("six_voters_p.profile"));
    CHECK(full.exit_code == 0);
    CHECK(full.output.find("protocol: ppr\n") != std::string::npos);
    CHECK(full.output.find("total_bits: 14\n") != std::string::npos);
    CHECK(full.output.find("query: voter=0 kind=top active={0,1,2} answer=0 bits=2\n") !=
          std::string::npos);

    CliResult not_sp = run_cli("protocol --sp " + data("six_voters_p.profile"));
    CHECK(not_sp.exit_code == 2);
    CHECK(not_sp.output.find("not single-peaked") != std::string::npos);
}

TEST_CASE("cli fooling count and verify") {
    CliResult count = run_cli("fooling count --family irv -m 3 -l 1");
    CHECK(count.exit_code == 0);
    auto count_lines = lines_of(count.output);
    REQUIRE(!count_lines.empty());
    CHECK(count_lines[0] == "|F| = 180, ln = 5.1930");

    CliResult big = run_cli("fooling count --family irv -m 30 -l 1");
    CHECK(big.exit_code == 0);
    CHECK(big.output.find("ln = ") != std::string::npos);
    CHECK(big.output.find("per_voter = ") != std::string::npos);

    CliResult verify = run_cli("fooling verify --family irv -m 3 -l 1 --exhaustive");
    CHECK(verify.exit_code == 0);
    CHECK(verify.output == "180 profiles, 16110 pairs, 0 failures\n");

    CliResult report =
        run_cli("fooling verify --family sp -m 2 -l 3 --exhaustive --report");
    CHECK(report.exit_code == 0);
    CHECK(report.output.find("report: fooling-verify\n") != std::string::npos);
    CHECK(report.output.find("profiles_checked: 20\n") != std::string::npos);

    // Sampled mode needs a seed and is reproducible with one.
    CHECK(run_cli("fooling verify --family sp -m 4 -l 3 --sampled 40").exit_code == 2);
    CliResult s1 = run_cli("fooling verify --family sp -m 4 -l 3 --sampled 40 --seed 5");
    CliResult s2 = run_cli("fooling verify --family sp -m 4 -l 3 --sampled 40 --seed 5");
    CHECK(s1.exit_code == 0);
    CHECK(s1.output == s2.output);

    // Exactly one of --exhaustive / --sampled.
    CHECK(run_cli("fooling verify --family irv -m 3 -l 1").exit_code == 2);
    CHECK(run_cli("fooling verify --family irv -m 3 -l 1 --exhaustive --sampled 5 --seed 1")
              .exit_code == 2);
}

TEST_CASE("cli fooling emit feeds back into tally") {
    std::string path = "/tmp/irvcomm_test_emitted.profile";
    CliResult emit = run_cli("fooling emit --family sp -m 4 -l 3 -o " + path);
    CHECK(emit.exit_code == 0);
    CHECK(emit.output == "wrote 12 voters (m=4) to " + path + "\n");
    CliResult tally = run_cli("tally " + path);
    CHECK(tally.output == "winner: 0\n");

    CliResult stdout_emit = run_cli("fooling emit --family irv -m 3 -l 1");
    CHECK(stdout_emit.exit_code == 0);
    auto emitted = lines_of(stdout_emit.output);
    REQUIRE(emitted.size() == 6);
    CHECK(emitted[0] == "0 > 2 > 1");
    CHECK(emitted[5] == "2 > 1 > 0");
}

TEST_CASE("cli asymptotics table") {
    CliResult tiny = run_cli("asymptotics --family irv --m-values 2");
    CHECK(tiny.exit_code == 0);
    auto rows = lines_of(tiny.output);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] ==
          "m,n,ln_cardinality,finite_sum,leading_term,ratio_exact_leading,"
          "ratio_finite_leading");
    CHECK(rows[1].substr(0, 4) == "2,2,");
    // finite_sum column is exactly zero at m=2.
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (start <= rows[1].size()) {
        std::size_t end = rows[1].find(',', start);
        if (end == std::string::npos) end = rows[1].size();
        fields.push_back(rows[1].substr(start, end - start));
        start = end + 1;
    }
    REQUIRE(fields.size() == 7);
    CHECK(fields[3] == "0");

    CliResult twice_a = run_cli("asymptotics --family sp -l 3 --m-values 4,8,16");
    CliResult twice_b = run_cli("asymptotics --family sp -l 3 --m-values 4,8,16");
    CHECK(twice_a.exit_code == 0);
    CHECK(twice_a.output == twice_b.output);
    CHECK(lines_of(twice_a.output).size() == 4);

    CHECK(run_cli("asymptotics --family irv").exit_code == 2);
}

TEST_CASE("cli usage errors and help") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("bogus").exit_code == 2);
    CHECK(run_cli("tally").exit_code == 2);                      // missing file
    CHECK(run_cli("tally --rule banana /dev/null").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("tally --help").exit_code == 0);
    CHECK(run_cli("fooling --help").exit_code == 0);
}
