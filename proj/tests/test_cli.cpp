#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wiretap/cli.hpp"

using namespace wiretap;
using namespace wiretap::cli;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(WIRETAP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

// column `name` of data row `row` (0 = first data row)
double column(const std::string& text, const std::string& name, std::size_t row = 0) {
    const auto rows = parse_csv(text);
    REQUIRE(rows.size() > row + 1);
    for (std::size_t c = 0; c < rows[0].size(); ++c) {
        if (rows[0][c] == name) return std::stod(rows[row + 1][c]);
    }
    FAIL("no column " << name);
    return 0.0;
}

const std::string kSym = "--m1 1 --m2 1 --k1 1 --k2 1 --rho 0 --snr-b-db 4 --snr-e-db 4";

}  // namespace

TEST_CASE("number formatting is fixed at 12 significant digits") {
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(1.0 / 3.0) == "0.333333333333");
    CHECK(format_real(2.0 / 3.0 * 1e-20) == "6.66666666667e-21");
    CHECK(format_real(123456789012345.0) == "1.23456789012e+14");
    CHECK(format_real(0.0) == "0");
    for (double db : {-10.0, 0.0, 4.0, 3.0103, 50.0}) CHECK(format_real(linear_to_db(db_to_linear(db))) == format_real(db));
}

TEST_CASE("csv table") {
    CsvTable t({"a", "b"});
    t.add_row({"1", "x"});
    t.add_row({"2", "y"});
    CHECK(t.str() == "a,b\n1,x\n2,y\n");
    CHECK_THROWS(t.add_row({"3"}));
}

TEST_CASE("sweep grid") {
    SweepSpec s;
    s.variable = SweepVariable::k;
    s.start = 1.0;
    s.stop = 4.0;
    s.points = 4;
    CHECK(s.value_at(0) == 1.0);
    CHECK(s.value_at(3) == 4.0);
    CHECK(s.flags_at(2).k1 == 3.0);
    CHECK(s.flags_at(2).k2 == 3.0);
    CHECK(s.rate_at(1) == s.rate);
    s.points = 1;
    CHECK_THROWS_AS(s.validate(), UsageError);
    CHECK_THROWS_AS(parse_sweep_variable("snr"), UsageError);
    CHECK_THROWS_AS(parse_method("exact"), UsageError);
}

TEST_CASE("sweep results keep sweep order whatever the thread count") {
    SweepSpec s;
    s.variable = SweepVariable::rate;
    s.start = 0.0;
    s.stop = 3.0;
    s.points = 7;
    s.fixed.m1 = s.fixed.m2 = 2.0;
    s.fixed.k2 = 2.0;
    s.fixed.rho = 0.5;
    s.fixed.snr_b_db = 4.0;
    const auto one = run_sweep(s, SweepQuantity::sop, EvalSettings{}, 1);
    const auto four = run_sweep(s, SweepQuantity::sop, EvalSettings{}, 4);
    REQUIRE(one.size() == 7);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].index == static_cast<int>(i));
        CHECK(four[i].index == static_cast<int>(i));
        REQUIRE(one[i].result);
        REQUIRE(four[i].result);
        CHECK(one[i].result->value == four[i].result->value);
        if (i) CHECK(one[i].result->value >= one[i - 1].result->value);
    }
}

TEST_CASE("sop command") {
    const Run r = run_cli("sop " + kSym + " --rate 0");
    CHECK(r.code == 0);
    CHECK(column(r.out, "value") == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(column(run_cli("sop " + kSym + " --rate 30").out, "value") >= 1.0 - 1e-6);
    const std::string fig = "--m1 4 --m2 4 --k1 1 --k2 1 --rho 0.9 --snr-b-db 4 --snr-e-db 4 --rate 1";
    const double series = column(run_cli("sop " + fig).out, "value");
    const double oracle = column(run_cli("sop " + fig + " --method oracle").out, "value");
    CHECK(std::abs(series - oracle) < 1e-4);
}

TEST_CASE("pnzsc command") {
    const Run r = run_cli("pnzsc " + kSym);
    CHECK(r.code == 0);
    CHECK(column(r.out, "p_zero") == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(column(r.out, "pnzsc") == doctest::Approx(0.5).epsilon(1e-6));
    const std::string base = "pnzsc --asymptotic --m1 2 --k1 1 --m2 2 --k2 1 --rho 0.5 --snr-e-db 0 --snr-b-db ";
    const double a = column(run_cli(base + "40").out, "p_zero");
    const double b = column(run_cli(base + "43.0103").out, "p_zero");
    CHECK(b / a == doctest::Approx(0.5).epsilon(1e-4));  // alpha_1 = 1
    CHECK(run_cli("pnzsc --asymptotic --m1 2 --k1 2").code == 2);
}

TEST_CASE("mc command is byte-stable") {
    const std::string args = "mc " + kSym + " --rate 0 --samples 200000 --seed 9 --streams 3";
    const Run a = run_cli(args);
    const Run b = run_cli(args + " --threads 1");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const double mean = column(a.out, "mean"), se = column(a.out, "std_err");
    CHECK(std::abs(mean - 0.5) < 3.0 * se);
}

TEST_CASE("exit codes") {
    CHECK(run_cli("sop --no-such-flag").code == 2);
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("sop --rho 1.5").code == 2);
    CHECK(run_cli("sop --method asymptotic --rate 1").code == 2);
    CHECK(run_cli("sweep --start 2 --stop 1").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("config file with command-line override, manifest and plot script") {
    const std::string dir = "wiretap_cli_test_out";
    std::filesystem::create_directories(dir);
    {
        std::ofstream cfg(dir + "/model.conf");
        cfg << "# shared model\nm1 = 4\nm2 = 4\nrho = 0.5\nsnr-b-db = 4\nsnr-e-db = 4\n";
    }
    const Run r = run_cli("sop --config " + dir + "/model.conf --rho 0.2 --rate 1");
    CHECK(r.code == 0);
    CHECK(column(r.out, "m1") == 4.0);
    CHECK(column(r.out, "rho") == 0.2);

    const std::string csv = dir + "/sweep.csv";
    const Run s = run_cli("sweep --config " + dir + "/model.conf --var rate --start 0 --stop 4 --points 9 --out " + csv +
                          " --plot-script " + dir + "/sweep.gp");
    CHECK(s.code == 0);
    std::ifstream in(csv);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    double prev = -1.0;
    for (std::size_t i = 0; i < 9; ++i) {
        const double v = column(text, "sop", i);
        CHECK(v >= prev - 1e-7);
        prev = v;
    }
    std::ifstream man(csv + ".manifest.json");
    const std::string mtext((std::istreambuf_iterator<char>(man)), std::istreambuf_iterator<char>());
    CHECK(mtext.find("\"seed\"") != std::string::npos);
    CHECK(mtext.find("\"points\"") != std::string::npos);
    CHECK(mtext.find("model.conf") != std::string::npos);
    std::ifstream gp(dir + "/sweep.gp");
    const std::string gtext((std::istreambuf_iterator<char>(gp)), std::istreambuf_iterator<char>());
    CHECK(gtext.find("sweep.csv") != std::string::npos);
}

TEST_CASE("validate: quick grid passes and a zero tolerance fails") {
    CHECK(run_cli("validate --quick").code == 0);
    const Run bad = run_cli("validate --quick --oracle-tol 0 --mc-sigmas 0");
    CHECK(bad.code == 3);
    CHECK(bad.out.find("FAIL") != std::string::npos);
}
