#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pwdyn/cli.hpp"
#include "pwdyn/io.hpp"

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = pwdyn::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

std::string temp_file(const std::string& name, const std::string& body) {
    std::string path = std::string(P_tmpdir) + "/pwdyn_test_" + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST_CASE("farey and symbolic verbs") {
    auto seq = run({"farey", "seq", "--order", "6"});
    CHECK(seq.code == 0);
    auto ls = lines(seq.out);
    REQUIRE(ls.size() == 13);
    CHECK(ls.front() == "0/1");
    CHECK(ls[6] == "1/2");
    CHECK(ls.back() == "1/1");

    auto par = run({"farey", "parents", "5/13"});
    CHECK(lines(par.out) == std::vector<std::string>{"3/8", "2/5"});

    CHECK(run({"symbolic", "word", "2/5"}).out == "LLRLR\n");
    auto bad = run({"symbolic", "word", "2/4"});
    CHECK(bad.code == 2);
    CHECK_FALSE(bad.err.empty());

    auto chk = run({"symbolic", "check", "LRLLR"});
    CHECK(chk.code == 0);
    CHECK(chk.out.find("eta=2/5") != std::string::npos);
    CHECK(chk.out.find("minimal=LLRLR") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"nope"}).code == 2);
    CHECK(run({"farey", "seq", "--order", "0"}).code == 2);
    CHECK(run({"circle", "rho", "--qmax", "x"}).code == 2);
    CHECK(run({"pwmap", "iterate", "--map", "/nonexistent/spec.json"}).code == 2);
    CHECK(run({"pwmap", "iterate", "--map", "{\"left\": {\"kind\": \"cubic\"}}"}).code == 2);
    CHECK(run({"scan", "plane", "--grid", "3by3"}).code == 2);
    auto help = run({"farey", "seq", "--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("--order") != std::string::npos);
}

TEST_CASE("csv layout and map specs") {
    auto r = run({"pwmap", "iterate", "--x0", "0.2", "--n", "2", "--map",
                  R"({"left": {"kind": "linear", "slope": 0.5}, "right": {"kind": "linear", "slope": 0.5},
                      "mu_left": 1, "mu_right": 1})"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 5);
    CHECK(ls[0] == "k,x,symbol");
    CHECK(ls[1].rfind("# config: pwmap iterate", 0) == 0);
    CHECK(ls[2] == "0,0.20000000000000001,R");
    CHECK(ls[3] == "1,-0.90000000000000002,L");

    auto js = run({"pwmap", "iterate", "--n", "1", "--format", "json"});
    CHECK(js.code == 0);
    CHECK(js.out.find("\"columns\"") != std::string::npos);
}

TEST_CASE("config files and flag precedence") {
    std::string cfg = temp_file("cfg.txt", "# budget\nn = 5000\nqmax=20\n");
    auto a = run({"circle", "rho", "--config", cfg});
    REQUIRE(a.code == 0);
    CHECK(a.out.find("n=5000 qmax=20") != std::string::npos);
    auto b = run({"circle", "rho", "--params", cfg, "--qmax", "30"});
    REQUIRE(b.code == 0);
    CHECK(b.out.find("n=5000 qmax=30") != std::string::npos);
    CHECK(run({"circle", "rho", "--config", temp_file("bad.txt", "qmax=0\n")}).code == 2);
    CHECK(run({"circle", "rho", "--config", temp_file("unk.txt", "zeta=1\n")}).code == 2);
    CHECK(run({"circle", "rho", "--config", temp_file("syn.txt", "no equals sign\n")}).code == 2);
}

TEST_CASE("job count does not change output") {
    std::vector<std::vector<std::string>> cmds = {
        {"repro", "fig-adding", "--no-svg", "--samples", "60", "--n", "20000"},
        {"repro", "fig-incrementing", "--no-svg", "--samples", "60"},
        {"model", "if", "scan", "--samples", "12", "--n", "20000"},
        {"model", "planar", "scan", "--samples", "10"},
        {"scan", "plane", "--grid", "6x5", "--range", "-1:1:-0.5:1"},
        {"circle", "seeds", "--seeds", "8", "--n", "5000"},
    };
    for (auto cmd : cmds) {
        auto one = cmd, many = cmd;
        one.insert(one.end(), {"--jobs", "1"});
        many.insert(many.end(), {"--jobs", "4"});
        auto r1 = run(one), r4 = run(many);
        REQUIRE(r1.code == 0);
        CHECK(r1.out == r4.out);
        CHECK(lines(r1.out).size() > 2);
    }
}

TEST_CASE("svg output") {
    std::string path = std::string(P_tmpdir) + "/pwdyn_test_fig.svg";
    std::remove(path.c_str());
    auto r = run({"repro", "fig-incrementing", "--samples", "30", "--svg", path});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    std::string head;
    std::getline(in, head);
    CHECK(head.rfind("<svg", 0) == 0);
}

TEST_CASE("fig-staircase resolves the staircase") {
    auto r = run({"repro", "fig-staircase", "--no-svg", "--samples", "500"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 502);
    std::size_t unresolved = 0;
    double prev = -1.0;
    for (std::size_t i = 2; i < ls.size(); ++i) {
        std::vector<std::string> cells;
        std::stringstream ss(ls[i]);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (cells.size() < 5 || cells[3].empty()) {
            ++unresolved;
            continue;
        }
        double eta = std::stod(cells[3]) / std::stod(cells[4]);
        CHECK(eta >= prev);
        prev = eta;
    }
    CHECK(unresolved * 20 <= 500);
}

TEST_CASE("named model map specs") {
    auto relay = pwdyn::load_map_spec(R"({"model": "relay", "a": -0.2, "k": -1, "T": 0.1, "y_star": 0.5})");
    CHECK(relay.mu_left > 0);
    CHECK(relay.mu_right > 0);
    auto r = run({"circle", "rho", "--n", "20000", "--map", R"({"model": "relay", "y_star": 0.0})"});
    CHECK(r.code == 0);
    CHECK(lines(r.out).size() == 3);
    auto fire = pwdyn::load_map_spec(R"({"model": "if", "A": 2.6})");
    CHECK(fire.map().mu_left() > 0);
    CHECK_THROWS_AS(pwdyn::load_map_spec(R"({"model": "pendulum"})"), pwdyn::ConfigError);
    CHECK_THROWS_AS(pwdyn::load_map_spec(R"({"model": "if"})"), pwdyn::ConfigError);
}

TEST_CASE("io helpers") {
    using namespace pwdyn;
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0 / 0.0) == "inf");
    auto kv = parse_key_values("a = 1 # note\n\n b=x y \n");
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "x y");
    CHECK_THROWS_AS(parse_key_values("=3"), ConfigError);
    Table t;
    t.columns = {"a", "b"};
    t.add({std::string("x,y"), std::int64_t{3}});
    CHECK_THROWS(t.add({1.0}));
    std::ostringstream out;
    write_csv(out, t);
    CHECK(out.str() == "a,b\n# config: \n\"x,y\",3\n");
    auto spec = load_map_spec(R"({"left": {"kind": "tanh", "scale": 0.5}, "mu_left": 0.3})");
    CHECK(spec.map().left_image(0.0) == doctest::Approx(0.3));
    CHECK(spec.left.name() == "tanh");
}
