#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "pwdyn/bifurcation.hpp"

using namespace pwdyn;

namespace {

// closed-form preimages of 0 under x -> mu_L + a x
double linear_a(double a, double ml, std::size_t n) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v = (v - ml) / a;
    return v;
}

// S-case by direct reading of the definition for linear slopes a > 0, b < 0
std::pair<std::string, std::size_t> linear_case(double a, double b, double ml, double mr) {
    double jlo = -mr + b * ml, jhi = -mr;
    std::size_t n = 1;
    while (linear_a(a, ml, n) >= jhi) ++n;
    double an = linear_a(a, ml, n);
    return {an >= jlo ? "S3" : "S2", n};
}

ScanOptions quick() {
    ScanOptions o;
    o.rotation.n = 20000;
    return o;
}

}  // namespace

TEST_CASE("curves") {
    auto c = ParamCurve::quarter_circle(2.0);
    CHECK(c.validate().ok());
    CHECK(c.mu_left(0.0) == 0.0);
    CHECK(c.mu_right(1.0) == 0.0);
    ParamCurve bad = c;
    bad.mu_left = [](double l) { return 0.1 + l; };
    auto ch = bad.validate();
    CHECK_FALSE(ch.h3);
    CHECK_FALSE(ch.ok());
    CHECK_THROWS_AS(make_family(Branch::linear(0.5), Branch::linear(0.5), bad), std::invalid_argument);
    ParamCurve flat = c;
    flat.mu_right = [](double l) { return 1.0 - l * l * 0.0 - l; };
    flat.mu_left = [](double l) { return l * (1 - l); };
    CHECK_FALSE(flat.validate().h2);
}

TEST_CASE("incrementing preimages match the closed form") {
    for (double ml : {0.05, 0.2, 0.7, 1.5}) {
        auto m = PiecewiseMap1D::linear(0.5, -0.5, ml, 1.0);
        auto g = incrementing_case(m);
        REQUIRE(g.a.size() >= 2);
        CHECK(g.a[0] == 0.0);
        for (std::size_t j = 1; j < g.a.size(); ++j) {
            CHECK(g.a[j] == doctest::Approx(linear_a(0.5, ml, j)).epsilon(1e-13));
            CHECK(g.a[j] < g.a[j - 1]);
            if (j >= 2) CHECK((g.a[j - 1] - g.a[j]) / (g.a[j - 2] - g.a[j - 1]) > 1.0);
        }
        auto [kind, n] = linear_case(0.5, -0.5, ml, 1.0);
        CHECK(g.n == n);
        CHECK(g.label() == kind + "(" + std::to_string(n) + ")");
    }
}

TEST_CASE("incrementing index grows as mu_L shrinks") {
    std::size_t big = incrementing_case(PiecewiseMap1D::linear(0.5, -0.5, 3.0, 1.0)).n;
    std::size_t small = incrementing_case(PiecewiseMap1D::linear(0.5, -0.5, 1e-4, 1.0)).n;
    CHECK(big == 1);
    CHECK(small > 10);
    CHECK_THROWS(incrementing_case(PiecewiseMap1D::linear(0.5, 0.5, 1.0, 1.0)));
    CHECK_THROWS(incrementing_case(PiecewiseMap1D::linear(0.5, -0.5, -1.0, 1.0)));
}

TEST_CASE("incrementing geometry agrees with forward iteration") {
    std::size_t s2 = 0, s3 = 0;
    for (int i = 1; i <= 300; ++i) {
        double ml = 1.2 * i / 300.0;
        auto m = PiecewiseMap1D::linear(0.5, -0.5, ml, 1.0);
        auto rec = classify_point(m, quick());
        REQUIRE(rec.geometry);
        auto want = rec.geometry->predicted_words();
        REQUIRE(rec.orbits.size() == want.size());
        for (std::size_t k = 0; k < want.size(); ++k) CHECK(rec.orbits[k].word == want[k]);
        if (rec.geometry->kind == IncCase::S2) {
            ++s2;
            CHECK(rec.outcome != Outcome::Coexistence);
        } else {
            ++s3;
            CHECK(rec.outcome == Outcome::Coexistence);
            CHECK(rec.geometry->split);
        }
    }
    CHECK(s2 > 0);
    CHECK(s3 > 0);
}

TEST_CASE("adding curve scan") {
    auto fam = make_family(Branch::linear(0.5), Branch::linear(0.5), ParamCurve::quarter_circle());
    auto recs = scan_curve(fam, 201, quick());
    REQUIRE(recs.size() == 201);
    CHECK(recs.front().outcome == Outcome::BorderCollision);
    CHECK(recs.back().outcome == Outcome::BorderCollision);
    Rational prev(0, 1);
    std::size_t locked = 0;
    for (std::size_t i = 1; i + 1 < recs.size(); ++i) {
        const auto& r = recs[i];
        CHECK(r.orientable);
        REQUIRE(r.rho);
        if (!r.rho->locked) continue;
        ++locked;
        CHECK(prev <= *r.rho->locked);
        prev = *r.rho->locked;
        REQUIRE(r.orbits.size() == 1);
        CHECK(r.orbits[0].eta == *r.rho->locked);
        CHECK(r.orbits[0].word == farey_word(r.orbits[0].eta));
    }
    CHECK(locked >= 190);
    auto again = scan_curve(fam, 201, [] {
        auto o = quick();
        o.jobs = 4;
        return o;
    }());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(again[i].lambda == recs[i].lambda);
        CHECK(again[i].eta() == recs[i].eta());
    }
}

TEST_CASE("staircase endpoints and plateau order") {
    auto fam = make_family(Branch::linear(0.5), Branch::linear(0.5), ParamCurve::quarter_circle());
    RotationOptions ro;
    ro.n = 20000;
    auto two = staircase(fam, 2, ro);
    CHECK(two[0].eta == Rational(0, 1));
    CHECK(two[1].eta == Rational(1, 1));

    auto pts = staircase(fam, 400, ro);
    auto plateaus = extract_plateaus(fam, pts, 30);
    std::vector<Rational> etas;
    double widest = 0;
    Rational widest_eta(0, 1);
    for (const auto& p : plateaus) {
        etas.push_back(p.eta);
        CHECK(p.lambda_lo <= p.lambda_hi);
        if (p.eta != Rational(0, 1) && p.eta != Rational(1, 1) && p.lambda_hi - p.lambda_lo > widest) {
            widest = p.lambda_hi - p.lambda_lo;
            widest_eta = p.eta;
        }
        if (p.word) CHECK(*p.word == farey_word(p.eta));
    }
    for (std::size_t i = 1; i < etas.size(); ++i) CHECK(etas[i - 1] < etas[i]);
    CHECK(widest_eta == Rational(1, 2));
    auto pos = [&](Rational r) { return std::find(etas.begin(), etas.end(), r) - etas.begin(); };
    CHECK(pos(Rational(1, 3)) < pos(Rational(2, 5)));
    CHECK(pos(Rational(2, 5)) < pos(Rational(1, 2)));
    CHECK(pos(Rational(1, 2)) < static_cast<long>(etas.size()));
}

TEST_CASE("plane scan") {
    auto fam = make_plane_family(Branch::linear(0.5), Branch::linear(0.5));
    PlaneGrid g{4, 4, -1.0, -0.1, -1.0, -0.1};
    for (const auto& c : scan_plane(fam, g, quick())) {
        CHECK(c.outcome == Outcome::Coexistence);
        REQUIRE(c.words.size() == 2);
        CHECK(c.words[0].size() == 1);
        CHECK(c.words[1].size() == 1);
        CHECK_FALSE(c.words[0] == c.words[1]);
    }
}

TEST_CASE("linear plane regions are invariant along rays") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    ScanOptions o = quick();
    o.with_rotation = false;
    for (int k = 0; k < 60; ++k) {
        double ml = u(rng), mr = u(rng);
        for (double b : {0.5, -0.5}) {
            auto r1 = classify_point(PiecewiseMap1D::linear(0.5, b, ml, mr), o);
            auto r2 = classify_point(PiecewiseMap1D::linear(0.5, b, 3 * ml, 3 * mr), o);
            REQUIRE(r1.orbits.size() == r2.orbits.size());
            for (std::size_t i = 0; i < r1.orbits.size(); ++i) CHECK(r1.orbits[i].word == r2.orbits[i].word);
        }
    }
}

TEST_CASE("codim-2 identity reduction") {
    auto m = PiecewiseMap1D::linear(0.5, 0.5, 1.0, 1.0);
    auto red = codim2_reduce(m, SymbolicWord("L"), SymbolicWord("R"), 1.0);
    for (double z : {-0.9, -0.3, 0.2, 0.8}) CHECK(red.composed.step(z) == doctest::Approx(m.step(z)));
    CHECK(red.composed.mu_left() == 1.0);
    CHECK(red.composed.mu_right() == 1.0);
}

TEST_CASE("codim-2 collapse of coexisting orbits") {
    auto src = quasi_contraction_source(1.0, 1.75);
    auto red = codim2_reduce(src, SymbolicWord("LRL"), SymbolicWord("RL"), 3.0);
    for (double z : {-2.9, -1.0, -0.01}) CHECK(red.composed.step(z) == doctest::Approx(1.0 + 0.5 * z).epsilon(1e-12));
    for (double z : {0.01, 1.0, 2.9}) CHECK(red.composed.step(z) == doctest::Approx(-1.75 - 0.5 * z).epsilon(1e-12));

    ScanOptions o = quick();
    auto rec = classify_point(red.composed, o);
    REQUIRE(rec.outcome == Outcome::Coexistence);
    REQUIRE(rec.orbits.size() == 2);
    CHECK(rec.orbits[0].word.str() == "LR");
    CHECK(rec.orbits[1].word.str() == "LLR");
    CHECK(rec.orbits[0].points[0] == doctest::Approx(-1.8).epsilon(1e-12));
    CHECK(rec.orbits[1].points[0] == doctest::Approx(-20.0 / 9.0).epsilon(1e-12));

    for (const auto& orb : rec.orbits) {
        auto ex = red.expand(orb);
        CHECK(ex.word == red.expand_word(orb.word));
        std::size_t r = orb.word.r_count(), l = orb.word.l_count();
        CHECK(ex.word.r_count() == l * red.word_x.r_count() + r * red.word_y.r_count());
        CHECK(ex.word.size() == l * red.word_x.size() + r * red.word_y.size());
        double x = ex.points[0];
        for (std::size_t k = 0; k < ex.period; ++k) {
            CHECK((x < 0) == (ex.word[k] == Symbol::L));
            CHECK(std::abs(x - ex.points[k]) < 1e-12);
            x = src.step(x);
        }
        CHECK(std::abs(x - ex.points[0]) < 1e-9);
    }
    CHECK(red.expand_word(SymbolicWord("LR")).str() == "LRLRL");
    CHECK(minimal_rotation(red.expand_word(SymbolicWord("LLR"))).str() == "LLRLLRLR");
    CHECK(eta_number(red.expand_word(SymbolicWord("LR"))) == Rational(2, 5));
    CHECK(eta_number(red.expand_word(SymbolicWord("LLR"))) == Rational(3, 8));
}

TEST_CASE("codim-2 rejects bad requests") {
    auto src = quasi_contraction_source(1.0, 1.75);
    CHECK_THROWS_AS(codim2_reduce(src, SymbolicWord("RL"), SymbolicWord("LR"), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(codim2_reduce(src, SymbolicWord("LRL"), SymbolicWord("RL"), 20.0), std::domain_error);
    CHECK_THROWS_AS(codim2_reduce(src, SymbolicWord("LRLR"), SymbolicWord("R"), 1.0), std::invalid_argument);
}
