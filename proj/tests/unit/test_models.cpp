#include <cmath>
#include <vector>

#include "doctest.h"
#include "pwdyn/models.hpp"

using namespace pwdyn;

namespace {

// exp(A t) by a long Taylor series with scaling and squaring
Eigen::Matrix2d taylor_expm(const Eigen::Matrix2d& A, double t) {
    Eigen::Matrix2d X = A * (t / 1024.0);
    Eigen::Matrix2d term = Eigen::Matrix2d::Identity(), sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * X / k;
        sum += term;
    }
    for (int i = 0; i < 10; ++i) sum = sum * sum;
    return sum;
}

IFModel if_model(double A, double d = 0.5) {
    IFModel m;
    m.field = ScalarField::linear(-0.5, 0.2);
    m.theta = 1.0;
    m.T = 1.9;
    m.d = d;
    m.A = A;
    return m;
}

}  // namespace

TEST_CASE("closed-form and numeric flows agree") {
    auto f = ScalarField::linear(-0.2);
    for (double u : {-1.0, 0.0, 1.0})
        for (double x0 : {-3.0, 0.0, 2.5}) {
            double a = flow(f, u, x0, 0.1, FlowMethod::ClosedForm);
            double b = flow(f, u, x0, 0.1, FlowMethod::Numeric);
            CHECK(std::abs(a - b) < 1e-10);
        }
    auto g = ScalarField::linear(-0.5, 0.2);
    auto t1 = hitting_time(g, 2.0, 0.0, 1.0, 5.0, FlowMethod::ClosedForm);
    auto t2 = hitting_time(g, 2.0, 0.0, 1.0, 5.0, FlowMethod::Numeric);
    REQUIRE(t1);
    REQUIRE(t2);
    CHECK(std::abs(*t1 - *t2) < 1e-10);
    CHECK_FALSE(hitting_time(g, 0.0, 0.0, 1.0, 100.0));
    CHECK_THROWS(flow(ScalarField::custom([](double x) { return -x; }), 0, 1, 1, FlowMethod::ClosedForm));
    auto nl = ScalarField::custom([](double x) { return -x * x * x - x; });
    CHECK(flow(nl, 0.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("relay closed form") {
    RelayModel1D m;
    m.field = ScalarField::linear(-0.2);
    m.k = -1.0;
    m.T = 0.1;
    double a = -0.2, e = std::exp(a * m.T);
    for (double y : {-2.0, 0.0, 1.3}) {
        double pl = e * y - (m.k / a) * (e - 1);
        double pr = e * y + (m.k / a) * (e - 1);
        CHECK(relay_branch(m, y, true) == doctest::Approx(pl).epsilon(1e-14));
        CHECK(relay_branch(m, y, false) == doctest::Approx(pr).epsilon(1e-14));
        RelayModel1D num = m;
        num.method = FlowMethod::Numeric;
        CHECK(std::abs(relay_branch(num, y, true) - pl) < 1e-10);
        CHECK(std::abs(relay_branch(num, y, false) - pr) < 1e-10);
    }
}

TEST_CASE("relay map structure") {
    RelayModel1D m;
    m.field = ScalarField::linear(-0.2);
    m.k = -1.0;
    m.T = 0.1;
    m.y_star = 0.5;
    auto rm = relay_map(m);
    CHECK(rm.sliding);
    CHECK(rm.map.mu_left() > 0);
    CHECK(rm.map.mu_right() > 0);
    auto cls = rm.map.classify();
    CHECK(cls.left_increasing);
    CHECK(cls.right_increasing);
    CHECK(cls.contracting);
    for (double z : {-0.3, 0.4})
        CHECK(rm.map.step(z) == doctest::Approx(relay_branch(m, z + m.y_star, z < 0) - m.y_star).epsilon(1e-13));

    RelayModel1D far = m;
    far.y_star = 10.0;
    CHECK_FALSE(relay_map(far).sliding);

    RelayModel1D off = m;
    off.k = 0.0;
    off.y_star = 0.0;
    auto z = relay_map(off);
    CHECK(z.map.mu_left() == 0.0);
    CHECK(z.map.mu_right() == 0.0);
    CHECK(z.map.step(0.7) == doctest::Approx(z.map.step(-0.7) * -1.0));
    auto fp = find_attractor(z.map, 0.5);
    CHECK(fp.status != AttractorStatus::Periodic);
}

TEST_CASE("relay family sweeps the virtual points") {
    RelayModel1D m;
    m.field = ScalarField::linear(-0.2);
    m.k = -1.0;
    m.T = 0.1;
    auto [yr, yl] = relay_virtual_points(m);
    CHECK(yr == doctest::Approx(-5.0));
    CHECK(yl == doctest::Approx(5.0));
    auto fam = relay_family(m);
    RotationOptions ro;
    ro.n = 20000;
    auto pts = staircase(fam, 101, ro);
    CHECK(pts.front().eta == Rational(0, 1));
    CHECK(pts.back().eta == Rational(1, 1));
    Rational prev(0, 1);
    std::size_t locked = 0;
    for (const auto& p : pts) {
        if (!p.eta) continue;
        ++locked;
        CHECK(prev <= *p.eta);
        prev = *p.eta;
    }
    CHECK(locked >= 50);
}

TEST_CASE("IF stroboscopic map") {
    auto m = if_model(0.0);
    double x = 0.9;
    for (int i = 0; i < 200; ++i) {
        auto r = if_stroboscopic(m, x);
        CHECK(r.spikes == 0);
        x = r.x;
    }
    CHECK(x == doctest::Approx(0.4).epsilon(1e-12));

    auto s = if_model(2.5);
    for (int n = 1; n <= 3; ++n) {
        auto sig = if_sigma(s, n);
        if (!sig || *sig == 0.0) continue;
        CHECK(if_stroboscopic(s, *sig + 1e-9).spikes == n);
        CHECK(if_stroboscopic(s, *sig - 1e-9).spikes == n - 1);
    }
    IFModel num = s;
    num.method = FlowMethod::Numeric;
    for (double x0 : {0.0, 0.3, 0.8}) {
        auto a = if_stroboscopic(s, x0), b = if_stroboscopic(num, x0);
        CHECK(a.spikes == b.spikes);
        CHECK(std::abs(a.x - b.x) < 1e-9);
    }
}

TEST_CASE("IF boundaries decrease with A") {
    for (int n = 2; n <= 3; ++n) {
        std::optional<double> prev;
        for (double A = 2.0; A <= 5.0; A += 0.05) {
            auto sig = if_sigma(if_model(A), n);
            if (!sig || *sig == 0.0) {
                prev.reset();
                continue;
            }
            if (prev) CHECK(*sig < *prev);
            prev = sig;
        }
    }
}

TEST_CASE("IF induced map lateral images") {
    auto m = if_model(2.6);
    auto im = if_induced_map(m);
    REQUIRE(im.has_discontinuity);
    double decay = std::exp(-0.5 * (1 - m.d) * m.T);
    CHECK(im.s_minus == doctest::Approx(0.4 + (1.0 - 0.4) * decay).epsilon(1e-12));
    CHECK(im.s_plus == doctest::Approx(0.4 * (1 - decay)).epsilon(1e-12));
    CHECK(im.s_minus > im.s_plus);
    REQUIRE(im.map);
    CHECK(im.map->left_image(-1e-9) == doctest::Approx(im.s_minus - im.sigma).epsilon(1e-6));
}

TEST_CASE("firing numbers") {
    auto below = firing_sample(if_model(0.1));
    CHECK(below.eta == Rational(0, 1));
    auto d = firing_sample(if_model(2.3));
    CHECK(d.eta == Rational(2, 1));
    RotationOptions ro;
    ro.n = 20000;
    std::vector<double> amps;
    for (int i = 0; i < 40; ++i) amps.push_back(2.3 + 0.9 * i / 39.0);
    auto one = firing_number(if_model(0), amps, ro, 1);
    auto many = firing_number(if_model(0), amps, ro, 3);
    Rational prev(0, 1);
    for (std::size_t i = 0; i < one.size(); ++i) {
        const auto& s = one[i];
        CHECK(s.eta == many[i].eta);
        if (!s.eta) continue;
        CHECK(*s.eta == Rational(s.n, 1) + *s.rho);
        REQUIRE(s.spike_average);
        CHECK(*s.spike_average == *s.eta);
        CHECK(prev <= *s.eta);
        prev = *s.eta;
        CHECK(s.firing_rate(1.9) == doctest::Approx(s.eta->value() / 1.9));
    }
    auto weak = firing_sample(if_model(0.55), ro);
    CHECK_FALSE(weak.contracting);
    CHECK(weak.note.find("expansion") != std::string::npos);
}

TEST_CASE("matrix exponential") {
    Eigen::Matrix2d A;
    A << 0, 1, -2, -5;
    for (double t : {0.1, 1.0, 3.0}) CHECK((expm2(A, t) - taylor_expm(A, t)).norm() < 1e-12);
    Eigen::Matrix2d s = -0.7 * Eigen::Matrix2d::Identity();
    CHECK((expm2(s, 2.0) - std::exp(-1.4) * Eigen::Matrix2d::Identity()).norm() < 1e-15);
    Eigen::Matrix2d rot;
    rot << 0, 1, -1, 0;
    CHECK_THROWS(expm2(rot, 1.0));
    Eigen::Matrix2d pos;
    pos << 1, 0, 0, -1;
    CHECK_THROWS(expm2(pos, 1.0));
    Eigen::Matrix2d jordan;
    jordan << -1, 1, 0, -1;
    CHECK_THROWS(expm2(jordan, 1.0));
}

TEST_CASE("planar relay outcomes") {
    auto both = PlanarRelayMap(PlanarRelayModel::companion(-2, -5, 1, 1.5, 0.1, 1.0, 0.0));
    CHECK_FALSE(both.both_virtual());
    auto a = both.analyze();
    REQUIRE(a.orbits.size() == 2);
    CHECK(a.orbits[0].period == 1);
    CHECK(a.orbits[1].period == 1);
    CHECK_FALSE(a.orbits[0].word == a.orbits[1].word);

    Eigen::EigenSolver<Eigen::Matrix2d> es(both.rho());
    for (int i = 0; i < 2; ++i) {
        CHECK(es.eigenvalues()(i).imag() == 0.0);
        CHECK(es.eigenvalues()(i).real() > 0.0);
        CHECK(es.eigenvalues()(i).real() < 1.0);
    }

    for (double ys : {-0.3, -0.05, 0.15, 0.42}) {
        auto f = PlanarRelayMap(PlanarRelayModel::companion(-2, -5, 1, 1.5, 0.1, -1.0, ys));
        CHECK(f.both_virtual());
        auto an = f.analyze();
        CHECK(an.orbits.size() >= 1);
        CHECK(an.orbits.size() <= 2);
        for (const auto& o : an.orbits) {
            CHECK(itinerary_is_maximin(o.word));
            for (std::size_t i = 0; i < o.period; ++i) {
                CHECK((f.sigma(o.points[i]) < 0) == (o.word[i] == Symbol::L));
                CHECK((f.apply(o.points[i]) - o.points[(i + 1) % o.period]).norm() < 1e-9);
            }
        }
    }
    CHECK(itinerary_is_maximin(farey_word(Rational(13, 31))));
    CHECK_FALSE(itinerary_is_maximin(SymbolicWord("LLLRR")));
    CHECK_FALSE(itinerary_is_maximin(SymbolicWord("LRLR")));
}
