#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pwdyn/symbolic.hpp"

using pwdyn::Rational;
using pwdyn::SymbolicWord;

namespace {

std::string rot(const std::string& s, std::size_t k) { return s.substr(k) + s.substr(0, k); }

std::string min_rot(const std::string& s) {
    std::string best = s;
    for (std::size_t k = 1; k < s.size(); ++k) best = std::min(best, rot(s, k));
    return best;
}

std::string max_rot(const std::string& s) {
    std::string best = s;
    for (std::size_t k = 1; k < s.size(); ++k) best = std::max(best, rot(s, k));
    return best;
}

// infinite extension order via a long common prefix
int cmp_inf(const std::string& a, const std::string& b) {
    std::size_t n = a.size() * b.size() * 2;
    for (std::size_t i = 0; i < n; ++i) {
        char x = a[i % a.size()], y = b[i % b.size()];
        if (x != y) return x < y ? -1 : 1;
    }
    return 0;
}

std::vector<std::string> all_words(int p, int q) {
    std::vector<std::string> out;
    for (unsigned m = 0; m < (1u << q); ++m) {
        if (__builtin_popcount(m) != p) continue;
        std::string s;
        for (int i = q - 1; i >= 0; --i) s.push_back((m >> i) & 1u ? 'R' : 'L');
        out.push_back(s);
    }
    return out;
}

std::set<std::string> classes(int p, int q) {
    std::set<std::string> c;
    for (auto& w : all_words(p, q)) c.insert(min_rot(w));
    return c;
}

bool oracle_ordered(const std::string& s, std::size_t& k_out) {
    std::size_t q = s.size();
    std::vector<std::size_t> idx(q);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return rot(s, a) < rot(s, b); });
    if (q == 1) {
        k_out = 0;
        return true;
    }
    std::size_t k = (idx[1] + q - idx[0]) % q;
    for (std::size_t j = 1; j + 1 < q; ++j)
        if ((idx[j + 1] + q - idx[j]) % q != k) return false;
    k_out = k;
    return true;
}

}  // namespace

TEST_CASE("word text and counts") {
    SymbolicWord w("LLRLR");
    CHECK(w.size() == 5);
    CHECK(w.r_count() == 2);
    CHECK(w.l_count() == 3);
    CHECK(w.str() == "LLRLR");
    CHECK_THROWS_AS(SymbolicWord("LXR"), std::invalid_argument);
    CHECK(SymbolicWord::from_mask(w.mask(), 5) == w);
    CHECK((SymbolicWord("LLR") + SymbolicWord("LR")).str() == "LLRLR");
    CHECK(SymbolicWord("LRLR").is_primitive() == false);
    CHECK(SymbolicWord("LLRLR").is_primitive());
    SymbolicWord longw;
    for (int i = 0; i < 150; ++i) longw.push_back(i % 3 == 0 ? pwdyn::Symbol::R : pwdyn::Symbol::L);
    CHECK(longw.r_count() == 50);
    CHECK(longw[147] == pwdyn::Symbol::R);
}

TEST_CASE("compare examples") {
    CHECK(pwdyn::compare(SymbolicWord("LLRL"), SymbolicWord("LLRR")) < 0);
    CHECK(pwdyn::compare(SymbolicWord("LR"), SymbolicWord("LR")) == 0);
    CHECK(pwdyn::compare(SymbolicWord("LR"), SymbolicWord("LRLRLR")) == 0);
}

TEST_CASE("compare agrees with the string oracle") {
    std::vector<std::string> ws;
    for (int q = 1; q <= 6; ++q)
        for (int p = 0; p <= q; ++p)
            for (auto& s : all_words(p, q)) ws.push_back(s);
    for (std::size_t i = 0; i < ws.size(); i += 3)
        for (std::size_t j = 0; j < ws.size(); j += 5)
            CHECK(pwdyn::compare(SymbolicWord(ws[i]), SymbolicWord(ws[j])) == cmp_inf(ws[i], ws[j]));
}

TEST_CASE("shift examples") {
    CHECK(pwdyn::shift(SymbolicWord("LLRLR"), 1).str() == "LRLRL");
    CHECK(pwdyn::shift(SymbolicWord("LLRLR"), 2).str() == "RLRLL");
    CHECK(pwdyn::shift(SymbolicWord("LLRLR"), 5).str() == "LLRLR");
}

TEST_CASE("shift is a bijection on rotation classes") {
    for (int q = 1; q <= 9; ++q)
        for (int p = 0; p <= q; ++p) {
            std::set<std::string> images;
            for (auto& s : all_words(p, q)) {
                SymbolicWord w(s);
                CHECK(pwdyn::shift(w, q) == w);
                images.insert(pwdyn::shift(w, 1).str());
                CHECK(pwdyn::minimal_rotation(pwdyn::shift(w, 1)) == pwdyn::minimal_rotation(w));
            }
            CHECK(images.size() == all_words(p, q).size());
        }
}

TEST_CASE("minimal and maximal rotation") {
    CHECK(pwdyn::minimal_rotation(SymbolicWord("RLL")).str() == "LLR");
    CHECK(pwdyn::maximal_rotation(SymbolicWord("RLL")).str() == "RLL");
    CHECK(pwdyn::minimal_rotation(SymbolicWord("L")).str() == "L");
    CHECK(pwdyn::minimal_rotation(SymbolicWord("LRLR")).str() == "LRLR");
    for (int q = 1; q <= 10; ++q)
        for (int p = 0; p <= q; ++p)
            for (auto& s : all_words(p, q)) {
                CHECK(pwdyn::minimal_rotation(SymbolicWord(s)).str() == min_rot(s));
                CHECK(pwdyn::maximal_rotation(SymbolicWord(s)).str() == max_rot(s));
            }
}

TEST_CASE("eta number examples") {
    CHECK(pwdyn::eta_number(SymbolicWord("RRRL")) == Rational(3, 4));
    CHECK(pwdyn::eta_number(SymbolicWord("LLRLR")) == Rational(2, 5));
    CHECK(pwdyn::eta_number(SymbolicWord("LLLL")) == Rational(0, 1));
}

TEST_CASE("enumerate W_{p,q}") {
    CHECK(pwdyn::enumerate_wpq(2, 5, false).size() == 10);
    auto c25 = pwdyn::enumerate_wpq(2, 5, true);
    REQUIRE(c25.size() == 2);
    CHECK(c25[0].str() == "LLLRR");
    CHECK(c25[1].str() == "LLRLR");
    auto c27 = pwdyn::enumerate_wpq(2, 7, true);
    REQUIRE(c27.size() == 3);
    CHECK(c27[0].str() == "LLLLLRR");
    CHECK(c27[1].str() == "LLLLRLR");
    CHECK(c27[2].str() == "LLLRLLR");
    CHECK(pwdyn::enumerate_wpq(3, 7, true).size() == 5);
    CHECK_THROWS_AS(pwdyn::enumerate_wpq(6, 5, false), std::invalid_argument);
    for (int q = 1; q <= 12; ++q)
        for (int p = 0; p <= q; ++p) {
            CHECK(pwdyn::enumerate_wpq(p, q, false).size() == all_words(p, q).size());
            auto got = pwdyn::enumerate_wpq(p, q, true);
            auto want = classes(p, q);
            REQUIRE(got.size() == want.size());
            std::size_t i = 0;
            for (auto& s : want) CHECK(got[i++].str() == s);
        }
}

TEST_CASE("p,q-ordering") {
    auto a = pwdyn::is_pq_ordered(SymbolicWord("LLRLR"));
    CHECK(a.ordered);
    CHECK(a.k == 3);
    CHECK_FALSE(pwdyn::is_pq_ordered(SymbolicWord("LLLRR")).ordered);
    CHECK(pwdyn::is_pq_ordered(SymbolicWord("LR")).ordered);
    CHECK(pwdyn::is_pq_ordered(SymbolicWord("L")).ordered);
    CHECK_THROWS_AS(pwdyn::is_pq_ordered(SymbolicWord("LRLR")), std::invalid_argument);
    for (int q = 2; q <= 11; ++q)
        for (int p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            for (auto& s : all_words(p, q)) {
                std::size_t k = 0;
                bool want = oracle_ordered(s, k);
                auto got = pwdyn::is_pq_ordered(SymbolicWord(s));
                CHECK(got.ordered == want);
                if (want) CHECK(got.k == k);
            }
        }
}

TEST_CASE("maximin and minimax examples") {
    CHECK(pwdyn::is_maximin(SymbolicWord("LLRLR")));
    CHECK(pwdyn::is_minimax(SymbolicWord("LLRLR")));
    CHECK_FALSE(pwdyn::is_maximin(SymbolicWord("LLLRR")));
    CHECK_FALSE(pwdyn::is_minimax(SymbolicWord("LLLRR")));
    CHECK(pwdyn::is_maximin(SymbolicWord("LR")));
    CHECK_THROWS_AS(pwdyn::is_maximin(SymbolicWord("LRLR")), std::invalid_argument);
    CHECK_THROWS_AS(pwdyn::is_maximin(SymbolicWord("LLRR")), std::invalid_argument);
    SymbolicWord w25 = pwdyn::farey_word(Rational(12, 25));
    CHECK_THROWS_AS(pwdyn::is_maximin(w25), pwdyn::CapacityError);
}

TEST_CASE("maximin matches the class oracle for q <= 12") {
    for (int q = 1; q <= 12; ++q)
        for (int p = 0; p <= q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            std::string best_min, best_max;
            bool first = true;
            for (auto& s : all_words(p, q)) {
                std::string mn = min_rot(s), mx = max_rot(s);
                if (first || mn > best_min) best_min = mn;
                if (first || mx < best_max) best_max = mx;
                first = false;
            }
            for (auto& s : all_words(p, q)) {
                CHECK(pwdyn::is_maximin(SymbolicWord(s)) == (min_rot(s) == best_min));
                CHECK(pwdyn::is_minimax(SymbolicWord(s)) == (max_rot(s) == best_max));
            }
        }
}

TEST_CASE("exhaustive structure for q <= 14") {
    for (int q = 1; q <= 14; ++q)
        for (int p = 0; p <= q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            std::size_t maximin_classes = 0;
            for (auto& w : pwdyn::enumerate_wpq(p, q, true)) {
                bool mm = pwdyn::is_maximin(w);
                maximin_classes += mm;
                CHECK(mm == pwdyn::is_minimax(w));
                CHECK(mm == pwdyn::is_pq_ordered(w).ordered);
                if (mm) CHECK(w == pwdyn::farey_word(Rational(p, q)));
            }
            CHECK(maximin_classes == 1);
        }
}

TEST_CASE("farey word examples") {
    CHECK(pwdyn::farey_word(Rational(2, 5)).str() == "LLRLR");
    CHECK(pwdyn::farey_word(Rational(1, 4)).str() == "LLLR");
    CHECK(pwdyn::farey_word(Rational(3, 8)).str() == "LLRLLRLR");
    CHECK(pwdyn::farey_word(Rational(0, 1)).str() == "L");
    CHECK(pwdyn::farey_word(Rational(1, 1)).str() == "R");
    CHECK(pwdyn::farey_word(Rational(1, 3)) + pwdyn::farey_word(Rational(2, 5)) ==
          pwdyn::farey_word(Rational(3, 8)));
    CHECK(pwdyn::is_maximin(pwdyn::farey_word(Rational(3, 8))));
    CHECK_THROWS_AS(pwdyn::farey_word(2, 4), std::invalid_argument);
    CHECK(pwdyn::farey_word(3, 7).str() == pwdyn::farey_word(Rational(3, 7)).str());
}

TEST_CASE("farey word tree identities for q <= 64") {
    for (long q = 1; q <= 64; ++q)
        for (long p = 0; p <= q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            Rational x(p, q);
            SymbolicWord w = pwdyn::farey_word(x);
            CHECK(w.size() == static_cast<std::size_t>(q));
            CHECK(pwdyn::eta_number(w) == x);
            CHECK(pwdyn::minimal_rotation(w) == w);
            if (q >= 2) {
                auto par = pwdyn::farey_parents(x);
                CHECK(w == pwdyn::farey_word(par.left) + pwdyn::farey_word(par.right));
            }
            if (q > 1 && q <= 24) CHECK(pwdyn::is_maximin(w));
        }
}

TEST_CASE("power words") {
    CHECK(pwdyn::power_word(0).str() == "R");
    CHECK(pwdyn::power_word(3).str() == "LLLR");
}
