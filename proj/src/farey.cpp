#include "pwdyn/farey.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace pwdyn {

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

Rational::Rational(std::int64_t p, std::int64_t q) {
    if (q < 1) throw std::invalid_argument("rational: denominator must be >= 1");
    if (p < 0) throw std::invalid_argument("rational: numerator must be >= 0");
    std::int64_t g = std::gcd(p, q);
    p /= g;
    q /= g;
    if (q > kMaxTerm || p > kMaxTerm)
        throw std::invalid_argument("rational: terms above 2^31 are not supported");
    p_ = p;
    q_ = q;
}

std::string Rational::str() const { return std::to_string(p_) + "/" + std::to_string(q_); }

Rational Rational::parse(std::string_view text) {
    auto slash = text.find('/');
    auto read = [&](std::string_view s) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            throw std::invalid_argument("rational: cannot parse '" + std::string(text) + "'");
        return v;
    };
    if (slash == std::string_view::npos) return Rational(read(text), 1);
    return Rational(read(text.substr(0, slash)), read(text.substr(slash + 1)));
}

Rational operator+(const Rational& a, const Rational& b) {
    std::int64_t g = std::gcd(a.q(), b.q());
    std::int64_t l = a.q() / g;
    return Rational(a.p() * (b.q() / g) + b.p() * l, l * b.q());
}

std::vector<Rational> farey_sequence(int n) {
    if (n < 1) throw std::invalid_argument("farey_sequence: order must be >= 1");
    std::vector<Rational> out;
    std::int64_t a = 0, b = 1, c = 1, d = n;
    out.emplace_back(0, 1);
    while (c <= n) {
        std::int64_t k = (n + b) / d;
        std::int64_t e = k * c - a, f = k * d - b;
        a = c;
        b = d;
        c = e;
        d = f;
        out.emplace_back(a, b);
    }
    return out;
}

static void require_ordered(const Rational& a, const Rational& b, const char* who) {
    if (!(a < b)) throw std::invalid_argument(std::string(who) + ": requires a < b");
}

Rational mediant(const Rational& a, const Rational& b) {
    require_ordered(a, b, "mediant");
    return Rational(a.p() + b.p(), a.q() + b.q());
}

bool is_neighbor_pair(const Rational& a, const Rational& b) {
    require_ordered(a, b, "is_neighbor_pair");
    return b.p() * a.q() - a.p() * b.q() == 1;
}

FareyParents farey_parents(const Rational& x) {
    if (!(Rational(0, 1) < x && x < Rational(1, 1)))
        throw std::invalid_argument("farey_parents: x must lie strictly inside (0,1)");
    std::int64_t p = x.p(), q = x.q();
    // extended Euclid for p*b = 1 (mod q)
    std::int64_t r0 = q, r1 = p, t0 = 0, t1 = 1;
    while (r1 != 0) {
        std::int64_t k = r0 / r1;
        std::int64_t r2 = r0 - k * r1, t2 = t0 - k * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    std::int64_t b = ((t0 % q) + q) % q;
    std::int64_t a = (p * b - 1) / q;
    return {Rational(a, b), Rational(p - a, q - b)};
}

}  // namespace pwdyn
