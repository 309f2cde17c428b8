#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pwdyn {

/// Reduced nonnegative fraction p/q.
class Rational {
public:
    static constexpr std::int64_t kMaxTerm = std::int64_t{1} << 31;

    Rational() = default;
    Rational(std::int64_t p, std::int64_t q);

    std::int64_t p() const { return p_; }
    std::int64_t q() const { return q_; }
    double value() const { return static_cast<double>(p_) / static_cast<double>(q_); }

    std::string str() const;
    static Rational parse(std::string_view text);

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        return a.p_ * b.q_ <=> b.p_ * a.q_;
    }

private:
    std::int64_t p_ = 0;
    std::int64_t q_ = 1;
};

Rational operator+(const Rational& a, const Rational& b);

struct FareyParents {
    Rational left;
    Rational right;
};

std::vector<Rational> farey_sequence(int n);

/// Reduced mediant (a.p+b.p)/(a.q+b.q). Requires a < b.
Rational mediant(const Rational& a, const Rational& b);

/// b.p*a.q - a.p*b.q == 1. Requires a < b.
bool is_neighbor_pair(const Rational& a, const Rational& b);

/// Farey parents of x in (0,1), via the modular inverse of p mod q.
FareyParents farey_parents(const Rational& x);

std::int64_t gcd64(std::int64_t a, std::int64_t b);

}  // namespace pwdyn
