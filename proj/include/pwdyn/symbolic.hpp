#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pwdyn/farey.hpp"

namespace pwdyn {

enum class Symbol : std::uint8_t { L = 0, R = 1 };

inline char to_char(Symbol s) { return s == Symbol::R ? 'R' : 'L'; }

/// Raised when an exhaustive enumeration would exceed its budget.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One period of a periodic L/R sequence, packed one bit per symbol (R = 1).
class SymbolicWord {
public:
    SymbolicWord() = default;
    explicit SymbolicWord(std::string_view text);
    SymbolicWord(const std::vector<Symbol>& symbols);

    /// First symbol in the most significant of the q low bits.
    static SymbolicWord from_mask(std::uint64_t mask, std::size_t length);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    Symbol operator[](std::size_t i) const {
        return (bits_[i >> 6] >> (i & 63)) & 1u ? Symbol::R : Symbol::L;
    }
    void push_back(Symbol s);

    std::size_t r_count() const;
    std::size_t l_count() const { return size_ - r_count(); }
    bool is_primitive() const;

    std::string str() const;
    /// Requires size() <= 64.
    std::uint64_t mask() const;

    friend bool operator==(const SymbolicWord& a, const SymbolicWord& b) {
        return a.size_ == b.size_ && a.bits_ == b.bits_;
    }

    friend SymbolicWord operator+(const SymbolicWord& a, const SymbolicWord& b);

private:
    std::vector<std::uint64_t> bits_;
    std::size_t size_ = 0;
};

/// Order of the infinite periodic extensions: -1, 0 or 1.
int compare(const SymbolicWord& a, const SymbolicWord& b);

SymbolicWord shift(const SymbolicWord& w, std::size_t k);
SymbolicWord minimal_rotation(const SymbolicWord& w);
SymbolicWord maximal_rotation(const SymbolicWord& w);
/// Offset k such that shift(w, k) is the minimal rotation.
std::size_t minimal_rotation_offset(const SymbolicWord& w);

Rational eta_number(const SymbolicWord& w);

std::vector<SymbolicWord> enumerate_wpq(int p, int q, bool up_to_rotation);

struct OrderingWitness {
    bool ordered = false;
    std::size_t k = 0;
};

OrderingWitness is_pq_ordered(const SymbolicWord& w);

inline constexpr int kMaximinBudget = 24;

bool is_maximin(const SymbolicWord& w);
bool is_minimax(const SymbolicWord& w);

SymbolicWord farey_word(const Rational& x);
/// Rejects unreduced input.
SymbolicWord farey_word(std::int64_t p, std::int64_t q);

/// L^n R.
SymbolicWord power_word(std::size_t n);

}  // namespace pwdyn
