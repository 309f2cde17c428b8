#include "pwdyn/symbolic.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>

namespace pwdyn {

SymbolicWord::SymbolicWord(std::string_view text) {
    for (char c : text) {
        if (c == 'L' || c == 'l')
            push_back(Symbol::L);
        else if (c == 'R' || c == 'r')
            push_back(Symbol::R);
        else
            throw std::invalid_argument("symbolic word: unexpected character '" + std::string(1, c) + "'");
    }
}

SymbolicWord::SymbolicWord(const std::vector<Symbol>& symbols) {
    for (Symbol s : symbols) push_back(s);
}

SymbolicWord SymbolicWord::from_mask(std::uint64_t mask, std::size_t length) {
    if (length > 64) throw std::invalid_argument("from_mask: length above 64");
    SymbolicWord w;
    for (std::size_t i = 0; i < length; ++i)
        w.push_back((mask >> (length - 1 - i)) & 1u ? Symbol::R : Symbol::L);
    return w;
}

void SymbolicWord::push_back(Symbol s) {
    if ((size_ & 63) == 0) bits_.push_back(0);
    if (s == Symbol::R) bits_.back() |= std::uint64_t{1} << (size_ & 63);
    ++size_;
}

std::size_t SymbolicWord::r_count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += static_cast<std::size_t>(std::popcount(b));
    return n;
}

bool SymbolicWord::is_primitive() const {
    std::size_t q = size_;
    for (std::size_t d = 1; d < q; ++d) {
        if (q % d) continue;
        bool repeats = true;
        for (std::size_t i = d; i < q && repeats; ++i) repeats = (*this)[i] == (*this)[i - d];
        if (repeats) return false;
    }
    return q > 0;
}

std::string SymbolicWord::str() const {
    std::string s(size_, 'L');
    for (std::size_t i = 0; i < size_; ++i) s[i] = to_char((*this)[i]);
    return s;
}

std::uint64_t SymbolicWord::mask() const {
    if (size_ > 64) throw std::invalid_argument("mask: word longer than 64");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < size_; ++i) m = (m << 1) | static_cast<std::uint64_t>((*this)[i]);
    return m;
}

SymbolicWord operator+(const SymbolicWord& a, const SymbolicWord& b) {
    SymbolicWord w = a;
    for (std::size_t i = 0; i < b.size(); ++i) w.push_back(b[i]);
    return w;
}

int compare(const SymbolicWord& a, const SymbolicWord& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("compare: empty word");
    std::size_t n = std::lcm(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        Symbol x = a[i % a.size()], y = b[i % b.size()];
        if (x != y) return x < y ? -1 : 1;
    }
    return 0;
}

SymbolicWord shift(const SymbolicWord& w, std::size_t k) {
    if (w.empty()) throw std::invalid_argument("shift: empty word");
    SymbolicWord out;
    std::size_t q = w.size();
    for (std::size_t i = 0; i < q; ++i) out.push_back(w[(i + k) % q]);
    return out;
}

namespace {

// Booth's least rotation; `flip` finds the greatest one instead.
std::size_t booth(const SymbolicWord& w, bool flip) {
    std::size_t n = w.size();
    auto s = [&](std::size_t i) { return static_cast<int>(w[i % n]) ^ static_cast<int>(flip); };
    std::vector<long> f(2 * n, -1);
    std::size_t k = 0;
    for (std::size_t j = 1; j < 2 * n; ++j) {
        int sj = s(j);
        long i = f[j - k - 1];
        while (i != -1 && sj != s(k + static_cast<std::size_t>(i) + 1)) {
            if (sj < s(k + static_cast<std::size_t>(i) + 1)) k = j - static_cast<std::size_t>(i) - 1;
            i = f[static_cast<std::size_t>(i)];
        }
        if (sj != s(k + static_cast<std::size_t>(i + 1))) {
            if (sj < s(k)) k = j;
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    return k % n;
}

std::uint64_t rotl(std::uint64_t x, unsigned k, unsigned q) {
    if (k == 0) return x;
    std::uint64_t full = q == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << q) - 1;
    return ((x << k) | (x >> (q - k))) & full;
}

std::uint64_t min_rot_mask(std::uint64_t x, unsigned q) {
    std::uint64_t best = x;
    for (unsigned k = 1; k < q; ++k) best = std::min(best, rotl(x, k, q));
    return best;
}

std::uint64_t max_rot_mask(std::uint64_t x, unsigned q) {
    std::uint64_t best = x;
    for (unsigned k = 1; k < q; ++k) best = std::max(best, rotl(x, k, q));
    return best;
}

template <class F>
void for_each_mask(unsigned p, unsigned q, F&& fn) {
    if (p == 0) {
        fn(std::uint64_t{0});
        return;
    }
    std::uint64_t x = (p == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << p) - 1;
    std::uint64_t limit = q == 64 ? 0 : std::uint64_t{1} << q;
    while (true) {
        fn(x);
        std::uint64_t c = x & (~x + 1);
        std::uint64_t r = x + c;
        if (r == 0) break;
        x = (((r ^ x) >> 2) / c) | r;
        if (limit && x >= limit) break;
    }
}

struct Extremes {
    std::uint64_t max_of_min = 0;
    std::uint64_t min_of_max = 0;
};

Extremes extremes(unsigned p, unsigned q) {
    static std::mutex mu;
    static std::map<std::pair<unsigned, unsigned>, Extremes> cache;
    {
        std::lock_guard lock(mu);
        auto it = cache.find({p, q});
        if (it != cache.end()) return it->second;
    }
    Extremes e;
    e.min_of_max = ~std::uint64_t{0};
    for_each_mask(p, q, [&](std::uint64_t x) {
        e.max_of_min = std::max(e.max_of_min, min_rot_mask(x, q));
        e.min_of_max = std::min(e.min_of_max, max_rot_mask(x, q));
    });
    std::lock_guard lock(mu);
    cache.emplace(std::make_pair(p, q), e);
    return e;
}

void require_coprime_primitive(const SymbolicWord& w, const char* who) {
    if (w.empty()) throw std::invalid_argument(std::string(who) + ": empty word");
    auto p = static_cast<std::int64_t>(w.r_count()), q = static_cast<std::int64_t>(w.size());
    if (!w.is_primitive()) throw std::invalid_argument(std::string(who) + ": word is not primitive");
    if (std::gcd(p, q) != 1) throw std::invalid_argument(std::string(who) + ": gcd(p,q) != 1");
}

}  // namespace

std::size_t minimal_rotation_offset(const SymbolicWord& w) {
    if (w.empty()) throw std::invalid_argument("minimal_rotation: empty word");
    return booth(w, false);
}

SymbolicWord minimal_rotation(const SymbolicWord& w) { return shift(w, minimal_rotation_offset(w)); }

SymbolicWord maximal_rotation(const SymbolicWord& w) {
    if (w.empty()) throw std::invalid_argument("maximal_rotation: empty word");
    return shift(w, booth(w, true));
}

Rational eta_number(const SymbolicWord& w) {
    if (w.empty()) throw std::invalid_argument("eta_number: empty word");
    return Rational(static_cast<std::int64_t>(w.r_count()), static_cast<std::int64_t>(w.size()));
}

std::vector<SymbolicWord> enumerate_wpq(int p, int q, bool up_to_rotation) {
    if (q < 1 || p < 0) throw std::invalid_argument("enumerate_wpq: requires 0 <= p and q >= 1");
    if (p > q) throw std::invalid_argument("enumerate_wpq: p > q");
    if (q > 64) throw CapacityError("enumerate_wpq: q above 64");
    std::vector<SymbolicWord> out;
    auto uq = static_cast<unsigned>(q);
    for_each_mask(static_cast<unsigned>(p), uq, [&](std::uint64_t x) {
        if (!up_to_rotation || min_rot_mask(x, uq) == x) out.push_back(SymbolicWord::from_mask(x, uq));
    });
    return out;
}

OrderingWitness is_pq_ordered(const SymbolicWord& w) {
    if (w.empty() || !w.is_primitive()) throw std::invalid_argument("is_pq_ordered: word is not primitive");
    std::size_t q = w.size();
    if (q == 1) return {true, 0};
    std::vector<SymbolicWord> rot;
    rot.reserve(q);
    for (std::size_t i = 0; i < q; ++i) rot.push_back(shift(w, i));
    std::vector<std::size_t> idx(q);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return compare(rot[a], rot[b]) < 0; });
    std::size_t k = (idx[1] + q - idx[0]) % q;
    for (std::size_t j = 1; j + 1 < q; ++j)
        if ((idx[j + 1] + q - idx[j]) % q != k) return {false, 0};
    return {true, k};
}

bool is_maximin(const SymbolicWord& w) {
    require_coprime_primitive(w, "is_maximin");
    if (w.size() > static_cast<std::size_t>(kMaximinBudget))
        throw CapacityError("is_maximin: q above enumeration budget of 24");
    auto q = static_cast<unsigned>(w.size());
    return min_rot_mask(w.mask(), q) == extremes(static_cast<unsigned>(w.r_count()), q).max_of_min;
}

bool is_minimax(const SymbolicWord& w) {
    require_coprime_primitive(w, "is_minimax");
    if (w.size() > static_cast<std::size_t>(kMaximinBudget))
        throw CapacityError("is_minimax: q above enumeration budget of 24");
    auto q = static_cast<unsigned>(w.size());
    return max_rot_mask(w.mask(), q) == extremes(static_cast<unsigned>(w.r_count()), q).min_of_max;
}

SymbolicWord farey_word(const Rational& x) {
    if (x > Rational(1, 1)) throw std::invalid_argument("farey_word: x must lie in [0,1]");
    Rational lo(0, 1), hi(1, 1);
    SymbolicWord wlo("L"), whi("R");
    if (x == lo) return wlo;
    if (x == hi) return whi;
    while (true) {
        Rational m = mediant(lo, hi);
        SymbolicWord wm = wlo + whi;
        if (m == x) {
            if (!(minimal_rotation(wm) == wm))
                throw std::logic_error("farey_word: concatenation is not in minimal form");
            return wm;
        }
        if (x < m) {
            hi = m;
            whi = std::move(wm);
        } else {
            lo = m;
            wlo = std::move(wm);
        }
    }
}

SymbolicWord farey_word(std::int64_t p, std::int64_t q) {
    if (q < 1 || p < 0 || std::gcd(p, q) != 1) throw std::invalid_argument("farey_word: fraction not reduced");
    return farey_word(Rational(p, q));
}

SymbolicWord power_word(std::size_t n) {
    SymbolicWord w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(Symbol::L);
    w.push_back(Symbol::R);
    return w;
}

}  // namespace pwdyn
