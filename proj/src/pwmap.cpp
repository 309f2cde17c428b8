#include "pwdyn/pwmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pwdyn {

Branch Branch::linear(double slope) {
    if (!std::isfinite(slope)) throw std::invalid_argument("branch: non-finite slope");
    Branch b;
    b.slope_ = slope;
    b.f_ = [slope](double x) { return slope * x; };
    b.df_ = [slope](double) { return slope; };
    b.name_ = "linear";
    return b;
}

Branch Branch::custom(Fn f, Fn df, std::string name) {
    if (!f) throw std::invalid_argument("branch: empty function");
    double f0 = f(0.0);
    if (!(std::abs(f0) <= 1e-12)) throw std::invalid_argument("branch: f(0) must vanish (got " + std::to_string(f0) + ")");
    Branch b;
    b.f_ = std::move(f);
    b.df_ = std::move(df);
    b.name_ = std::move(name);
    return b;
}

double Branch::derivative(double x) const {
    if (slope_) return *slope_;
    if (df_) return df_(x);
    double h = 1e-6 * std::max(1.0, std::abs(x));
    return (f_(x + h) - f_(x - h)) / (2 * h);
}

double Branch::derivative_one_sided(double x, int side) const {
    if (slope_) return *slope_;
    if (df_) return df_(x);
    double h = 1e-6 * std::max(1.0, std::abs(x));
    if (side < 0 && x + h >= 0) return (f_(x) - f_(x - h)) / h;
    if (side > 0 && x - h <= 0) return (f_(x + h) - f_(x)) / h;
    return (f_(x + h) - f_(x - h)) / (2 * h);
}

std::string to_string(BoundaryRule r) {
    switch (r) {
        case BoundaryRule::LeftImage: return "left-image";
        case BoundaryRule::RightImage: return "right-image";
        case BoundaryRule::Bivalued: return "bivalued";
    }
    return "bivalued";
}

BoundaryRule boundary_rule_from_string(const std::string& s) {
    if (s == "left-image") return BoundaryRule::LeftImage;
    if (s == "right-image") return BoundaryRule::RightImage;
    if (s == "bivalued") return BoundaryRule::Bivalued;
    throw std::invalid_argument("unknown boundary rule '" + s + "'");
}

PiecewiseMap1D::PiecewiseMap1D(Branch left, Branch right, double mu_left, double mu_right, BoundaryRule rule)
    : left_(std::move(left)), right_(std::move(right)), mu_l_(mu_left), mu_r_(mu_right), rule_(rule) {
    if (!std::isfinite(mu_left) || !std::isfinite(mu_right)) throw std::invalid_argument("pwmap: non-finite offset");
}

PiecewiseMap1D PiecewiseMap1D::linear(double a, double b, double mu_left, double mu_right, BoundaryRule rule) {
    return PiecewiseMap1D(Branch::linear(a), Branch::linear(b), mu_left, mu_right, rule);
}

double PiecewiseMap1D::branch_derivative(Symbol s, double x) const {
    return s == Symbol::L ? left_.derivative_one_sided(x, -1) : right_.derivative_one_sided(x, 1);
}

Image PiecewiseMap1D::apply(double x) const {
    if (!std::isfinite(x)) throw std::invalid_argument("apply: non-finite state");
    if (x < 0) return {left_image(x), std::nullopt};
    if (x > 0) return {right_image(x), std::nullopt};
    switch (rule_) {
        case BoundaryRule::LeftImage: return {mu_l_, std::nullopt};
        case BoundaryRule::RightImage: return {-mu_r_, std::nullopt};
        case BoundaryRule::Bivalued: return {mu_l_, -mu_r_};
    }
    return {mu_l_, -mu_r_};
}

std::pair<double, double> PiecewiseMap1D::absorbing_interval() const {
    if (mu_l_ > 0 && mu_r_ > 0) {
        bool decreasing = true;
        for (int i = 1; i <= 8; ++i) decreasing = decreasing && right_.derivative(mu_l_ * i / 8.0) < 0;
        if (decreasing) return {right_image(mu_l_), mu_l_};
        return {-mu_r_, mu_l_};
    }
    double s = std::max(std::abs(mu_l_), std::abs(mu_r_));
    if (s == 0) s = 1;
    return {-2 * s, 2 * s};
}

MapClassification PiecewiseMap1D::classify(int samples) const {
    MapClassification c;
    auto [lo, hi] = absorbing_interval();
    c.lo = lo;
    c.hi = hi;
    if (lo >= 0 || hi <= 0) {
        double s = std::max(std::abs(lo), std::abs(hi));
        lo = -s;
        hi = s;
    }
    bool l_inc = true, r_inc = true, r_dec = true;
    for (int i = 0; i < samples; ++i) {
        double t = (i + 0.5) / samples;
        double xl = lo * (1 - t);
        double xr = hi * t;
        double dl = left_.derivative_one_sided(xl, -1), dr = right_.derivative_one_sided(xr, 1);
        l_inc = l_inc && dl > 0;
        r_inc = r_inc && dr > 0;
        r_dec = r_dec && dr < 0;
        c.left_sup_slope = std::max(c.left_sup_slope, std::abs(dl));
        c.right_sup_slope = std::max(c.right_sup_slope, std::abs(dr));
    }
    c.left_increasing = l_inc;
    c.right_increasing = r_inc;
    c.right_decreasing = r_dec;
    c.contracting = std::max(c.left_sup_slope, c.right_sup_slope) * 1.01 < 1.0;
    if (!l_inc) c.warnings.push_back("left branch not increasing on the sampled interval");
    if (!r_inc && !r_dec) c.warnings.push_back("right branch not monotone on the sampled interval");
    if (!c.contracting) c.warnings.push_back("branches not contracting within the 1% margin");
    return c;
}

Itinerary itinerary(const PiecewiseMap1D& m, double x0, std::size_t n, double boundary_eps) {
    if (n < 1) throw std::invalid_argument("itinerary: n must be >= 1");
    Itinerary it;
    double x = x0;
    it.states.push_back(x);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(x) < boundary_eps) {
            it.boundary_hit = true;
            it.hit_index = k;
            break;
        }
        it.symbols.push_back(x < 0 ? Symbol::L : Symbol::R);
        x = m.step(x);
        it.states.push_back(x);
    }
    return it;
}

std::string to_string(AttractorStatus s) {
    switch (s) {
        case AttractorStatus::Periodic: return "periodic";
        case AttractorStatus::Aperiodic: return "aperiodic";
        case AttractorStatus::Divergent: return "divergent";
        case AttractorStatus::BoundaryCollision: return "border-collision";
    }
    return "aperiodic";
}

std::optional<double> refine_cycle(const PiecewiseMap1D& m, const SymbolicWord& word, double x0) {
    auto h = [&](double x) {
        double y = x;
        for (std::size_t i = 0; i < word.size(); ++i) y = m.image(word[i], y);
        return y - x;
    };
    double h0 = h(x0);
    if (h0 == 0) return x0;
    double scale = std::max(1.0, std::abs(x0));
    for (double d = 1e-13 * scale; d < 1e-3 * scale; d *= 4) {
        double a = x0 - d, b = x0 + d;
        double ha = h(a), hb = h(b);
        if (!std::isfinite(ha) || !std::isfinite(hb)) return std::nullopt;
        if ((ha < 0) == (hb < 0) && ha != 0 && hb != 0) continue;
        if (ha == 0) return a;
        if (hb == 0) return b;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (a + b);
            if (mid == a || mid == b) break;
            double hm = h(mid);
            if (hm == 0) return mid;
            if ((hm < 0) == (ha < 0)) {
                a = mid;
                ha = hm;
            } else {
                b = mid;
            }
        }
        return std::abs(ha) <= std::abs(h(b)) ? a : b;
    }
    return std::nullopt;
}

OrbitRecord make_orbit(const PiecewiseMap1D& m, double x0, const SymbolicWord& word) {
    OrbitRecord o;
    o.period = word.size();
    o.word = word;
    o.eta = eta_number(word);
    double x = x0;
    double mult = 1.0;
    for (std::size_t i = 0; i < word.size(); ++i) {
        o.points.push_back(x);
        mult *= m.branch_derivative(word[i], x);
        x = m.image(word[i], x);
    }
    o.multiplier = mult;
    o.stable = std::abs(mult) < 1.0;
    return o;
}

namespace {

bool signs_match(const OrbitRecord& o) {
    for (std::size_t i = 0; i < o.period; ++i) {
        bool neg = o.points[i] < 0;
        if (neg != (o.word[i] == Symbol::L) || o.points[i] == 0) return false;
    }
    return true;
}

}  // namespace

AttractorResult find_attractor(const PiecewiseMap1D& m, double x0, const AttractorOptions& opt) {
    AttractorResult res;
    double x = x0;
    auto bad = [&](double v) -> bool {
        if (!std::isfinite(v) || std::abs(v) > opt.divergence) {
            res.status = AttractorStatus::Divergent;
            res.message = "orbit left |x| <= 1e8";
            return true;
        }
        if (std::abs(v) < opt.boundary_eps) {
            res.status = AttractorStatus::BoundaryCollision;
            res.message = "orbit entered the boundary band";
            return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < opt.burn_in; ++i) {
        if (bad(x)) return res;
        x = m.step(x);
    }
    std::size_t n = 2 * opt.max_period + 1;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (bad(x)) return res;
        s[i] = x;
        x = m.step(x);
    }
    for (std::size_t p = 1; p <= opt.max_period; ++p) {
        bool closed = true;
        for (std::size_t k = 0; k < p && closed; ++k) closed = std::abs(s[k + p] - s[k]) < opt.tol;
        if (!closed) continue;
        SymbolicWord raw;
        for (std::size_t k = 0; k < p; ++k) raw.push_back(s[k] < 0 ? Symbol::L : Symbol::R);
        std::size_t off = minimal_rotation_offset(raw);
        SymbolicWord word = shift(raw, off);
        double start = s[off];
        OrbitRecord orbit = make_orbit(m, start, word);
        if (auto r = refine_cycle(m, word, start)) {
            OrbitRecord refined = make_orbit(m, *r, word);
            if (signs_match(refined)) orbit = std::move(refined);
        }
        res.status = AttractorStatus::Periodic;
        res.eta_estimate = orbit.eta.value();
        res.orbit = std::move(orbit);
        return res;
    }
    std::size_t r = 0;
    for (std::size_t i = 0; i < opt.tail; ++i) {
        if (bad(x)) return res;
        r += x > 0;
        x = m.step(x);
    }
    res.status = AttractorStatus::Aperiodic;
    res.eta_estimate = static_cast<double>(r) / static_cast<double>(opt.tail);
    return res;
}

}  // namespace pwdyn
