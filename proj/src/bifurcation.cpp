#include "pwdyn/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pwdyn/parallel.hpp"

namespace pwdyn {

ParamCurve ParamCurve::quarter_circle(double radius) {
    if (!(radius > 0)) throw std::invalid_argument("quarter_circle: radius must be positive");
    ParamCurve c;
    c.mu_left = [radius](double l) { return radius * std::sin(l * std::numbers::pi / 2); };
    c.mu_right = [radius](double l) { return radius * std::sin((1 - l) * std::numbers::pi / 2); };
    c.description = "quarter-circle radius=" + std::to_string(radius);
    return c;
}

ParamCurve::Check ParamCurve::validate(int samples) const {
    Check ch;
    if (!mu_left || !mu_right) {
        ch.h1 = ch.h2 = ch.h3 = false;
        ch.issues.push_back("curve functions missing");
        return ch;
    }
    if (std::abs(mu_left(0.0)) > 1e-10 || std::abs(mu_right(1.0)) > 1e-10) {
        ch.h3 = false;
        ch.issues.push_back("curve: mu_L(0) and mu_R(1) must vanish");
    }
    double h = 0.25 / samples;
    for (int i = 0; i < samples; ++i) {
        double l = (i + 0.5) / samples;
        if (!(mu_left(l) > 0 && mu_right(l) > 0)) ch.h1 = false;
        double a = std::max(0.0, l - h), b = std::min(1.0, l + h);
        if (!(mu_left(b) > mu_left(a)) || !(mu_right(b) < mu_right(a))) ch.h2 = false;
    }
    if (!ch.h1) ch.issues.push_back("curve: offsets must be positive inside (0,1)");
    if (!ch.h2) ch.issues.push_back("curve: mu_L must increase and mu_R decrease");
    return ch;
}

MapFamily make_family(const Branch& left, const Branch& right, const ParamCurve& curve, BoundaryRule rule) {
    auto check = curve.validate();
    if (!check.ok()) {
        std::string msg = "curve violates";
        for (auto& s : check.issues) msg += " [" + s + "]";
        throw std::invalid_argument(msg);
    }
    return [left, right, curve, rule](double l) {
        return PiecewiseMap1D(left, right, curve.mu_left(l), curve.mu_right(l), rule);
    };
}

PlaneFamily make_plane_family(const Branch& left, const Branch& right, BoundaryRule rule) {
    return [left, right, rule](double ml, double mr) { return PiecewiseMap1D(left, right, ml, mr, rule); };
}

namespace {

double solve_monotone(const std::function<double(double)>& h, const std::function<double(double)>& dh, double lo,
                      double hi) {
    // h(lo) and h(hi) bracket a root; guarded Newton with bisection fallback
    double hlo = h(lo);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double hx = h(x);
        if (hx == 0) return x;
        if ((hx < 0) == (hlo < 0)) {
            lo = x;
            hlo = hx;
        } else {
            hi = x;
        }
        if (hi - lo <= 1e-12 * std::max(1.0, std::abs(x))) break;
        double d = dh(x);
        double nx = d != 0 ? x - hx / d : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        x = nx;
    }
    return x;
}

double left_inverse(const PiecewiseMap1D& m, double target) {
    if (auto s = m.left().slope()) return (target - m.mu_left()) / *s;
    auto h = [&](double x) { return m.left_image(x) - target; };
    auto dh = [&](double x) { return m.branch_derivative(Symbol::L, x); };
    double lo = -1.0;
    for (int i = 0; i < 200 && h(lo) >= 0; ++i) lo *= 2;
    if (h(lo) >= 0) throw std::runtime_error("left_inverse: no bracket");
    return solve_monotone(h, dh, lo, 0.0);
}

double right_inverse(const PiecewiseMap1D& m, double target) {
    if (auto s = m.right().slope()) return (target + m.mu_right()) / *s;
    auto h = [&](double x) { return m.right_image(x) - target; };
    auto dh = [&](double x) { return m.branch_derivative(Symbol::R, x); };
    double hi = 1.0;
    for (int i = 0; i < 200 && h(hi) >= 0; ++i) hi *= 2;
    if (h(hi) >= 0) throw std::runtime_error("right_inverse: no bracket");
    return solve_monotone(h, dh, 0.0, hi);
}

}  // namespace

std::vector<SymbolicWord> IncrementingGeometry::predicted_words() const {
    switch (kind) {
        case IncCase::S1: return {power_word(n - 1), power_word(n)};
        case IncCase::S2: return {power_word(n)};
        case IncCase::S3: return {power_word(n), power_word(n + 1)};
    }
    return {};
}

std::string IncrementingGeometry::label() const {
    const char* k = kind == IncCase::S1 ? "S1" : kind == IncCase::S2 ? "S2" : "S3";
    return std::string(k) + "(" + std::to_string(n) + ")";
}

IncrementingGeometry incrementing_case(const PiecewiseMap1D& m, std::size_t depth) {
    if (!(m.mu_left() > 0 && m.mu_right() > 0))
        throw std::invalid_argument("incrementing_case: requires mu_L > 0 and mu_R > 0");
    for (int i = 1; i <= 8; ++i)
        if (!(m.branch_derivative(Symbol::R, m.mu_left() * i / 8.0) < 0))
            throw std::invalid_argument("incrementing_case: right branch is not decreasing");
    IncrementingGeometry g;
    g.image_hi = -m.mu_right();
    g.image_lo = m.right_image(m.mu_left());
    g.a.push_back(0.0);
    while (g.a.back() >= g.image_lo) {
        if (g.a.size() > depth) throw std::runtime_error("incrementing_case: depth exhausted");
        g.a.push_back(left_inverse(m, g.a.back()));
    }
    auto in_image = [&](double v) { return v >= g.image_lo && v < g.image_hi; };
    std::size_t hits = 0;
    for (double v : g.a) hits += in_image(v);
    if (hits > 1) throw std::logic_error("incrementing_case: more than one a_j inside f_R((0, mu_L])");
    std::size_t n = 1;
    while (n < g.a.size() && !(g.a[n] < g.image_hi)) ++n;
    g.n = n;
    for (double v : g.a) g.b.push_back(v < -m.mu_right() ? right_inverse(m, v) : std::numeric_limits<double>::quiet_NaN());
    if (in_image(g.a[n])) {
        g.kind = IncCase::S3;
        g.split = g.b[n];
    } else {
        g.kind = IncCase::S2;
    }
    return g;
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::FixedPoint: return "fixed-point";
        case Outcome::Periodic: return "periodic";
        case Outcome::Coexistence: return "coexistence";
        case Outcome::Aperiodic: return "aperiodic";
        case Outcome::BorderCollision: return "border-collision";
    }
    return "aperiodic";
}

std::optional<Rational> ScanRecord::eta() const {
    if (rho && rho->locked) return rho->locked;
    if (orbits.size() == 1) return orbits.front().eta;
    return std::nullopt;
}

namespace {

bool same_orbit(const OrbitRecord& a, const OrbitRecord& b) {
    if (!(a.word == b.word)) return false;
    double scale = std::max(1.0, std::abs(a.points[0]));
    return std::abs(a.points[0] - b.points[0]) < 1e-7 * scale;
}

}  // namespace

ScanRecord classify_point(const PiecewiseMap1D& m, const ScanOptions& opt) {
    ScanRecord rec;
    rec.mu_left = m.mu_left();
    rec.mu_right = m.mu_right();
    auto [lo, hi] = m.absorbing_interval();
    double radius = std::max(std::abs(lo), std::abs(hi));
    std::vector<double> seeds{radius / 2, -radius / 2, m.mu_left(), -m.mu_right()};
    bool collision = false, divergent = false;
    for (double s : seeds) {
        if (s == 0) continue;
        AttractorResult r = find_attractor(m, s, opt.attractor);
        if (r.status == AttractorStatus::BoundaryCollision) collision = true;
        if (r.status == AttractorStatus::Divergent) divergent = true;
        if (r.status != AttractorStatus::Periodic) continue;
        bool dup = false;
        for (const auto& o : rec.orbits) dup = dup || same_orbit(o, *r.orbit);
        if (!dup) rec.orbits.push_back(*r.orbit);
    }
    std::sort(rec.orbits.begin(), rec.orbits.end(),
              [](const OrbitRecord& a, const OrbitRecord& b) {
                  if (a.period != b.period) return a.period < b.period;
                  return a.points[0] < b.points[0];
              });
    if (rec.orbits.empty())
        rec.outcome = collision ? Outcome::BorderCollision : Outcome::Aperiodic;
    else if (rec.orbits.size() == 1)
        rec.outcome = rec.orbits[0].period == 1 ? Outcome::FixedPoint : Outcome::Periodic;
    else
        rec.outcome = Outcome::Coexistence;
    if (divergent) rec.message = "divergent seed";
    if (rec.orbits.size() > 2) rec.message = "more than two attractors";

    bool left_end = m.mu_left() <= 0 && m.mu_right() > 0, right_end = m.mu_right() <= 0 && m.mu_left() > 0;
    if ((left_end || right_end) && opt.with_rotation && m.classify().right_increasing) {
        rec.orientable = true;
        RotationResult r;
        r.estimate = right_end ? 1.0 : 0.0;
        r.left_estimate = r.estimate;
        r.locked = right_end ? Rational(1, 1) : Rational(0, 1);
        rec.rho = r;
    }
    if (m.mu_left() > 0 && m.mu_right() > 0) {
        MapClassification cls = m.classify();
        rec.orientable = cls.right_increasing;
        rec.weak_expansion = !cls.contracting;
        try {
            if (rec.orientable && opt.with_rotation) {
                LiftedCircleMap f(CircleReduction::reduce(m));
                rec.rho = rotation_number(f, opt.rotation);
            } else if (cls.right_decreasing && opt.with_geometry) {
                rec.geometry = incrementing_case(m);
            }
        } catch (const std::logic_error& e) {
            rec.message += rec.message.empty() ? e.what() : std::string("; ") + e.what();
        } catch (const std::runtime_error& e) {
            rec.message += rec.message.empty() ? e.what() : std::string("; ") + e.what();
        }
    }
    return rec;
}

std::vector<ScanRecord> scan_curve(const MapFamily& family, std::size_t samples, const ScanOptions& opt) {
    if (samples < 2) throw std::invalid_argument("scan_curve: samples must be >= 2");
    return parallel_map(samples, opt.jobs, [&](std::size_t i) {
        double l = static_cast<double>(i) / static_cast<double>(samples - 1);
        ScanRecord rec;
        try {
            rec = classify_point(family(l), opt);
        } catch (const std::exception& e) {
            rec.message = e.what();
        }
        rec.index = i;
        rec.lambda = l;
        return rec;
    });
}

StaircasePoint staircase_point(const PiecewiseMap1D& m, double lambda, const RotationOptions& opt) {
    StaircasePoint p;
    p.lambda = lambda;
    p.mu_left = m.mu_left();
    p.mu_right = m.mu_right();
    if (m.mu_left() <= 0 && m.mu_right() > 0) {
        p.eta = Rational(0, 1);
    } else if (m.mu_right() <= 0 && m.mu_left() > 0) {
        p.eta = Rational(1, 1);
    } else if (m.mu_left() > 0 && m.mu_right() > 0) {
        try {
            LiftedCircleMap f(CircleReduction::reduce(m));
            p.rho = rotation_number(f, opt);
            p.eta = p.rho->locked;
        } catch (const std::exception&) {
        }
    }
    return p;
}

std::vector<StaircasePoint> staircase(const MapFamily& family, std::size_t samples, const RotationOptions& opt,
                                      std::size_t jobs) {
    if (samples < 2) throw std::invalid_argument("staircase: samples must be >= 2");
    return parallel_map(samples, jobs, [&](std::size_t i) {
        double l = static_cast<double>(i) / static_cast<double>(samples - 1);
        return staircase_point(family(l), l, opt);
    });
}

bool attractor_has_rotation(const PiecewiseMap1D& m, const Rational& r, const AttractorOptions& opt) {
    if (m.mu_left() <= 0 || m.mu_right() <= 0) {
        if (m.mu_left() <= 0 && m.mu_right() > 0) return r == Rational(0, 1);
        if (m.mu_right() <= 0 && m.mu_left() > 0) return r == Rational(1, 1);
        return false;
    }
    AttractorOptions o = opt;
    o.max_period = static_cast<std::size_t>(r.q());
    AttractorResult a = find_attractor(m, -m.mu_right() / 2, o);
    return a.status == AttractorStatus::Periodic && a.orbit->eta == r;
}

std::vector<Plateau> extract_plateaus(const MapFamily& family, const std::vector<StaircasePoint>& pts,
                                      int refine_steps, std::size_t jobs) {
    std::vector<Plateau> out;
    for (std::size_t i = 0; i < pts.size();) {
        if (!pts[i].eta) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < pts.size() && pts[j + 1].eta == pts[i].eta) ++j;
        Plateau p;
        p.eta = *pts[i].eta;
        p.first = i;
        p.last = j;
        p.lambda_lo = pts[i].lambda;
        p.lambda_hi = pts[j].lambda;
        out.push_back(p);
        i = j + 1;
    }
    auto refined = parallel_map(out.size(), jobs, [&](std::size_t k) {
        Plateau p = out[k];
        auto bisect = [&](double inside, double outside) {
            for (int s = 0; s < refine_steps; ++s) {
                double mid = 0.5 * (inside + outside);
                if (attractor_has_rotation(family(mid), p.eta)) inside = mid;
                else outside = mid;
            }
            return inside;
        };
        if (p.first > 0) p.lambda_lo = bisect(pts[p.first].lambda, pts[p.first - 1].lambda);
        if (p.last + 1 < pts.size()) p.lambda_hi = bisect(pts[p.last].lambda, pts[p.last + 1].lambda);
        double mid = pts[(p.first + p.last) / 2].lambda;
        PiecewiseMap1D m = family(mid);
        if (m.mu_left() > 0 && m.mu_right() > 0) {
            AttractorResult a = find_attractor(m, -m.mu_right() / 2);
            if (a.status == AttractorStatus::Periodic && a.orbit->eta == p.eta) p.word = a.orbit->word;
        } else {
            p.word = SymbolicWord(p.eta == Rational(0, 1) ? "L" : "R");
        }
        return p;
    });
    return refined;
}

std::vector<PlaneCell> scan_plane(const PlaneFamily& family, const PlaneGrid& grid, const ScanOptions& opt) {
    if (grid.width < 1 || grid.height < 1) throw std::invalid_argument("scan_plane: empty grid");
    ScanOptions o = opt;
    o.with_rotation = false;
    o.with_geometry = false;
    std::size_t n = grid.width * grid.height;
    return parallel_map(n, opt.jobs, [&](std::size_t k) {
        PlaneCell c;
        c.i = k % grid.width;
        c.j = k / grid.width;
        auto at = [](double lo, double hi, std::size_t i, std::size_t w) {
            return w == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(w - 1);
        };
        c.mu_left = at(grid.mu_left_min, grid.mu_left_max, c.i, grid.width);
        c.mu_right = at(grid.mu_right_min, grid.mu_right_max, c.j, grid.height);
        try {
            ScanRecord r = classify_point(family(c.mu_left, c.mu_right), o);
            c.outcome = r.outcome;
            for (const auto& orb : r.orbits) {
                c.periods.push_back(orb.period);
                c.etas.push_back(orb.eta);
                c.words.push_back(orb.word);
            }
        } catch (const std::exception&) {
            c.outcome = Outcome::Aperiodic;
        }
        return c;
    });
}

SymbolicWord Codim2Reduction::expand_word(const SymbolicWord& w) const {
    SymbolicWord out;
    for (std::size_t i = 0; i < w.size(); ++i) out = out + (w[i] == Symbol::L ? word_x : word_y);
    return out;
}

OrbitRecord Codim2Reduction::expand(const OrbitRecord& composed_orbit) const {
    return make_orbit(source, composed_orbit.points.at(0), expand_word(composed_orbit.word));
}

namespace {

struct Composite {
    PiecewiseMap1D src;
    SymbolicWord word;
    double value(double z) const {
        for (std::size_t i = 0; i < word.size(); ++i) z = src.image(word[i], z);
        return z;
    }
    double derivative(double z) const {
        double d = 1.0;
        for (std::size_t i = 0; i < word.size(); ++i) {
            d *= src.branch_derivative(word[i], z);
            z = src.image(word[i], z);
        }
        return d;
    }
    bool consistent(double z) const {
        for (std::size_t i = 0; i < word.size(); ++i) {
            if ((word[i] == Symbol::L) != (z < 0)) return false;
            z = src.image(word[i], z);
        }
        return true;
    }
};

}  // namespace

Codim2Reduction codim2_reduce(const PiecewiseMap1D& source, const SymbolicWord& word_x, const SymbolicWord& word_y,
                              double radius, int checks) {
    if (word_x.empty() || word_y.empty() || !word_x.is_primitive() || !word_y.is_primitive())
        throw std::invalid_argument("codim2_reduce: words must be primitive");
    if (word_x[0] != Symbol::L || word_y[0] != Symbol::R)
        throw std::invalid_argument("codim2_reduce: word_x must start with L and word_y with R");
    if (!(radius > 0)) throw std::invalid_argument("codim2_reduce: radius must be positive");
    auto cx = std::make_shared<Composite>(Composite{source, word_x});
    auto cy = std::make_shared<Composite>(Composite{source, word_y});
    for (int k = 1; k <= checks; ++k) {
        double z = radius * k / checks;
        if (!cx->consistent(-z) || !cy->consistent(z))
            throw std::domain_error("codim2_reduce: composed branch not defined on the neighborhood (domain mismatch)");
    }
    // lateral values at 0 follow the first symbol of each word
    double gl0 = source.mu_left(), gr0 = -source.mu_right();
    for (std::size_t i = 1; i < word_x.size(); ++i) gl0 = source.image(word_x[i], gl0);
    for (std::size_t i = 1; i < word_y.size(); ++i) gr0 = source.image(word_y[i], gr0);
    Branch left = Branch::custom(
        [cx, gl0](double z) { return z == 0 ? 0.0 : cx->value(z) - gl0; },
        [cx](double z) { return cx->derivative(z); }, "composed");
    Branch right = Branch::custom(
        [cy, gr0](double z) { return z == 0 ? 0.0 : cy->value(z) - gr0; },
        [cy](double z) { return cy->derivative(z); }, "composed");
    PiecewiseMap1D composed(left, right, gl0, -gr0, source.boundary_rule());
    return Codim2Reduction{source, composed, word_x, word_y};
}

namespace {

// cubic Hermite piece on [x0, x1]
double hermite(double x, double x0, double x1, double v0, double v1, double s0, double s1, bool deriv) {
    double h = x1 - x0, t = (x - x0) / h;
    double t2 = t * t, t3 = t2 * t;
    if (!deriv)
        return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * s0 + (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * h * s1;
    return ((6 * t2 - 6 * t) * v0 + (3 * t2 - 4 * t + 1) * h * s0 + (-6 * t2 + 6 * t) * v1 + (3 * t2 - 2 * t) * h * s1) / h;
}

}  // namespace

PiecewiseMap1D quasi_contraction_source(double mu, double nu) {
    // full left map F_L, offset mu_L = F_L(0) = 5
    auto full = [mu, nu](double x, bool deriv) -> double {
        if (x >= -3) return deriv ? -0.5 : 5 - 0.5 * x;
        if (x > -10) return hermite(x, -10, -3, -nu, 6.5, 0.5, -0.5, deriv);
        if (x >= -13) return deriv ? 0.5 : -nu + 5 + 0.5 * x;
        if (x > -15) return hermite(x, -15, -13, mu, -nu - 1.5, 1.0, 0.5, deriv);
        return deriv ? 1.0 : mu + 15 + x;
    };
    Branch left = Branch::custom([full](double x) { return full(x, false) - 5.0; },
                                 [full](double x) { return full(x, true); }, "quasi-contraction-left");
    Branch right = Branch::linear(-1.0);
    return PiecewiseMap1D(left, right, 5.0, 10.0);
}

}  // namespace pwdyn
