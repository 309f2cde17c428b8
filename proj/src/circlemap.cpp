#include "pwdyn/circlemap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pwdyn {

CircleReduction::CircleReduction(const PiecewiseMap1D& m) : source_(std::make_shared<PiecewiseMap1D>(m)) {}

CircleReduction CircleReduction::reduce(const PiecewiseMap1D& m) {
    if (!(m.mu_left() > 0 && m.mu_right() > 0))
        throw std::invalid_argument("reduce: requires mu_L > 0 and mu_R > 0");
    MapClassification cls = m.classify();
    if (!cls.left_increasing) throw std::invalid_argument("reduce: left branch is not increasing");
    if (!cls.right_increasing) throw std::invalid_argument("reduce: non-orientable map (right branch not increasing)");
    CircleReduction r(m);
    r.span_ = m.mu_left() + m.mu_right();
    r.c_ = m.mu_right() / r.span_;
    r.f0_ = r.phi(m.left_image(-m.mu_right()));
    r.f1_ = r.phi(m.right_image(m.mu_left()));
    r.gap_ = r.f0_ - r.f1_;
    if (r.gap_ < -1e-12)
        throw std::domain_error("reduce: negative gap - rotation interval regime, out of scope");
    if (r.gap_ < 0) r.gap_ = 0;
    if (r.f0_ < -1e-12 || r.f0_ > 1 + 1e-12 || r.f1_ < -1e-12 || r.f1_ > 1 + 1e-12)
        throw std::domain_error("reduce: absorbing interval is not invariant");
    r.weak_expansion_ = !cls.contracting;
    return r;
}

double CircleReduction::forward(double y) const {
    double x = phi_inv(y);
    return y < c_ ? phi(source_->left_image(x)) : phi(source_->right_image(x));
}

LiftedCircleMap::LiftedCircleMap(const CircleReduction& r) : reduction_(r) {
    auto red = std::make_shared<const CircleReduction>(r);
    fbar_ = [red](double y) { return red->forward(y); };
    c_ = r.c();
    gap_ = r.gap();
    f1_ = r.image_of_one();
    weak_expansion_ = r.weak_expansion();
}

LiftedCircleMap LiftedCircleMap::rigid_rotation(double omega) {
    if (!(omega >= 0 && omega < 1)) throw std::invalid_argument("rigid_rotation: omega must lie in [0,1)");
    LiftedCircleMap f;
    f.c_ = 1 - omega;
    f.fbar_ = [omega, c = f.c_](double y) { return y < c ? y + omega : y + omega - 1; };
    f.gap_ = 0;
    f.f1_ = omega;
    f.weak_expansion_ = true;
    return f;
}

LiftPoint LiftedCircleMap::split(double x) {
    double fl = std::floor(x);
    return {static_cast<std::int64_t>(fl), x - fl};
}

LiftPoint LiftedCircleMap::step(LiftPoint s, bool left_lateral) const {
    LiftPoint t{s.n, 0.0};
    if (left_lateral && s.y == 0) {
        t.y = f1_;
    } else if (s.y < c_) {
        t.y = fbar_(s.y);
    } else {
        t.y = fbar_(s.y);
        t.n += 1;
    }
    while (t.y >= 1) {
        t.y -= 1;
        t.n += 1;
    }
    while (t.y < 0) {
        t.y += 1;
        t.n -= 1;
    }
    return t;
}

LiftPoint LiftedCircleMap::iterate(LiftPoint s, std::size_t n, bool left_lateral) const {
    for (std::size_t i = 0; i < n; ++i) s = step(s, left_lateral);
    return s;
}

std::optional<Rational> simplest_in_window(double lo, double hi, int q_max) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (lo > hi) return std::nullopt;
    if (lo <= 0) return Rational(0, 1);
    if (hi >= 1) return Rational(1, 1);
    std::int64_t a = 0, b = 1, c = 1, d = 1;
    while (b + d <= q_max) {
        std::int64_t p = a + c, q = b + d;
        double v = static_cast<double>(p) / static_cast<double>(q);
        if (v < lo) {
            a = p;
            b = q;
        } else if (v > hi) {
            c = p;
            d = q;
        } else {
            return Rational(p, q);
        }
    }
    return std::nullopt;
}

namespace {

double g_value(const LiftedCircleMap& f, double x, std::int64_t p, std::int64_t q) {
    LiftPoint s = LiftedCircleMap::split(x);
    LiftPoint t = f.iterate(s, static_cast<std::size_t>(q));
    return static_cast<double>(t.n - s.n - p) + (t.y - s.y);
}

}  // namespace

std::optional<Lock> lock_rational(const LiftedCircleMap& f, double estimate, double err, int q_max, double tol) {
    if (q_max < 1) throw std::invalid_argument("lock_rational: q_max must be >= 1");
    if (!(err < 1.0 / (2.0 * q_max * q_max)))
        throw std::invalid_argument("lock_rational: err must be below 1/(2 q_max^2)");
    auto cand = simplest_in_window(estimate - err, estimate + err, q_max);
    if (!cand) return std::nullopt;
    std::int64_t p = cand->p(), q = cand->q();
    constexpr int kScan = 4096;
    std::vector<double> g(kScan + 1);
    for (int i = 0; i <= kScan; ++i) {
        double x = static_cast<double>(i) / kScan;
        g[i] = g_value(f, x, p, q);
        if (std::abs(g[i]) < tol) return Lock{*cand, x, std::abs(g[i]), false};
    }
    std::optional<Lock> one_sided;
    for (int i = 0; i < kScan; ++i) {
        if ((g[i] > 0) == (g[i + 1] > 0)) continue;
        double a = static_cast<double>(i) / kScan, b = static_cast<double>(i + 1) / kScan;
        double ga = g[i];
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (a + b);
            if (mid == a || mid == b) break;
            double gm = g_value(f, mid, p, q);
            if ((gm > 0) == (ga > 0)) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        double gb = g_value(f, b, p, q);
        double xa = a, ra = std::abs(ga), rb = std::abs(gb);
        double x = ra <= rb ? xa : b, r = std::min(ra, rb);
        if (r >= tol) continue;
        if (g[i] > 0) return Lock{*cand, x, r, false};
        if (!one_sided) one_sided = Lock{*cand, x, r, true};
    }
    return one_sided;
}

RotationResult rotation_number(const LiftedCircleMap& f, const RotationOptions& opt) {
    if (opt.n < 100) throw std::invalid_argument("rotation_number: N must be >= 100");
    RotationResult r;
    double x0 = opt.seed.value_or(f.c() / 2);
    LiftPoint s = LiftedCircleMap::split(x0);
    LiftPoint t = f.iterate(s, opt.n);
    LiftPoint u = f.iterate(s, opt.n, true);
    double nn = static_cast<double>(opt.n);
    r.estimate = (static_cast<double>(t.n - s.n) + (t.y - s.y)) / nn;
    r.left_estimate = (static_cast<double>(u.n - s.n) + (u.y - s.y)) / nn;
    r.error_bound = 1.0 / nn;
    r.boundary_sensitive = std::abs(r.estimate - r.left_estimate) > 2.0 / nn;
    // largest denominator the window can still separate
    int q_eff = opt.q_max;
    while (q_eff > 1 && !(r.error_bound < 1.0 / (2.0 * q_eff * q_eff))) --q_eff;
    if (r.error_bound < 1.0 / (2.0 * q_eff * q_eff)) {
        if (auto lock = lock_rational(f, r.estimate, r.error_bound, q_eff, opt.lock_tol)) {
            r.locked = lock->ratio;
            r.lock_residual = lock->residual;
            r.x_star = lock->x_star;
            r.one_sided = lock->one_sided;
        }
    }
    return r;
}

std::vector<double> cycle_points(const LiftedCircleMap& f, double x_star, std::size_t q) {
    std::vector<double> pts;
    LiftPoint s = LiftedCircleMap::split(x_star);
    for (std::size_t i = 0; i < q; ++i) {
        pts.push_back(s.y);
        s = f.step(s);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

bool verify_pq_ordering(const LiftedCircleMap& f, const std::vector<double>& orbit, std::int64_t p, double tol) {
    auto q = static_cast<std::int64_t>(orbit.size());
    if (q == 0) return false;
    for (std::int64_t i = 0; i < q; ++i) {
        std::int64_t j = i + p;
        double target = orbit[static_cast<std::size_t>(j % q)] + static_cast<double>(j / q);
        LiftPoint s = LiftedCircleMap::split(orbit[static_cast<std::size_t>(i)]);
        if (std::abs(f.step(s).value() - target) > tol) return false;
        LiftPoint t = f.iterate(s, static_cast<std::size_t>(q));
        if (std::abs(static_cast<double>(t.n - s.n - p) + (t.y - s.y)) > tol) return false;
    }
    return true;
}

std::string to_string(OmegaKind k) {
    switch (k) {
        case OmegaKind::Periodic: return "periodic";
        case OmegaKind::CantorLike: return "cantor-like";
        case OmegaKind::Undecided: return "undecided";
    }
    return "undecided";
}

OmegaVerdict classify_omega_limit(const LiftedCircleMap& f, std::size_t n, int q_max) {
    OmegaVerdict v;
    RotationOptions opt;
    opt.n = n;
    opt.q_max = q_max;
    RotationResult rr = rotation_number(f, opt);
    if (rr.locked) {
        v.kind = OmegaKind::Periodic;
        v.ratio = rr.locked;
        return v;
    }
    if (!(f.gap() > 1e-12)) return v;
    // holes: forward images of the gap interval U = (f(1-), f(0+))
    struct Hole {
        double a, b;
    };
    double u0 = f.left_limit(0.0), u1 = f(0.0);
    std::vector<Hole> holes{{u0, u1}};
    std::vector<Hole> front = holes;
    std::size_t steps = std::min<std::size_t>(n, 512);
    for (std::size_t i = 0; i < steps && !front.empty(); ++i) {
        std::vector<Hole> next;
        for (const Hole& h : front) {
            double a = f(h.a);
            double b = h.b >= 1.0 ? f.left_limit(1.0) : f(h.b);
            if (b - a < 1e-15) continue;
            double k = std::floor(a);
            a -= k;
            b -= k;
            if (b > 1) {
                next.push_back({a, 1.0});
                next.push_back({0.0, b - 1});
            } else {
                next.push_back({a, b});
            }
        }
        holes.insert(holes.end(), next.begin(), next.end());
        front = std::move(next);
    }
    for (const Hole& h : holes) v.hole_measure += h.b - h.a;
    LiftPoint s = LiftedCircleMap::split(f.c() / 2);
    s = f.iterate(s, n);
    for (int i = 0; i < 1000; ++i) {
        for (const Hole& h : holes)
            if (s.y > h.a + 1e-12 && s.y < h.b - 1e-12) {
                ++v.tail_hits;
                break;
            }
        s = f.step(s);
    }
    if (v.tail_hits == 0 && v.hole_measure >= f.gap()) v.kind = OmegaKind::CantorLike;
    return v;
}

}  // namespace pwdyn
