#include "pwdyn/models.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

#include "pwdyn/parallel.hpp"

namespace pwdyn {

namespace odeint = boost::numeric::odeint;

ScalarField ScalarField::linear(double a, double c) {
    ScalarField s;
    s.affine = std::make_pair(a, c);
    s.f = [a, c](double x) { return a * x + c; };
    return s;
}

ScalarField ScalarField::custom(std::function<double(double)> fn) {
    if (!fn) throw std::invalid_argument("scalar field: empty function");
    ScalarField s;
    s.f = std::move(fn);
    return s;
}

namespace {

using State = std::array<double, 1>;

struct NumericFlow {
    double x = 0.0;
    std::optional<double> hit;
};

// dopri5 with dense output; the scalar flow is monotone so a crossing shows up at step ends
NumericFlow integrate(const ScalarField& field, double u, double x0, double t_end, std::optional<double> level) {
    NumericFlow out;
    if (level && x0 >= *level) {
        out.hit = 0.0;
        out.x = x0;
        return out;
    }
    if (t_end <= 0) {
        out.x = x0;
        return out;
    }
    auto rhs = [&](const State& s, State& ds, double) { ds[0] = field(s[0]) + u; };
    auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
    State s{x0};
    stepper.initialize(s, 0.0, std::min(1e-3, t_end));
    while (stepper.current_time() < t_end) {
        auto [a, b] = stepper.do_step(rhs);
        if (level) {
            double e = std::min(b, t_end);
            State xe;
            stepper.calc_state(e, xe);
            if (xe[0] >= *level) {
                double lo = a, hi = e;
                while (hi - lo > 1e-13) {
                    double mid = 0.5 * (lo + hi);
                    State xm;
                    stepper.calc_state(mid, xm);
                    if (xm[0] >= *level) hi = mid;
                    else lo = mid;
                }
                out.hit = hi;
                out.x = *level;
                return out;
            }
        }
        if (!std::isfinite(stepper.current_state()[0])) throw std::runtime_error("integrate: non-finite state");
    }
    State xe;
    stepper.calc_state(t_end, xe);
    out.x = xe[0];
    return out;
}

bool closed_form(const ScalarField& f, FlowMethod m) {
    if (m == FlowMethod::ClosedForm && !f.affine) throw std::invalid_argument("flow: closed form needs an affine field");
    return m != FlowMethod::Numeric && f.affine.has_value();
}

}  // namespace

double flow(const ScalarField& field, double u, double x0, double t, FlowMethod method) {
    if (t < 0) throw std::invalid_argument("flow: negative time");
    if (!closed_form(field, method)) return integrate(field, u, x0, t, std::nullopt).x;
    auto [a, c] = *field.affine;
    if (a == 0) return x0 + (c + u) * t;
    double xe = -(c + u) / a;
    return xe + (x0 - xe) * std::exp(a * t);
}

std::optional<double> hitting_time(const ScalarField& field, double u, double x0, double level, double horizon,
                                   FlowMethod method) {
    if (x0 >= level) return 0.0;
    if (!closed_form(field, method)) {
        auto r = integrate(field, u, x0, horizon, level);
        return r.hit;
    }
    auto [a, c] = *field.affine;
    double t;
    if (a == 0) {
        if (c + u <= 0) return std::nullopt;
        t = (level - x0) / (c + u);
    } else {
        double xe = -(c + u) / a;
        double r = (level - xe) / (x0 - xe);
        if (!(r > 0)) return std::nullopt;
        t = std::log(r) / a;
    }
    if (!(t >= 0) || !std::isfinite(t) || t > horizon) return std::nullopt;
    return t;
}

bool relay_sliding(const RelayModel1D& m) {
    double fy = m.field(m.y_star);
    return fy + m.k < 0 && fy - m.k > 0;
}

double relay_branch(const RelayModel1D& m, double y, bool left) {
    return flow(m.field, left ? -m.k : m.k, y, m.T, m.method);
}

RelayMap relay_map(const RelayModel1D& m) {
    if (!(m.T > 0)) throw std::invalid_argument("relay_map: T must be positive");
    double ys = m.y_star;
    double pl = relay_branch(m, ys, true), pr = relay_branch(m, ys, false);
    auto make = [m, ys](bool left, double base) {
        std::function<double(double)> df;
        if (m.field.affine && m.method != FlowMethod::Numeric) {
            double e = std::exp(m.field.affine->first * m.T);
            df = [e](double) { return e; };
        }
        return Branch::custom([m, ys, left, base](double z) { return z == 0 ? 0.0 : relay_branch(m, z + ys, left) - base; },
                              df, left ? "relay-left" : "relay-right");
    };
    RelayMap out{PiecewiseMap1D(make(true, pl), make(false, pr), pl - ys, ys - pr), relay_sliding(m)};
    return out;
}

std::pair<double, double> relay_virtual_points(const RelayModel1D& m) {
    auto root = [&](double target) {
        if (m.field.affine) {
            auto [a, c] = *m.field.affine;
            if (a == 0) throw std::invalid_argument("relay: constant field has no equilibrium");
            return (target - c) / a;
        }
        // decreasing field: bracket then bisect
        double lo = -1, hi = 1;
        for (int i = 0; i < 200 && m.field(lo) < target; ++i) lo *= 2;
        for (int i = 0; i < 200 && m.field(hi) > target; ++i) hi *= 2;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (m.field(mid) > target) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    return {root(-m.k), root(m.k)};
}

MapFamily relay_family(const RelayModel1D& base) {
    auto [yr, yl] = relay_virtual_points(base);
    return [base, yr, yl](double l) {
        RelayModel1D m = base;
        m.y_star = l == 1.0 ? yr : yl - l * (yl - yr);
        return relay_map(m).map;
    };
}

StroboResult if_stroboscopic(const IFModel& m, double x0) {
    if (!(m.d >= 0 && m.d <= 1)) throw std::invalid_argument("if_stroboscopic: d must lie in [0,1]");
    StroboResult r;
    double x = x0, remaining = m.d * m.T;
    while (true) {
        auto th = hitting_time(m.field, m.A, x, m.theta, remaining, m.method);
        if (!th) {
            x = flow(m.field, m.A, x, remaining, m.method);
            break;
        }
        ++r.spikes;
        remaining -= *th;
        x = 0.0;
        if (r.spikes > 10000) {
            r.flagged = true;
            break;
        }
    }
    r.x = flow(m.field, 0.0, x, (1 - m.d) * m.T, m.method);
    return r;
}

std::optional<double> if_sigma(const IFModel& m, int n) {
    double top = std::nextafter(m.theta, 0.0);
    if (if_stroboscopic(m, 0.0).spikes >= n) return 0.0;
    if (if_stroboscopic(m, top).spikes < n) return std::nullopt;
    double lo = 0.0, hi = top;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (if_stroboscopic(m, mid).spikes >= n) hi = mid;
        else lo = mid;
    }
    return hi;
}

IFInducedMap if_induced_map(const IFModel& m) {
    IFInducedMap im;
    im.k0 = if_stroboscopic(m, 0.0).spikes;
    int k1 = if_stroboscopic(m, std::nextafter(m.theta, 0.0)).spikes;
    if (k1 == im.k0) return im;
    if (k1 != im.k0 + 1) throw std::runtime_error("if_induced_map: more than one discontinuity in [0, theta)");
    im.has_discontinuity = true;
    im.sigma = *if_sigma(m, im.k0 + 1);
    double free_t = (1 - m.d) * m.T;
    im.s_minus = flow(m.field, 0.0, m.theta, free_t, m.method);
    im.s_plus = flow(m.field, 0.0, 0.0, free_t, m.method);
    double sg = im.sigma, sm = im.s_minus, sp = im.s_plus;
    Branch left = Branch::custom([m, sg, sm](double z) { return z == 0 ? 0.0 : if_stroboscopic(m, z + sg).x - sm; }, {},
                                 "if-left");
    Branch right = Branch::custom([m, sg, sp](double z) { return z == 0 ? 0.0 : if_stroboscopic(m, z + sg).x - sp; }, {},
                                  "if-right");
    im.map = PiecewiseMap1D(left, right, sm - sg, sg - sp);
    return im;
}

FiringSample firing_sample(const IFModel& m, const RotationOptions& opt) {
    FiringSample s;
    s.A = m.A;
    IFInducedMap im = if_induced_map(m);
    s.n = im.k0;
    if (!im.has_discontinuity) {
        s.rho = Rational(0, 1);
        s.eta = Rational(im.k0, 1);
        double x = 0.0;
        for (int i = 0; i < 2000; ++i) x = if_stroboscopic(m, x).x;
        s.spike_average = Rational(if_stroboscopic(m, x).spikes, 1);
        s.period = 1;
        s.note = "continuous";
        return s;
    }
    s.sigma = im.sigma;
    const PiecewiseMap1D& map = *im.map;
    MapClassification cls = map.classify(256);
    s.contracting = cls.contracting;
    if (map.mu_left() <= 0) {
        s.rho = Rational(0, 1);
    } else if (map.mu_right() <= 0) {
        s.rho = Rational(1, 1);
    } else {
        try {
            LiftedCircleMap f(CircleReduction::reduce(map));
            RotationResult rr = rotation_number(f, opt);
            s.rho = rr.locked;
            if (f.weak_expansion()) s.contracting = false;
        } catch (const std::exception& e) {
            s.note = e.what();
        }
    }
    if (s.rho) s.eta = Rational(im.k0, 1) + *s.rho;
    double seed = 0.5 * (im.s_minus + im.s_plus) - im.sigma;
    AttractorResult a = find_attractor(map, seed == 0 ? 1e-9 : seed);
    if (a.status == AttractorStatus::Periodic) {
        std::int64_t total = 0;
        for (double z : a.orbit->points) total += if_stroboscopic(m, z + im.sigma).spikes;
        s.period = a.orbit->period;
        s.word = a.orbit->word.str();
        s.spike_average = Rational(total, static_cast<std::int64_t>(a.orbit->period));
    }
    if (!s.contracting) s.note = s.note.empty() ? "expansion" : s.note + "; expansion";
    return s;
}

std::vector<FiringSample> firing_number(const IFModel& base, const std::vector<double>& amplitudes,
                                        const RotationOptions& opt, std::size_t jobs) {
    return parallel_map(amplitudes.size(), jobs, [&](std::size_t i) {
        IFModel m = base;
        m.A = amplitudes[i];
        FiringSample s;
        try {
            s = firing_sample(m, opt);
        } catch (const std::exception& e) {
            s.A = amplitudes[i];
            s.note = e.what();
        }
        return s;
    });
}

PlanarRelayModel PlanarRelayModel::companion(double a0, double a1, double b, double c1, double T, double k,
                                             double y_star) {
    PlanarRelayModel m;
    m.A << 0, 1, a0, a1;
    m.B << 0, b;
    m.c1 = c1;
    m.T = T;
    m.k = k;
    m.y_star = y_star;
    return m;
}

Eigen::Matrix2d expm2(const Eigen::Matrix2d& A, double t) {
    double tr = A.trace(), det = A.determinant();
    double disc = tr * tr / 4 - det;
    if (disc < 0) throw std::invalid_argument("expm2: complex eigenvalues");
    double s = std::sqrt(disc);
    double l1 = tr / 2 + s, l2 = tr / 2 - s;
    if (!(l1 < 0 && l2 < 0)) throw std::invalid_argument("expm2: eigenvalues must be negative");
    Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    if (s == 0) {
        if ((A - l1 * I).norm() > 1e-14 * std::max(1.0, A.norm()))
            throw std::invalid_argument("expm2: defective matrix");
        return std::exp(l1 * t) * I;
    }
    return (std::exp(l1 * t) * (A - l2 * I) - std::exp(l2 * t) * (A - l1 * I)) / (l1 - l2);
}

PlanarRelayMap::PlanarRelayMap(const PlanarRelayModel& m) : model_(m) {
    rho_ = expm2(m.A, m.T);
    Eigen::Vector2d v = (rho_ - Eigen::Matrix2d::Identity()) * m.A.partialPivLu().solve(m.B);
    mu_r_ = m.k * v;
    mu_l_ = -m.k * v;
}

Eigen::Vector2d PlanarRelayMap::fixed_left() const {
    return -(rho_ - Eigen::Matrix2d::Identity()).partialPivLu().solve(mu_l_);
}

Eigen::Vector2d PlanarRelayMap::fixed_right() const {
    return -(rho_ - Eigen::Matrix2d::Identity()).partialPivLu().solve(mu_r_);
}

namespace {

std::optional<PlanarOrbit> planar_cycle(const PlanarRelayMap& f, const std::vector<Eigen::Vector2d>& s, double tol,
                                        std::size_t max_period) {
    for (std::size_t p = 1; p <= max_period; ++p) {
        bool closed = true;
        for (std::size_t k = 0; k < p && closed; ++k) closed = (s[k + p] - s[k]).norm() < tol;
        if (!closed) continue;
        SymbolicWord raw;
        for (std::size_t k = 0; k < p; ++k) raw.push_back(f.sigma(s[k]) < 0 ? Symbol::L : Symbol::R);
        std::size_t off = minimal_rotation_offset(raw);
        PlanarOrbit o;
        o.word = shift(raw, off);
        o.period = p;
        o.eta = eta_number(o.word);
        // exact cycle of the affine composition
        Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < p; ++i) {
            const Eigen::Vector2d& mu = o.word[i] == Symbol::L ? f.mu_left() : f.mu_right();
            M = f.rho() * M;
            v = f.rho() * v + mu;
        }
        Eigen::Vector2d x = (Eigen::Matrix2d::Identity() - M).partialPivLu().solve(v);
        for (std::size_t i = 0; i < p; ++i) {
            o.points.push_back(x);
            x = o.word[i] == Symbol::L ? f.step_left(x) : f.step_right(x);
        }
        for (std::size_t i = 0; i < p; ++i)
            if ((f.sigma(o.points[i]) < 0) != (o.word[i] == Symbol::L)) {
                o.points.clear();
                for (std::size_t j = 0; j < p; ++j) o.points.push_back(s[(off + j) % p]);
                break;
            }
        return o;
    }
    return std::nullopt;
}

}  // namespace

PlanarAnalysis PlanarRelayMap::analyze(const AttractorOptions& opt) const {
    PlanarAnalysis out;
    out.both_virtual = both_virtual();
    Eigen::Vector2d yl = fixed_left(), yr = fixed_right();
    double x0 = std::min(yl(0), yr(0)), x1 = std::max(yl(0), yr(0));
    double v0 = std::min(yl(1), yr(1)), v1 = std::max(yl(1), yr(1));
    double m = 0.5 * std::max({x1 - x0, v1 - v0, 1e-3});
    x0 -= m;
    x1 += m;
    v0 -= m;
    v1 += m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Eigen::Vector2d y(x0 + (x1 - x0) * i / 3.0, v0 + (v1 - v0) * j / 3.0);
            bool collided = false;
            for (std::size_t t = 0; t < opt.burn_in && !collided; ++t) {
                if (std::abs(sigma(y)) < opt.boundary_eps) collided = true;
                y = apply(y);
            }
            std::vector<Eigen::Vector2d> s;
            for (std::size_t t = 0; t < 2 * opt.max_period + 1 && !collided; ++t) {
                if (std::abs(sigma(y)) < opt.boundary_eps) collided = true;
                s.push_back(y);
                y = apply(y);
            }
            if (collided) {
                ++out.collisions;
                continue;
            }
            auto orbit = planar_cycle(*this, s, opt.tol, opt.max_period);
            if (!orbit) {
                ++out.unresolved;
                continue;
            }
            bool dup = false;
            for (const auto& o : out.orbits)
                dup = dup || (o.word == orbit->word && (o.points[0] - orbit->points[0]).norm() < 1e-7);
            if (!dup) out.orbits.push_back(*orbit);
        }
    return out;
}

bool itinerary_is_maximin(const SymbolicWord& w) {
    try {
        if (w.size() <= static_cast<std::size_t>(kMaximinBudget)) return is_maximin(w);
        return is_pq_ordered(w).ordered;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

}  // namespace pwdyn
