#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pwdyn/farey.hpp"
#include "pwdyn/pwmap.hpp"

namespace pwdyn {

/// Orientation-preserving map on [0,1) obtained through phi(x) = (x + mu_R)/(mu_L + mu_R).
class CircleReduction {
public:
    static CircleReduction reduce(const PiecewiseMap1D& m);

    const PiecewiseMap1D& source() const { return *source_; }
    double c() const { return c_; }
    double gap() const { return gap_; }
    bool weak_expansion() const { return weak_expansion_; }

    double phi(double x) const { return (x + source_->mu_right()) / span_; }
    double phi_inv(double y) const { return y * span_ - source_->mu_right(); }
    /// Circle map on [0,1), right-lateral at the integer point.
    double forward(double y) const;
    /// f(0+) and f(1-).
    double image_of_zero() const { return f0_; }
    double image_of_one() const { return f1_; }

private:
    explicit CircleReduction(const PiecewiseMap1D& m);
    std::shared_ptr<const PiecewiseMap1D> source_;
    double span_ = 1.0, c_ = 0.5, gap_ = 0.0, f0_ = 0.0, f1_ = 0.0;
    bool weak_expansion_ = false;
};

/// Point of the real line as integer part plus fraction in [0,1).
struct LiftPoint {
    std::int64_t n = 0;
    double y = 0.0;
    double value() const { return static_cast<double>(n) + y; }
};

/// Degree-one lift F; values at integers are taken right-lateral unless asked otherwise.
class LiftedCircleMap {
public:
    explicit LiftedCircleMap(const CircleReduction& r);
    /// F(x) = x + omega, omega in [0,1).
    static LiftedCircleMap rigid_rotation(double omega);

    LiftPoint step(LiftPoint s, bool left_lateral = false) const;
    LiftPoint iterate(LiftPoint s, std::size_t n, bool left_lateral = false) const;
    static LiftPoint split(double x);

    double operator()(double x) const { return step(split(x)).value(); }
    double left_limit(double x) const { return step(split(x), true).value(); }

    double c() const { return c_; }
    double gap() const { return gap_; }
    bool weak_expansion() const { return weak_expansion_; }
    const std::optional<CircleReduction>& reduction() const { return reduction_; }

private:
    LiftedCircleMap() = default;
    std::function<double(double)> fbar_;
    double c_ = 0.5, gap_ = 0.0, f1_ = 0.0;
    bool weak_expansion_ = false;
    std::optional<CircleReduction> reduction_;
};

struct Lock {
    Rational ratio;
    double x_star = 0.0;
    double residual = 0.0;
    bool one_sided = false;
};

struct RotationOptions {
    std::size_t n = 100000;
    int q_max = 100;
    double lock_tol = 1e-10;
    std::optional<double> seed;
};

struct RotationResult {
    double estimate = 0.0;
    double error_bound = 0.0;
    std::optional<Rational> locked;
    double lock_residual = 0.0;
    std::optional<double> x_star;
    bool one_sided = false;
    double left_estimate = 0.0;
    bool boundary_sensitive = false;
};

RotationResult rotation_number(const LiftedCircleMap& f, const RotationOptions& opt = {});

std::optional<Lock> lock_rational(const LiftedCircleMap& f, double estimate, double err, int q_max,
                                  double tol = 1e-10);

/// Best rational with q <= q_max inside [lo, hi] found by Stern-Brocot descent.
std::optional<Rational> simplest_in_window(double lo, double hi, int q_max);

/// Fractional parts of the q-cycle through x_star, sorted.
std::vector<double> cycle_points(const LiftedCircleMap& f, double x_star, std::size_t q);

bool verify_pq_ordering(const LiftedCircleMap& f, const std::vector<double>& orbit, std::int64_t p,
                        double tol = 1e-9);

enum class OmegaKind { Periodic, CantorLike, Undecided };

std::string to_string(OmegaKind k);

struct OmegaVerdict {
    OmegaKind kind = OmegaKind::Undecided;
    std::optional<Rational> ratio;
    double hole_measure = 0.0;
    std::size_t tail_hits = 0;
};

OmegaVerdict classify_omega_limit(const LiftedCircleMap& f, std::size_t n = 100000, int q_max = 100);

}  // namespace pwdyn
