#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwdyn/farey.hpp"
#include "pwdyn/symbolic.hpp"

namespace pwdyn {

/// Smooth branch f with f(0) = 0.
class Branch {
public:
    using Fn = std::function<double(double)>;

    static Branch linear(double slope);
    /// Derivative falls back to central differences when df is empty.
    static Branch custom(Fn f, Fn df = {}, std::string name = "custom");

    double operator()(double x) const { return slope_ ? *slope_ * x : f_(x); }
    double derivative(double x) const;
    /// One-sided difference that never crosses x = 0 from the given side.
    double derivative_one_sided(double x, int side) const;

    std::optional<double> slope() const { return slope_; }
    const std::string& name() const { return name_; }

private:
    Fn f_;
    Fn df_;
    std::optional<double> slope_;
    std::string name_;
};

enum class BoundaryRule { LeftImage, RightImage, Bivalued };

std::string to_string(BoundaryRule r);
BoundaryRule boundary_rule_from_string(const std::string& s);

struct Image {
    double value;
    std::optional<double> second;  // set only at x = 0 under the bivalued rule
};

struct MapClassification {
    double lo = 0.0, hi = 0.0;  // interval that was sampled
    bool left_increasing = false;
    bool right_increasing = false;
    bool right_decreasing = false;
    double left_sup_slope = 0.0;
    double right_sup_slope = 0.0;
    bool contracting = false;
    std::vector<std::string> warnings;
};

class PiecewiseMap1D {
public:
    PiecewiseMap1D(Branch left, Branch right, double mu_left, double mu_right,
                   BoundaryRule rule = BoundaryRule::Bivalued);

    static PiecewiseMap1D linear(double a, double b, double mu_left, double mu_right,
                                 BoundaryRule rule = BoundaryRule::Bivalued);

    const Branch& left() const { return left_; }
    const Branch& right() const { return right_; }
    double mu_left() const { return mu_l_; }
    double mu_right() const { return mu_r_; }
    BoundaryRule boundary_rule() const { return rule_; }

    double left_image(double x) const { return mu_l_ + left_(x); }
    double right_image(double x) const { return -mu_r_ + right_(x); }
    double image(Symbol s, double x) const { return s == Symbol::L ? left_image(x) : right_image(x); }
    double branch_derivative(Symbol s, double x) const;

    Image apply(double x) const;
    /// Single-valued step; x = 0 takes the right image unless the rule is left-image.
    double step(double x) const {
        if (x < 0) return left_image(x);
        if (x > 0) return right_image(x);
        return rule_ == BoundaryRule::LeftImage ? mu_l_ : -mu_r_;
    }

    /// Sampled monotonicity / contraction flags on an interval trapping the dynamics.
    MapClassification classify(int samples = 1024) const;
    /// Absorbing interval: [-mu_R, mu_L] when orientable, [f(mu_L), mu_L] otherwise.
    std::pair<double, double> absorbing_interval() const;

private:
    Branch left_, right_;
    double mu_l_, mu_r_;
    BoundaryRule rule_;
};

inline constexpr double kBoundaryEpsilon = 1e-12;

struct Itinerary {
    SymbolicWord symbols;
    std::vector<double> states;
    bool boundary_hit = false;
    std::size_t hit_index = 0;
};

Itinerary itinerary(const PiecewiseMap1D& m, double x0, std::size_t n, double boundary_eps = kBoundaryEpsilon);

struct OrbitRecord {
    std::vector<double> points;
    SymbolicWord word;
    std::size_t period = 0;
    Rational eta;
    bool stable = false;
    double multiplier = 0.0;
};

struct AttractorOptions {
    std::size_t burn_in = 10000;
    std::size_t max_period = 200;
    double tol = 1e-10;
    double boundary_eps = kBoundaryEpsilon;
    double divergence = 1e8;
    std::size_t tail = 4096;
};

enum class AttractorStatus { Periodic, Aperiodic, Divergent, BoundaryCollision };

std::string to_string(AttractorStatus s);

struct AttractorResult {
    AttractorStatus status = AttractorStatus::Aperiodic;
    std::optional<OrbitRecord> orbit;
    double eta_estimate = 0.0;
    std::string message;
};

AttractorResult find_attractor(const PiecewiseMap1D& m, double x0, const AttractorOptions& opt = {});

/// Rebuild the orbit of x0 under the branches named by word, starting at the minimal rotation.
OrbitRecord make_orbit(const PiecewiseMap1D& m, double x0, const SymbolicWord& word);

/// Solve G(x) = x for the composition of branches along word, near x0.
std::optional<double> refine_cycle(const PiecewiseMap1D& m, const SymbolicWord& word, double x0);

}  // namespace pwdyn
