#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwdyn/bifurcation.hpp"
#include "pwdyn/circlemap.hpp"
#include "pwdyn/pwmap.hpp"

namespace pwdyn {

/// Autonomous scalar field; the affine form enables closed-form flows.
struct ScalarField {
    std::function<double(double)> f;
    std::optional<std::pair<double, double>> affine;  // f(x) = a x + c

    static ScalarField linear(double a, double c = 0.0);
    static ScalarField custom(std::function<double(double)> fn);
    double operator()(double x) const { return affine ? affine->first * x + affine->second : f(x); }
};

enum class FlowMethod { Auto, ClosedForm, Numeric };

/// State at time t of x' = f(x) + u from x0.
double flow(const ScalarField& field, double u, double x0, double t, FlowMethod method = FlowMethod::Auto);

/// First time x' = f(x) + u reaches level from x0 < level within [0, horizon], if it does.
std::optional<double> hitting_time(const ScalarField& field, double u, double x0, double level, double horizon,
                                   FlowMethod method = FlowMethod::Auto);

struct RelayModel1D {
    ScalarField field;
    double k = -1.0;
    double T = 0.1;
    double y_star = 0.0;
    FlowMethod method = FlowMethod::Auto;
};

struct RelayMap {
    PiecewiseMap1D map;
    bool sliding = false;
};

bool relay_sliding(const RelayModel1D& m);
double relay_branch(const RelayModel1D& m, double y, bool left);
/// Map in z = y - y*: left branch uses u = -k, right branch u = +k.
RelayMap relay_map(const RelayModel1D& m);

/// Equilibria y_R (f(y) = -k) and y_L (f(y) = k) of the two relay fields.
std::pair<double, double> relay_virtual_points(const RelayModel1D& m);
/// lambda -> relay map with y* = y_L - lambda (y_L - y_R).
MapFamily relay_family(const RelayModel1D& base);

struct IFModel {
    ScalarField field;
    double theta = 1.0;
    double A = 0.0;
    double d = 0.5;
    double T = 1.9;
    FlowMethod method = FlowMethod::Auto;
};

struct StroboResult {
    double x = 0.0;
    int spikes = 0;
    bool flagged = false;
};

StroboResult if_stroboscopic(const IFModel& m, double x0);

/// Smallest x0 in [0, theta) with at least n spikes, by bisection.
std::optional<double> if_sigma(const IFModel& m, int n);

struct IFInducedMap {
    int k0 = 0;
    bool has_discontinuity = false;
    double sigma = 0.0;
    double s_minus = 0.0, s_plus = 0.0;  // lateral images at sigma
    std::optional<PiecewiseMap1D> map;    // in z = x - sigma
};

IFInducedMap if_induced_map(const IFModel& m);

struct FiringSample {
    double A = 0.0;
    int n = 0;
    std::optional<Rational> rho;
    std::optional<Rational> eta;
    double sigma = 0.0;
    bool contracting = true;
    std::optional<Rational> spike_average;  // spikes per period along the detected orbit
    std::size_t period = 0;
    std::string word;
    std::string note;
    double firing_rate(double T) const { return eta ? eta->value() / T : 0.0; }
};

FiringSample firing_sample(const IFModel& m, const RotationOptions& opt = {});
std::vector<FiringSample> firing_number(const IFModel& base, const std::vector<double>& amplitudes,
                                        const RotationOptions& opt = {}, std::size_t jobs = 1);

struct PlanarRelayModel {
    Eigen::Matrix2d A;
    Eigen::Vector2d B;
    double k = -1.0;
    double T = 0.1;
    double c1 = 1.5;
    double y_star = 0.0;

    /// A = [[0, 1], [a0, a1]], B = (0, b).
    static PlanarRelayModel companion(double a0, double a1, double b, double c1, double T, double k, double y_star);
};

/// exp(A t) for 2x2 A with real distinct (or scalar) negative eigenvalues.
Eigen::Matrix2d expm2(const Eigen::Matrix2d& A, double t);

struct PlanarOrbit {
    std::vector<Eigen::Vector2d> points;
    SymbolicWord word;
    std::size_t period = 0;
    Rational eta;
};

struct PlanarAnalysis {
    bool both_virtual = false;
    std::vector<PlanarOrbit> orbits;
    std::size_t collisions = 0;
    std::size_t unresolved = 0;
};

class PlanarRelayMap {
public:
    explicit PlanarRelayMap(const PlanarRelayModel& m);

    double sigma(const Eigen::Vector2d& y) const { return y(0) - model_.y_star + model_.c1 * y(1); }
    Eigen::Vector2d apply(const Eigen::Vector2d& y) const { return sigma(y) < 0 ? step_left(y) : step_right(y); }
    Eigen::Vector2d step_left(const Eigen::Vector2d& y) const { return rho_ * y + mu_l_; }
    Eigen::Vector2d step_right(const Eigen::Vector2d& y) const { return rho_ * y + mu_r_; }

    const Eigen::Matrix2d& rho() const { return rho_; }
    const Eigen::Vector2d& mu_left() const { return mu_l_; }
    const Eigen::Vector2d& mu_right() const { return mu_r_; }
    Eigen::Vector2d fixed_left() const;
    Eigen::Vector2d fixed_right() const;
    bool both_virtual() const { return sigma(fixed_right()) < 0 && sigma(fixed_left()) > 0; }

    /// Orbits reached from a 4x4 seed grid around the two virtual fixed points.
    PlanarAnalysis analyze(const AttractorOptions& opt = {}) const;

private:
    PlanarRelayModel model_;
    Eigen::Matrix2d rho_;
    Eigen::Vector2d mu_l_, mu_r_;
};

/// Maximin by enumeration when q <= 24, p,q-ordering beyond that.
bool itinerary_is_maximin(const SymbolicWord& w);

}  // namespace pwdyn
