#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwdyn/circlemap.hpp"
#include "pwdyn/pwmap.hpp"

namespace pwdyn {

/// lambda in [0,1] -> (mu_L, mu_R).
struct ParamCurve {
    std::function<double(double)> mu_left;
    std::function<double(double)> mu_right;
    std::string description;

    /// (r sin(lambda pi/2), r sin((1-lambda) pi/2)); exact zeros at both ends.
    static ParamCurve quarter_circle(double radius = 1.0);

    struct Check {
        bool h1 = true, h2 = true, h3 = true;
        std::vector<std::string> issues;
        bool ok() const { return h1 && h2 && h3; }
    };
    Check validate(int samples = 1024) const;
};

using MapFamily = std::function<PiecewiseMap1D(double lambda)>;
using PlaneFamily = std::function<PiecewiseMap1D(double mu_left, double mu_right)>;

/// Fixed branches, offsets from the curve. Throws unless the offsets are positive inside (0,1), monotone, and vanish at the ends.
MapFamily make_family(const Branch& left, const Branch& right, const ParamCurve& curve,
                      BoundaryRule rule = BoundaryRule::Bivalued);
PlaneFamily make_plane_family(const Branch& left, const Branch& right, BoundaryRule rule = BoundaryRule::Bivalued);

enum class IncCase { S1, S2, S3 };

struct IncrementingGeometry {
    std::vector<double> a;  // a_0 = 0, a_n = f_L^{-1}(a_{n-1})
    std::vector<double> b;  // b_n = f_R^{-1}(a_n) where defined, NaN otherwise
    IncCase kind = IncCase::S2;
    std::size_t n = 0;
    double image_lo = 0.0, image_hi = 0.0;  // f((0, mu_L]) = [image_lo, image_hi)
    std::optional<double> split;            // b_j splitting (0, mu_L] between the two basins

    std::vector<SymbolicWord> predicted_words() const;
    std::string label() const;
};

/// Coexistence is reported as S3(n), i.e. L^nR with L^{n+1}R (equivalently S1(n+1)).
IncrementingGeometry incrementing_case(const PiecewiseMap1D& m, std::size_t depth = 4096);

enum class Outcome { FixedPoint, Periodic, Coexistence, Aperiodic, BorderCollision };

std::string to_string(Outcome o);

struct ScanOptions {
    AttractorOptions attractor;
    RotationOptions rotation;
    bool with_rotation = true;
    bool with_geometry = true;
    std::size_t jobs = 1;
};

struct ScanRecord {
    std::size_t index = 0;
    double lambda = 0.0, mu_left = 0.0, mu_right = 0.0;
    Outcome outcome = Outcome::Aperiodic;
    std::vector<OrbitRecord> orbits;
    std::optional<RotationResult> rho;
    std::optional<IncrementingGeometry> geometry;
    bool orientable = false;
    bool weak_expansion = false;
    std::string message;

    /// Locked rotation number when available, else the eta of a single orbit.
    std::optional<Rational> eta() const;
};

/// Multi-seed attractor search plus rotation / incrementing analysis for one map.
ScanRecord classify_point(const PiecewiseMap1D& m, const ScanOptions& opt);

std::vector<ScanRecord> scan_curve(const MapFamily& family, std::size_t samples, const ScanOptions& opt);

struct StaircasePoint {
    double lambda = 0.0;
    double mu_left = 0.0, mu_right = 0.0;
    std::optional<Rational> eta;
    std::optional<RotationResult> rho;
};

StaircasePoint staircase_point(const PiecewiseMap1D& m, double lambda, const RotationOptions& opt);
std::vector<StaircasePoint> staircase(const MapFamily& family, std::size_t samples, const RotationOptions& opt,
                                      std::size_t jobs = 1);

struct Plateau {
    Rational eta;
    double lambda_lo = 0.0, lambda_hi = 0.0;  // refined edges
    std::size_t first = 0, last = 0;          // sample indices
    std::optional<SymbolicWord> word;
};

/// Merge equal consecutive locks; refine each edge by at most `refine_steps` bisections.
std::vector<Plateau> extract_plateaus(const MapFamily& family, const std::vector<StaircasePoint>& pts,
                                      int refine_steps = 40, std::size_t jobs = 1);

/// True when the attractor reached from the map's natural seed is a p/q cycle.
bool attractor_has_rotation(const PiecewiseMap1D& m, const Rational& r, const AttractorOptions& opt = {});

struct PlaneGrid {
    std::size_t width = 0, height = 0;
    double mu_left_min = -1, mu_left_max = 1, mu_right_min = -1, mu_right_max = 1;
};

struct PlaneCell {
    std::size_t i = 0, j = 0;
    double mu_left = 0.0, mu_right = 0.0;
    Outcome outcome = Outcome::Aperiodic;
    std::vector<std::size_t> periods;
    std::vector<Rational> etas;
    std::vector<SymbolicWord> words;
};

std::vector<PlaneCell> scan_plane(const PlaneFamily& family, const PlaneGrid& grid, const ScanOptions& opt);

struct Codim2Reduction {
    PiecewiseMap1D source;
    PiecewiseMap1D composed;
    SymbolicWord word_x, word_y;

    SymbolicWord expand_word(const SymbolicWord& w) const;
    /// Source orbit obtained by substituting word_x / word_y along a composed orbit.
    OrbitRecord expand(const OrbitRecord& composed_orbit) const;
};

/// Compose branches along word_x (starting with L) and word_y (starting with R), first symbol first.
Codim2Reduction codim2_reduce(const PiecewiseMap1D& source, const SymbolicWord& word_x, const SymbolicWord& word_y,
                              double radius, int checks = 256);

/// C^1 source map whose LRL / RL compositions equal the linear map mu + x/2, -nu - x/2 near 0.
PiecewiseMap1D quasi_contraction_source(double mu, double nu);

}  // namespace pwdyn
