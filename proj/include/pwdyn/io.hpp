#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pwdyn/bifurcation.hpp"
#include "pwdyn/pwmap.hpp"

namespace pwdyn {

/// Bad user input: unreadable files, malformed specs, out-of-range budgets.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MapSpec {
    Branch left = Branch::linear(0.5);
    Branch right = Branch::linear(0.5);
    double mu_left = 1.0, mu_right = 1.0;
    BoundaryRule rule = BoundaryRule::Bivalued;
    ParamCurve curve = ParamCurve::quarter_circle();

    PiecewiseMap1D map() const { return PiecewiseMap1D(left, right, mu_left, mu_right, rule); }
};

/// Branch kinds: linear {slope}, tanh {scale}, quadratic {slope, curvature}.
Branch parse_branch_json(const std::string& text);
/// JSON text, or a path to a file holding it. A "model" key (relay, if) supplies branches and offsets.
MapSpec load_map_spec(const std::string& text_or_path);

/// Flat key=value lines; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_values(const std::string& path);

/// 17 significant digits, "nan"/"inf" spelled out.
std::string format_double(double v);

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string config;

    void add(std::vector<Cell> row);
};

/// Header line, then a "# config:" comment line, then rows.
void write_csv(std::ostream& out, const Table& t);
void write_json(std::ostream& out, const Table& t);

class Svg {
public:
    Svg(double width, double height);
    void rect(double x, double y, double w, double h, const std::string& fill, const std::string& stroke = "none");
    void path(const std::string& d, const std::string& stroke, double stroke_width = 1.0,
              const std::string& fill = "none");
    void text(double x, double y, const std::string& s, double size = 12.0, const std::string& anchor = "start");
    std::string str() const;
    void save(const std::string& path) const;

private:
    double w_, h_;
    std::vector<std::string> items_;
};

/// Categorical colour for small integers; 0 maps to light grey.
std::string palette(std::size_t k);

}  // namespace pwdyn
