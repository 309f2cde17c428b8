#include "pwdyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pwdyn/models.hpp"

namespace pwdyn {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double number(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("map spec: missing '") + key + "'");
    }
    if (!j.at(key).is_number()) throw ConfigError(std::string("map spec: '") + key + "' must be a number");
    double v = j.at(key).get<double>();
    if (!std::isfinite(v)) throw ConfigError(std::string("map spec: '") + key + "' must be finite");
    return v;
}

Branch branch_from(const json& j) {
    if (!j.is_object()) throw ConfigError("map spec: branch must be an object");
    std::string kind = j.value("kind", "linear");
    if (kind == "linear") return Branch::linear(number(j, "slope"));
    if (kind == "tanh") {
        double s = number(j, "scale");
        return Branch::custom([s](double x) { return s * std::tanh(x); },
                              [s](double x) {
                                  double t = std::tanh(x);
                                  return s * (1 - t * t);
                              },
                              "tanh");
    }
    if (kind == "quadratic") {
        double a = number(j, "slope"), c = number(j, "curvature");
        return Branch::custom([a, c](double x) { return a * x + c * x * x; }, [a, c](double x) { return a + 2 * c * x; },
                              "quadratic");
    }
    throw ConfigError("map spec: unknown branch kind '" + kind + "'");
}

/// Named models: relay {a, c, k, T, y_star} and if {a, c, theta, T, d, A}.
void apply_model(const json& j, MapSpec& s) {
    std::string name = j.at("model").get<std::string>();
    if (name == "relay") {
        RelayModel1D m;
        m.field = ScalarField::linear(number(j, "a", -0.2), number(j, "c", 0.0));
        m.k = number(j, "k", -1.0);
        m.T = number(j, "T", 0.1);
        m.y_star = number(j, "y_star", 0.0);
        PiecewiseMap1D f = relay_map(m).map;
        s.left = f.left();
        s.right = f.right();
        s.mu_left = f.mu_left();
        s.mu_right = f.mu_right();
        return;
    }
    if (name == "if") {
        IFModel m;
        m.field = ScalarField::linear(number(j, "a", -0.5), number(j, "c", 0.2));
        m.theta = number(j, "theta", 1.0);
        m.T = number(j, "T", 1.9);
        m.d = number(j, "d", 0.5);
        m.A = number(j, "A");
        IFInducedMap im = if_induced_map(m);
        if (!im.map) throw ConfigError("map spec: the IF map has no discontinuity at these parameters");
        s.left = im.map->left();
        s.right = im.map->right();
        s.mu_left = im.map->mu_left();
        s.mu_right = im.map->mu_right();
        return;
    }
    throw ConfigError("map spec: unknown model '" + name + "'");
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("map spec: ") + e.what());
    }
}

}  // namespace

Branch parse_branch_json(const std::string& text) { return branch_from(parse_json(text)); }

MapSpec load_map_spec(const std::string& text_or_path) {
    std::string text = text_or_path;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') text = slurp(text_or_path);
    json j = parse_json(text);
    if (!j.is_object()) throw ConfigError("map spec: top level must be an object");
    MapSpec s;
    try {
        if (j.contains("model")) apply_model(j, s);
        if (j.contains("left")) s.left = branch_from(j.at("left"));
        if (j.contains("right")) s.right = branch_from(j.at("right"));
        s.mu_left = number(j, "mu_left", s.mu_left);
        s.mu_right = number(j, "mu_right", s.mu_right);
        if (j.contains("boundary_rule")) s.rule = boundary_rule_from_string(j.at("boundary_rule").get<std::string>());
        if (j.contains("curve")) {
            const json& c = j.at("curve");
            std::string kind = c.value("kind", "quarter_circle");
            if (kind != "quarter_circle") throw ConfigError("map spec: unknown curve kind '" + kind + "'");
            s.curve = ParamCurve::quarter_circle(number(c, "radius", 1.0));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("map spec: ") + e.what());
    }
    return s;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        auto a = s.find_first_not_of(" \t\r");
        auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> read_key_values(const std::string& path) { return parse_key_values(slurp(path)); }

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table: row width does not match the header");
    rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c) {
    if (auto s = std::get_if<std::string>(&c)) return *s;
    if (auto d = std::get_if<double>(&c)) return format_double(*d);
    return std::to_string(std::get<std::int64_t>(c));
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n# config: " << t.config << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(row[i]));
        out << "\n";
    }
}

void write_json(std::ostream& out, const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& c = row[i];
            if (auto d = std::get_if<double>(&c)) {
                if (std::isfinite(*d)) r[t.columns[i]] = *d;
                else r[t.columns[i]] = format_double(*d);
            } else if (auto n = std::get_if<std::int64_t>(&c)) {
                r[t.columns[i]] = *n;
            } else {
                r[t.columns[i]] = std::get<std::string>(c);
            }
        }
        rows.push_back(std::move(r));
    }
    json doc = {{"config", t.config}, {"columns", t.columns}, {"rows", rows}};
    out << doc.dump(1) << "\n";
}

Svg::Svg(double width, double height) : w_(width), h_(height) {}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void Svg::rect(double x, double y, double w, double h, const std::string& fill, const std::string& stroke) {
    items_.push_back("<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
                     "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>");
}

void Svg::path(const std::string& d, const std::string& stroke, double stroke_width, const std::string& fill) {
    items_.push_back("<path d=\"" + d + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) +
                     "\" fill=\"" + fill + "\"/>");
}

void Svg::text(double x, double y, const std::string& s, double size, const std::string& anchor) {
    items_.push_back("<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
                     "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + xml_escape(s) + "</text>");
}

std::string Svg::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w_) + "\" height=\"" + num(h_) +
                      "\" viewBox=\"0 0 " + num(w_) + " " + num(h_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(w_) + "\" height=\"" + num(h_) + "\" fill=\"white\"/>\n";
    for (const auto& s : items_) out += s + "\n";
    return out + "</svg>\n";
}

void Svg::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << str();
}

std::string palette(std::size_t k) {
    static const char* colors[] = {"#d9d9d9", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                   "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31",
                                   "#843c39", "#7b4173"};
    constexpr std::size_t n = sizeof colors / sizeof colors[0];
    if (k == 0) return colors[0];
    return colors[1 + (k - 1) % (n - 1)];
}

}  // namespace pwdyn
