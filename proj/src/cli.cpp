#include "pwdyn/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "pwdyn/bifurcation.hpp"
#include "pwdyn/circlemap.hpp"
#include "pwdyn/farey.hpp"
#include "pwdyn/io.hpp"
#include "pwdyn/models.hpp"
#include "pwdyn/parallel.hpp"
#include "pwdyn/symbolic.hpp"

namespace pwdyn::cli {

namespace {

struct Common {
    std::size_t jobs = default_jobs();
    std::string format = "csv";
    std::string svg;
    std::string config;
    bool no_svg = false;

    bool want_svg() const { return !svg.empty() && !no_svg; }
};

struct Budget {
    std::size_t n = 100000;
    int qmax = 100;
    std::size_t burn_in = 10000;
    std::size_t max_period = 200;

    RotationOptions rotation() const {
        RotationOptions r;
        r.n = n;
        r.q_max = qmax;
        return r;
    }
    AttractorOptions attractor() const {
        AttractorOptions a;
        a.burn_in = burn_in;
        a.max_period = max_period;
        return a;
    }
    ScanOptions scan(std::size_t jobs) const {
        ScanOptions o;
        o.rotation = rotation();
        o.attractor = attractor();
        o.jobs = jobs;
        return o;
    }
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--svg", c.svg, "Also write an SVG figure to this path");
    sub->add_option("--config,--params", c.config, "key=value file; explicit flags take precedence");
}

void add_budget(CLI::App* sub, Budget& b, bool rotation = true, bool attractor = true) {
    if (rotation) {
        sub->add_option("--n", b.n, "Lift iterations for the rotation number")->check(CLI::Range(100, 100000000));
        sub->add_option("--qmax", b.qmax, "Largest locking denominator")->check(CLI::Range(1, 1000));
    }
    if (!attractor) return;
    sub->add_option("--burn-in", b.burn_in, "Transient iterations")->check(CLI::PositiveNumber);
    sub->add_option("--max-period", b.max_period, "Longest detectable period")->check(CLI::Range(1, 100000));
}

std::string rat(const std::optional<Rational>& r) { return r ? r->str() : std::string(); }
Cell rat_p(const std::optional<Rational>& r) { return r ? Cell(r->p()) : Cell(std::string()); }
Cell rat_q(const std::optional<Rational>& r) { return r ? Cell(r->q()) : Cell(std::string()); }

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "|" : "") + f(v[i]);
    return s;
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& g) {
    auto x = g.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument("x");
        long w = std::stol(g.substr(0, x)), h = std::stol(g.substr(x + 1));
        if (w < 1 || h < 1) throw std::invalid_argument("size");
        return {static_cast<std::size_t>(w), static_cast<std::size_t>(h)};
    } catch (const std::exception&) {
        throw ConfigError("grid must look like WxH with positive sizes, got '" + g + "'");
    }
}

std::vector<double> parse_range(const std::string& r, std::size_t n) {
    std::vector<double> v;
    std::stringstream ss(r);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("range entry '" + tok + "' is not a number");
        }
    }
    if (v.size() != n) throw ConfigError("range needs " + std::to_string(n) + " colon-separated numbers");
    return v;
}

void emit(std::ostream& out, const Table& t, const Common& c) {
    if (c.format == "json") write_json(out, t);
    else write_csv(out, t);
}

// --------------------------------------------------------------------------- figures

struct Frame {
    double x0 = 60, y0 = 20, w = 720, h = 360;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    double X(double v) const { return x0 + (v - xmin) / (xmax - xmin) * w; }
    double Y(double v) const { return y0 + h - (v - ymin) / (ymax - ymin) * h; }
};

Svg framed(const Frame& f, const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    Svg s(f.x0 + f.w + 20, f.y0 + f.h + 50);
    s.rect(f.x0, f.y0, f.w, f.h, "none", "black");
    s.text(f.x0 + f.w / 2, f.y0 + f.h + 40, xlabel, 13, "middle");
    s.text(12, f.y0 + f.h / 2, ylabel, 13, "start");
    s.text(f.x0 + f.w / 2, 14, title, 13, "middle");
    s.text(f.x0, f.y0 + f.h + 18, format_double(f.xmin), 11, "middle");
    s.text(f.x0 + f.w, f.y0 + f.h + 18, format_double(f.xmax), 11, "middle");
    s.text(f.x0 - 6, f.y0 + f.h, format_double(f.ymin), 11, "end");
    s.text(f.x0 - 6, f.y0 + 10, format_double(f.ymax), 11, "end");
    return s;
}

void svg_curve(const std::vector<ScanRecord>& recs, const std::string& path, const std::string& title) {
    std::size_t pmax = 2;
    for (const auto& r : recs)
        for (const auto& o : r.orbits) pmax = std::max(pmax, std::min<std::size_t>(o.period, 40));
    Frame f;
    f.ymin = 0;
    f.ymax = static_cast<double>(pmax) + 1;
    Svg s = framed(f, title, "lambda", "period");
    double dx = f.w / std::max<std::size_t>(recs.size(), 1);
    for (const auto& r : recs) {
        if (r.outcome == Outcome::Coexistence) s.rect(f.X(r.lambda) - dx / 2, f.y0, dx, f.h, "#eeeeee");
        for (const auto& o : r.orbits) {
            if (o.period > 40) continue;
            s.rect(f.X(r.lambda) - 1, f.Y(static_cast<double>(o.period)) - 1, 2, 2, palette(o.period));
        }
    }
    s.save(path);
}

void svg_stairs(const std::vector<std::pair<double, std::optional<Rational>>>& pts, const std::string& path,
                const std::string& title, const std::string& xlabel, double ymin, double ymax) {
    Frame f;
    if (!pts.empty()) {
        f.xmin = pts.front().first;
        f.xmax = pts.back().first > f.xmin ? pts.back().first : f.xmin + 1;
    }
    f.ymin = ymin;
    f.ymax = ymax;
    Svg s = framed(f, title, xlabel, "eta");
    std::string d;
    bool pen = false;
    for (const auto& [x, e] : pts) {
        if (!e) {
            pen = false;
            continue;
        }
        d += (pen ? "L" : "M") + format_double(f.X(x)) + " " + format_double(f.Y(e->value())) + " ";
        pen = true;
    }
    if (!d.empty()) s.path(d, "#1f77b4", 1.5);
    s.save(path);
}

void svg_raster(std::size_t w, std::size_t h, const std::function<std::size_t(std::size_t, std::size_t)>& color,
                const std::function<bool(std::size_t, std::size_t)>& hatch, const std::string& path,
                const std::string& title, const std::string& xlabel, const std::string& ylabel,
                std::array<double, 4> box) {
    Frame f;
    f.xmin = box[0];
    f.xmax = box[1];
    f.ymin = box[2];
    f.ymax = box[3];
    Svg s = framed(f, title, xlabel, ylabel);
    double cw = f.w / static_cast<double>(w), ch = f.h / static_cast<double>(h);
    for (std::size_t j = 0; j < h; ++j)
        for (std::size_t i = 0; i < w; ++i) {
            double x = f.x0 + cw * static_cast<double>(i), y = f.y0 + f.h - ch * static_cast<double>(j + 1);
            s.rect(x, y, cw, ch, palette(color(i, j)));
            if (hatch(i, j))
                s.path("M" + format_double(x) + " " + format_double(y + ch) + " L" + format_double(x + cw) + " " +
                           format_double(y),
                       "black", 0.5);
        }
    s.save(path);
}

// --------------------------------------------------------------------------- tables

Table curve_table(const std::vector<ScanRecord>& recs) {
    Table t;
    t.columns = {"lambda",       "mu_l",   "mu_r",          "outcome", "period", "eta_p",  "eta_q", "word",
                 "rho_estimate", "locked", "lock_residual", "case",    "message"};
    for (const auto& r : recs) {
        auto eta = r.eta();
        if (r.outcome == Outcome::Coexistence) eta.reset();
        t.add({r.lambda, r.mu_left, r.mu_right, to_string(r.outcome),
               join(r.orbits, [](const OrbitRecord& o) { return std::to_string(o.period); }), rat_p(eta), rat_q(eta),
               join(r.orbits, [](const OrbitRecord& o) { return o.word.str(); }),
               r.rho ? Cell(r.rho->estimate) : Cell(std::string()), r.rho ? rat(r.rho->locked) : std::string(),
               r.rho && r.rho->locked ? Cell(r.rho->lock_residual) : Cell(std::string()),
               r.geometry ? r.geometry->label() : std::string(), r.message});
    }
    return t;
}

Table staircase_table(const std::vector<StaircasePoint>& pts) {
    Table t;
    t.columns = {"lambda", "mu_l", "mu_r", "eta_p", "eta_q", "estimate", "error_bound"};
    for (const auto& p : pts)
        t.add({p.lambda, p.mu_left, p.mu_right, rat_p(p.eta), rat_q(p.eta),
               p.rho ? Cell(p.rho->estimate) : Cell(std::string()),
               p.rho ? Cell(p.rho->error_bound) : Cell(std::string())});
    return t;
}

std::vector<std::pair<double, std::optional<Rational>>> stairs_of(const std::vector<StaircasePoint>& pts) {
    std::vector<std::pair<double, std::optional<Rational>>> v;
    for (const auto& p : pts) v.emplace_back(p.lambda, p.eta);
    return v;
}

Table plane_table(const std::vector<PlaneCell>& cells) {
    Table t;
    t.columns = {"i", "j", "mu_l", "mu_r", "outcome", "period", "eta_p", "eta_q", "word"};
    for (const auto& c : cells) {
        std::optional<Rational> eta;
        if (c.etas.size() == 1) eta = c.etas[0];
        t.add({static_cast<std::int64_t>(c.i), static_cast<std::int64_t>(c.j), c.mu_left, c.mu_right,
               to_string(c.outcome), join(c.periods, [](std::size_t p) { return std::to_string(p); }), rat_p(eta),
               rat_q(eta), join(c.words, [](const SymbolicWord& w) { return w.str(); })});
    }
    return t;
}

void plane_svg(const std::vector<PlaneCell>& cells, const PlaneGrid& g, const std::string& path,
               const std::string& title) {
    svg_raster(
        g.width, g.height,
        [&](std::size_t i, std::size_t j) {
            const auto& c = cells[j * g.width + i];
            return c.periods.empty() ? std::size_t{0} : c.periods[0];
        },
        [&](std::size_t i, std::size_t j) { return cells[j * g.width + i].outcome == Outcome::Coexistence; }, path,
        title, "mu_L", "mu_R", {g.mu_left_min, g.mu_left_max, g.mu_right_min, g.mu_right_max});
}

Table if_table(const std::vector<FiringSample>& s, double T) {
    Table t;
    t.columns = {"A",   "n",      "rho_p",  "rho_q", "eta_p",           "eta_q",           "contracting",
                 "period", "word", "spikes", "firing_number_p", "firing_number_q", "firing_rate",  "note"};
    for (const auto& x : s) {
        Cell spikes = std::string();
        if (x.spike_average) spikes = x.spike_average->p() * static_cast<std::int64_t>(x.period) / x.spike_average->q();
        t.add({x.A, static_cast<std::int64_t>(x.n), rat_p(x.rho), rat_q(x.rho), rat_p(x.eta), rat_q(x.eta),
               std::string(x.contracting ? "true" : "false"), static_cast<std::int64_t>(x.period), x.word, spikes,
               rat_p(x.spike_average), rat_q(x.spike_average), x.eta ? Cell(x.firing_rate(T)) : Cell(std::string()),
               x.note});
    }
    return t;
}

struct PlanarRow {
    double k = 0, y_star = 0;
    PlanarAnalysis a;
};

std::vector<PlanarRow> planar_rows(double a0, double a1, double b, double c1, double T, double kmin, double kmax,
                                   std::size_t ksteps, std::size_t samples, const AttractorOptions& ao,
                                   std::size_t jobs) {
    std::size_t n = ksteps * samples;
    return parallel_map(n, jobs, [&](std::size_t idx) {
        std::size_t ki = idx / samples, si = idx % samples;
        double k = ksteps == 1 ? kmin : kmin + (kmax - kmin) * static_cast<double>(ki) / static_cast<double>(ksteps - 1);
        // y* window where both fixed points are virtual: sigma(fixed_R) < 0 < sigma(fixed_L)
        PlanarRelayMap probe(PlanarRelayModel::companion(a0, a1, b, c1, T, k, 0.0));
        double lo = probe.sigma(probe.fixed_right()), hi = probe.sigma(probe.fixed_left());
        if (lo > hi) std::swap(lo, hi);
        PlanarRow row;
        row.k = k;
        row.y_star = lo + (hi - lo) * (static_cast<double>(si) + 0.5) / static_cast<double>(samples);
        PlanarRelayMap f(PlanarRelayModel::companion(a0, a1, b, c1, T, k, row.y_star));
        row.a = f.analyze(ao);
        return row;
    });
}

Table planar_table(const std::vector<PlanarRow>& rows) {
    Table t;
    t.columns = {"k",      "y_star", "both_virtual", "attractors", "collisions", "unresolved",
                 "period", "eta",    "word",         "maximin",    "farey_neighbors"};
    for (const auto& r : rows) {
        const auto& o = r.a.orbits;
        bool maximin = std::all_of(o.begin(), o.end(), [](const PlanarOrbit& x) { return itinerary_is_maximin(x.word); });
        std::string nb;
        if (o.size() == 2) {
            Rational a = std::min(o[0].eta, o[1].eta), b = std::max(o[0].eta, o[1].eta);
            nb = a < b && is_neighbor_pair(a, b) ? "true" : "false";
        }
        t.add({r.k, r.y_star, std::string(r.a.both_virtual ? "true" : "false"), static_cast<std::int64_t>(o.size()),
               static_cast<std::int64_t>(r.a.collisions), static_cast<std::int64_t>(r.a.unresolved),
               join(o, [](const PlanarOrbit& x) { return std::to_string(x.period); }),
               join(o, [](const PlanarOrbit& x) { return x.eta.str(); }),
               join(o, [](const PlanarOrbit& x) { return x.word.str(); }), std::string(maximin ? "true" : "false"),
               nb});
    }
    return t;
}

MapFamily linear_family(double a, double b) {
    return make_family(Branch::linear(a), Branch::linear(b), ParamCurve::quarter_circle());
}

// --------------------------------------------------------------------------- plumbing

std::string config_string(CLI::App* leaf) {
    std::vector<std::string> path;
    for (CLI::App* a = leaf; a && a->get_parent(); a = a->get_parent()) path.push_back(a->get_name());
    std::reverse(path.begin(), path.end());
    std::string s;
    for (const auto& p : path) s += (s.empty() ? "" : " ") + p;
    static const std::vector<std::string> skip{"--help", "--jobs", "--svg", "--no-svg", "--config", "--format"};
    for (const CLI::Option* o : leaf->get_options()) {
        std::string name = o->get_name(false, true);
        std::string first = name.substr(0, name.find(','));
        if (std::find(skip.begin(), skip.end(), first) != skip.end() || first == "-h") continue;
        std::string value;
        if (o->count()) {
            for (std::size_t i = 0; i < o->results().size(); ++i) value += (i ? ";" : "") + o->results()[i];
        } else {
            value = o->get_default_str();
        }
        std::string flat;
        for (char ch : value) {
            bool space = ch == '\n' || ch == '\r' || ch == '\t' || ch == ' ';
            if (!space) flat += ch;
            else if (!flat.empty() && flat.back() != ' ') flat += ' ';
        }
        value = flat;
        std::string key = first.rfind("--", 0) == 0 ? first.substr(2) : first;
        s += " " + key + "=" + value;
    }
    return s;
}

void apply_config(CLI::App* leaf) {
    CLI::Option* cfg = leaf->get_option_no_throw("--config");
    if (!cfg || !cfg->count()) return;
    auto kv = read_key_values(cfg->as<std::string>());
    for (const auto& [key, value] : kv) {
        CLI::Option* o = leaf->get_option_no_throw("--" + key);
        if (!o || key == "config" || key == "params") throw ConfigError("config: unknown key '" + key + "'");
        if (o->count()) continue;
        o->add_result(value);
        o->run_callback();
    }
}

CLI::App* leaf_of(CLI::App* app) {
    while (true) {
        auto subs = app->get_subcommands();
        if (subs.empty()) return app;
        app = subs.front();
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Piecewise-smooth map analysis: rotation numbers, Farey structure and bifurcation scans", "pwdyn"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    std::map<CLI::App*, std::function<void(CLI::App*)>> handlers;
    std::vector<std::unique_ptr<Common>> commons;
    std::vector<std::unique_ptr<Budget>> budgets;
    auto common = [&](CLI::App* sub) {
        commons.push_back(std::make_unique<Common>());
        add_common(sub, *commons.back());
        return commons.back().get();
    };
    // figure regenerators write <name>.svg unless told otherwise
    auto figure = [&](CLI::App* sub) {
        commons.push_back(std::make_unique<Common>());
        Common* c = commons.back().get();
        c->svg = sub->get_name() + ".svg";
        add_common(sub, *c);
        sub->add_flag("--no-svg", c->no_svg, "Skip the SVG figure");
        return c;
    };
    auto budget = [&](CLI::App* sub, bool rotation = true, bool attractor = true) {
        budgets.push_back(std::make_unique<Budget>());
        add_budget(sub, *budgets.back(), rotation, attractor);
        return budgets.back().get();
    };

    // farey
    auto* farey = app.add_subcommand("farey", "Farey sequences and parents");
    farey->require_subcommand(1);
    auto* fseq = farey->add_subcommand("seq", "Farey sequence of a given order");
    auto order = std::make_shared<int>(6);
    fseq->add_option("--order", *order, "Order n >= 1")->required()->check(CLI::Range(1, 100000));
    handlers[fseq] = [&, order](CLI::App*) {
        for (const auto& r : farey_sequence(*order)) out << r.str() << "\n";
    };
    auto* fpar = farey->add_subcommand("parents", "Farey parents of p/q");
    auto fx = std::make_shared<std::string>();
    fpar->add_option("x", *fx, "Rational p/q strictly inside (0,1)")->required();
    handlers[fpar] = [&, fx](CLI::App*) {
        auto p = farey_parents(Rational::parse(*fx));
        out << p.left.str() << "\n" << p.right.str() << "\n";
    };

    // symbolic
    auto* sym = app.add_subcommand("symbolic", "Symbolic words");
    sym->require_subcommand(1);
    auto* sword = sym->add_subcommand("word", "Farey-tree word of p/q");
    auto wx = std::make_shared<std::string>();
    sword->add_option("x", *wx, "Reduced rational p/q in [0,1]")->required();
    handlers[sword] = [&, wx](CLI::App*) {
        auto slash = wx->find('/');
        if (slash == std::string::npos) throw ConfigError("expected p/q");
        std::int64_t p, q;
        try {
            p = std::stoll(wx->substr(0, slash));
            q = std::stoll(wx->substr(slash + 1));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse '" + *wx + "'");
        }
        out << farey_word(p, q).str() << "\n";
    };
    auto* scheck = sym->add_subcommand("check", "Order properties of a word");
    auto cw = std::make_shared<std::string>();
    scheck->add_option("word", *cw, "Word over L and R")->required();
    handlers[scheck] = [&, cw](CLI::App*) {
        SymbolicWord w(*cw);
        out << "word=" << w.str() << "\n";
        out << "eta=" << eta_number(w).str() << "\n";
        out << "primitive=" << (w.is_primitive() ? "true" : "false") << "\n";
        out << "minimal=" << minimal_rotation(w).str() << "\n";
        out << "maximal=" << maximal_rotation(w).str() << "\n";
        bool coprime = std::gcd(w.r_count(), w.size()) == 1;
        if (w.is_primitive() && coprime) {
            auto o = is_pq_ordered(w);
            out << "pq_ordered=" << (o.ordered ? "true" : "false") << "\n";
            if (o.ordered) out << "k=" << o.k << "\n";
            if (w.size() <= static_cast<std::size_t>(kMaximinBudget)) {
                out << "maximin=" << (is_maximin(w) ? "true" : "false") << "\n";
                out << "minimax=" << (is_minimax(w) ? "true" : "false") << "\n";
            } else {
                out << "maximin=beyond-budget\nminimax=beyond-budget\n";
            }
        } else {
            out << "pq_ordered=n/a\nmaximin=n/a\nminimax=n/a\n";
        }
    };

    // pwmap
    auto* pw = app.add_subcommand("pwmap", "Piecewise-smooth map iteration");
    pw->require_subcommand(1);
    auto* pit = pw->add_subcommand("iterate", "Orbit and itinerary of one seed");
    auto* pit_c = common(pit);
    auto pmap = std::make_shared<std::string>();
    auto px0 = std::make_shared<double>(0.1);
    auto pn = std::make_shared<std::size_t>(100);
    pit->add_option("--map", *pmap, "Map spec (JSON text or file)");
    pit->add_option("--x0", *px0, "Initial state");
    pit->add_option("--n", *pn, "Number of steps")->check(CLI::PositiveNumber);
    handlers[pit] = [&, pit_c, pmap, px0, pn](CLI::App* leaf) {
        MapSpec spec = pmap->empty() ? MapSpec{} : load_map_spec(*pmap);
        PiecewiseMap1D m = spec.map();
        Table t;
        t.columns = {"k", "x", "symbol"};
        t.config = config_string(leaf);
        double x = *px0;
        for (std::size_t k = 0; k <= *pn; ++k) {
            std::string s = std::abs(x) < kBoundaryEpsilon ? "B" : (x < 0 ? "L" : "R");
            t.add({static_cast<std::int64_t>(k), x, s});
            if (k < *pn) x = m.step(x);
        }
        emit(out, t, *pit_c);
    };

    // circle
    auto* circ = app.add_subcommand("circle", "Circle-map reduction");
    circ->require_subcommand(1);
    auto* crho = circ->add_subcommand("rho", "Rotation number and rational locking");
    auto* crho_c = common(crho);
    auto* crho_b = budget(crho, true, false);
    auto cmap = std::make_shared<std::string>();
    crho->add_option("--map", *cmap, "Map spec (JSON text or file)");
    handlers[crho] = [&, crho_c, crho_b, cmap](CLI::App* leaf) {
        MapSpec spec = cmap->empty() ? MapSpec{} : load_map_spec(*cmap);
        LiftedCircleMap f(CircleReduction::reduce(spec.map()));
        auto r = rotation_number(f, crho_b->rotation());
        Table t;
        t.columns = {"estimate", "error_bound", "locked", "residual"};
        t.config = config_string(leaf);
        t.add({r.estimate, r.error_bound, rat(r.locked), r.locked ? Cell(r.lock_residual) : Cell(std::string())});
        emit(out, t, *crho_c);
    };
    auto* cseeds = circ->add_subcommand("seeds", "Rotation estimates from evenly spaced seeds");
    auto* cseeds_c = common(cseeds);
    auto* cseeds_b = budget(cseeds, true, false);
    auto smap = std::make_shared<std::string>();
    auto nseeds = std::make_shared<std::size_t>(16);
    cseeds->add_option("--map", *smap, "Map spec (JSON text or file)");
    cseeds->add_option("--seeds", *nseeds, "Number of seeds")->check(CLI::PositiveNumber);
    handlers[cseeds] = [&, cseeds_c, cseeds_b, smap, nseeds](CLI::App* leaf) {
        MapSpec spec = smap->empty() ? MapSpec{} : load_map_spec(*smap);
        LiftedCircleMap f(CircleReduction::reduce(spec.map()));
        auto est = parallel_map(*nseeds, cseeds_c->jobs, [&](std::size_t i) {
            RotationOptions o = cseeds_b->rotation();
            o.seed = (static_cast<double>(i) + 0.5) / static_cast<double>(*nseeds);
            return rotation_number(f, o);
        });
        Table t;
        t.columns = {"seed", "estimate", "error_bound", "locked"};
        t.config = config_string(leaf);
        for (std::size_t i = 0; i < est.size(); ++i)
            t.add({(static_cast<double>(i) + 0.5) / static_cast<double>(*nseeds), est[i].estimate,
                   est[i].error_bound, rat(est[i].locked)});
        emit(out, t, *cseeds_c);
    };

    // scan
    auto* scan = app.add_subcommand("scan", "Parameter scans");
    scan->require_subcommand(1);
    auto* scurve = scan->add_subcommand("curve", "Scan along the (mu_L, mu_R) curve");
    auto* scurve_c = common(scurve);
    auto* scurve_b = budget(scurve, true);
    auto scmap = std::make_shared<std::string>();
    auto scsamples = std::make_shared<std::size_t>(2000);
    auto scstair = std::make_shared<bool>(false);
    scurve->add_option("--map", *scmap, "Map spec (JSON text or file)");
    scurve->add_option("--samples", *scsamples, "Samples on [0,1]")->check(CLI::Range(2, 10000000));
    scurve->add_flag("--staircase", *scstair, "Only the rotation staircase");
    handlers[scurve] = [&, scurve_c, scurve_b, scmap, scsamples, scstair](CLI::App* leaf) {
        MapSpec spec = scmap->empty() ? MapSpec{} : load_map_spec(*scmap);
        MapFamily fam = make_family(spec.left, spec.right, spec.curve, spec.rule);
        if (*scstair) {
            auto pts = staircase(fam, *scsamples, scurve_b->rotation(), scurve_c->jobs);
            Table t = staircase_table(pts);
            t.config = config_string(leaf);
            emit(out, t, *scurve_c);
            if (scurve_c->want_svg()) svg_stairs(stairs_of(pts), scurve_c->svg, "rotation staircase", "lambda", 0, 1);
            return;
        }
        auto recs = scan_curve(fam, *scsamples, scurve_b->scan(scurve_c->jobs));
        Table t = curve_table(recs);
        t.config = config_string(leaf);
        emit(out, t, *scurve_c);
        if (scurve_c->want_svg()) svg_curve(recs, scurve_c->svg, "curve scan");
    };
    auto* splane = scan->add_subcommand("plane", "Raster over the (mu_L, mu_R) plane");
    auto* splane_c = common(splane);
    auto* splane_b = budget(splane, false);
    auto spmap = std::make_shared<std::string>();
    auto spgrid = std::make_shared<std::string>("100x100");
    auto sprange = std::make_shared<std::string>("-1:1:-1:1");
    splane->add_option("--map", *spmap, "Map spec (JSON text or file)");
    splane->add_option("--grid", *spgrid, "WxH cells");
    splane->add_option("--range", *sprange, "mu_L_min:mu_L_max:mu_R_min:mu_R_max");
    handlers[splane] = [&, splane_c, splane_b, spmap, spgrid, sprange](CLI::App* leaf) {
        MapSpec spec = spmap->empty() ? MapSpec{} : load_map_spec(*spmap);
        auto [w, h] = parse_grid(*spgrid);
        auto r = parse_range(*sprange, 4);
        PlaneGrid g{w, h, r[0], r[1], r[2], r[3]};
        auto cells = scan_plane(make_plane_family(spec.left, spec.right, spec.rule), g, splane_b->scan(splane_c->jobs));
        Table t = plane_table(cells);
        t.config = config_string(leaf);
        emit(out, t, *splane_c);
        if (splane_c->want_svg()) plane_svg(cells, g, splane_c->svg, "period regions");
    };

    // model
    auto* model = app.add_subcommand("model", "Applied models");
    model->require_subcommand(1);

    auto* relay = model->add_subcommand("relay", "First-order relay control");
    relay->require_subcommand(1);
    struct RelayOpts {
        double a = -0.2, c = 0.0, k = -1.0, T = 0.1;
        std::size_t samples = 200;
    };
    for (const char* verb : {"scan", "staircase"}) {
        auto* sub = relay->add_subcommand(verb, std::string("Relay ") + verb + " over the setpoint family");
        auto* cc = common(sub);
        auto* bb = budget(sub, true, std::string(verb) == "scan");
        auto ro = std::make_shared<RelayOpts>();
        sub->add_option("--a", ro->a, "Field slope, f(y) = a y + c");
        sub->add_option("--c", ro->c, "Field offset");
        sub->add_option("--k", ro->k, "Relay gain");
        sub->add_option("--T", ro->T, "Sampling period")->check(CLI::PositiveNumber);
        sub->add_option("--samples", ro->samples, "Setpoints between the virtual equilibria")->check(CLI::Range(2, 10000000));
        bool stair = std::string(verb) == "staircase";
        handlers[sub] = [&, cc, bb, ro, stair](CLI::App* leaf) {
            RelayModel1D m;
            m.field = ScalarField::linear(ro->a, ro->c);
            m.k = ro->k;
            m.T = ro->T;
            auto [yr, yl] = relay_virtual_points(m);
            MapFamily fam = relay_family(m);
            if (stair) {
                auto pts = staircase(fam, ro->samples, bb->rotation(), cc->jobs);
                Table t;
                t.columns = {"lambda", "y_star", "eta_p", "eta_q", "estimate"};
                t.config = config_string(leaf);
                for (const auto& p : pts)
                    t.add({p.lambda, yl - p.lambda * (yl - yr), rat_p(p.eta), rat_q(p.eta),
                           p.rho ? Cell(p.rho->estimate) : Cell(std::string())});
                emit(out, t, *cc);
                if (cc->want_svg()) svg_stairs(stairs_of(pts), cc->svg, "relay staircase", "lambda", 0, 1);
                return;
            }
            auto recs = scan_curve(fam, ro->samples, bb->scan(cc->jobs));
            Table t = curve_table(recs);
            t.columns[0] = "lambda";
            t.config = config_string(leaf);
            emit(out, t, *cc);
            if (cc->want_svg()) svg_curve(recs, cc->svg, "relay scan");
        };
    }

    auto* ifm = model->add_subcommand("if", "Periodically forced integrate-and-fire");
    ifm->require_subcommand(1);
    struct IFOpts {
        double a = -0.5, c = 0.2, theta = 1.0, T = 1.9, d = 0.5, amin = 2.3, amax = 3.3;
        std::size_t samples = 200;
    };
    for (const char* verb : {"scan", "staircase"}) {
        auto* sub = ifm->add_subcommand(verb, std::string("Firing-number ") + verb + " over the amplitude A");
        auto* cc = common(sub);
        auto* bb = budget(sub, true, false);
        auto io = std::make_shared<IFOpts>();
        sub->add_option("--a", io->a, "Field slope, f(x) = a x + c");
        sub->add_option("--c", io->c, "Field offset");
        sub->add_option("--theta", io->theta, "Threshold")->check(CLI::PositiveNumber);
        sub->add_option("--T", io->T, "Forcing period")->check(CLI::PositiveNumber);
        sub->add_option("--d", io->d, "Duty cycle")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--amin", io->amin, "Smallest amplitude");
        sub->add_option("--amax", io->amax, "Largest amplitude");
        sub->add_option("--samples", io->samples, "Amplitudes")->check(CLI::Range(2, 10000000));
        bool stair = std::string(verb) == "staircase";
        handlers[sub] = [&, cc, bb, io, stair](CLI::App* leaf) {
            if (!(io->amax > io->amin)) throw ConfigError("amax must exceed amin");
            IFModel m;
            m.field = ScalarField::linear(io->a, io->c);
            m.theta = io->theta;
            m.T = io->T;
            m.d = io->d;
            std::vector<double> amps;
            for (std::size_t i = 0; i < io->samples; ++i)
                amps.push_back(io->amin + (io->amax - io->amin) * static_cast<double>(i) /
                                              static_cast<double>(io->samples - 1));
            auto s = firing_number(m, amps, bb->rotation(), cc->jobs);
            Table t;
            if (stair) {
                t.columns = {"A", "eta_p", "eta_q", "firing_rate"};
                for (const auto& x : s)
                    t.add({x.A, rat_p(x.eta), rat_q(x.eta), x.eta ? Cell(x.firing_rate(io->T)) : Cell(std::string())});
            } else {
                t = if_table(s, io->T);
            }
            t.config = config_string(leaf);
            emit(out, t, *cc);
            if (cc->want_svg()) {
                std::vector<std::pair<double, std::optional<Rational>>> pts;
                double lo = 1e300, hi = -1e300;
                for (const auto& x : s) {
                    pts.emplace_back(x.A, x.eta);
                    if (x.eta) {
                        lo = std::min(lo, std::floor(x.eta->value()));
                        hi = std::max(hi, std::ceil(x.eta->value()));
                    }
                }
                if (lo >= hi) {
                    lo = 0;
                    hi = 1;
                }
                svg_stairs(pts, cc->svg, "firing number", "A", lo, hi);
            }
        };
    }

    auto* planar = model->add_subcommand("planar", "Second-order relay with a sliding surface");
    planar->require_subcommand(1);
    struct PlanarOpts {
        double a0 = -2, a1 = -5, b = 1, c1 = 1.5, T = 0.1, kmin = -1, kmax = -1;
        std::size_t ksteps = 1, samples = 200;
    };
    for (const char* verb : {"scan", "staircase"}) {
        auto* sub = planar->add_subcommand(verb, std::string("Planar relay ") + verb + " across the both-virtual window");
        auto* cc = common(sub);
        auto* bb = budget(sub, false);
        auto po = std::make_shared<PlanarOpts>();
        sub->add_option("--a0", po->a0, "Companion entry a0");
        sub->add_option("--a1", po->a1, "Companion entry a1");
        sub->add_option("--b", po->b, "Input gain");
        sub->add_option("--c1", po->c1, "Sliding-surface coefficient");
        sub->add_option("--T", po->T, "Sampling period")->check(CLI::PositiveNumber);
        sub->add_option("--kmin", po->kmin, "First relay gain");
        sub->add_option("--kmax", po->kmax, "Last relay gain");
        sub->add_option("--ksteps", po->ksteps, "Gains between kmin and kmax")->check(CLI::PositiveNumber);
        sub->add_option("--samples", po->samples, "Setpoints per gain")->check(CLI::PositiveNumber);
        bool stair = std::string(verb) == "staircase";
        handlers[sub] = [&, cc, bb, po, stair](CLI::App* leaf) {
            auto rows = planar_rows(po->a0, po->a1, po->b, po->c1, po->T, po->kmin, po->kmax, po->ksteps, po->samples,
                                    bb->attractor(), cc->jobs);
            Table t;
            if (stair) {
                t.columns = {"k", "y_star", "eta_p", "eta_q"};
                for (const auto& r : rows) {
                    std::optional<Rational> e;
                    if (r.a.orbits.size() == 1) e = r.a.orbits[0].eta;
                    t.add({r.k, r.y_star, rat_p(e), rat_q(e)});
                }
            } else {
                t = planar_table(rows);
            }
            t.config = config_string(leaf);
            emit(out, t, *cc);
            if (cc->want_svg()) {
                std::vector<std::pair<double, std::optional<Rational>>> pts;
                for (const auto& r : rows)
                    pts.emplace_back(r.y_star, r.a.orbits.size() == 1 ? std::optional<Rational>(r.a.orbits[0].eta)
                                                                      : std::nullopt);
                std::sort(pts.begin(), pts.end(), [](auto& x, auto& y) { return x.first > y.first; });
                for (auto& p : pts) p.first = -p.first;
                svg_stairs(pts, cc->svg, "planar relay eta against -y*", "-y*", 0, 1);
            }
        };
    }

    // repro
    auto* repro = app.add_subcommand("repro", "Regenerate the figure data");
    repro->require_subcommand(1);
    for (const char* fig : {"fig-adding", "fig-incrementing"}) {
        bool adding = std::string(fig) == "fig-adding";
        auto* sub = repro->add_subcommand(fig, adding ? "Period adding curve scan (a = b = 0.5)"
                                                      : "Period incrementing curve scan (a = 0.5, b = -0.5)");
        auto* cc = figure(sub);
        auto* bb = budget(sub, true);
        auto samples = std::make_shared<std::size_t>(2000);
        sub->add_option("--samples", *samples, "Samples on [0,1]")->check(CLI::Range(2, 10000000));
        handlers[sub] = [&, cc, bb, samples, adding](CLI::App* leaf) {
            auto recs = scan_curve(linear_family(0.5, adding ? 0.5 : -0.5), *samples, bb->scan(cc->jobs));
            Table t = curve_table(recs);
            t.config = config_string(leaf);
            emit(out, t, *cc);
            if (cc->want_svg()) svg_curve(recs, cc->svg, adding ? "period adding" : "period incrementing");
        };
    }
    {
        auto* sub = repro->add_subcommand("fig-staircase", "Devil's staircase of the adding family");
        auto* cc = figure(sub);
        auto* bb = budget(sub, true, false);
        auto samples = std::make_shared<std::size_t>(2000);
        sub->add_option("--samples", *samples, "Samples on [0,1]")->check(CLI::Range(2, 10000000));
        handlers[sub] = [&, cc, bb, samples](CLI::App* leaf) {
            auto pts = staircase(linear_family(0.5, 0.5), *samples, bb->rotation(), cc->jobs);
            Table t = staircase_table(pts);
            t.config = config_string(leaf);
            emit(out, t, *cc);
            if (cc->want_svg()) svg_stairs(stairs_of(pts), cc->svg, "devil's staircase", "lambda", 0, 1);
        };
    }
    {
        auto* sub = repro->add_subcommand("fig-if-plane", "Firing-number regions over (d, 1/A)");
        auto* cc = figure(sub);
        auto* bb = budget(sub, true, false);
        auto grid = std::make_shared<std::string>("40x40");
        auto range = std::make_shared<std::string>("0.05:0.95:0.1:1.6");
        sub->add_option("--grid", *grid, "WxH cells");
        sub->add_option("--range", *range, "d_min:d_max:invA_min:invA_max");
        handlers[sub] = [&, cc, bb, grid, range](CLI::App* leaf) {
            auto [w, h] = parse_grid(*grid);
            auto r = parse_range(*range, 4);
            if (!(r[2] > 0 && r[3] > r[2])) throw ConfigError("1/A range must be positive and increasing");
            auto cells = parallel_map(w * h, cc->jobs, [&](std::size_t k) {
                std::size_t i = k % w, j = k / w;
                IFModel m;
                m.field = ScalarField::linear(-0.5, 0.2);
                m.d = w == 1 ? r[0] : r[0] + (r[1] - r[0]) * static_cast<double>(i) / static_cast<double>(w - 1);
                double inv = h == 1 ? r[2] : r[2] + (r[3] - r[2]) * static_cast<double>(j) / static_cast<double>(h - 1);
                m.A = 1.0 / inv;
                FiringSample s;
                try {
                    s = firing_sample(m, bb->rotation());
                } catch (const std::exception& e) {
                    s.A = m.A;
                    s.note = e.what();
                }
                return std::make_tuple(m.d, inv, s);
            });
            Table t;
            t.columns = {"d", "inv_A", "A", "n", "eta_p", "eta_q", "period", "contracting", "note"};
            t.config = config_string(leaf);
            for (const auto& [d, inv, s] : cells)
                t.add({d, inv, s.A, static_cast<std::int64_t>(s.n), rat_p(s.eta), rat_q(s.eta),
                       static_cast<std::int64_t>(s.period), std::string(s.contracting ? "true" : "false"), s.note});
            emit(out, t, *cc);
            if (cc->want_svg())
                svg_raster(
                    w, h, [&](std::size_t i, std::size_t j) { return std::get<2>(cells[j * w + i]).period; },
                    [&](std::size_t i, std::size_t j) { return !std::get<2>(cells[j * w + i]).contracting; }, cc->svg,
                    "IF firing period", "d", "1/A", {r[0], r[1], r[2], r[3]});
        };
    }
    {
        auto* sub = repro->add_subcommand("codim2", "Composed-map reduction of coexisting W(2,5) and W(3,8) orbits");
        auto* cc = common(sub);
        auto mu = std::make_shared<double>(1.0);
        auto nu = std::make_shared<double>(1.75);
        auto radius = std::make_shared<double>(3.0);
        sub->add_option("--mu", *mu, "Composed left offset");
        sub->add_option("--nu", *nu, "Composed right offset");
        sub->add_option("--radius", *radius, "Neighbourhood checked for the compositions")->check(CLI::PositiveNumber);
        handlers[sub] = [&, cc, mu, nu, radius](CLI::App* leaf) {
            auto src = quasi_contraction_source(*mu, *nu);
            auto red = codim2_reduce(src, SymbolicWord("LRL"), SymbolicWord("RL"), *radius);
            ScanOptions o;
            o.jobs = 1;
            o.with_rotation = false;
            auto rec = classify_point(red.composed, o);
            Table t;
            t.columns = {"orbit", "composed_word", "source_word", "index", "composed_x", "source_x", "source_residual"};
            t.config = config_string(leaf);
            for (std::size_t k = 0; k < rec.orbits.size(); ++k) {
                const auto& orb = rec.orbits[k];
                OrbitRecord ex = red.expand(orb);
                double x = ex.points[0];
                for (std::size_t s = 0; s < ex.period; ++s) x = src.step(x);
                double residual = std::abs(x - ex.points[0]);
                // composed point j sits where its block starts in the source orbit
                std::vector<Cell> composed(ex.period, Cell(std::string()));
                for (std::size_t j = 0, at = 0; j < orb.period; ++j) {
                    composed[at] = orb.points[j];
                    at += orb.word[j] == Symbol::L ? red.word_x.size() : red.word_y.size();
                }
                for (std::size_t i = 0; i < ex.period; ++i)
                    t.add({static_cast<std::int64_t>(k), orb.word.str(), ex.word.str(), static_cast<std::int64_t>(i),
                           composed[i], ex.points[i], residual});
            }
            emit(out, t, *cc);
        };
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
        CLI::App* leaf = leaf_of(&app);
        apply_config(leaf);
        auto h = handlers.find(leaf);
        if (h == handlers.end()) throw ConfigError("incomplete command");
        h->second(leaf);
    } catch (const CLI::CallForHelp& e) {
        out << (e.get_name() == "CallForAllHelp" ? app.help("", CLI::AppFormatMode::All) : leaf_of(&app)->help());
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace pwdyn::cli
