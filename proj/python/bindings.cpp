#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pwdyn/bifurcation.hpp"
#include "pwdyn/circlemap.hpp"
#include "pwdyn/cli.hpp"
#include "pwdyn/farey.hpp"
#include "pwdyn/models.hpp"
#include "pwdyn/pwmap.hpp"
#include "pwdyn/symbolic.hpp"

namespace py = pybind11;
using namespace pwdyn;

namespace {

py::object rat(const std::optional<Rational>& r) {
    if (!r) return py::none();
    return py::make_tuple(r->p(), r->q());
}

Rational to_rational(const py::object& o) {
    if (py::isinstance<py::str>(o)) return Rational::parse(o.cast<std::string>());
    auto t = o.cast<std::pair<std::int64_t, std::int64_t>>();
    return Rational(t.first, t.second);
}

py::dict orbit_dict(const OrbitRecord& o) {
    py::dict d;
    d["points"] = o.points;
    d["word"] = o.word.str();
    d["period"] = o.period;
    d["eta"] = rat(o.eta);
    d["stable"] = o.stable;
    d["multiplier"] = o.multiplier;
    return d;
}

py::dict rotation_dict(const RotationResult& r) {
    py::dict d;
    d["estimate"] = r.estimate;
    d["error_bound"] = r.error_bound;
    d["locked"] = rat(r.locked);
    d["lock_residual"] = r.lock_residual;
    d["x_star"] = r.x_star ? py::cast(*r.x_star) : py::none();
    d["one_sided"] = r.one_sided;
    return d;
}

RotationOptions rotation_options(std::size_t n, int q_max) {
    RotationOptions o;
    o.n = n;
    o.q_max = q_max;
    return o;
}

MapFamily linear_family(double a, double b) {
    return make_family(Branch::linear(a), Branch::linear(b), ParamCurve::quarter_circle());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Piecewise-smooth maps, rotation numbers and Farey structure";

    // farey
    m.def("farey_sequence", [](int n) {
        std::vector<std::pair<std::int64_t, std::int64_t>> v;
        for (const auto& r : farey_sequence(n)) v.emplace_back(r.p(), r.q());
        return v;
    }, py::arg("n"));
    m.def("farey_parents", [](const py::object& x) {
        auto p = farey_parents(to_rational(x));
        return py::make_tuple(rat(p.left), rat(p.right));
    }, py::arg("x"));
    m.def("mediant", [](const py::object& a, const py::object& b) { return rat(mediant(to_rational(a), to_rational(b))); });
    m.def("is_neighbor_pair", [](const py::object& a, const py::object& b) {
        return is_neighbor_pair(to_rational(a), to_rational(b));
    });

    // symbolic
    m.def("farey_word", [](std::int64_t p, std::int64_t q) { return farey_word(p, q).str(); }, py::arg("p"), py::arg("q"));
    m.def("eta_number", [](const std::string& w) { return rat(eta_number(SymbolicWord(w))); }, py::arg("word"));
    m.def("minimal_rotation", [](const std::string& w) { return minimal_rotation(SymbolicWord(w)).str(); });
    m.def("maximal_rotation", [](const std::string& w) { return maximal_rotation(SymbolicWord(w)).str(); });
    m.def("is_maximin", [](const std::string& w) { return is_maximin(SymbolicWord(w)); });
    m.def("is_minimax", [](const std::string& w) { return is_minimax(SymbolicWord(w)); });
    m.def("is_pq_ordered", [](const std::string& w) {
        auto o = is_pq_ordered(SymbolicWord(w));
        return o.ordered ? py::object(py::int_(o.k)) : py::none();
    }, "Ordering witness k, or None");
    m.def("enumerate_wpq", [](int p, int q, bool up_to_rotation) {
        std::vector<std::string> v;
        for (const auto& w : enumerate_wpq(p, q, up_to_rotation)) v.push_back(w.str());
        return v;
    }, py::arg("p"), py::arg("q"), py::arg("up_to_rotation") = true);

    // maps
    py::class_<PiecewiseMap1D>(m, "PiecewiseMap")
        .def(py::init([](double a, double b, double mu_left, double mu_right) {
                 return PiecewiseMap1D::linear(a, b, mu_left, mu_right);
             }),
             py::arg("a"), py::arg("b"), py::arg("mu_left"), py::arg("mu_right"))
        .def_property_readonly("mu_left", &PiecewiseMap1D::mu_left)
        .def_property_readonly("mu_right", &PiecewiseMap1D::mu_right)
        .def("step", &PiecewiseMap1D::step)
        .def("itinerary", [](const PiecewiseMap1D& f, double x0, std::size_t n) {
            auto it = itinerary(f, x0, n);
            return py::make_tuple(it.symbols.str(), it.states, it.boundary_hit);
        }, py::arg("x0"), py::arg("n"))
        .def("find_attractor", [](const PiecewiseMap1D& f, double x0) {
            auto r = find_attractor(f, x0);
            py::dict d;
            d["status"] = to_string(r.status);
            d["orbit"] = r.orbit ? py::object(orbit_dict(*r.orbit)) : py::none();
            d["message"] = r.message;
            return d;
        }, py::arg("x0"))
        .def("rotation_number", [](const PiecewiseMap1D& f, std::size_t n, int q_max) {
            LiftedCircleMap lift(CircleReduction::reduce(f));
            return rotation_dict(rotation_number(lift, rotation_options(n, q_max)));
        }, py::arg("n") = 100000, py::arg("q_max") = 100);

    m.def("rigid_rotation_number", [](double omega, std::size_t n, int q_max) {
        return rotation_dict(rotation_number(LiftedCircleMap::rigid_rotation(omega), rotation_options(n, q_max)));
    }, py::arg("omega"), py::arg("n") = 100000, py::arg("q_max") = 100);

    // scans over the quarter-circle curve of a linear family
    m.def("scan_curve", [](double a, double b, std::size_t samples, std::size_t n, int q_max, std::size_t jobs) {
        ScanOptions o;
        o.rotation = rotation_options(n, q_max);
        o.jobs = jobs;
        std::vector<ScanRecord> recs;
        {
            py::gil_scoped_release release;
            recs = scan_curve(linear_family(a, b), samples, o);
        }
        py::list out;
        for (const auto& r : recs) {
            py::dict d;
            d["lambda"] = r.lambda;
            d["mu_left"] = r.mu_left;
            d["mu_right"] = r.mu_right;
            d["outcome"] = to_string(r.outcome);
            py::list orbits;
            for (const auto& o2 : r.orbits) orbits.append(orbit_dict(o2));
            d["orbits"] = orbits;
            d["locked"] = r.rho ? rat(r.rho->locked) : py::none();
            d["case"] = r.geometry ? py::object(py::str(r.geometry->label())) : py::none();
            out.append(d);
        }
        return out;
    }, py::arg("a"), py::arg("b"), py::arg("samples"), py::arg("n") = 100000, py::arg("q_max") = 100,
       py::arg("jobs") = 1);
    m.def("staircase", [](double a, double b, std::size_t samples, std::size_t n, int q_max, std::size_t jobs) {
        std::vector<StaircasePoint> pts;
        {
            py::gil_scoped_release release;
            pts = staircase(linear_family(a, b), samples, rotation_options(n, q_max), jobs);
        }
        std::vector<std::pair<double, py::object>> v;
        for (const auto& p : pts) v.emplace_back(p.lambda, rat(p.eta));
        return v;
    }, py::arg("a"), py::arg("b"), py::arg("samples"), py::arg("n") = 100000, py::arg("q_max") = 100,
       py::arg("jobs") = 1);

    // models
    m.def("relay_branch", [](double a, double c, double k, double T, double y, bool left) {
        RelayModel1D r;
        r.field = ScalarField::linear(a, c);
        r.k = k;
        r.T = T;
        return relay_branch(r, y, left);
    }, py::arg("a"), py::arg("c"), py::arg("k"), py::arg("T"), py::arg("y"), py::arg("left"));
    m.def("firing_number", [](std::vector<double> amplitudes, double a, double c, double theta, double T, double d,
                              std::size_t n, std::size_t jobs) {
        IFModel base;
        base.field = ScalarField::linear(a, c);
        base.theta = theta;
        base.T = T;
        base.d = d;
        std::vector<FiringSample> s;
        {
            py::gil_scoped_release release;
            s = firing_number(base, amplitudes, rotation_options(n, 100), jobs);
        }
        py::list out;
        for (const auto& x : s) {
            py::dict r;
            r["A"] = x.A;
            r["n"] = x.n;
            r["rho"] = rat(x.rho);
            r["eta"] = rat(x.eta);
            r["contracting"] = x.contracting;
            r["note"] = x.note;
            out.append(r);
        }
        return out;
    }, py::arg("amplitudes"), py::arg("a") = -0.5, py::arg("c") = 0.2, py::arg("theta") = 1.0, py::arg("T") = 1.9,
       py::arg("d") = 0.5, py::arg("n") = 100000, py::arg("jobs") = 1);
    m.def("planar_relay", [](double y_star, double k, double a0, double a1, double b, double c1, double T) {
        PlanarRelayMap f(PlanarRelayModel::companion(a0, a1, b, c1, T, k, y_star));
        auto an = f.analyze();
        py::list orbits;
        for (const auto& o : an.orbits) {
            py::dict d;
            d["word"] = o.word.str();
            d["period"] = o.period;
            d["eta"] = rat(o.eta);
            d["maximin"] = itinerary_is_maximin(o.word);
            orbits.append(d);
        }
        py::dict d;
        d["both_virtual"] = an.both_virtual;
        d["orbits"] = orbits;
        d["collisions"] = an.collisions;
        return d;
    }, py::arg("y_star"), py::arg("k") = -1.0, py::arg("a0") = -2.0, py::arg("a1") = -5.0, py::arg("b") = 1.0,
       py::arg("c1") = 1.5, py::arg("T") = 0.1);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run one command line in-process; returns (exit_code, stdout, stderr)");
}
