#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bilayer/chain.hpp"
#include "bilayer/composites.hpp"
#include "bilayer/diagrams.hpp"
#include "bilayer/simulator.hpp"

namespace py = pybind11;
using namespace bilayer;

namespace {

PotentialParams make_potential(int n, int l, double eps) {
    PotentialParams p;
    p.n = n;
    p.l = l;
    p.eps = eps;
    p.validate();
    return p;
}

CompositeSpec make_spec(const std::string& kind, double sigma, double L, double h1_m, double h_m,
                        std::optional<double> shift, bool inverted, double well_depth) {
    CompositeSpec s;
    s.kind = kind_from_string(kind);
    s.sigma = sigma;
    s.L = L;
    s.h1_m = h1_m;
    s.h_m = h_m;
    s.shift = shift;
    s.inverted = inverted;
    s.well_depth = well_depth;
    return s;
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict profile_dict(const Profile& p) {
    py::dict d;
    d["x"] = to_array(p.x);
    d["h1"] = to_array(p.h1);
    d["h"] = to_array(p.h);
    d["resolution_warning"] = p.resolution_warning;
    return d;
}

Profile profile_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> x,
                            py::array_t<double, py::array::c_style | py::array::forcecast> h1,
                            py::array_t<double, py::array::c_style | py::array::forcecast> h) {
    if (x.ndim() != 1 || h1.ndim() != 1 || h.ndim() != 1 || x.size() != h1.size() || x.size() != h.size())
        throw UsageError("x, h1 and h must be 1-d arrays of equal length");
    Profile p;
    p.x.assign(x.data(), x.data() + x.size());
    p.h1.assign(h1.data(), h1.data() + h1.size());
    p.h.assign(h.data(), h.data() + h.size());
    return p;
}

py::dict solution_dict(const LeadingOrderSolution& s) {
    py::dict d;
    d["kind"] = kind_name(s.spec.kind);
    d["solution_id"] = solution_id(s.spec.kind);
    d["lambda1_0"] = s.lambda1_0 ? py::cast(*s.lambda1_0) : py::none();
    d["lambda2_0"] = s.lambda2_0 ? py::cast(*s.lambda2_0) : py::none();
    d["max_h1"] = s.max_h1;
    d["max_h"] = s.max_h;
    d["constants"] = s.constants;
    d["flags"] = s.flags;
    py::list cls;
    for (const auto& c : s.cls) {
        py::dict e;
        e["type"] = to_string(c.cl_type);
        e["position"] = c.position;
        e["layer"] = c.layer;
        cls.append(e);
    }
    d["contact_lines"] = cls;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Leading-order bilayer thin-film composites, existence diagrams and an implicit simulator.";

    static py::exception<UsageError> usage_error(m, "UsageError", PyExc_ValueError);
    static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
    static py::exception<ConstraintViolation> constraint_error(m, "ConstraintViolation", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConstraintViolation& e) {
            py::set_error(constraint_error, e.what());
        } catch (const DomainError& e) {
            py::set_error(domain_error, e.what());
        } catch (const UsageError& e) {
            py::set_error(usage_error, e.what());
        }
    });

    m.def(
        "phi", [](double h, int n, int l) { return phi(make_potential(n, l, 1.0), h); }, py::arg("h"),
        py::arg("n") = 2, py::arg("l") = 3);
    m.def(
        "pi_eps", [](double h, double eps, int n, int l) { return pi_eps(make_potential(n, l, eps), h); },
        py::arg("h"), py::arg("eps"), py::arg("n") = 2, py::arg("l") = 3);

    m.def("kinds", [] {
        std::vector<std::string> out;
        for (Kind k : kAllKinds) out.push_back(kind_name(k));
        return out;
    });

    m.def(
        "build",
        [](const std::string& kind, double sigma, double L, double h1_m, double h_m, std::optional<double> shift,
           bool inverted, double well_depth) {
            return solution_dict(build(make_spec(kind, sigma, L, h1_m, h_m, shift, inverted, well_depth)));
        },
        py::arg("kind"), py::arg("sigma"), py::arg("L"), py::arg("h1_m"), py::arg("h_m"),
        py::arg("shift") = py::none(), py::arg("inverted") = false, py::arg("well_depth") = 1.0 / 6.0);

    m.def(
        "existence_report",
        [](const std::string& kind, double sigma, double L, double h1_m, double h_m, std::optional<double> shift,
           double well_depth) {
            std::vector<std::pair<std::string, double>> out;
            for (const auto& c :
                 existence_report(make_spec(kind, sigma, L, h1_m, h_m, shift, false, well_depth)).items)
                out.emplace_back(c.id, c.margin);
            return out;
        },
        py::arg("kind"), py::arg("sigma"), py::arg("L"), py::arg("h1_m"), py::arg("h_m"),
        py::arg("shift") = py::none(), py::arg("well_depth") = 1.0 / 6.0);

    m.def(
        "sample_profile",
        [](const std::string& kind, double sigma, double L, double h1_m, double h_m, double eps, int grid_points,
           bool mollify, std::optional<double> shift, bool inverted) {
            const auto sol = build(make_spec(kind, sigma, L, h1_m, h_m, shift, inverted, 1.0 / 6.0));
            return profile_dict(sample_profile(sol, make_potential(2, 3, eps), grid_points, mollify));
        },
        py::arg("kind"), py::arg("sigma"), py::arg("L"), py::arg("h1_m"), py::arg("h_m"), py::arg("eps") = 0.01,
        py::arg("grid_points") = 2001, py::arg("mollify") = true, py::arg("shift") = py::none(),
        py::arg("inverted") = false);

    m.def("parse_chain", [](const std::string& text) { return format_chain(parse_chain(text)); }, py::arg("text"));
    m.def(
        "assemble_chain",
        [](const std::string& text, double sigma, double L, std::vector<std::pair<double, double>> heights,
           double eps, int grid_points) {
            std::vector<HeightPair> hp;
            for (auto [a, b] : heights) hp.push_back({a, b});
            return profile_dict(assemble_chain(parse_chain(text), make_potential(2, 3, eps), sigma, L, hp, grid_points));
        },
        py::arg("text"), py::arg("sigma"), py::arg("L"), py::arg("heights"), py::arg("eps") = 0.01,
        py::arg("grid_points") = 2001);

    m.def(
        "symmetric_points",
        [](double sigma, double L, double well_depth) {
            const auto [I, II] = symmetric_points(DiagramConfig::around_symmetric_points(sigma, L, well_depth, 2));
            return std::make_pair(I.h1_max, II.h_max);
        },
        py::arg("sigma"), py::arg("L") = 2.0, py::arg("well_depth") = 1.0 / 6.0);

    m.def(
        "ed_membership",
        [](const std::string& kind, double h_max, double h1_max, double sigma, double L, double well_depth) {
            DiagramConfig c;
            c.sigma = sigma;
            c.L = L;
            c.well_depth = well_depth;
            return ed_membership(kind_from_string(kind), h_max, h1_max, c);
        },
        py::arg("kind"), py::arg("h_max"), py::arg("h1_max"), py::arg("sigma"), py::arg("L") = 2.0,
        py::arg("well_depth") = 1.0 / 6.0);

    m.def(
        "reflect_check",
        [](double sigma, double L, int resolution) {
            const auto r = reflect_check(DiagramConfig::around_symmetric_points(sigma, L, 1.0 / 6.0, resolution));
            py::dict d;
            d["checked"] = r.checked;
            d["violations"] = r.violations;
            d["boundary_excluded"] = r.boundary_excluded;
            return d;
        },
        py::arg("sigma"), py::arg("L") = 2.0, py::arg("resolution") = 200);

    m.def(
        "simulate",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> x,
           py::array_t<double, py::array::c_style | py::array::forcecast> h1,
           py::array_t<double, py::array::c_style | py::array::forcecast> h, double sigma, double eps, double mu,
           double t_end, double dt_init, double dt_max, long max_steps) {
            const Profile init = profile_from_arrays(x, h1, h);
            SimParams q;
            q.sigma = sigma;
            q.mu = mu;
            q.potential = make_potential(2, 3, eps);
            q.N = static_cast<int>(init.size());
            q.L = init.x.back() - init.x.front();
            q.t_end = t_end;
            q.dt_init = dt_init;
            q.dt_max = dt_max;
            q.max_steps = max_steps;
            q.output_every = 1;
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run(q, init);
            }
            py::dict d;
            d["profile"] = profile_dict(profile_from_state(r.final_state, q));
            d["t"] = r.final_state.t;
            d["accepted"] = r.accepted;
            d["rejected"] = r.rejected;
            d["aborted"] = r.aborted;
            d["abort_reason"] = r.abort_reason;
            std::vector<double> t, e, m1, m0;
            for (const auto& g : r.trajectory) {
                t.push_back(g.t);
                e.push_back(g.energy);
                m1.push_back(g.mass1);
                m0.push_back(g.mass);
            }
            d["trajectory"] = py::dict(py::arg("t") = to_array(t), py::arg("energy") = to_array(e),
                                       py::arg("mass1") = to_array(m1), py::arg("mass") = to_array(m0));
            d["classification"] = to_string(classify_run(state_from_profile(init, q), r.final_state, q));
            return d;
        },
        py::arg("x"), py::arg("h1"), py::arg("h"), py::arg("sigma"), py::arg("eps"), py::arg("mu") = 1.0,
        py::arg("t_end") = 1.0, py::arg("dt_init") = 1e-6, py::arg("dt_max") = 0.1, py::arg("max_steps") = 0);
}
