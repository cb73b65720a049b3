#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <sstream>

#include "selfsim/cli_io.hpp"
#include "selfsim/shooting.hpp"
#include "selfsim/similarity_odes.hpp"
#include "selfsim/verification.hpp"

namespace py = pybind11;
using namespace selfsim;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v) {
  // pointer form copies into a fresh contiguous buffer
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict residual_dict(const ResidualReport& r) {
  py::dict d;
  d["max_abs"] = r.max_abs;
  d["l2"] = r.l2;
  d["grid_size"] = r.grid_size;
  d["order_estimate"] = r.order_estimate ? py::cast(*r.order_estimate) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Self-similar shock, rarefaction and blow-up profiles of u u_tt - u_t^2 = u u_x u_t.";

  static py::exception<Error> error(m, "SelfsimError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(py::str(e.what()));
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<ShootConfig>(m, "ShootConfig")
      .def(py::init<>())
      .def_property(
          "rtol", [](const ShootConfig& c) { return c.tol.rtol; }, [](ShootConfig& c, double v) { c.tol.rtol = v; })
      .def_property(
          "atol", [](const ShootConfig& c) { return c.tol.atol; }, [](ShootConfig& c, double v) { c.tol.atol = v; })
      .def_readwrite("y_max", &ShootConfig::y_max)
      .def_readwrite("delta", &ShootConfig::delta)
      .def_readwrite("param_tol", &ShootConfig::param_tol)
      .def_readwrite("bvp_tol", &ShootConfig::bvp_tol)
      .def_readwrite("limit_window", &ShootConfig::limit_window)
      .def_readwrite("limit_tol", &ShootConfig::limit_tol)
      .def_readwrite("match_tol", &ShootConfig::match_tol)
      .def_readwrite("farfield_start", &ShootConfig::farfield_start)
      .def_readwrite("tail_y_max", &ShootConfig::tail_y_max)
      .def_readwrite("A_lo", &ShootConfig::A_lo)
      .def_readwrite("A_hi", &ShootConfig::A_hi)
      .def_readwrite("flat_floor", &ShootConfig::flat_floor)
      .def_readwrite("origin_precision", &ShootConfig::origin_precision)
      .def_readwrite("cauchy_start", &ShootConfig::cauchy_start)
      .def_readwrite("threads", &ShootConfig::threads)
      .def("validate", &ShootConfig::validate)
      .def("entries", [](const ShootConfig& c) { return config_entries(c); });

  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("load_config", [](const std::optional<std::filesystem::path>& p) { return load_config(p); },
        py::arg("path") = py::none());

  py::class_<Profile>(m, "Profile")
      .def_property_readonly("family", [](const Profile& p) { return std::string(to_string(p.family)); })
      .def_property_readonly("alpha", [](const Profile& p) { return p.params.alpha(); })
      .def_property_readonly("grid", [](const Profile& p) { return to_numpy(p.grid); })
      .def_property_readonly("f", [](const Profile& p) { return to_numpy(p.f); })
      .def_property_readonly("fp", [](const Profile& p) { return to_numpy(p.fp); })
      .def_property_readonly("launch_kind", [](const Profile& p) { return std::string(to_string(p.launch.kind)); })
      .def_property_readonly("launch_value", [](const Profile& p) { return p.launch.value; })
      .def_property_readonly("launch_offset", [](const Profile& p) { return p.launch.offset; })
      .def_property_readonly("tail",
                             [](const Profile& p) -> std::optional<std::pair<double, double>> {
                               if (!p.tail) return std::nullopt;
                               return std::pair{p.tail->amplitude, p.tail->exponent};
                             })
      .def("eval",
           [](const Profile& p, double y) {
             const ProfilePoint q = p.eval(y);
             return py::make_tuple(q.f, q.fp, q.fpp);
           },
           py::arg("y"), "(f, f', f'') at y")
      .def("__len__", &Profile::size);

  py::class_<ShootResult>(m, "ShootResult")
      .def_readonly("tuned_param", &ShootResult::tuned_param)
      .def_property_readonly("outcome", [](const ShootResult& r) { return std::string(to_string(r.outcome.tag)); })
      .def_property_readonly("outcome_value", [](const ShootResult& r) { return r.outcome.value; })
      .def_readonly("iterations", &ShootResult::iterations)
      .def_readonly("bracket", &ShootResult::bracket)
      .def_readonly("profile", &ShootResult::profile)
      .def_readonly("limit_estimate", &ShootResult::limit_estimate);

  py::class_<ExtensionPair>(m, "ExtensionPair")
      .def_readonly("blowup", &ExtensionPair::blowup)
      .def_readonly("global_", &ExtensionPair::global_)
      .def_readonly("scale_a", &ExtensionPair::scale_a)
      .def_readonly("C0", &ExtensionPair::C0)
      .def_readonly("C", &ExtensionPair::C)
      .def_readonly("C_rescaled", &ExtensionPair::C_rescaled);

  m.def("exponents", [](double alpha) {
    const ExponentPair e = exponents(SimilarityParams(alpha));
    return std::pair{e.m_minus, e.m_plus};
  }, py::arg("alpha"), "(m-, m+) of the origin bundle");
  m.def("rhs_shock", &rhs_shock, py::arg("y"), py::arg("f"), py::arg("fp"));
  m.def("rhs_rarefaction", &rhs_rarefaction, py::arg("y"), py::arg("F"), py::arg("Fp"));
  m.def("rhs_blowup", [](double a, double y, double f, double fp) { return rhs_blowup(SimilarityParams(a), y, f, fp); },
        py::arg("alpha"), py::arg("y"), py::arg("f"), py::arg("fp"));
  m.def("rhs_global", [](double a, double y, double F, double Fp) { return rhs_global(SimilarityParams(a), y, F, Fp); },
        py::arg("alpha"), py::arg("y"), py::arg("F"), py::arg("Fp"));

  const ShootConfig defaults;
  m.def("shoot_origin", &shoot_origin, py::arg("A"), py::arg("cfg") = defaults);
  m.def("solve_shock_bvp", &solve_shock_bvp, py::arg("cfg") = defaults);
  m.def("solve_farfield", &solve_farfield, py::arg("B"), py::arg("cfg") = defaults);
  m.def("solve_blowup_family",
        [](double a, double A, const ShootConfig& c) { return solve_blowup_family(SimilarityParams(a), A, c); },
        py::arg("alpha"), py::arg("A") = -1.0, py::arg("cfg") = defaults);
  m.def("solve_global", [](double a, double F0, const ShootConfig& c) { return solve_global(SimilarityParams(a), F0, c); },
        py::arg("alpha"), py::arg("F0") = 1.0, py::arg("cfg") = defaults);
  m.def("solve_global_cauchy",
        [](double a, double F, double Fp, const ShootConfig& c) { return solve_global_cauchy(SimilarityParams(a), F, Fp, c); },
        py::arg("alpha"), py::arg("F"), py::arg("Fp"), py::arg("cfg") = defaults);
  m.def("build_extension_pair",
        [](double a, double A, const ShootConfig& c) { return build_extension_pair(SimilarityParams(a), A, c); },
        py::arg("alpha"), py::arg("A") = -1.0, py::arg("cfg") = defaults);
  m.def("build_compact_profile", &build_compact_profile, py::arg("B"), py::arg("cfg") = defaults);
  m.def("rescale", &rescale, py::arg("profile"), py::arg("a"));
  m.def("reflect", &reflect, py::arg("profile"));
  m.def("odd_extension", &odd_extension, py::arg("profile"));
  m.def("fit_tail", [](const Profile& p) {
    const TailFit t = fit_tail(p, p.params);
    return py::make_tuple(t.amplitude, t.exponent, t.r2);
  }, py::arg("profile"), "(amplitude, exponent, r2) over the last decade");

  m.def("ode_residual", [](const Profile& p) { return residual_dict(ode_residual(p)); }, py::arg("profile"));
  m.def("reflection_check", [](const Profile& p) { return residual_dict(reflection_check(p)); }, py::arg("profile"));
  m.def("pde_residual",
        [](const Profile& p, double h) {
          PdeGrid g;
          g.h = h;
          if (!is_blowup_side(p.family)) g.t_range = {0.5, 2.0};
          return residual_dict(pde_residual(p, g));
        },
        py::arg("profile"), py::arg("h") = 1e-3);
  m.def("parabolicity", [](const Profile& p) { return parabolicity(p).min_value; }, py::arg("profile"));
  m.def("max_principle_scan", [](const Profile& p) {
    py::list out;
    for (const CriticalPoint& c : max_principle_scan(p)) {
      py::dict d;
      d["y0"] = c.y0;
      d["F"] = c.F;
      d["Fpp"] = c.Fpp;
      d["identity_residual"] = c.identity_residual;
      d["violation"] = c.violation;
      out.append(d);
    }
    return out;
  }, py::arg("profile"));
  m.def("log_divergence", [](const Profile& p, const std::vector<double>& Y) {
    const LogDivergence ld = log_divergence(p, Y);
    return py::make_tuple(ld.slope, ld.r2, ld.integrals);
  }, py::arg("profile"), py::arg("Y"), "(slope, r2, integrals)");
  m.def("final_profile", &final_profile, py::arg("profile"), py::arg("x"));
  m.def("shock_point_curvature", [](double a, double F0) { return shock_point_curvature(SimilarityParams(a), F0); },
        py::arg("alpha"), py::arg("F0") = 1.0);

  m.def("write_profile_csv", &write_profile_csv, py::arg("profile"), py::arg("path"));
  m.def("run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "CLI entry point: (exit_code, stdout, stderr)");
}
