#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "odlab/config.hpp"
#include "odlab/corrector.hpp"
#include "odlab/diagnostics.hpp"
#include "odlab/errors.hpp"
#include "odlab/harness.hpp"
#include "odlab/integrators.hpp"
#include "odlab/potentials.hpp"
#include "odlab/rng.hpp"
#include "odlab/version.hpp"

namespace py = pybind11;
using namespace odlab;

namespace {

using Array = py::array_t<double>;

Vec to_vec(const std::vector<double>& x) { return Vec::from(x); }
TorusPosition to_q(const std::vector<double>& x) { return wrap(Vec::from(x)); }
std::vector<double> to_list(const Vec& v) { return {v.begin(), v.end()}; }

PositionLaw position_law(const std::optional<std::vector<double>>& q0) {
  return q0 ? PositionLaw::at(to_q(*q0)) : PositionLaw::uniform();
}

// n_traj x n_times x dim copy of a strided accessor.
template <class Get>
Array cube(const Ensemble& e, Get get) {
  Array out({e.n_traj(), e.n_times(), e.dim()});
  auto a = out.mutable_unchecked<3>();
  for (std::size_t i = 0; i < e.n_traj(); ++i) {
    for (std::size_t j = 0; j < e.n_times(); ++j) {
      const auto x = get(i, j);
      for (std::size_t k = 0; k < e.dim(); ++k) a(i, j, k) = x[k];
    }
  }
  return out;
}

py::dict estimate(const Estimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["se"] = e.se;
  return d;
}

std::vector<TestFunction> labelled(const std::vector<FourierFunction>& fs) {
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < fs.size(); ++i) out.emplace_back(fs[i], "f" + std::to_string(i + 1));
  return out;
}

}  // namespace

PYBIND11_MODULE(_odlab, m) {
  m.doc() = "Langevin / overdamped Langevin simulation and diagnostics";
  m.attr("__version__") = kVersion;

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);
  (void)validation;

  py::class_<FourierFunction>(m, "FourierFunction")
      .def(py::init([](const std::string& text, std::size_t dim) { return FourierFunction::parse(text, dim); }),
           py::arg("text"), py::arg("dim"),
           "Terms 'k1 .. kd cos_coef sin_coef' separated by ';'.")
      .def_property_readonly("dim", &FourierFunction::dim)
      .def("value", [](const FourierFunction& f, const std::vector<double>& q) { return f.value(to_q(q)); })
      .def("gradient",
           [](const FourierFunction& f, const std::vector<double>& q) { return to_list(f.gradient(to_q(q))); })
      .def("to_text", &FourierFunction::to_text, py::arg("one_line") = true)
      .def("__add__", [](const FourierFunction& a, const FourierFunction& b) { return a + b; })
      .def("scaled", &FourierFunction::scaled)
      .def("dilated", &FourierFunction::dilated)
      .def("__repr__", [](const FourierFunction& f) { return "FourierFunction('" + f.to_text(true) + "')"; });

  m.def("oscillation", py::overload_cast<const FourierFunction&>(&oscillation), "max V - min V on the torus.");
  m.def("sup_hessian_norm", &sup_hessian_norm);
  m.def(
      "crystal_potential",
      [](const FourierFunction& v, const FourierFunction& chi, double alpha, int k) {
        return CrystalPotential(Potential(v), chi, alpha, k).expanded().function();
      },
      py::arg("v"), py::arg("chi"), py::arg("alpha"), py::arg("k"), "V + alpha chi(k q) as a Fourier series.");
  m.def(
      "sup_grad_distance",
      [](const FourierFunction& v, const FourierFunction& chi, double alpha, int k) {
        return sup_grad_distance(CrystalPotential(Potential(v), chi, alpha, k), Potential(v));
      },
      py::arg("v"), py::arg("chi"), py::arg("alpha"), py::arg("k"));

  m.def(
      "langevin_step",
      [](const std::vector<double>& q, const std::vector<double>& p, const FourierFunction& v_eps, double eps,
         double beta, double dt, const std::vector<double>& xi) {
        const ScalingParams sp{eps, beta, dt, dt};
        const Vec pv = to_vec(p);
        const PhaseState s = langevin_step({to_q(q), pv, 0.0, Vec(pv.size())}, Potential(v_eps), sp, xi);
        return py::make_tuple(to_list(s.q.coords()), to_list(s.p), to_list(s.shift));
      },
      py::arg("q"), py::arg("p"), py::arg("v_eps"), py::arg("eps"), py::arg("beta"), py::arg("dt"), py::arg("xi"),
      "One step; returns (q, p, lattice shift).");
  m.def(
      "overdamped_step",
      [](const std::vector<double>& q, const FourierFunction& v, double beta, double dt,
         const std::vector<double>& xi) {
        return to_list(overdamped_step(to_q(q), Potential(v), ScalingParams{1.0, beta, dt, dt}, xi).coords());
      },
      py::arg("q"), py::arg("v"), py::arg("beta"), py::arg("dt"), py::arg("xi"));

  m.def(
      "perturbed_value",
      [](const FourierFunction& f, double eps, const std::vector<double>& q, const std::vector<double>& p) {
        return perturb(TestFunction(f), eps).value(to_q(q), to_vec(p));
      },
      "f + eps p.grad f + eps^2/2 Hess f(p, p)");
  m.def("langevin_generator_perturbed",
        [](const FourierFunction& f, const FourierFunction& v_eps, double eps, double beta,
           const std::vector<double>& q, const std::vector<double>& p) {
          return apply_langevin_generator(perturb(TestFunction(f), eps), Potential(v_eps), eps, beta, to_q(q),
                                          to_vec(p));
        });
  m.def("overdamped_generator", [](const FourierFunction& f, const FourierFunction& v, double beta,
                                   const std::vector<double>& q) {
    return apply_overdamped_generator(TestFunction(f), Potential(v), beta, to_q(q));
  });
  m.def("residual_r1", [](const FourierFunction& f, double eps, const std::vector<double>& q,
                          const std::vector<double>& p) { return residual_R1(TestFunction(f), eps, to_q(q), to_vec(p)); });
  m.def("residual_r2", [](const FourierFunction& f, const FourierFunction& v, const FourierFunction& v_eps, double eps,
                          double beta, const std::vector<double>& q, const std::vector<double>& p) {
    return residual_R2(TestFunction(f), Potential(v), Potential(v_eps), eps, beta, to_q(q), to_vec(p));
  });
  m.def("generator_difference", [](const FourierFunction& f, const FourierFunction& v, const FourierFunction& v_eps,
                                   double eps, double beta, const std::vector<double>& q,
                                   const std::vector<double>& p) {
    const auto g = generator_difference(TestFunction(f), Potential(v), Potential(v_eps), eps, beta, to_q(q), to_vec(p));
    return py::make_tuple(g.direct, g.closed_form);
  });
  m.def("hamiltonian", [](const std::vector<double>& q, const std::vector<double>& p, const FourierFunction& v_eps) {
    return hamiltonian(to_q(q), to_vec(p), Potential(v_eps));
  });

  py::class_<Ensemble>(m, "Ensemble")
      .def_property_readonly("dim", &Ensemble::dim)
      .def_property_readonly("n_traj", &Ensemble::n_traj)
      .def_property_readonly("grid", [](const Ensemble& e) { return Array(e.grid().size(), e.grid().data()); })
      .def_property_readonly("positions",
                             [](const Ensemble& e) {
                               return cube(e, [&](std::size_t i, std::size_t j) { return e.position_coords(i, j); });
                             })
      .def_property_readonly("momenta",
                             [](const Ensemble& e) -> py::object {
                               if (!e.has_momenta()) return py::none();
                               return cube(e, [&](std::size_t i, std::size_t j) { return e.momentum(i, j); });
                             })
      .def_property_readonly("displacements", [](const Ensemble& e) -> py::object {
        if (!e.has_displacements()) return py::none();
        Array out({e.n_traj(), e.dim()});
        auto a = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < e.n_traj(); ++i) {
          const auto x = e.displacement(i);
          for (std::size_t k = 0; k < e.dim(); ++k) a(i, k) = x[k];
        }
        return out;
      });

  m.def(
      "simulate_langevin",
      [](const FourierFunction& v_eps, double eps, double beta, double dt, double T, std::size_t n_traj,
         std::uint64_t seed, std::optional<std::vector<double>> q0, double p0_variance, std::size_t stride,
         bool record_momenta, unsigned workers) {
        SimulationOptions o;
        o.n_traj = n_traj;
        o.seed = seed;
        o.output_stride = stride;
        o.record_momenta = record_momenta;
        o.workers = workers;
        const MomentumLaw p0 = p0_variance > 0 ? MomentumLaw::gaussian(p0_variance) : MomentumLaw::zero();
        py::gil_scoped_release release;
        return simulate_ensemble(LangevinProcess{Potential(v_eps), {position_law(q0), p0}},
                                 ScalingParams{eps, beta, dt, T}, o);
      },
      py::arg("v_eps"), py::arg("eps"), py::arg("beta"), py::arg("dt"), py::arg("T"), py::arg("n_traj"),
      py::arg("seed"), py::arg("q0") = py::none(), py::arg("p0_variance") = 0.0, py::arg("stride") = 1,
      py::arg("record_momenta") = true, py::arg("workers") = 1,
      "q0=None draws Q_0 uniformly; p0_variance=0 starts at rest.");
  m.def(
      "simulate_overdamped",
      [](const FourierFunction& v, double beta, double dt, double T, std::size_t n_traj, std::uint64_t seed,
         std::optional<std::vector<double>> q0, std::size_t stride, unsigned workers) {
        SimulationOptions o;
        o.n_traj = n_traj;
        o.seed = seed;
        o.output_stride = stride;
        o.record_momenta = false;
        o.workers = workers;
        py::gil_scoped_release release;
        return simulate_ensemble(OverdampedProcess{Potential(v), {position_law(q0), {}}},
                                 ScalingParams{1.0, beta, dt, T}, o);
      },
      py::arg("v"), py::arg("beta"), py::arg("dt"), py::arg("T"), py::arg("n_traj"), py::arg("seed"),
      py::arg("q0") = py::none(), py::arg("stride") = 1, py::arg("workers") = 1);

  m.def("moment_report", [](const Ensemble& e, double gamma) {
    const MomentReport r = moment_report(e, gamma);
    py::dict d;
    std::vector<double> mean, se;
    for (const auto& x : r.per_time) {
      mean.push_back(x.mean);
      se.push_back(x.se);
    }
    d["times"] = r.times;
    d["mean"] = mean;
    d["se"] = se;
    d["sup_over_grid"] = r.sup_over_grid;
    d["mean_sup"] = estimate(r.mean_sup);
    return d;
  });
  m.def(
      "weak_error",
      [](const Ensemble& e_eps, const Ensemble& e_ref, const std::vector<FourierFunction>& fs,
         const std::vector<double>& times) {
        py::list rows;
        for (const auto& r : weak_error(e_eps, e_ref, labelled(fs), times).rows) {
          py::dict d;
          d["eps"] = r.eps;
          d["f"] = r.label;
          d["t"] = r.t;
          d["estimate"] = r.estimate;
          d["se"] = r.se;
          rows.append(d);
        }
        return rows;
      },
      "Rows of E f(Q^eps_t) - E f(Q_t) with pooled standard errors.");
  m.def("ka_modulus", [](const Ensemble& e, const FourierFunction& f, const std::vector<double>& deltas) {
    py::list rows;
    for (const auto& pt : ka_modulus(e, TestFunction(f), deltas)) {
      py::dict d;
      d["delta"] = pt.delta;
      d["estimate"] = pt.estimate;
      d["se"] = pt.se;
      d["t_start"] = pt.t_start;
      d["lag"] = pt.lag;
      rows.append(d);
    }
    return rows;
  });
  m.def("rest_term_report", [](const Ensemble& e, const FourierFunction& f, const FourierFunction& v,
                               const FourierFunction& v_eps) {
    const auto r = rest_term_report(e, TestFunction(f), Potential(v), Potential(v_eps));
    py::dict d;
    d["sup_r1"] = estimate(r.sup_r1);
    d["integral_r2"] = estimate(r.integral_r2);
    return d;
  });
  m.def(
      "ladder_statistic",
      [](const Ensemble& e, const std::vector<double>& times, const FourierFunction& phi, const FourierFunction& f,
         const FourierFunction& v, double beta) {
        const TestFunction tf(f);
        const Potential pv(v);
        LadderSpec s{times, std::vector<FourierFunction>(times.size() - 1, phi), tf};
        return estimate(ladder_statistic(e, s, [&](const TorusPosition& q) {
          return apply_overdamped_generator(tf, pv, beta, q);
        }));
      },
      py::arg("ensemble"), py::arg("times"), py::arg("phi"), py::arg("f"), py::arg("v"), py::arg("beta"),
      "Martingale-ladder statistic closed with the overdamped generator of v.");

  m.def("derive_seed", &derive_seed);
  m.def(
      "normals",
      [](std::uint64_t seed, std::uint64_t index, std::size_t n) {
        Array out(n);
        NormalStream s(RngStreamSpec{seed, index});
        s.fill_normal(std::span<double>(out.mutable_data(), n));
        return out;
      },
      py::arg("seed"), py::arg("index"), py::arg("n"), "First n standard normals of stream (seed, index).");

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("name", &ExperimentConfig::name)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("n_traj", &ExperimentConfig::n_traj)
      .def_readonly("eps", &ExperimentConfig::eps)
      .def_readonly("dimension", &ExperimentConfig::dimension)
      .def("to_text", &ExperimentConfig::to_text)
      .def("hash", &ExperimentConfig::hash);
  m.def("parse_config", [](const std::filesystem::path& p, bool heavy) { return parse_config(p, heavy); },
        py::arg("path"), py::arg("allow_heavy_tails") = false);
  m.def("parse_config_text",
        [](const std::string& text, bool heavy) { return parse_config_text(text, {}, heavy); }, py::arg("text"),
        py::arg("allow_heavy_tails") = false);
  m.def("subcommands", &subcommand_names);
  m.def(
      "run",
      [](const std::string& sub, const ExperimentConfig& c, const std::filesystem::path& out, unsigned workers) {
        const auto s = parse_subcommand(sub);
        if (!s) throw ValidationError("unknown subcommand '" + sub + "'");
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(*s, c, RunOptions{out, workers});
        }
        return py::make_tuple(r.dir, r.files);
      },
      py::arg("subcommand"), py::arg("config"), py::arg("out") = "out", py::arg("workers") = 1,
      "Runs a recipe; returns (artifact directory, file names).");
}
