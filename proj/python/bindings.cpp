#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dynsparse/experiment.hpp"
#include "dynsparse/transforms.hpp"

namespace py = pybind11;
using namespace dynsparse;

namespace {

bool is_complex(const py::array& a) { return a.dtype().kind() == 'c'; }

Field field_of(std::initializer_list<const py::object*> arrays) {
  for (const py::object* o : arrays) {
    if (!o->is_none() && is_complex(py::array::ensure(*o))) return Field::Complex;
  }
  return Field::Real;
}

Mat to_mat(const py::object& o) {
  auto a = py::array_t<Scalar, py::array::c_style | py::array::forcecast>::ensure(o);
  if (!a || a.ndim() != 2) throw py::value_error("expected a 2-D array");
  Mat m(a.shape(0), a.shape(1));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = a.at(i, j);
  return m;
}

Vec to_vec(const py::object& o) {
  auto a = py::array_t<Scalar, py::array::c_style | py::array::forcecast>::ensure(o);
  if (!a) throw py::value_error("expected a numeric array");
  return Eigen::Map<const Vec>(a.data(), a.size());
}

MapPtr as_map(const py::object& o, Field field) {
  Mat m = to_mat(o);
  return field == Field::Complex ? dense(std::move(m)) : dense(RealMat(m.real()));
}

// Real-field results are returned as float64 arrays.
py::array out_vec(const Vec& v, Field field) {
  if (field == Field::Complex) return py::array(py::cast(v));
  return py::array(py::cast(RealVec(v.real())));
}

py::array out_stack(const DynamicImage& img, Field field) {
  const std::vector<py::ssize_t> shape{img.frames, img.height, img.width};
  if (field == Field::Complex) {
    py::array_t<Scalar> a(shape);
    std::copy(img.values.data(), img.values.data() + img.values.size(), a.mutable_data());
    return a;
  }
  py::array_t<double> a(shape);
  for (Index i = 0; i < img.values.size(); ++i) a.mutable_data()[i] = img.values[i].real();
  return a;
}

LsmrOptions lsmr_opts(double atol, double btol, int max_iters, double damp) { return {atol, btol, max_iters, damp}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse reconstruction of dynamic inverse problems";

  py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<OverwriteError>(m, "OverwriteError", PyExc_FileExistsError);

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init([] { return default_config(); }))
      .def_static("from_yaml", [](const std::string& text) { return parse_config(text); })
      .def_static("load", [](const std::string& path) { return load_config(path); })
      .def_property(
          "solver", [](const ExperimentConfig& c) { return std::string(to_string(c.solver)); },
          [](ExperimentConfig& c, const std::string& s) { c.solver = solver_from_string(s); })
      .def_readwrite("record_timing", &ExperimentConfig::record_timing)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_property(
          "seed", [](const ExperimentConfig& c) { return c.noise.seed; },
          [](ExperimentConfig& c, std::uint64_t s) { c.noise.seed = c.forward.mask_seed = s; })
      .def_property_readonly("hash", [](const ExperimentConfig& c) { return config_hash(c); })
      .def("to_json", [](const ExperimentConfig& c) { return config_to_json(c).dump(); })
      .def("validate", [](const ExperimentConfig& c) { c.validate(); });

  py::class_<Problem, std::shared_ptr<Problem>>(m, "Problem")
      .def(py::init([](const ExperimentConfig& c) { return std::make_shared<Problem>(assemble_problem(c)); }))
      .def_property_readonly("is_complex", [](const Problem& p) { return p.field == Field::Complex; })
      .def_property_readonly("truth", [](const Problem& p) { return out_stack(p.truth, p.field); })
      .def_property_readonly("data", [](const Problem& p) { return out_vec(p.data, p.field); })
      .def_property_readonly("noise_sigma", [](const Problem& p) { return p.noise_sigma; })
      .def_property_readonly("shape", [](const Problem& p) {
        return py::make_tuple(p.forward->rows(), p.dictionary->cols());
      })
      .def("forward", [](const Problem& p, const py::object& x) { return out_vec(p.forward->apply(to_vec(x)), p.field); })
      .def("adjoint", [](const Problem& p, const py::object& y) { return out_vec(p.forward->adjoint_apply(to_vec(y)), p.field); });

  m.def(
      "reconstruct",
      [](const ExperimentConfig& cfg, std::shared_ptr<Problem> problem) {
        if (!problem) problem = std::make_shared<Problem>(assemble_problem(cfg));
        RunOutput out;
        {
          py::gil_scoped_release release;
          out = run_reconstruction(*problem, cfg);
        }
        py::dict d;
        d["reconstruction"] = out_stack(out.reconstruction, problem->field);
        d["theta_image"] = out.theta_image ? py::object(out_stack(*out.theta_image, Field::Real)) : py::none();
        d["ssim_t_avg"] = out.record.ssim_t_avg;
        d["nrmse"] = out.record.nrmse;
        d["outer_iters"] = out.record.outer_iters;
        d["total_inner_iters"] = out.record.total_inner_iters;
        d["run_id"] = out.record.run_id;
        d["trace_csv"] = out.trace_csv;
        return d;
      },
      py::arg("config"), py::arg("problem") = nullptr);

  m.def("phantom", [](const ExperimentConfig& cfg) { return out_stack(make_phantom(cfg.phantom), Field::Real); });
  m.def("phantom_mask", [](const ExperimentConfig& cfg) {
    const auto mask = phantom_mask(cfg.phantom);
    const int n = cfg.phantom.image_size;
    py::array_t<bool> a({n, n});
    std::copy(mask.begin(), mask.end(), a.mutable_data());
    return a;
  });

  m.def(
      "lsmr",
      [](const py::object& a, const py::object& b, double damp, double atol, double btol, int max_iters) {
        const Field f = field_of({&a, &b});
        const LsmrResult r = lsmr_solve(*as_map(a, f), to_vec(b), lsmr_opts(atol, btol, max_iters, damp));
        py::dict info;
        info["iterations"] = r.report.iterations;
        info["stop_reason"] = to_string(r.report.stop_reason);
        info["residual_norm"] = r.report.residual_norm;
        info["normal_residual_norm"] = r.report.normal_residual_norm;
        return py::make_tuple(out_vec(r.x, f), info);
      },
      py::arg("A"), py::arg("b"), py::arg("damp") = 0.0, py::arg("atol") = 1e-8, py::arg("btol") = 1e-8,
      py::arg("max_iters") = 100);

  m.def(
      "ias",
      [](const py::object& forward, const py::object& b, const py::object& dictionary, double eta, double theta_scale,
         double outer_tol, int max_outer_iters, double inner_atol, double inner_btol, int inner_max_iters) {
        const Field f = field_of({&forward, &b, &dictionary});
        const MapPtr fw = as_map(forward, f);
        const MapPtr w = dictionary.is_none() ? identity(fw->cols(), f) : as_map(dictionary, f);
        IasConfig cfg{eta, theta_scale, outer_tol, max_outer_iters, lsmr_opts(inner_atol, inner_btol, inner_max_iters, 0.0), f};
        const IasResult r = ias_run(fw, w, to_vec(b), cfg);
        std::vector<double> energy;
        for (const auto& rec : r.trace.records) energy.push_back(rec.gibbs_energy);
        py::dict d;
        d["z"] = out_vec(r.state.z, f);
        d["x"] = out_vec(w->apply(r.state.z), f);
        d["theta"] = py::array(py::cast(r.state.theta));
        d["gibbs_energy"] = energy;
        d["converged"] = r.trace.converged;
        d["iterations"] = r.state.iteration;
        return d;
      },
      py::arg("F"), py::arg("b"), py::arg("W") = py::none(), py::arg("eta") = 1e-8, py::arg("theta_scale") = 1e-1,
      py::arg("outer_tol") = 1e-8, py::arg("max_outer_iters") = 10, py::arg("inner_atol") = 1e-8,
      py::arg("inner_btol") = 1e-8, py::arg("inner_max_iters") = 100);

  m.def(
      "admm",
      [](const py::object& forward, const py::object& b, const py::object& h1, const py::object& h2, double mu1,
         double mu2, double rho, double eps_abs, double eps_rel, int max_outer_iters, const std::string& dual_update,
         double inner_atol, double inner_btol, int inner_max_iters) {
        const Field f = field_of({&forward, &b, &h1, &h2});
        const MapPtr fw = as_map(forward, f);
        const MapPtr p1 = h1.is_none() ? identity(fw->cols(), f) : as_map(h1, f);
        const MapPtr p2 = h2.is_none() ? zero(1, fw->cols(), f) : as_map(h2, f);
        AdmmConfig cfg;
        cfg.mu1 = mu1;
        cfg.mu2 = mu2;
        cfg.rho = rho;
        cfg.eps_abs = eps_abs;
        cfg.eps_rel = eps_rel;
        cfg.max_outer_iters = max_outer_iters;
        cfg.inner = lsmr_opts(inner_atol, inner_btol, inner_max_iters, 0.0);
        cfg.field = f;
        cfg.dual_update = dual_update_from_string(dual_update);
        const AdmmResult r = admm_run(fw, p1, p2, to_vec(b), cfg);
        py::dict d;
        d["x"] = out_vec(r.state.x, f);
        d["converged"] = r.trace.converged;
        d["iterations"] = r.state.iteration;
        d["primal_residual"] = r.state.primal_residual_norm;
        d["dual_residual"] = r.state.dual_residual_norm;
        return d;
      },
      py::arg("F"), py::arg("b"), py::arg("H1") = py::none(), py::arg("H2") = py::none(), py::arg("mu1") = 1.0,
      py::arg("mu2") = 0.0, py::arg("rho") = 1.0, py::arg("eps_abs") = 1e-8, py::arg("eps_rel") = 1e-8,
      py::arg("max_outer_iters") = 100, py::arg("dual_update") = "verbatim", py::arg("inner_atol") = 1e-8,
      py::arg("inner_btol") = 1e-8, py::arg("inner_max_iters") = 100);

  m.def(
      "soft_threshold",
      [](const py::object& v, double kappa) {
        const Field f = field_of({&v});
        return out_vec(soft_threshold(to_vec(v), kappa, f), f);
      },
      py::arg("v"), py::arg("kappa"));
  m.def(
      "theta_update",
      [](const py::object& z, double eta, double theta_scale) {
        return py::array(py::cast(stage2_update(to_vec(z), eta, theta_scale, field_of({&z}))));
      },
      py::arg("z"), py::arg("eta"), py::arg("theta_scale"));

  m.def(
      "haar_analysis",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img, int levels) {
        if (img.ndim() != 2) throw py::value_error("expected a 2-D image");
        const HaarSpec spec{static_cast<int>(img.shape(1)), static_cast<int>(img.shape(0)), levels};
        const Vec v = Eigen::Map<const RealVec>(img.data(), img.size()).cast<Scalar>();
        return RealVec(haar_analysis(spec, v).real());
      },
      py::arg("image"), py::arg("levels"));
  m.def(
      "haar_synthesis",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& coeffs, int height, int width, int levels) {
        const HaarSpec spec{width, height, levels};
        const Vec c = Eigen::Map<const RealVec>(coeffs.data(), coeffs.size()).cast<Scalar>();
        const RealVec px = haar_synthesis(spec, c).real();
        py::array_t<double> out({height, width});
        std::copy(px.data(), px.data() + px.size(), out.mutable_data());
        return out;
      },
      py::arg("coeffs"), py::arg("height"), py::arg("width"), py::arg("levels"));

  m.def(
      "ssim",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& ref, double k1, double k2,
         double gaussian_sigma, int window_size, std::optional<double> data_range, const py::object& mask) {
        if (a.ndim() != 2 || ref.ndim() != 2) throw py::value_error("expected 2-D images");
        const int h = static_cast<int>(ref.shape(0)), w = static_cast<int>(ref.shape(1));
        const Image ia{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), Eigen::Map<const RealVec>(a.data(), a.size())};
        const Image ib{w, h, Eigen::Map<const RealVec>(ref.data(), ref.size())};
        SsimParams p;
        p.k1 = k1;
        p.k2 = k2;
        p.gaussian_sigma = gaussian_sigma;
        p.window_size = window_size;
        p.data_range = data_range;
        if (!mask.is_none()) {
          auto mk = py::array_t<bool, py::array::c_style | py::array::forcecast>::ensure(mask);
          p.mask = std::vector<bool>(mk.data(), mk.data() + mk.size());
        }
        return ssim(ia, ib, p);
      },
      py::arg("image"), py::arg("reference"), py::arg("k1") = 0.1, py::arg("k2") = 0.1, py::arg("gaussian_sigma") = 1.5,
      py::arg("window_size") = 11, py::arg("data_range") = py::none(), py::arg("mask") = py::none());

  m.def("nrmse", [](const py::object& x, const py::object& ref) { return nrmse(to_vec(x), to_vec(ref)); });
}
