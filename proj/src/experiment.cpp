#include "dynsparse/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "dynsparse/transforms.hpp"

namespace dynsparse {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

MapPtr build_forward(const ExperimentConfig& cfg) {
  const int n = cfg.phantom.image_size;
  const int frames = cfg.phantom.n_frames;
  if (cfg.forward.kind == ForwardConfig::Kind::Tomo) {
    TomoGeometry g;
    g.image_size = n;
    g.n_detectors = cfg.forward.n_detectors > 0 ? cfg.forward.n_detectors
                                                : static_cast<int>(std::ceil(std::sqrt(2.0) * n));
    g.angles_per_frame = alternating_angles(frames, cfg.forward.angles_per_frame);
    return make_radon_operator(g);
  }
  const FourierMask mask = cfg.forward.keep_fraction >= 1.0
                               ? full_fourier_mask(n, frames)
                               : random_fourier_mask(n, frames, cfg.forward.keep_fraction, cfg.forward.mask_seed);
  return make_fourier_operator(mask);
}

DynamicImage as_stack(const Problem& p, Vec values) {
  return DynamicImage{p.truth.width, p.truth.height, p.truth.frames, std::move(values)};
}

double quality(const Problem& p, const Vec& x) {
  return ssim_time_avg(as_stack(p, x), p.truth, p.ssim, p.field);
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

template <class Trace>
std::string trace_to_csv(Trace trace, bool record_timing) {
  if (!record_timing) {
    for (auto& r : trace.records) r.wall_ms = 0.0;
  }
  std::ostringstream os;
  trace.write_csv(os);
  return os.str();
}

void fill_hyperparameters(RunRecord& rec, const ExperimentConfig& cfg) {
  rec.solver = cfg.solver;
  switch (cfg.solver) {
    case SolverKind::Ias:
      rec.eta_or_mu_s = cfg.ias.eta;
      rec.theta_or_mu_t = cfg.ias.theta_scale;
      rec.inner_cap = cfg.ias.inner.max_iters;
      break;
    case SolverKind::Admm:
      rec.eta_or_mu_s = cfg.admm.mu1;
      rec.theta_or_mu_t = cfg.admm.mu2;
      rec.rho = cfg.admm.rho;
      rec.inner_cap = cfg.admm.inner.max_iters;
      break;
    case SolverKind::Lsq:
      rec.eta_or_mu_s = cfg.lsq.lambda;
      rec.inner_cap = cfg.lsq.inner.max_iters;
      break;
  }
}

}  // namespace

Problem assemble_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  Problem p;
  p.field = cfg.forward.kind == ForwardConfig::Kind::Fourier ? Field::Complex : Field::Real;
  p.truth = make_phantom(cfg.phantom);

  const MapPtr raw_forward = build_forward(cfg);
  const Vec clean = raw_forward->apply(p.truth.values);
  const double peak = clean.cwiseAbs().maxCoeff();
  p.noise_sigma = cfg.noise.relative ? cfg.noise.sigma * peak : cfg.noise.sigma;
  p.measurements = add_noise(clean, p.noise_sigma, cfg.noise.seed, p.field);

  if (p.noise_sigma > 0.0) {
    const Whitened w = whiten(p.measurements, raw_forward,
                              scaled(Scalar(1.0 / p.noise_sigma), identity(raw_forward->rows(), p.field)));
    p.forward = w.forward;
    p.data = w.data;
  } else {
    p.forward = raw_forward;
    p.data = p.measurements;
  }

  const int n = cfg.phantom.image_size;
  const int frames = cfg.phantom.n_frames;
  const HaarSpec haar{n, n, cfg.haar_levels};
  const MapPtr synth = haar_map(haar);
  const Index pixels = haar.size();
  p.dictionary = spatiotemporal_dictionary(haar, frames);
  p.spatial_penalty = kronecker(identity(frames), adjoint(synth));
  p.temporal_penalty = kronecker(diff_map(frames), identity(pixels));
  p.spatial_synthesis = kronecker(identity(frames), synth);

  p.ssim = cfg.metrics;
  if (cfg.use_mask) p.ssim.mask = phantom_mask(cfg.phantom);
  return p;
}

std::string metrics_csv_header() {
  return "run_id,solver,eta_or_mu_s,theta_or_mu_t,rho,inner_cap,outer_iters,ssim_t_avg,nrmse,wall_ms\n";
}

std::string metrics_csv_row(const RunRecord& r) {
  std::ostringstream os;
  os << r.run_id << ',' << to_string(r.solver) << ',' << format_double(r.eta_or_mu_s) << ','
     << csv_cell(r.theta_or_mu_t) << ',' << csv_cell(r.rho) << ',' << r.inner_cap << ',' << r.outer_iters << ','
     << format_double(r.ssim_t_avg) << ',' << format_double(r.nrmse) << ',' << format_double(r.wall_ms) << '\n';
  return os.str();
}

RunOutput run_reconstruction(const Problem& problem, const ExperimentConfig& cfg, bool with_snapshots) {
  RunOutput out;
  RunRecord& rec = out.record;
  rec.config_hash = config_hash(cfg);
  rec.run_id = rec.config_hash;
  fill_hyperparameters(rec, cfg);
  double cum_ms = 0.0;
  const auto t0 = Clock::now();
  Vec x;

  switch (cfg.solver) {
    case SolverKind::Ias: {
      IasConfig ic = cfg.ias;
      ic.field = problem.field;
      IasObserver obs;
      if (with_snapshots) {
        obs = [&](const IasState& s, const IasIterationRecord& r) {
          cum_ms += cfg.record_timing ? r.wall_ms : 0.0;
          out.snapshots.push_back({r.iteration, quality(problem, problem.dictionary->apply(s.z)), cum_ms});
        };
      }
      const IasResult res = ias_run(problem.forward, problem.dictionary, problem.data, ic, obs);
      x = problem.dictionary->apply(res.state.z);
      Vec theta_img = problem.spatial_synthesis->apply(res.state.theta.cast<Scalar>());
      out.theta_image = as_stack(problem, std::move(theta_img));
      out.trace_csv = trace_to_csv(res.trace, cfg.record_timing);
      rec.outer_iters = static_cast<int>(res.trace.records.size());
      rec.total_inner_iters = res.trace.total_inner_iters();
      break;
    }
    case SolverKind::Admm: {
      AdmmConfig ac = cfg.admm;
      ac.field = problem.field;
      AdmmObserver obs;
      if (with_snapshots) {
        obs = [&](const AdmmState& s, const AdmmIterationRecord& r) {
          cum_ms += cfg.record_timing ? r.wall_ms : 0.0;
          out.snapshots.push_back({r.iteration, quality(problem, s.x), cum_ms});
        };
      }
      const AdmmResult res =
          admm_run(problem.forward, problem.spatial_penalty, problem.temporal_penalty, problem.data, ac, obs);
      x = res.state.x;
      out.trace_csv = trace_to_csv(res.trace, cfg.record_timing);
      rec.outer_iters = static_cast<int>(res.trace.records.size());
      rec.total_inner_iters = res.trace.total_inner_iters();
      break;
    }
    case SolverKind::Lsq: {
      LsmrOptions opts = cfg.lsq.inner;
      opts.damp = std::sqrt(cfg.lsq.lambda);
      const LsmrResult res = lsmr_solve(*problem.forward, problem.data, opts);
      x = res.x;
      if (problem.field == Field::Real) x = x.real().cast<Scalar>();
      std::ostringstream os;
      os << "iter,stop_reason,residual_norm,normal_residual_norm\n"
         << res.report.iterations << ',' << to_string(res.report.stop_reason) << ','
         << format_double(res.report.residual_norm) << ',' << format_double(res.report.normal_residual_norm) << '\n';
      out.trace_csv = os.str();
      rec.outer_iters = 1;
      rec.total_inner_iters = res.report.iterations;
      if (with_snapshots) {
        cum_ms = cfg.record_timing ? elapsed_ms(t0) : 0.0;
        out.snapshots.push_back({1, quality(problem, x), cum_ms});
      }
      break;
    }
  }

  rec.wall_ms = cfg.record_timing ? elapsed_ms(t0) : 0.0;
  out.reconstruction = as_stack(problem, std::move(x));
  rec.ssim_t_avg = quality(problem, out.reconstruction.values);
  rec.nrmse = nrmse(out.reconstruction.values, problem.truth.values);
  return out;
}

double SweepResult::ssim_spread() const {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& c : cells) {
    if (!c.record) continue;
    lo = std::min(lo, c.record->ssim_t_avg);
    hi = std::max(hi, c.record->ssim_t_avg);
  }
  return hi >= lo ? hi - lo : NAN;
}

ExperimentConfig sweep_point_config(const ExperimentConfig& cfg, double a1_exp, double a2_exp) {
  ExperimentConfig c = cfg;
  c.sweep.reset();
  const double a1 = std::pow(10.0, a1_exp), a2 = std::pow(10.0, a2_exp);
  switch (cfg.solver) {
    case SolverKind::Ias:
      c.ias.eta = a1;
      c.ias.theta_scale = a2;
      break;
    case SolverKind::Admm:
      c.admm.mu1 = a1;
      c.admm.mu2 = a2;
      break;
    case SolverKind::Lsq:
      throw ConfigError("sweep needs solver ias or admm");
  }
  return c;
}

SweepResult run_sweep(const Problem& problem, const ExperimentConfig& cfg, int jobs) {
  if (!cfg.sweep) throw ConfigError("sweep command needs a sweep block in the config");
  if (cfg.solver == SolverKind::Lsq) throw ConfigError("sweep needs solver ias or admm");
  SweepResult res;
  res.rows = static_cast<int>(cfg.sweep->axis1.size());
  res.cols = static_cast<int>(cfg.sweep->axis2.size());
  for (int i = 0; i < res.rows; ++i) {
    for (int j = 0; j < res.cols; ++j) res.cells.push_back({i, j, cfg.sweep->axis1[i], cfg.sweep->axis2[j], {}, {}});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < res.cells.size(); k = next++) {
      SweepCell& cell = res.cells[k];
      try {
        cell.record = run_reconstruction(problem, sweep_point_config(cfg, cell.axis1_exp, cell.axis2_exp)).record;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(res.cells.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return res;
}

std::vector<IterStudyRow> run_iterstudy(const Problem& problem, const ExperimentConfig& cfg) {
  std::vector<IterStudyRow> rows;
  for (int cap : cfg.iterstudy.inner_caps) {
    ExperimentConfig c = cfg;
    c.ias.inner.max_iters = cap;
    c.admm.inner.max_iters = cap;
    c.lsq.inner.max_iters = cap;
    const RunOutput run = run_reconstruction(problem, c, true);
    for (const auto& s : run.snapshots) rows.push_back({cfg.solver, cap, s});
  }
  return rows;
}

RealVec interpolate_grid(const RealMat& grid, int step, int& width, int& height) {
  const Index r = grid.rows(), c = grid.cols();
  if (r == 0 || c == 0 || step < 1) throw DomainError("interpolate_grid: empty grid or step < 1");
  height = r > 1 ? static_cast<int>((r - 1) * step + 1) : step;
  width = c > 1 ? static_cast<int>((c - 1) * step + 1) : step;
  RealVec out(static_cast<Index>(width) * height);
  for (int py = 0; py < height; ++py) {
    const double fy = r > 1 ? static_cast<double>(py) / step : 0.0;
    const Index y0 = std::min<Index>(static_cast<Index>(fy), r - 1), y1 = std::min<Index>(y0 + 1, r - 1);
    const double ty = fy - static_cast<double>(y0);
    for (int px = 0; px < width; ++px) {
      const double fx = c > 1 ? static_cast<double>(px) / step : 0.0;
      const Index x0 = std::min<Index>(static_cast<Index>(fx), c - 1), x1 = std::min<Index>(x0 + 1, c - 1);
      const double tx = fx - static_cast<double>(x0);
      const double top = (1 - tx) * grid(y0, x0) + tx * grid(y0, x1);
      const double bot = (1 - tx) * grid(y1, x0) + tx * grid(y1, x1);
      out[static_cast<Index>(py) * width + px] = (1 - ty) * top + ty * bot;
    }
  }
  return out;
}

namespace {

RealVec preview_pixels(const DynamicImage& img, int t, Field field) { return frame_image(img, t, field).pixels; }

void write_previews(const OutputDir& out, const std::string& prefix, const DynamicImage& img, Field field) {
  for (int t = 0; t < img.frames; ++t) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03d.pgm", prefix.c_str(), t);
    out.write_pgm(name, img.width, img.height, preview_pixels(img, t, field), {{"frame", t}});
  }
}

json config_json(const ExperimentConfig& cfg) { return {{"config", config_to_json(cfg)}}; }

}  // namespace

void cmd_phantom(const ExperimentConfig& cfg, const OutputDir& out) {
  cfg.validate();
  const DynamicImage truth = make_phantom(cfg.phantom);
  out.write_stack("phantom.f64", truth, Field::Real, config_json(cfg));
  write_previews(out, "phantom", truth, Field::Real);
  const auto mask = phantom_mask(cfg.phantom);
  RealVec m(static_cast<Index>(mask.size()));
  for (std::size_t i = 0; i < mask.size(); ++i) m[static_cast<Index>(i)] = mask[i] ? 1.0 : 0.0;
  out.write_pgm("mask.pgm", cfg.phantom.image_size, cfg.phantom.image_size, m);
}

RunRecord cmd_reconstruct(const ExperimentConfig& cfg, const OutputDir& out) {
  const Problem problem = assemble_problem(cfg);
  const RunOutput run = run_reconstruction(problem, cfg);
  const json meta = config_json(cfg);
  out.write_vector("measurements.f64", problem.measurements, problem.field,
                   {{"noise_sigma", problem.noise_sigma}, {"whitened", false}});
  out.write_stack("reconstruction.f64", run.reconstruction, problem.field, meta);
  write_previews(out, "reconstruction", run.reconstruction, problem.field);
  if (run.theta_image) {
    out.write_stack("theta_image.f64", *run.theta_image, Field::Real,
                    {{"description", "prior variances mapped to image space by per-frame Haar synthesis"}});
    write_previews(out, "theta_image", *run.theta_image, Field::Real);
  }
  out.write_text("trace.csv", run.trace_csv, {{"solver", to_string(cfg.solver)}});
  out.write_text("metrics.csv", metrics_csv_header() + metrics_csv_row(run.record),
                 {{"nrmse_normalization", "l2 norm of the reference"}, {"ssim_mask", cfg.use_mask}});
  return run.record;
}

SweepResult cmd_sweep(const ExperimentConfig& cfg, const OutputDir& out, int jobs) {
  if (!cfg.sweep) throw ConfigError("sweep command needs a sweep block in the config");
  if (cfg.solver == SolverKind::Lsq) throw ConfigError("sweep needs solver ias or admm");
  const Problem problem = assemble_problem(cfg);
  const SweepResult res = run_sweep(problem, cfg, jobs);

  std::string table = metrics_csv_header();
  std::string grid_csv = "axis1_exp,axis2_exp,ssim_t_avg,status\n";
  RealMat grid(res.rows, res.cols);
  json failures = json::array();
  for (const auto& c : res.cells) {
    grid(c.i, c.j) = c.record ? c.record->ssim_t_avg : NAN;
    grid_csv += format_double(c.axis1_exp) + "," + format_double(c.axis2_exp) + "," +
                (c.record ? format_double(c.record->ssim_t_avg) : std::string()) + "," +
                (c.record ? "ok" : "failed") + "\n";
    if (c.record) {
      table += metrics_csv_row(*c.record);
    } else {
      failures.push_back({{"axis1_exp", c.axis1_exp}, {"axis2_exp", c.axis2_exp}, {"error", c.error}});
    }
  }
  const char* a1 = cfg.solver == SolverKind::Ias ? "log10_eta" : "log10_mu_s";
  const char* a2 = cfg.solver == SolverKind::Ias ? "log10_theta_scale" : "log10_mu_t";
  out.write_text("sweep.csv", table, {{"failures", failures}, {"cells", res.cells.size()}});
  out.write_text("sweep_grid.csv", grid_csv, {{"axis1", a1}, {"axis2", a2}, {"failures", failures}});

  int w = 0, h = 0;
  const RealVec img = interpolate_grid(grid, 16, w, h);
  out.write_pgm("sweep_heatmap.pgm", w, h, img,
                {{"rows", a1}, {"cols", a2}, {"axis1", cfg.sweep->axis1}, {"axis2", cfg.sweep->axis2},
                 {"pixels_per_step", 16}, {"interpolation", "bilinear"}});
  return res;
}

std::vector<IterStudyRow> cmd_iterstudy(const ExperimentConfig& cfg, const OutputDir& out) {
  const Problem problem = assemble_problem(cfg);
  const auto rows = run_iterstudy(problem, cfg);
  std::string csv = "solver,inner_cap,outer_iter,ssim,cum_wall_ms\n";
  for (const auto& r : rows) {
    csv += std::string(to_string(r.solver)) + "," + std::to_string(r.inner_cap) + "," +
           std::to_string(r.snap.outer_iter) + "," + format_double(r.snap.ssim) + "," +
           format_double(r.snap.cum_wall_ms) + "\n";
  }
  out.write_text("iterstudy.csv", csv, {{"inner_caps", cfg.iterstudy.inner_caps}});
  return rows;
}

RunRecord cmd_metrics(const ExperimentConfig& cfg, const std::filesystem::path& input, const OutputDir& out) {
  cfg.validate();
  const LoadedArray arr = read_array(input);
  const DynamicImage truth = make_phantom(cfg.phantom);
  if (arr.values.size() != truth.values.size()) {
    throw SizeError("metrics input " + input.string(), truth.values.size(), arr.values.size());
  }
  SsimParams p = cfg.metrics;
  if (cfg.use_mask) p.mask = phantom_mask(cfg.phantom);
  const DynamicImage x{truth.width, truth.height, truth.frames, arr.values};

  RunRecord r;
  r.config_hash = config_hash(cfg);
  r.run_id = arr.config_hash.empty() ? fnv1a_hex(array_bytes(arr.values, arr.field)) : arr.config_hash;
  fill_hyperparameters(r, cfg);
  r.outer_iters = 0;
  r.ssim_t_avg = ssim_time_avg(x, truth, p, arr.field);
  r.nrmse = nrmse(x.values, truth.values);
  out.write_text("metrics_eval.csv", metrics_csv_header() + metrics_csv_row(r),
                 {{"input", input.string()}, {"nrmse_normalization", "l2 norm of the reference"}});
  return r;
}

}  // namespace dynsparse
