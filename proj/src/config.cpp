#include "dynsparse/config.hpp"
#include "dynsparse/transforms.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace dynsparse {

const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Ias: return "ias";
    case SolverKind::Admm: return "admm";
    case SolverKind::Lsq: return "lsq";
  }
  return "unknown";
}

SolverKind solver_from_string(const std::string& s) {
  if (s == "ias") return SolverKind::Ias;
  if (s == "admm") return SolverKind::Admm;
  if (s == "lsq") return SolverKind::Lsq;
  throw ConfigError("unknown solver '" + s + "' (expected ias, admm or lsq)");
}

namespace {

using nlohmann::json;

// Reads typed keys from one YAML table and rejects keys nobody asked for.
class Table {
public:
  Table(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_ + ": expected a table");
  }
  ~Table() noexcept(false) {
    if (std::uncaught_exceptions() > 0 || !node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
    }
  }
  Table(const Table&) = delete;
  Table& operator=(const Table&) = delete;

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap() || !node_[key]) return;
    try {
      out = node_[key].template as<T>();
    } catch (const YAML::Exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.msg);
    }
  }

  Table sub(const char* key) {
    seen_.insert(key);
    return Table(node_ && node_.IsMap() ? node_[key] : YAML::Node(), path_ + "." + key);
  }

  bool has(const char* key) const { return node_ && node_.IsMap() && node_[key]; }

private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_inner(Table t, LsmrOptions& o) {
  t.read("atol", o.atol);
  t.read("btol", o.btol);
  t.read("max_iters", o.max_iters);
}

void read_pair(Table& t, const char* key, double& a, double& b) {
  std::vector<double> v;
  t.read(key, v);
  if (v.empty()) return;
  if (v.size() != 2) throw ConfigError(std::string(key) + ": expected [row, col]");
  a = v[0];
  b = v[1];
}

json inner_json(const LsmrOptions& o) {
  return {{"atol", o.atol}, {"btol", o.btol}, {"max_iters", o.max_iters}};
}

template <class F>
void wrap_domain(const char* what, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  } catch (const SizeError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  wrap_domain("problem.phantom", [&] { phantom.validate(); });
  wrap_domain("problem.haar_levels", [&] {
    HaarSpec{phantom.image_size, phantom.image_size, haar_levels}.validate();
  });
  if (forward.angles_per_frame < 1) throw ConfigError("forward.angles_per_frame must be >= 1");
  if (forward.n_detectors < 0) throw ConfigError("forward.n_detectors must be >= 0");
  if (!(forward.keep_fraction > 0.0 && forward.keep_fraction <= 1.0)) {
    throw ConfigError("forward.keep_fraction must lie in (0, 1]");
  }
  if (!(noise.sigma >= 0.0)) throw ConfigError("noise.sigma must be nonnegative");
  wrap_domain("solver.ias", [&] { ias.validate(); });
  wrap_domain("solver.admm", [&] { admm.validate(); });
  wrap_domain("solver.lsq.inner", [&] { lsq.inner.validate(); });
  if (!(lsq.lambda >= 0.0)) throw ConfigError("solver.lsq.lambda must be nonnegative");
  if (sweep && (sweep->axis1.empty() || sweep->axis2.empty())) throw ConfigError("sweep axes must be nonempty");
  if (iterstudy.inner_caps.empty()) throw ConfigError("iterstudy.inner_caps must be nonempty");
  for (int cap : iterstudy.inner_caps) {
    if (cap < 1) throw ConfigError("iterstudy.inner_caps entries must be >= 1");
  }
  wrap_domain("metrics", [&] { metrics.validate(); });
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("config must be a table at the top level");
  if (!root["schema_version"]) throw ConfigError("config is missing the mandatory schema_version key");

  ExperimentConfig cfg;
  {
    Table top(root, "config");
    top.read("schema_version", cfg.schema_version);
    if (cfg.schema_version != kSchemaVersion) cfg.validate();  // reports the version mismatch

    {
      Table problem = top.sub("problem");
      problem.read("haar_levels", cfg.haar_levels);
      Table ph = problem.sub("phantom");
      ph.read("image_size", cfg.phantom.image_size);
      ph.read("n_frames", cfg.phantom.n_frames);
      ph.read("mask_radius", cfg.phantom.mask_radius);
      {
        Table disc = ph.sub("disc");
        read_pair(disc, "center", cfg.phantom.disc.center_row, cfg.phantom.disc.center_col);
        disc.read("radius", cfg.phantom.disc.radius);
        disc.read("intensity", cfg.phantom.disc.intensity);
      }
      {
        Table block = ph.sub("block");
        block.read("size", cfg.phantom.block.size);
        block.read("intensity", cfg.phantom.block.intensity);
        double sr = cfg.phantom.block.start_row, sc = cfg.phantom.block.start_col;
        double er = cfg.phantom.block.end_row, ec = cfg.phantom.block.end_col;
        read_pair(block, "start", sr, sc);
        read_pair(block, "end", er, ec);
        cfg.phantom.block.start_row = static_cast<int>(sr);
        cfg.phantom.block.start_col = static_cast<int>(sc);
        cfg.phantom.block.end_row = static_cast<int>(er);
        cfg.phantom.block.end_col = static_cast<int>(ec);
      }
    }
    {
      Table fw = top.sub("forward");
      std::string kind = "tomo";
      fw.read("kind", kind);
      if (kind == "tomo") cfg.forward.kind = ForwardConfig::Kind::Tomo;
      else if (kind == "fourier") cfg.forward.kind = ForwardConfig::Kind::Fourier;
      else throw ConfigError("forward.kind must be tomo or fourier, got '" + kind + "'");
      fw.read("angles_per_frame", cfg.forward.angles_per_frame);
      fw.read("n_detectors", cfg.forward.n_detectors);
      fw.read("keep_fraction", cfg.forward.keep_fraction);
      fw.read("mask_seed", cfg.forward.mask_seed);
    }
    {
      Table nz = top.sub("noise");
      nz.read("sigma", cfg.noise.sigma);
      nz.read("relative", cfg.noise.relative);
      nz.read("seed", cfg.noise.seed);
    }
    {
      Table sv = top.sub("solver");
      std::string name = "ias";
      sv.read("name", name);
      cfg.solver = solver_from_string(name);
      {
        Table ias = sv.sub("ias");
        ias.read("eta", cfg.ias.eta);
        ias.read("theta_scale", cfg.ias.theta_scale);
        ias.read("outer_tol", cfg.ias.outer_tol);
        ias.read("max_outer_iters", cfg.ias.max_outer_iters);
        read_inner(ias.sub("inner"), cfg.ias.inner);
      }
      {
        Table admm = sv.sub("admm");
        admm.read("mu_s", cfg.admm.mu1);
        admm.read("mu_t", cfg.admm.mu2);
        admm.read("rho", cfg.admm.rho);
        admm.read("eps_abs", cfg.admm.eps_abs);
        admm.read("eps_rel", cfg.admm.eps_rel);
        admm.read("max_outer_iters", cfg.admm.max_outer_iters);
        std::string dual = to_string(cfg.admm.dual_update);
        admm.read("dual_update", dual);
        cfg.admm.dual_update = dual_update_from_string(dual);
        read_inner(admm.sub("inner"), cfg.admm.inner);
      }
      {
        Table lsq = sv.sub("lsq");
        lsq.read("lambda", cfg.lsq.lambda);
        read_inner(lsq.sub("inner"), cfg.lsq.inner);
      }
    }
    if (top.has("sweep")) {
      Table sw = top.sub("sweep");
      SweepConfig s;
      sw.read("axis1", s.axis1);
      sw.read("axis2", s.axis2);
      cfg.sweep = s;
    } else {
      top.sub("sweep");
    }
    {
      Table it = top.sub("iterstudy");
      it.read("inner_caps", cfg.iterstudy.inner_caps);
    }
    {
      Table out = top.sub("outputs");
      out.read("directory", cfg.output_dir);
      out.read("record_timing", cfg.record_timing);
    }
    {
      Table m = top.sub("metrics");
      m.read("k1", cfg.metrics.k1);
      m.read("k2", cfg.metrics.k2);
      m.read("gaussian_sigma", cfg.metrics.gaussian_sigma);
      m.read("window_size", cfg.metrics.window_size);
      m.read("use_mask", cfg.use_mask);
      if (m.has("data_range")) {
        double r = 0.0;
        m.read("data_range", r);
        cfg.metrics.data_range = r;
      }
    }
  }
  cfg.ias.field = cfg.admm.field = cfg.forward.kind == ForwardConfig::Kind::Fourier ? Field::Complex : Field::Real;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["problem"] = {
      {"haar_levels", c.haar_levels},
      {"phantom",
       {{"image_size", c.phantom.image_size},
        {"n_frames", c.phantom.n_frames},
        {"mask_radius", c.phantom.mask_radius},
        {"disc",
         {{"center", {c.phantom.disc.center_row, c.phantom.disc.center_col}},
          {"radius", c.phantom.disc.radius},
          {"intensity", c.phantom.disc.intensity}}},
        {"block",
         {{"size", c.phantom.block.size},
          {"intensity", c.phantom.block.intensity},
          {"start", {c.phantom.block.start_row, c.phantom.block.start_col}},
          {"end", {c.phantom.block.end_row, c.phantom.block.end_col}}}}}}};
  j["forward"] = {{"kind", c.forward.kind == ForwardConfig::Kind::Tomo ? "tomo" : "fourier"},
                  {"angles_per_frame", c.forward.angles_per_frame},
                  {"n_detectors", c.forward.n_detectors},
                  {"keep_fraction", c.forward.keep_fraction},
                  {"mask_seed", c.forward.mask_seed}};
  j["noise"] = {{"sigma", c.noise.sigma}, {"relative", c.noise.relative}, {"seed", c.noise.seed}};
  j["solver"] = {{"name", to_string(c.solver)},
                 {"ias",
                  {{"eta", c.ias.eta},
                   {"theta_scale", c.ias.theta_scale},
                   {"outer_tol", c.ias.outer_tol},
                   {"max_outer_iters", c.ias.max_outer_iters},
                   {"inner", inner_json(c.ias.inner)}}},
                 {"admm",
                  {{"mu_s", c.admm.mu1},
                   {"mu_t", c.admm.mu2},
                   {"rho", c.admm.rho},
                   {"eps_abs", c.admm.eps_abs},
                   {"eps_rel", c.admm.eps_rel},
                   {"max_outer_iters", c.admm.max_outer_iters},
                   {"dual_update", to_string(c.admm.dual_update)},
                   {"inner", inner_json(c.admm.inner)}}},
                 {"lsq", {{"lambda", c.lsq.lambda}, {"inner", inner_json(c.lsq.inner)}}}};
  if (c.sweep) j["sweep"] = {{"axis1", c.sweep->axis1}, {"axis2", c.sweep->axis2}};
  j["iterstudy"] = {{"inner_caps", c.iterstudy.inner_caps}};
  j["outputs"] = {{"record_timing", c.record_timing}};
  j["metrics"] = {{"k1", c.metrics.k1},
                  {"k2", c.metrics.k2},
                  {"gaussian_sigma", c.metrics.gaussian_sigma},
                  {"window_size", c.metrics.window_size},
                  {"use_mask", c.use_mask}};
  if (c.metrics.data_range) j["metrics"]["data_range"] = *c.metrics.data_range;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dynsparse
