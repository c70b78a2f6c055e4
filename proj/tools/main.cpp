#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dynsparse/experiment.hpp"

namespace ds = dynsparse;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool force = false;
  std::string solver;
  std::string input;
};

ds::ExperimentConfig resolve_config(const GlobalOptions& g) {
  ds::ExperimentConfig cfg = g.config_path.empty() ? ds::default_config() : ds::load_config(g.config_path);
  if (g.seed) {
    cfg.noise.seed = *g.seed;
    cfg.forward.mask_seed = *g.seed;
  }
  if (!g.solver.empty()) cfg.solver = ds::solver_from_string(g.solver);
  if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
  cfg.validate();
  return cfg;
}

void print_record(const ds::RunRecord& r) { std::cout << ds::metrics_csv_header() << ds::metrics_csv_row(r); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse reconstruction of dynamic inverse problems"};
  app.require_subcommand(1);
  GlobalOptions g;

  auto add_globals = [&](CLI::App* a) {
    a->add_option("--config", g.config_path, "YAML experiment config")->check(CLI::ExistingFile);
    a->add_option("--out", g.out_dir, "Output directory (overrides outputs.directory)");
    a->add_option("--jobs", g.jobs, "Concurrent sweep cells")->check(CLI::PositiveNumber);
    a->add_option("--seed", g.seed, "Overrides the noise and sampling-mask seeds");
    a->add_flag("--force", g.force, "Overwrite outputs written under a different config");
  };
  add_globals(&app);

  auto* phantom = app.add_subcommand("phantom", "Write the ground-truth stack and previews");
  auto* recon = app.add_subcommand("reconstruct", "Run one reconstruction");
  auto* sweep = app.add_subcommand("sweep", "Hyper-parameter grid sweep with SSIM heatmap");
  auto* iters = app.add_subcommand("iterstudy", "SSIM after each outer iteration for several inner caps");
  auto* metrics = app.add_subcommand("metrics", "Score a stored reconstruction against the phantom");
  for (auto* sub : {phantom, recon, sweep, iters, metrics}) add_globals(sub);
  for (auto* sub : {recon, sweep, iters}) sub->add_option("--solver", g.solver, "ias, admm or lsq");
  metrics->add_option("--input", g.input, "Array file (.f64 with JSON sidecar)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const ds::ExperimentConfig cfg = resolve_config(g);
    const ds::OutputDir out(cfg.output_dir, ds::config_hash(cfg), g.force);
    if (phantom->parsed()) {
      ds::cmd_phantom(cfg, out);
      std::cout << "wrote phantom to " << out.root().string() << "\n";
    } else if (recon->parsed()) {
      print_record(ds::cmd_reconstruct(cfg, out));
    } else if (sweep->parsed()) {
      const auto res = ds::cmd_sweep(cfg, out, g.jobs);
      int failed = 0;
      for (const auto& c : res.cells) failed += c.record ? 0 : 1;
      std::cout << res.cells.size() << " cells, " << failed << " failed, SSIM spread "
                << ds::format_double(res.ssim_spread()) << "\n";
    } else if (iters->parsed()) {
      const auto rows = ds::cmd_iterstudy(cfg, out);
      std::cout << rows.size() << " rows written to " << (out.root() / "iterstudy.csv").string() << "\n";
    } else if (metrics->parsed()) {
      print_record(ds::cmd_metrics(cfg, g.input, out));
    }
  } catch (const ds::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
