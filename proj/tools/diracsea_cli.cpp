// Command-line front end: scenario runner, free-comparison, causality sweep,
// and the exact-Fock oracle self-test.

#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "diracsea/fock_oracle.hpp"
#include "diracsea/scenario.hpp"

namespace {

diracsea::Scenario resolve_scenario(const std::string& preset_name, const std::string& file) {
  if (!file.empty()) return diracsea::load_scenario_file(file);
  if (!preset_name.empty()) return diracsea::preset(preset_name);
  throw CLI::ValidationError("one of --preset or --scenario is required");
}

int run_oracle_selftest(int n_models, unsigned seed) {
  using namespace diracsea;
  double max_density = 0.0, max_bog = 0.0, max_identity = 0.0, max_number = 0.0;
  const double anticomm = anticommutator_defect(3);
  for (int i = 0; i < n_models; ++i) {
    const ToyModel model = random_toy_model(3, seed + static_cast<unsigned>(i));
    const double t = 0.2 + 0.8 * static_cast<double>(i % 7) / 7.0;
    const ToyDensity exact = exact_density(model, t);
    const ToyDensity decomp = decomposition_density(model, t);
    max_density = std::max(max_density,
                           (exact.rho_total - decomp.rho_total).cwiseAbs().maxCoeff());
    max_bog = std::max(max_bog, bogoliubov_defect(model, t));
    max_number = std::max(max_number, std::abs(exact.n_total - exact.n_vac - 1.0 +
                                               2.0 * exact.blocking_deficit));
    std::vector<double> f(static_cast<std::size_t>(model.n_samples()), 1.0);
    const CausalityIdentityResult ci = exact_causality_identity(model, f, 0, t);
    max_identity = std::max(max_identity, ci.algebraic_residual);
    max_identity = std::max(max_identity, std::abs(ci.zzz_value - 1.0));
  }
  std::printf("anticommutator_defect = %.3e\n", anticomm);
  std::printf("max |exact - decomposition| = %.3e  (%d random 3-mode models)\n", max_density,
              n_models);
  std::printf("max bogoliubov defect = %.3e\n", max_bog);
  std::printf("max |N_total - N_vac - 1 + 2 kappa| = %.3e\n", max_number);
  std::printf("max causality identity residual = %.3e\n", max_identity);
  const bool ok = anticomm <= 1e-14 && max_density <= 1e-10 && max_bog <= 1e-12 &&
                  max_number <= 1e-12 && max_identity <= 1e-12;
  std::printf("oracle-selftest: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D second-quantized Dirac wavepacket scattering on a background barrier"};
  app.require_subcommand(1);

  std::string preset_name, scenario_file, out_dir, checkpoint;
  unsigned threads = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--preset", preset_name, "built-in scenario preset");
    cmd->add_option("--scenario", scenario_file, "scenario file (key = value sections)");
    cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  };

  auto* cmd_run = app.add_subcommand("run", "full density/causality pipeline with CSV outputs");
  add_common(cmd_run);
  cmd_run->add_option("--out", out_dir, "output directory (default out/<name>)");
  cmd_run->add_option("--checkpoint", checkpoint,
                      "propagator checkpoint file: loaded when present, written otherwise");

  auto* cmd_free = app.add_subcommand("compare-free", "transmitted vs freely evolved mean position");
  add_common(cmd_free);

  auto* cmd_causality = app.add_subcommand("causality", "intervention/probe sweep report");
  add_common(cmd_causality);

  int oracle_models = 200;
  unsigned oracle_seed = 20250809;
  auto* cmd_oracle = app.add_subcommand("oracle-selftest", "exact Fock-space oracle battery");
  cmd_oracle->add_option("--models", oracle_models, "number of random 3-mode models");
  cmd_oracle->add_option("--seed", oracle_seed, "base RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_oracle->parsed()) return run_oracle_selftest(oracle_models, oracle_seed);

    const diracsea::Scenario s = resolve_scenario(preset_name, scenario_file);
    diracsea::RunOptions opts;
    opts.threads = threads;
    opts.checkpoint = checkpoint;

    if (cmd_run->parsed()) {
      const diracsea::RunResult r = diracsea::run_scenario(s, opts);
      const std::string dir = out_dir.empty() ? "out/" + s.name : out_dir;
      diracsea::write_outputs(r, dir);
      std::printf("%s", diracsea::format_summary(r).c_str());
      std::printf("outputs written to %s\n", dir.c_str());
      if (r.edge_breach) std::printf("WARNING: edge-density monitor breached (box too small)\n");
      if (r.no_transmission) std::printf("WARNING: no transmission detected\n");
      return r.edge_breach ? 2 : 0;
    }

    if (cmd_free->parsed()) {
      opts.with_unitarity = false;
      const diracsea::RunResult r = diracsea::run_scenario(s, opts);
      std::printf("# t, x_transmitted, x_free, front, transmitted_mass\n");
      for (const auto& slice : r.slices) {
        std::printf("%.9g  %.9g  %.9g  %.9g  %.3e\n", slice.t,
                    slice.x_transmitted.value_or(std::nan("")), slice.x_free, slice.front,
                    slice.transmitted_mass);
      }
      if (r.no_transmission) {
        std::printf("no-transmission signal (mass below 1e-12)\n");
        return 2;
      }
      return 0;
    }

    if (cmd_causality->parsed()) {
      opts.with_unitarity = false;
      const diracsea::RunResult r = diracsea::run_scenario(s, opts);
      std::printf("# spectral floor (rel) = %.3e, threshold (rel) = %.3e, scale = %.6e\n",
                  r.spectral_floor, r.causality.threshold_rel, r.causality.scale);
      std::printf("# t, margin/dx, x_probe, max_pairwise, max_vs_vac\n");
      const double dx = s.make_grid_pair().dx;
      for (const auto& rec : r.causality.probes) {
        std::printf("%.9g  %.3g  %.9g  %.3e  %.3e\n", rec.point.t, rec.point.margin / dx,
                    rec.point.x, rec.max_pairwise, rec.max_vs_vac);
      }
      std::printf("causality: %s (max pairwise %.3e, max vs vac %.3e, threshold %.3e rel)\n",
                  r.causality.pass ? "PASS" : "FAIL", r.causality.max_pairwise_rel,
                  r.causality.max_vs_vac_rel, r.causality.threshold_rel);
      return r.causality.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
