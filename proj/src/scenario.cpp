#include "diracsea/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "diracsea/parallel.hpp"
#include "diracsea/units.hpp"

namespace diracsea {

namespace {

constexpr double kLambda = units::compton_wavelength;
// Spectral std of the cos^8 envelope: sigma_p = sqrt(64 * 0.0667612) / D.
constexpr double kPacketSigmaP = 2.06706;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double packet_sigma_p(const WavepacketSpec& p) { return kPacketSigmaP / p.width_d; }

}  // namespace

GridPair Scenario::make_grid_pair() const { return make_grid(n_points, x_min, x_max); }

double Scenario::final_time() const {
  return output_steps.empty() ? 0.0 : dt * static_cast<double>(output_steps.back());
}

void Scenario::validate() const {
  const GridPair grid = make_grid_pair();
  packet.validate(grid);
  barrier.validate(grid.dx);
  if (!barrier.is_free() && packet.support_max() >= -0.5 * barrier.length) {
    throw std::invalid_argument("Scenario: packet support must lie strictly left of the barrier");
  }
  if (dt <= 0.0) throw std::invalid_argument("Scenario: dt must be positive");
  if (output_steps.empty()) throw std::invalid_argument("Scenario: no output steps");
  for (std::size_t i = 0; i < output_steps.size(); ++i) {
    if (output_steps[i] == 0 || (i > 0 && output_steps[i] <= output_steps[i - 1])) {
      throw std::invalid_argument("Scenario: output steps must be positive and increasing");
    }
  }
  const double p_max = std::numbers::pi / grid.dx;
  const double e_max = units::light_speed * std::hypot(p_max, units::light_speed);
  if (e_max * dt > 0.5 + 1e-12) {
    throw std::invalid_argument("Scenario: dt violates max(E_p)*dt <= 0.5");
  }
  if (barrier.v0 * dt > 0.1 + 1e-12) {
    throw std::invalid_argument("Scenario: dt violates V0*dt <= 0.1");
  }
  if (p_max < std::abs(packet.p0) + 6.0 * packet_sigma_p(packet)) {
    throw std::invalid_argument("Scenario: momentum cutoff below p0 + 6 sigma_p");
  }
  for (const double m : probe_margins_dx) {
    if (m <= 0.0) throw std::invalid_argument("Scenario: probe margins must be positive");
  }
  for (const auto& name : interventions) {
    make_profile(name, packet, make_grid_pair());  // throws on unknown names
  }
}

// ---------------------------------------------------------------------------
// Presets. Boxes contain every light-cone front at the last output time; grids
// resolve the barrier smoothness (dx <= eps/2); dt obeys max(E_p) dt <= 0.5
// and V0 dt <= 0.1.
// ---------------------------------------------------------------------------

namespace {

Scenario desk_fig1() {
  Scenario s;
  s.name = "desk-fig1";
  s.n_points = 2048;
  s.x_min = -0.76;
  s.x_max = 0.58;
  s.packet = {-30.0 * kLambda, 100.0, 16.0 * kLambda};
  s.barrier = {0.5 * units::rest_energy, 4.0 * kLambda, 0.3 * kLambda};
  s.dt = 4.0e-3 / 5400.0;
  s.output_steps = {1800, 3600, 5400};
  return s;
}

Scenario desk_fig2() {
  Scenario s;
  s.name = "desk-fig2";
  s.n_points = 2048;
  s.x_min = -0.85;
  s.x_max = 0.50;
  s.packet = {-35.0 * kLambda, 200.0, 16.0 * kLambda};
  s.barrier = {1.77 * units::rest_energy, 4.0 * kLambda, 0.3 * kLambda};
  s.dt = 7.5e-7;
  s.output_steps = {1334, 2667, 4000};
  return s;
}

Scenario desk_fig3() {
  Scenario s;
  s.name = "desk-fig3";
  s.n_points = 2048;
  s.x_min = -1.10;
  s.x_max = 0.70;
  s.packet = {-40.0 * kLambda, 450.0, 16.0 * kLambda};
  s.barrier = {9.0 * units::rest_energy, 16.0 * kLambda, 0.3 * kLambda};
  s.dt = 4.5e-3 / 7680.0;
  s.output_steps = {2560, 5120, 7680};
  return s;
}

Scenario fig1_full() {
  Scenario s;
  s.name = "fig1";
  s.n_points = 8192;
  s.x_min = -2.95;
  s.x_max = 2.10;
  s.packet = {-120.0 * kLambda, 100.0, 70.0 * kLambda};
  s.barrier = {0.5 * units::rest_energy, 4.0 * kLambda, 0.3 * kLambda};
  s.dt = 1.5e-2 / 21000.0;
  s.output_steps = {7000, 14000, 21000};
  return s;
}

Scenario fig2_full() {
  Scenario s = desk_fig2();
  s.name = "fig2";
  s.n_points = 4096;
  s.x_min = -0.95;
  s.x_max = 0.60;
  s.dt = 3.0e-3 / 7000.0;
  s.output_steps = {2334, 4667, 7000};
  return s;
}

Scenario fig3_full() {
  Scenario s = desk_fig3();
  s.name = "fig3";
  s.n_points = 4096;
  s.x_min = -1.25;
  s.x_max = 0.80;
  s.dt = 4.5e-3 / 7750.0;
  s.output_steps = {2584, 5167, 7750};
  return s;
}

Scenario free_fig1() {
  Scenario s;
  s.name = "free-fig1";
  s.n_points = 1024;
  s.x_min = -1.85;
  s.x_max = 0.20;
  s.packet = {-120.0 * kLambda, 100.0, 70.0 * kLambda};
  s.barrier = {};  // V0 = 0
  s.dt = 2.0e-6;
  s.output_steps = {300, 600};
  return s;
}

Scenario smoke() {
  Scenario s;
  s.name = "smoke";
  s.n_points = 256;
  s.x_min = -0.15;
  s.x_max = 0.15;
  s.packet = {-0.06, 200.0, 3.0 * kLambda};
  s.barrier = {1.77 * units::rest_energy, 1.5 * kLambda, 0.35 * kLambda};
  s.dt = 1.25e-6;
  s.output_steps = {120, 240};
  return s;
}

}  // namespace

Scenario preset(const std::string& name) {
  if (name == "desk-fig1") return desk_fig1();
  if (name == "desk-fig2") return desk_fig2();
  if (name == "desk-fig3") return desk_fig3();
  if (name == "fig1") return fig1_full();
  if (name == "fig2") return fig2_full();
  if (name == "fig3") return fig3_full();
  if (name == "free-fig1") return free_fig1();
  if (name == "smoke") return smoke();
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"desk-fig1", "desk-fig2", "desk-fig3", "fig1", "fig2", "fig3", "free-fig1", "smoke"};
}

// ---------------------------------------------------------------------------
// Scenario files: '#' comments, [section] headers, key = value lines.
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Scenario load_scenario_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scenario file: " + path);
  Scenario s;
  s.interventions.clear();
  s.probe_margins_dx.clear();
  std::string line, section;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad scenario line: " + line);
    const std::string key = section.empty() ? trim(line.substr(0, eq))
                                            : section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::istringstream vs(value);
    if (key == "name") s.name = value;
    else if (key == "grid.n_points") vs >> s.n_points;
    else if (key == "grid.x_min") vs >> s.x_min;
    else if (key == "grid.x_max") vs >> s.x_max;
    else if (key == "packet.x0") vs >> s.packet.x0;
    else if (key == "packet.p0") vs >> s.packet.p0;
    else if (key == "packet.width_d") vs >> s.packet.width_d;
    else if (key == "barrier.v0") vs >> s.barrier.v0;
    else if (key == "barrier.length") vs >> s.barrier.length;
    else if (key == "barrier.eps") vs >> s.barrier.eps;
    else if (key == "time.dt") vs >> s.dt;
    else if (key == "time.output_steps") {
      std::size_t v;
      while (vs >> v) s.output_steps.push_back(v);
    } else if (key == "causality.probe_margins_dx") {
      double v;
      while (vs >> v) s.probe_margins_dx.push_back(v);
    } else if (key == "causality.interventions") {
      std::string v;
      while (vs >> v) s.interventions.push_back(v);
    } else {
      throw std::runtime_error("unknown scenario key: " + key);
    }
  }
  if (s.probe_margins_dx.empty()) s.probe_margins_dx = {2.0, 5.0, 10.0};
  if (s.interventions.empty()) s.interventions = {"identity", "right_half", "gaussian_bump"};
  return s;
}

void write_scenario_file(const Scenario& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write scenario file: " + path);
  os << "name = " << s.name << "\n\n[grid]\n";
  os << "n_points = " << s.n_points << "\n";
  os << "x_min = " << fmt(s.x_min) << "\n";
  os << "x_max = " << fmt(s.x_max) << "\n";
  os << "\n[packet]\n";
  os << "x0 = " << fmt(s.packet.x0) << "\n";
  os << "p0 = " << fmt(s.packet.p0) << "\n";
  os << "width_d = " << fmt(s.packet.width_d) << "\n";
  os << "\n[barrier]\n";
  os << "v0 = " << fmt(s.barrier.v0) << "\n";
  os << "length = " << fmt(s.barrier.length) << "\n";
  os << "eps = " << fmt(s.barrier.eps) << "\n";
  os << "\n[time]\n";
  os << "dt = " << fmt(s.dt) << "\n";
  os << "output_steps =";
  for (const auto v : s.output_steps) os << ' ' << v;
  os << "\n\n[causality]\n";
  os << "probe_margins_dx =";
  for (const auto v : s.probe_margins_dx) os << ' ' << fmt(v);
  os << "\ninterventions =";
  for (const auto& v : s.interventions) os << ' ' << v;
  os << "\n";
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace {

double max_of(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, x);
  return m;
}

double edge_ratio_of(std::span<const double> rho) {
  const std::size_t n = rho.size();
  const std::size_t w = 4;
  double global = 0.0;
  for (const double v : rho) global = std::max(global, std::abs(v));
  if (global <= 0.0) return 0.0;
  double edge = 0.0;
  for (std::size_t j = 0; j < w; ++j) {
    edge = std::max(edge, std::abs(rho[j]));
    edge = std::max(edge, std::abs(rho[n - 1 - j]));
  }
  return edge / global;
}

double unconditional_mean(std::span<const double> rho, const GridPair& grid) {
  double mass = 0.0, first = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    mass += rho[j];
    first += rho[j] * grid.x(j);
  }
  return first / mass;
}

double region_mass(std::span<const double> rho, const GridPair& grid, double a, double b) {
  double mass = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double x = grid.x(j);
    if (x >= a && x <= b) mass += rho[j];
  }
  return mass * grid.dx;
}

}  // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& opts) {
  s.validate();
  RunResult res;
  res.scenario = s;

  const GridPair grid = s.make_grid_pair();
  const ModeBasis basis(grid);
  SpectralTransform tr(grid);
  const auto vtab = potential_table(s.barrier, grid);
  const SplitStepper stepper = SplitStepper::make(basis, vtab, s.dt);
  const LightCone cone = light_cone(s.packet);
  GridSynthesis synth(basis);

  const SpinorField packet = initial_wavepacket(s.packet, grid);
  const WavepacketCoefficients coeffs0 = project_coefficients(packet, basis, tr);
  res.mean_velocity_c = mean_velocity(coeffs0, basis) / units::light_speed;
  double mean_energy = 0.0;
  for (std::size_t k = 0; k < basis.n_modes(); ++k) {
    mean_energy += basis.energy(k) *
                   (std::norm(coeffs0.h_plus[k]) + std::norm(coeffs0.h_minus[k]));
  }
  res.supercritical = is_supercritical(s.barrier);
  res.klein = !s.barrier.is_free() && is_klein_regime(s.barrier, mean_energy);

  // Intervention coefficient sets (identity first by convention).
  std::vector<WavepacketCoefficients> icoeffs;
  for (const auto& name : s.interventions) {
    const InterventionProfile profile = make_profile(name, s.packet, grid);
    const SpinorField reshaped = apply_intervention(packet, profile, grid.dx);
    icoeffs.push_back(project_coefficients(reshaped, basis, tr));
  }

  // Probe layout, shared between the free floor measurement and the runs.
  struct ProbeSlot {
    std::size_t time_index;
    ProbePoint point;
  };
  std::vector<ProbeSlot> probe_slots;
  for (std::size_t ti = 0; ti < s.output_steps.size(); ++ti) {
    const double t = s.dt * static_cast<double>(s.output_steps[ti]);
    for (const double margin : s.probe_margins_dx) {
      probe_slots.push_back({ti, place_probe(cone, grid, ProbeSpec{t, margin})});
    }
  }

  // Paired free run (analytic phase advance): X_free per time, and the
  // spectral-locality floor measured at the same probes for EVERY intervention
  // packet (the reshaped packets have their own band-limit tails; the
  // right-half profile is discontinuous and dominates the floor).
  std::vector<double> x_free(s.output_steps.size());
  double floor_abs = 0.0;
  {
    SpinorField f(grid.n_points);
    for (std::size_t ti = 0; ti < s.output_steps.size(); ++ti) {
      const double t = s.dt * static_cast<double>(s.output_steps[ti]);
      const WavepacketCoefficients ct = free_evolve_coefficients(coeffs0, basis, t);
      basis.synthesize(ct.h_plus, ct.h_minus, tr, f);
      x_free[ti] = unconditional_mean(f.density(), grid);
      for (const auto& ic : icoeffs) {
        const WavepacketCoefficients cit = free_evolve_coefficients(ic, basis, t);
        basis.synthesize(cit.h_plus, cit.h_minus, tr, f);
        const std::vector<double> rho = f.density();
        for (const auto& slot : probe_slots) {
          if (slot.time_index != ti) continue;
          floor_abs = std::max(floor_abs, rho[slot.point.index]);
        }
      }
    }
  }

  res.causality.interventions = s.interventions;
  for (const auto& slot : probe_slots) {
    ProbeRecord rec;
    rec.point = slot.point;
    res.causality.probes.push_back(rec);
  }

  const bool load_checkpoint_file =
      !opts.checkpoint.empty() && std::filesystem::exists(opts.checkpoint);
  PropagatorBuild build(basis, stepper, opts.threads);
  std::size_t done = 0;
  PropagatorMatrix pm_final;

  for (std::size_t ti = 0; ti < s.output_steps.size(); ++ti) {
    const std::size_t target = s.output_steps[ti];
    const double t = s.dt * static_cast<double>(target);
    const bool final_time = ti + 1 == s.output_steps.size();

    PropagatorMatrix pm;
    if (load_checkpoint_file) {
      if (!final_time) continue;  // checkpointed rerun post-processes the stored time only
      pm = load_checkpoint(opts.checkpoint);
      if (pm.n != grid.n_points || std::abs(pm.t - t) > 0.5 * s.dt) {
        throw std::runtime_error("checkpoint does not match the scenario grid/final time");
      }
    } else {
      build.advance(target - done);
      done = target;
      pm = build.project();
    }

    const VacuumDensity vac = vacuum_density(pm, basis, opts.threads);
    const AuxiliaryFields aux = wavepacket_fields(pm, coeffs0, synth);
    TimeSlice slice;
    slice.step = target;
    slice.t = t;
    slice.density = combine_density(t, aux, vac);
    slice.count = particle_count(slice.density, grid.dx, &aux);
    slice.front = cone.front(t);
    slice.x_free = x_free[ti];
    const double region_a = s.barrier.is_free() ? grid.x_min : 0.5 * s.barrier.length;
    slice.x_transmitted =
        conditional_mean_position(slice.density, grid, region_a, grid.x_max);
    slice.transmitted_mass = region_mass(slice.density.rho_wp, grid, region_a, grid.x_max);
    slice.reflected_mass =
        region_mass(slice.density.rho_wp, grid, grid.x_min, -0.5 * s.barrier.length);
    slice.edge_ratio = edge_ratio_of(slice.density.rho_wp);
    slice.vac_edge_ratio = edge_ratio_of(slice.density.rho_vac);
    slice.rho_vac_max = max_of(slice.density.rho_vac);
    if (slice.edge_ratio > 1e-8 || slice.vac_edge_ratio > 1e-3) res.edge_breach = true;

    // Probe densities per intervention.
    for (std::size_t pi = 0; pi < probe_slots.size(); ++pi) {
      if (probe_slots[pi].time_index != ti) continue;
      auto& rec = res.causality.probes[pi];
      rec.rho_vac = slice.density.rho_vac[rec.point.index];
      for (const auto& ic : icoeffs) {
        const DensityDecomposition di = wavepacket_density(pm, ic, synth, vac);
        rec.rho.push_back(di.rho_total[rec.point.index]);
      }
    }

    if (final_time) {
      pm_final = std::move(pm);
      if (!s.barrier.is_free() && slice.transmitted_mass < 1e-12) res.no_transmission = true;
    }
    res.slices.push_back(std::move(slice));
    if (!opts.quiet) {
      std::fprintf(stderr, "[%s] t = %.6g (step %zu/%zu)\n", s.name.c_str(), t, target,
                   s.output_steps.back());
    }
  }

  double scale = 0.0;
  for (const auto& slice : res.slices) scale = std::max(scale, slice.rho_vac_max);
  if (scale < 1e-20) {  // free runs: fall back to the density scale itself
    for (const auto& slice : res.slices) scale = std::max(scale, max_of(slice.density.rho_total));
  }
  res.causality.scale = scale;
  res.spectral_floor = scale > 0.0 ? floor_abs / scale : 0.0;
  res.causality.floor_rel = res.spectral_floor;
  res.causality.finalize();

  if (opts.with_unitarity && pm_final.n != 0) {
    res.unitarity = unitarity_defect(pm_final, opts.threads);
  }
  if (!opts.checkpoint.empty() && !load_checkpoint_file && pm_final.n != 0) {
    save_checkpoint(opts.checkpoint, pm_final);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Outputs
// ---------------------------------------------------------------------------

std::string format_summary(const RunResult& r) {
  std::ostringstream os;
  const GridPair grid = r.scenario.make_grid_pair();
  os << "name = " << r.scenario.name << "\n";
  os << "n_points = " << grid.n_points << "\n";
  os << "x_min = " << fmt(grid.x_min) << "\n";
  os << "x_max = " << fmt(grid.x_max) << "\n";
  os << "dx = " << fmt(grid.dx) << "\n";
  os << "dp = " << fmt(grid.dp) << "\n";
  os << "dt = " << fmt(r.scenario.dt) << "\n";
  os << "supercritical = " << (r.supercritical ? 1 : 0) << "\n";
  os << "klein_regime = " << (r.klein ? 1 : 0) << "\n";
  os << "mean_velocity_c = " << fmt(r.mean_velocity_c) << "\n";
  os << "spectral_floor = " << fmt(r.spectral_floor) << "\n";
  os << "unitarity_defect = " << fmt(r.unitarity) << "\n";
  os << "edge_breach = " << (r.edge_breach ? 1 : 0) << "\n";
  os << "no_transmission = " << (r.no_transmission ? 1 : 0) << "\n";
  os << "causality_scale = " << fmt(r.causality.scale) << "\n";
  os << "causality_threshold_rel = " << fmt(r.causality.threshold_rel) << "\n";
  os << "causality_max_pairwise_rel = " << fmt(r.causality.max_pairwise_rel) << "\n";
  os << "causality_max_vs_vac_rel = " << fmt(r.causality.max_vs_vac_rel) << "\n";
  os << "causality_pass = " << (r.causality.pass ? 1 : 0) << "\n";
  for (const auto& s : r.slices) {
    os << "\n[t = " << fmt(s.t) << "]\n";
    os << "step = " << s.step << "\n";
    os << "n_total = " << fmt(s.count.n_total) << "\n";
    os << "n_vac = " << fmt(s.count.n_vac) << "\n";
    os << "electrons_from_pairs = " << fmt(s.count.electrons_from_pairs) << "\n";
    os << "pauli_blocking_deficit = " << fmt(s.count.blocking_deficit) << "\n";
    os << "front = " << fmt(s.front) << "\n";
    os << "x_free = " << fmt(s.x_free) << "\n";
    os << "x_transmitted = " << (s.x_transmitted ? fmt(*s.x_transmitted) : "none") << "\n";
    os << "transmitted_mass = " << fmt(s.transmitted_mass) << "\n";
    os << "reflected_mass = " << fmt(s.reflected_mass) << "\n";
    os << "edge_ratio = " << fmt(s.edge_ratio) << "\n";
    os << "vac_edge_ratio = " << fmt(s.vac_edge_ratio) << "\n";
  }
  return os.str();
}

void write_outputs(const RunResult& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const GridPair grid = r.scenario.make_grid_pair();

  for (std::size_t ti = 0; ti < r.slices.size(); ++ti) {
    const auto& d = r.slices[ti].density;
    std::ofstream os(fs::path(out_dir) / ("density_t" + std::to_string(ti) + ".csv"));
    os << "x,rho_total,rho_vac,rho_wp,rho1,rho2,rho3\n";
    for (std::size_t j = 0; j < grid.n_points; ++j) {
      os << fmt(grid.x(j)) << ',' << fmt(d.rho_total[j]) << ',' << fmt(d.rho_vac[j]) << ','
         << fmt(d.rho_wp[j]) << ',' << fmt(d.rho1[j]) << ',' << fmt(d.rho2[j]) << ','
         << fmt(d.rho3[j]) << "\n";
    }
  }

  {
    std::ofstream os(fs::path(out_dir) / "causality.csv");
    os << "t,margin_dx,x_probe,intervention,rho,rho_vac,max_pairwise,max_vs_vac\n";
    for (const auto& rec : r.causality.probes) {
      for (std::size_t i = 0; i < rec.rho.size(); ++i) {
        os << fmt(rec.point.t) << ',' << fmt(rec.point.margin / grid.dx) << ','
           << fmt(rec.point.x) << ',' << r.causality.interventions[i] << ',' << fmt(rec.rho[i])
           << ',' << fmt(rec.rho_vac) << ',' << fmt(rec.max_pairwise) << ','
           << fmt(rec.max_vs_vac) << "\n";
      }
    }
  }

  {
    std::ofstream os(fs::path(out_dir) / "summary.txt");
    os << format_summary(r);
  }
  write_scenario_file(r.scenario, (fs::path(out_dir) / "resolved.cfg").string());
}

}  // namespace diracsea
