#include "commands.hpp"

#include "polq/distinguish.hpp"
#include "polq/errors.hpp"
#include "polq/io.hpp"
#include "polq/parallel.hpp"
#include "polq/process.hpp"
#include "polq/random.hpp"
#include "polq/synthesis.hpp"
#include "polq/tomography.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace polq::cli {

using io::json;

namespace {

constexpr double kDeg = kPi / 180.0;

DensityMatrix load_state(const std::string& path) { return io::state_from_json(io::read_json_file(path)); }

KrausSet load_process(const std::string& path) { return io::process_from_json(io::read_json_file(path)); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double round_to_step(double angle, double step) { return step > 0.0 ? std::round(angle / step) * step : angle; }

std::vector<UncertaintyEllipsoid> run_profile(const Globals& g, const ProfileFlags& f, const std::string& command) {
  if (f.direction.size() != 3) {
    throw UsageError("--direction takes three components rH rD rR");
  }
  const std::uint64_t seed = g.exact_expectation ? g.seed.value_or(0) : g.require_seed(command);
  EllipsoidOptions options;
  options.drift = g.drift(0.0);
  options.exact_expectation = g.exact_expectation;
  const Eigen::Vector3d direction(f.direction[0], f.direction[1], f.direction[2]);
  return ellipsoid_profile(f.radii, g.trials_or(10), g.counts_or(300000.0), seed, options, direction);
}

bool all_volumes_positive(const std::vector<UncertaintyEllipsoid>& profile) {
  for (const auto& e : profile) {
    if (!(e.volume() > 0.0)) {
      return false;
    }
  }
  return true;
}

} // namespace

std::uint64_t Globals::require_seed(const std::string& command) const {
  if (!seed) {
    throw UsageError(command + " is stochastic and needs --seed (or --exact-expectation)");
  }
  return *seed;
}

DriftModel Globals::drift(double fallback) const {
  const double amplitude = drift_amplitude.value_or(fallback);
  if (exact_expectation || amplitude == 0.0) {
    return DriftModel::none();
  }
  DriftModel d{amplitude, DriftKind::sinusoidal};
  d.validate();
  return d;
}

double Globals::counts_or(double fallback) const {
  const double c = counts.value_or(fallback);
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("--counts must be positive");
  }
  return c;
}

int Globals::trials_or(int fallback) const {
  const int t = trials.value_or(fallback);
  if (t < 1) {
    throw DomainError("--trials must be at least 1");
  }
  return t;
}

std::string Globals::require_out_dir(const std::string& command) const {
  if (out.empty()) {
    throw UsageError(command + " writes several files and needs --out DIR");
  }
  return out;
}

Spectrum SpectrumFlags::spectrum() const {
  Spectrum s;
  s.center_wavelength = center_nm * 1e-9;
  s.fwhm_wavelength = fwhm_nm * 1e-9;
  s.validate();
  return s;
}

double SpectrumFlags::opd(const Spectrum& s) const {
  if (opd_um) {
    if (!(*opd_um >= 0.0)) {
      throw DomainError("--opd-um must be nonnegative");
    }
    return *opd_um * 1e-6;
  }
  return default_decoherer_opd(s);
}

void emit(const Globals& g, const std::string& content) {
  if (g.out.empty()) {
    std::cout << content;
    std::cout.flush();
  } else {
    io::write_file_atomic(g.out, content);
  }
}

void emit_files(const std::string& dir, const OutputFiles& files) {
  for (const auto& [name, content] : files) {
    io::write_file_atomic((std::filesystem::path(dir) / name).string(), content);
  }
}

void cmd_synth(const Globals& g, const SynthFlags& f) {
  if (f.round_angles_deg < 0.0) {
    throw DomainError("--round-angles must be nonnegative");
  }
  const DensityMatrix target = load_state(f.state_path);
  const Spectrum spec = f.spectrum.spectrum();
  const double opd = f.spectrum.opd(spec);
  const RetardanceErrors errors{f.hwp_error_deg * kDeg, f.qwp_error_deg * kDeg};
  const bool ideal = errors.hwp_error == 0.0 && errors.qwp_error == 0.0;

  SynthesisAngles angles = ideal ? synth_angles(target) : synth_angles_imperfect(target, errors, spec, opd).angles;
  const double step = f.round_angles_deg * kDeg;
  angles = {round_to_step(angles.theta1, step), round_to_step(angles.theta2, step),
            round_to_step(angles.theta3, step)};
  const DensityMatrix produced =
      ideal ? forward_pipeline(angles, spec, opd) : forward_pipeline_imperfect(angles, errors, spec, opd);

  json j = io::to_json(angles, fidelity(produced, target));
  if (!ideal) {
    j["hwp_error_deg"] = f.hwp_error_deg;
    j["qwp_error_deg"] = f.qwp_error_deg;
  }
  if (f.round_angles_deg > 0.0) {
    j["round_angles_deg"] = f.round_angles_deg;
  }
  emit(g, dump(j));
}

void cmd_simulate_counts(const Globals& g, const SimulateFlags& f) {
  if (f.records < 1) {
    throw DomainError("--records must be at least 1");
  }
  if (!(f.background >= 0.0) || !(f.duration_s >= 0.0)) {
    throw DomainError("--background and --duration must be nonnegative");
  }
  const DensityMatrix rho = load_state(f.state_path);
  const std::uint64_t seed = g.exact_expectation ? g.seed.value_or(0) : g.require_seed("simulate-counts");
  const double per_basis = per_basis_from_total(g.counts_or(150000.0));
  CountOptions options;
  options.exact_expectation = g.exact_expectation;
  options.background = f.background;
  options.duration_s = f.duration_s;
  const DriftModel drift = g.drift(0.005);
  std::vector<CountRecord> records(static_cast<std::size_t>(f.records));
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i] = simulate_counts(rho, per_basis, drift, derive_seed(seed, i), options);
  }
  emit(g, io::counts_to_csv(records));
}

void cmd_tomo(const Globals& g, const std::string& counts_path) {
  std::ifstream in(counts_path);
  if (!in) {
    throw io::FormatError("cannot open '" + counts_path + "'");
  }
  const std::vector<CountRecord> records = io::counts_from_csv(in);
  if (records.empty()) {
    throw io::FormatError("'" + counts_path + "' has a header but no records");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].normalization() <= 0) {
      throw DegenerateInput("record " + std::to_string(i + 1) + ": N0 + N1 = 0, nothing to normalize by");
    }
  }
  std::vector<TomographyResult> results(records.size());
  parallel_for(records.size(), [&](std::size_t i) { results[i] = mle_reconstruct(records[i]); });

  bool converged = true;
  json out = json::array();
  for (const auto& r : results) {
    converged = converged && r.converged;
    out.push_back(io::to_json(r));
  }
  emit(g, dump(results.size() == 1 ? out[0] : out));
  if (!converged) {
    throw PartialConvergence("at least one reconstruction hit the evaluation limit");
  }
}

void cmd_fidelity(const Globals& g, const std::string& a, const std::string& b) {
  const DensityMatrix rho1 = load_state(a);
  const DensityMatrix rho2 = load_state(b);
  emit(g, dump(json{{"fidelity", fidelity(rho1, rho2)}, {"trace_distance", trace_distance(rho1, rho2)}}));
}

void cmd_process_apply(const Globals& g, const std::string& process_path, const std::string& state_path) {
  const KrausSet k = load_process(process_path);
  const DensityMatrix rho = load_state(state_path);
  const ProcessOutput out = apply_kraus(k, rho);
  json j{{"weight", out.weight}, {"annihilated", out.annihilated()}};
  j["state"] = out.state ? io::to_json(*out.state) : json(nullptr);
  j["r"] = out.state ? io::to_json(poincare_from_rho(*out.state)) : json(nullptr);
  emit(g, dump(j));
}

void cmd_sqpt(const Globals& g, const std::string& process_path) {
  const KrausSet k = load_process(process_path);
  const std::uint64_t seed = g.exact_expectation ? g.seed.value_or(0) : g.require_seed("sqpt");
  const double per_setting = g.counts_or(g.exact_expectation ? 1e12 : 1e5);
  SqptOptions options;
  options.exact_expectation = g.exact_expectation;
  options.drift = g.drift(0.0);
  const SqptRun run = sqpt_end_to_end(k, per_setting, seed, options);
  json j = io::to_json(run.chi);
  j["measured_weights"] = run.measured_weights;
  j["low_confidence"] = run.low_confidence;
  j["counts_per_setting"] = per_setting;
  j["exact_expectation"] = g.exact_expectation;
  for (std::size_t i = 0; i < 4; ++i) {
    if (run.low_confidence[i]) {
      std::cerr << "warning: input " << "HVDR"[i] << " was annihilated; its chi rows are unconstrained\n";
    }
  }
  emit(g, dump(j));
}

void cmd_sphere_map(const Globals& g, const MeshFlags& f) {
  const std::string dir = g.require_out_dir("sphere-map");
  const KrausSet k = load_process(f.process_path);
  const SphereMap map = sphere_map(k, {f.latitudes, f.longitudes});
  emit_files(dir, {{"sphere_map.csv", io::sphere_map_to_csv(map)}, {"sphere_map.svg", io::sphere_map_to_svg(map)}});
}

void cmd_distinguish(const Globals& g, const ProfileFlags& f) {
  const std::string dir = g.require_out_dir("distinguish");
  if (!(f.packing > 0.0 && f.packing <= 1.0)) {
    throw DomainError("--packing must lie in (0, 1]");
  }
  const auto profile = run_profile(g, f, "distinguish");
  json packing;
  if (all_volumes_positive(profile) && profile.size() >= 2) {
    packing = io::to_json(count_distinguishable(profile, f.packing));
    packing["mean_volume_total_states"] = count_distinguishable_mean_volume(profile, f.packing);
  } else {
    packing = {{"total_states", nullptr},
               {"reason", "needs at least two radii with nonzero ellipsoid volume"},
               {"packing_fraction", f.packing}};
  }
  packing["counts_total"] = g.counts_or(300000.0);
  packing["trials"] = g.trials_or(10);
  packing["radii"] = f.radii;
  emit_files(dir, {{"profile.csv", io::profile_to_csv(profile)}, {"packing.json", dump(packing)}});
}

void cmd_sphere_patches(const Globals& g, const ProfileFlags& f) {
  if (!(f.scale > 0.0)) {
    throw DomainError("--scale must be positive");
  }
  emit(g, io::patches_to_csv(run_profile(g, f, "sphere-patches"), f.scale));
}

} // namespace polq::cli
