#include "commands.hpp"

#include "polq/errors.hpp"
#include "polq/io.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace polq;
using namespace polq::cli;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitConvergence = 4;

void add_spectrum_flags(CLI::App* cmd, SpectrumFlags& s) {
  cmd->add_option("--center-nm", s.center_nm, "Center wavelength of the gaussian spectrum (nm)")->capture_default_str();
  cmd->add_option("--fwhm-nm", s.fwhm_nm, "Spectral FWHM (nm)")->capture_default_str();
  cmd->add_option("--opd-um", s.opd_um, "Decoherer optical path difference (um); default 20 coherence lengths");
}

void add_profile_flags(CLI::App* cmd, ProfileFlags& p) {
  cmd->add_option("--radii", p.radii, "Profile radii |r| in [0, 1]")->capture_default_str();
  cmd->add_option("--direction", p.direction, "Direction rH rD rR of the profile states")->expected(3);
  cmd->add_option("--packing", p.packing, "Packing fraction for the state count")->capture_default_str();
  cmd->add_option("--scale", p.scale, "Scale factor applied to patch semi-axes")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization-qubit synthesis, tomography and process toolkit.\n"
               "Angles are in degrees in every file and flag."};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every stochastic step (required unless --exact-expectation)");
  app.add_option("--counts", g.counts,
                 "Count budget: total over the four settings for state commands, per-basis normalization "
                 "per input for sqpt");
  app.add_option("--trials", g.trials, "Monte-Carlo repetitions");
  app.add_flag("--exact-expectation", g.exact_expectation,
               "Use rounded expected counts instead of Poisson draws (also disables drift)");
  app.add_option("--drift-amplitude", g.drift_amplitude,
                 "Relative sinusoidal drift across the four settings (default 0.005 for simulate-counts and "
                 "state-fidelity, 0 for ellipsoid and process commands)");
  app.add_option("--out", g.out, "Output file (single-output commands; stdout if omitted) or directory");

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Waveplate angles that synthesize a target state");
  synth_cmd->add_option("state", synth.state_path, "Target state JSON")->required();
  synth_cmd->add_option("--round-angles", synth.round_angles_deg, "Round angles to multiples of this step (deg)");
  synth_cmd->add_option("--hwp-error-deg", synth.hwp_error_deg, "Half-wave plate retardance error (deg)");
  synth_cmd->add_option("--qwp-error-deg", synth.qwp_error_deg, "Quarter-wave plate retardance error (deg)");
  add_spectrum_flags(synth_cmd, synth.spectrum);

  SimulateFlags simulate;
  auto* sim_cmd = app.add_subcommand("simulate-counts", "Simulate coincidence counts for a state (CSV)");
  sim_cmd->add_option("state", simulate.state_path, "State JSON")->required();
  sim_cmd->add_option("--records", simulate.records, "Number of count records")->capture_default_str();
  sim_cmd->add_option("--background", simulate.background, "Accidental counts per setting")->capture_default_str();
  sim_cmd->add_option("--duration", simulate.duration_s, "Recorded duration per setting (s)")->capture_default_str();

  std::string counts_path;
  auto* tomo_cmd = app.add_subcommand("tomo", "Maximum-likelihood reconstruction of count records");
  tomo_cmd->add_option("counts", counts_path, "Counts CSV (N0,N1,N2,N3,duration_s)")->required();

  std::string state_a;
  std::string state_b;
  auto* fid_cmd = app.add_subcommand("fidelity", "Fidelity and trace distance of two states");
  fid_cmd->add_option("a", state_a, "First state JSON")->required();
  fid_cmd->add_option("b", state_b, "Second state JSON")->required();

  std::string process_path;
  std::string input_state;
  auto* apply_cmd = app.add_subcommand("process-apply", "Apply a process to a state");
  apply_cmd->add_option("process", process_path, "Process JSON (chi, kraus, name or elements)")->required();
  apply_cmd->add_option("state", input_state, "Input state JSON")->required();

  auto* sqpt_cmd = app.add_subcommand("sqpt", "Simulated standard process tomography");
  sqpt_cmd->add_option("process", process_path, "Process JSON")->required();

  MeshFlags mesh;
  auto* map_cmd = app.add_subcommand("sphere-map", "Map pure inputs through a process (CSV + SVG into --out DIR)");
  map_cmd->add_option("process", mesh.process_path, "Process JSON")->required();
  map_cmd->add_option("--latitudes", mesh.latitudes, "Mesh latitudes")->capture_default_str();
  map_cmd->add_option("--longitudes", mesh.longitudes, "Mesh longitudes")->capture_default_str();

  ProfileFlags profile;
  auto* dist_cmd = app.add_subcommand("distinguish", "Uncertainty-ellipsoid profile and state count into --out DIR");
  add_profile_flags(dist_cmd, profile);
  auto* patch_cmd = app.add_subcommand("sphere-patches", "Uncertainty patch geometry (CSV)");
  add_profile_flags(patch_cmd, profile);

  std::string experiment;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a full experiment into --out DIR with PASS/FAIL summary");
  exp_cmd->add_option("name", experiment, "state-fidelity | ellipsoids | sqpt-catalog")
      ->required()
      ->check(CLI::IsMember({"state-fidelity", "ellipsoids", "sqpt-catalog"}));
  add_profile_flags(exp_cmd, profile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth_cmd) {
      cmd_synth(g, synth);
    } else if (*sim_cmd) {
      cmd_simulate_counts(g, simulate);
    } else if (*tomo_cmd) {
      cmd_tomo(g, counts_path);
    } else if (*fid_cmd) {
      cmd_fidelity(g, state_a, state_b);
    } else if (*apply_cmd) {
      cmd_process_apply(g, process_path, input_state);
    } else if (*sqpt_cmd) {
      cmd_sqpt(g, process_path);
    } else if (*map_cmd) {
      cmd_sphere_map(g, mesh);
    } else if (*dist_cmd) {
      cmd_distinguish(g, profile);
    } else if (*patch_cmd) {
      cmd_sphere_patches(g, profile);
    } else if (*exp_cmd) {
      cmd_experiment(g, experiment, profile);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PartialConvergence& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const ConvergenceFailure& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const io::FormatError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DegenerateInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
