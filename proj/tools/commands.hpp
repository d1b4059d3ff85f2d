#pragma once

#include "polq/counting.hpp"
#include "polq/optics.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polq::cli {

/// Bad flag combination discovered after parsing (exit code 2).
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-convergence that still produced an output (exit code 4 after writing).
class PartialConvergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<double> counts;
  std::optional<int> trials;
  bool exact_expectation = false;
  /// Unset: each command picks its own default (see drift()).
  std::optional<double> drift_amplitude;
  std::string out;

  std::uint64_t require_seed(const std::string& command) const;
  /// Sinusoidal drift with the given amplitude, or `fallback` when --drift-amplitude is unset.
  DriftModel drift(double fallback) const;
  double counts_or(double fallback) const;
  int trials_or(int fallback) const;
  std::string require_out_dir(const std::string& command) const;
};

struct SpectrumFlags {
  double center_nm = 702.0;
  double fwhm_nm = 10.0;
  std::optional<double> opd_um;

  Spectrum spectrum() const;
  double opd(const Spectrum& s) const;
};

struct SynthFlags {
  std::string state_path;
  double round_angles_deg = 0.0;
  double hwp_error_deg = 0.0;
  double qwp_error_deg = 0.0;
  SpectrumFlags spectrum;
};

struct SimulateFlags {
  std::string state_path;
  int records = 1;
  double background = 0.0;
  double duration_s = 100.0;
};

struct ProfileFlags {
  std::vector<double> radii{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> direction{1.0, 1.0, 1.0};
  double packing = 0.74;
  double scale = 5.0;
};

struct MeshFlags {
  std::string process_path;
  int latitudes = 25;
  int longitudes = 50;
};

/// Files produced by a command, written only after every one of them has been computed.
using OutputFiles = std::vector<std::pair<std::string, std::string>>;

void emit(const Globals& g, const std::string& content);
void emit_files(const std::string& dir, const OutputFiles& files);

void cmd_synth(const Globals& g, const SynthFlags& f);
void cmd_simulate_counts(const Globals& g, const SimulateFlags& f);
void cmd_tomo(const Globals& g, const std::string& counts_path);
void cmd_fidelity(const Globals& g, const std::string& a, const std::string& b);
void cmd_process_apply(const Globals& g, const std::string& process_path, const std::string& state_path);
void cmd_sqpt(const Globals& g, const std::string& process_path);
void cmd_sphere_map(const Globals& g, const MeshFlags& f);
void cmd_distinguish(const Globals& g, const ProfileFlags& f);
void cmd_sphere_patches(const Globals& g, const ProfileFlags& f);
/// Prints one PASS/FAIL summary line per checked claim; returns false if any failed.
bool cmd_experiment(const Globals& g, const std::string& name, const ProfileFlags& profile);

} // namespace polq::cli
