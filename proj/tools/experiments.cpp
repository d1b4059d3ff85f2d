#include "commands.hpp"

#include "polq/distinguish.hpp"
#include "polq/io.hpp"
#include "polq/parallel.hpp"
#include "polq/process.hpp"
#include "polq/random.hpp"
#include "polq/tomography.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

namespace polq::cli {

using io::json;

namespace {

struct Target {
  std::string name;
  PoincareVector r;
};

std::vector<Target> fidelity_targets() {
  return {{"H", {1, 0, 0}}, {"D", {0, 1, 0}}, {"R", {0, 0, 1}}, {"mixed", {0.5, -0.3, 0.4}}, {"center", {0, 0, 0}}};
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

void report(bool pass, const std::string& label, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << label << ": " << detail << "\n";
}

std::string fmt(double x) { return io::format_double(x); }

void state_fidelity(const Globals& g, const std::string& dir) {
  const std::uint64_t seed = g.exact_expectation ? g.seed.value_or(0) : g.require_seed("experiment state-fidelity");
  const double total = g.counts_or(150000.0);
  const int trials = g.trials_or(100);
  const DriftModel drift = g.drift(0.005);
  CountOptions options;
  options.exact_expectation = g.exact_expectation;
  const auto targets = fidelity_targets();

  struct Trial {
    double fidelity = 0.0;
    PoincareVector r;
  };
  std::vector<Trial> runs(targets.size() * static_cast<std::size_t>(trials));
  parallel_for(runs.size(), [&](std::size_t idx) {
    const std::size_t t = idx / static_cast<std::size_t>(trials);
    const DensityMatrix target = rho_from_poincare(targets[t].r);
    const CountRecord c = simulate_counts(target, per_basis_from_total(total), drift, derive_seed(seed, idx), options);
    const TomographyResult result = mle_reconstruct(c);
    runs[idx] = {fidelity(result.rho, target), poincare_from_rho(result.rho)};
  });

  std::ostringstream csv;
  csv << "target,trial,fidelity,rH,rD,rR\n";
  SphereMap cloud;
  json summary{{"counts_total", total}, {"trials", trials}, {"drift_amplitude", drift.relative_amplitude}};
  bool all_pass = true;
  std::vector<std::string> lines;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    std::vector<double> f;
    for (int i = 0; i < trials; ++i) {
      const Trial& run = runs[t * static_cast<std::size_t>(trials) + static_cast<std::size_t>(i)];
      f.push_back(run.fidelity);
      csv << targets[t].name << ',' << i << ',' << fmt(run.fidelity) << ',' << fmt(run.r.rH) << ',' << fmt(run.r.rD)
          << ',' << fmt(run.r.rR) << '\n';
      cloud.samples.push_back({targets[t].r, run.r, 1.0});
    }
    const double med = median(f);
    const double worst = *std::min_element(f.begin(), f.end());
    summary["targets"].push_back(
        {{"name", targets[t].name}, {"r", io::to_json(targets[t].r)}, {"median_fidelity", med}, {"min_fidelity", worst}});
    all_pass = all_pass && med >= 0.997;
    lines.push_back(targets[t].name + " median fidelity " + fmt(med) + " (min " + fmt(worst) + ")");
  }
  emit_files(dir, {{"fidelities.csv", csv.str()},
                   {"summary.json", json(summary).dump(2) + "\n"},
                   {"reconstructions.svg", io::sphere_map_to_svg(cloud)}});
  for (const auto& line : lines) {
    std::cout << "  " << line << "\n";
  }
  report(all_pass, "state-fidelity", "median fidelity >= 0.997 for every target");
}

void ellipsoids(const Globals& g, const ProfileFlags& f, const std::string& dir) {
  if (f.direction.size() != 3) {
    throw UsageError("--direction takes three components rH rD rR");
  }
  const std::uint64_t seed = g.exact_expectation ? g.seed.value_or(0) : g.require_seed("experiment ellipsoids");
  EllipsoidOptions options;
  options.drift = g.drift(0.0);
  options.exact_expectation = g.exact_expectation;
  const double total = g.counts_or(300000.0);
  const auto profile = ellipsoid_profile(f.radii, g.trials_or(10), total, seed, options,
                                         Eigen::Vector3d(f.direction[0], f.direction[1], f.direction[2]));

  SphereMap cloud;
  for (const auto& e : profile) {
    for (const auto& p : e.points) {
      cloud.samples.push_back({e.mean_r, p, 1.0});
    }
  }
  json packing{{"counts_total", total}, {"trials", g.trials_or(10)}, {"radii", f.radii}};
  bool volumes_ok = profile.size() >= 2;
  for (const auto& e : profile) {
    volumes_ok = volumes_ok && e.volume() > 0.0;
  }
  double states = 0.0;
  if (volumes_ok) {
    const PackingEstimate estimate = count_distinguishable(profile, f.packing);
    states = estimate.total_states;
    packing.update(io::to_json(estimate));
    packing["mean_volume_total_states"] = count_distinguishable_mean_volume(profile, f.packing);
  } else {
    packing["total_states"] = nullptr;
  }
  emit_files(dir, {{"profile.csv", io::profile_to_csv(profile)},
                   {"packing.json", packing.dump(2) + "\n"},
                   {"patches.csv", io::patches_to_csv(profile, f.scale)},
                   {"patches.svg", io::sphere_map_to_svg(cloud)}});

  for (std::size_t i = 0; i < profile.size(); ++i) {
    std::cout << "  |r| = " << fmt(f.radii[i]) << " radial semi-axis " << fmt(profile[i].radial_semiaxis) << "\n";
  }
  auto radial_at = [&](double radius) -> const UncertaintyEllipsoid* {
    for (std::size_t i = 0; i < f.radii.size(); ++i) {
      if (f.radii[i] == radius) {
        return &profile[i];
      }
    }
    return nullptr;
  };
  const auto* surface = radial_at(1.0);
  const auto* quarter = radial_at(0.25);
  if (surface && quarter) {
    const double a = surface->radial_semiaxis;
    const double b = quarter->radial_semiaxis;
    report(a >= 0.0021 / 2 && a <= 0.0021 * 2, "ellipsoid |r|=1", fmt(a) + " within a factor 2 of 0.0021");
    report(b >= 0.0062 / 2 && b <= 0.0062 * 2, "ellipsoid |r|=0.25", fmt(b) + " within a factor 2 of 0.0062");
    report(a < b, "ellipsoid ordering", "thinner at the surface than at |r|=0.25");
  }
  if (volumes_ok) {
    report(states >= 1e6 && states <= 1e7, "distinguishable states", fmt(states) + " in [1e6, 1e7]");
  }
}

void sqpt_catalog(const Globals& g, const std::string& dir) {
  const std::uint64_t seed = g.exact_expectation ? g.seed.value_or(0) : g.require_seed("experiment sqpt-catalog");
  const double per_setting = g.counts_or(g.exact_expectation ? 1e12 : 1e5);
  const double limit = g.exact_expectation ? 1e-8 : 0.05;
  SqptOptions options;
  options.exact_expectation = g.exact_expectation;
  options.drift = g.drift(0.0);
  OutputFiles files;
  std::vector<std::pair<std::string, double>> distances;
  const auto catalog = canonical_processes();
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& p = catalog[i];
    const SqptRun run = sqpt_end_to_end(p.kraus, per_setting, derive_seed(seed, i), options);
    const double d = (run.chi.matrix() - chi_from_kraus(p.kraus).matrix()).norm();
    json j = io::to_json(run.chi);
    j["process"] = p.name;
    j["frobenius_to_analytic"] = d;
    j["low_confidence"] = run.low_confidence;
    files.emplace_back("chi_" + p.name + ".json", j.dump(2) + "\n");
    const SphereMap map = sphere_map(kraus_from_chi(run.chi));
    files.emplace_back("sphere_map_" + p.name + ".csv", io::sphere_map_to_csv(map));
    files.emplace_back("sphere_map_" + p.name + ".svg", io::sphere_map_to_svg(map));
    distances.emplace_back(p.name, d);
  }
  emit_files(dir, files);
  for (const auto& [name, d] : distances) {
    report(d < limit, "sqpt " + name, "Frobenius distance " + fmt(d) + " < " + fmt(limit));
  }
}

} // namespace

bool cmd_experiment(const Globals& g, const std::string& name, const ProfileFlags& profile) {
  const std::string dir = g.require_out_dir("experiment");
  if (name == "state-fidelity") {
    state_fidelity(g, dir);
  } else if (name == "ellipsoids") {
    ellipsoids(g, profile, dir);
  } else if (name == "sqpt-catalog") {
    sqpt_catalog(g, dir);
  } else {
    throw UsageError("unknown experiment '" + name + "' (state-fidelity, ellipsoids, sqpt-catalog)");
  }
  return true;
}

} // namespace polq::cli
