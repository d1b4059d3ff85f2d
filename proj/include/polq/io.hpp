#pragma once

#include "polq/core.hpp"
#include "polq/counting.hpp"
#include "polq/distinguish.hpp"
#include "polq/optics.hpp"
#include "polq/process.hpp"
#include "polq/synthesis.hpp"
#include "polq/tomography.hpp"

#include "json.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace polq::io {

using nlohmann::json;

/// Malformed or semantically invalid file content.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

json to_json(const Mat2& m);
json to_json(const DensityMatrix& rho);
json to_json(const PoincareVector& r);
json to_json(const ChiMatrix& chi);
json to_json(const KrausSet& k);
json to_json(const TomographyResult& result);
json to_json(const PackingEstimate& estimate);
/// Angles in degrees plus the forward fidelity.
json to_json(const SynthesisAngles& angles, double forward_fidelity);

Mat2 mat2_from_json(const json& j);
/// Accepts {"re","im"} matrices and {"rH","rD","rR"} vectors.
DensityMatrix state_from_json(const json& j);
ChiMatrix chi_from_json(const json& j);

/// One optical element: {"kind":"hwp"|"qwp","theta_deg"}, {"kind":"waveplate","retardance_deg","theta_deg"},
/// {"kind":"decoherer","opd_um","basis":"HV"|"DA"|"RL"|{re,im}, optional "center_nm","fwhm_nm"},
/// {"kind":"partial_polarizer","tH","tV"}.
KrausSet element_from_json(const json& j);
json element_to_json_hwp(double theta);
json element_to_json_qwp(double theta);
json element_to_json_decoherer(double opd, const std::string& basis);
json element_to_json_partial_polarizer(double t_h, double t_v);

/// Process description: a chi matrix, {"kraus":[...]}, {"name": canonical}, a single element,
/// or {"elements":[...]} applied in order.
KrausSet process_from_json(const json& j);

/// "N0,N1,N2,N3,duration_s" header plus one line per record.
std::string counts_to_csv(const std::vector<CountRecord>& records);
/// Throws FormatError naming the offending line.
std::vector<CountRecord> counts_from_csv(std::istream& in);

std::string sphere_map_to_csv(const SphereMap& map);
/// Equirectangular projection of the output points (longitude = atan2(rD, rH), latitude from rR).
std::string sphere_map_to_svg(const SphereMap& map);

std::string profile_to_csv(const std::vector<UncertaintyEllipsoid>& profile);
/// Patch centers, semi-axes (times `scale`) and axis directions.
std::string patches_to_csv(const std::vector<UncertaintyEllipsoid>& profile, double scale);

json read_json_file(const std::string& path);
/// Write to a sibling temporary file and rename it into place.
void write_file_atomic(const std::string& path, const std::string& content);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

} // namespace polq::io
