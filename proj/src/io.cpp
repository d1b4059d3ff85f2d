#include "polq/io.hpp"

#include "polq/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace polq::io {

namespace {

constexpr double kRadToDeg = 180.0 / kPi;
constexpr double kFileStateTol = 1e-9;

json real_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd read_rows(const json& j, Eigen::Index n, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw FormatError(std::string(what) + " must be an array of " + std::to_string(n) + " rows");
  }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw FormatError(std::string(what) + " rows must have " + std::to_string(n) + " entries");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) {
        throw FormatError(std::string(what) + " entries must be numbers");
      }
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

Eigen::MatrixXcd complex_from_json(const json& j, Eigen::Index n) {
  if (!j.is_object() || !j.contains("re")) {
    throw FormatError("matrix objects need an \"re\" field");
  }
  const Eigen::MatrixXd re = read_rows(j.at("re"), n, "re");
  const Eigen::MatrixXd im = j.contains("im") ? read_rows(j.at("im"), n, "im") : Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXcd m(n, n);
  m.real() = re;
  m.imag() = im;
  return m;
}

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw FormatError(std::string("missing numeric field \"") + key + "\"");
  }
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

JonesOperator basis_from_json(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "HV") {
      return basis_hv();
    }
    if (name == "DA") {
      return basis_da();
    }
    if (name == "RL") {
      return basis_rl();
    }
    throw FormatError("unknown decoherer basis '" + name + "' (expected HV, DA or RL)");
  }
  return JonesOperator(mat2_from_json(j));
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

} // namespace

std::string format_double(double x) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

json to_json(const Mat2& m) { return {{"re", real_rows(m.real())}, {"im", real_rows(m.imag())}}; }

json to_json(const DensityMatrix& rho) { return to_json(rho.matrix()); }

json to_json(const PoincareVector& r) { return {{"rH", r.rH}, {"rD", r.rD}, {"rR", r.rR}}; }

json to_json(const ChiMatrix& chi) {
  return {{"basis", kPauliBasisId}, {"re", real_rows(chi.matrix().real())}, {"im", real_rows(chi.matrix().imag())}};
}

json to_json(const KrausSet& k) {
  json ops = json::array();
  for (const Mat2& e : k.ops()) {
    ops.push_back(to_json(e));
  }
  return {{"kraus", ops}};
}

json to_json(const TomographyResult& result) {
  return {{"rho", to_json(result.rho)},
          {"r", to_json(poincare_from_rho(result.rho))},
          {"t", {result.t[0], result.t[1], result.t[2], result.t[3]}},
          {"likelihood", result.residual_likelihood},
          {"iterations", result.iterations},
          {"converged", result.converged}};
}

json to_json(const PackingEstimate& estimate) {
  return {{"total_states", estimate.total_states},
          {"method", "radial_shell_integration"},
          {"packing_fraction", estimate.packing_fraction}};
}

json to_json(const SynthesisAngles& angles, double forward_fidelity) {
  return {{"theta1_deg", angles.theta1 * kRadToDeg},
          {"theta2_deg", angles.theta2 * kRadToDeg},
          {"theta3_deg", angles.theta3 * kRadToDeg},
          {"forward_fidelity", forward_fidelity}};
}

Mat2 mat2_from_json(const json& j) { return complex_from_json(j, 2); }

DensityMatrix state_from_json(const json& j) {
  if (!j.is_object()) {
    throw FormatError("state must be a JSON object");
  }
  if (j.contains("re")) {
    const Mat2 m = mat2_from_json(j);
    // Validate at file precision, then symmetrize and renormalize exactly.
    const DensityMatrix checked(m, kFileStateTol);
    return DensityMatrix::from_unnormalized(checked.matrix());
  }
  if (j.contains("rH") || j.contains("rD") || j.contains("rR")) {
    return rho_from_poincare({number_or(j, "rH", 0.0), number_or(j, "rD", 0.0), number_or(j, "rR", 0.0)});
  }
  throw FormatError("state needs either {\"re\",\"im\"} or {\"rH\",\"rD\",\"rR\"}");
}

ChiMatrix chi_from_json(const json& j) {
  if (j.contains("basis") && j.at("basis") != kPauliBasisId) {
    throw FormatError("unsupported chi basis '" + j.at("basis").dump() + "'");
  }
  return ChiMatrix(complex_from_json(j, 4));
}

KrausSet element_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw FormatError("optical elements need a string \"kind\"");
  }
  const auto kind = j.at("kind").get<std::string>();
  constexpr double deg = kPi / 180.0;
  if (kind == "hwp") {
    return KrausSet::from_jones(hwp(number(j, "theta_deg") * deg));
  }
  if (kind == "qwp") {
    return KrausSet::from_jones(qwp(number(j, "theta_deg") * deg));
  }
  if (kind == "waveplate") {
    return KrausSet::from_jones(general_waveplate(number(j, "retardance_deg") * deg, number(j, "theta_deg") * deg));
  }
  if (kind == "partial_polarizer") {
    return KrausSet::from_jones(coherent_partial_polarizer(number(j, "tH"), number(j, "tV")));
  }
  if (kind == "decoherer") {
    Spectrum spec;
    spec.center_wavelength = number_or(j, "center_nm", 702.0) * 1e-9;
    spec.fwhm_wavelength = number_or(j, "fwhm_nm", 10.0) * 1e-9;
    DecohererSpec d;
    d.optical_path_difference = number(j, "opd_um") * 1e-6;
    d.basis_rotation = j.contains("basis") ? basis_from_json(j.at("basis")) : basis_hv();
    return decoherer_kraus(spec, d);
  }
  throw FormatError("unknown optical element kind '" + kind + "'");
}

json element_to_json_hwp(double theta) { return {{"kind", "hwp"}, {"theta_deg", theta * kRadToDeg}}; }

json element_to_json_qwp(double theta) { return {{"kind", "qwp"}, {"theta_deg", theta * kRadToDeg}}; }

json element_to_json_decoherer(double opd, const std::string& basis) {
  return {{"kind", "decoherer"}, {"opd_um", opd * 1e6}, {"basis", basis}};
}

json element_to_json_partial_polarizer(double t_h, double t_v) {
  return {{"kind", "partial_polarizer"}, {"tH", t_h}, {"tV", t_v}};
}

KrausSet process_from_json(const json& j) {
  if (!j.is_object()) {
    throw FormatError("process must be a JSON object");
  }
  if (j.contains("kraus")) {
    const json& ops = j.at("kraus");
    if (!ops.is_array() || ops.empty()) {
      throw FormatError("\"kraus\" must be a nonempty array of matrices");
    }
    std::vector<Mat2> mats;
    for (const json& op : ops) {
      mats.push_back(mat2_from_json(op));
    }
    return KrausSet(std::move(mats));
  }
  if (j.contains("name")) {
    try {
      return canonical_process(j.at("name").get<std::string>());
    } catch (const std::out_of_range& e) {
      throw FormatError(e.what());
    }
  }
  if (j.contains("elements")) {
    const json& elements = j.at("elements");
    if (!elements.is_array() || elements.empty()) {
      throw FormatError("\"elements\" must be a nonempty array");
    }
    KrausSet chain = element_from_json(elements.front());
    for (std::size_t i = 1; i < elements.size(); ++i) {
      chain = chain.then(element_from_json(elements[i]));
    }
    return chain;
  }
  if (j.contains("kind")) {
    return element_from_json(j);
  }
  if (j.contains("re")) {
    return kraus_from_chi(chi_from_json(j));
  }
  throw FormatError("unrecognized process description");
}

std::string counts_to_csv(const std::vector<CountRecord>& records) {
  std::ostringstream out;
  out << "N0,N1,N2,N3,duration_s\n";
  for (const CountRecord& r : records) {
    out << r.n[0] << ',' << r.n[1] << ',' << r.n[2] << ',' << r.n[3] << ',' << format_double(r.duration_s) << '\n';
  }
  return out.str();
}

std::vector<CountRecord> counts_from_csv(std::istream& in) {
  std::vector<CountRecord> records;
  std::string line;
  int line_number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty()) {
      continue;
    }
    if (!header_seen) {
      if (text != "N0,N1,N2,N3,duration_s") {
        throw FormatError("line " + std::to_string(line_number) + ": expected header N0,N1,N2,N3,duration_s");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(trim(field));
    }
    if (fields.size() != 5) {
      throw FormatError("line " + std::to_string(line_number) + ": expected 5 fields");
    }
    CountRecord r;
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string& f = fields[i];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), r.n[i]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() || r.n[i] < 0) {
        throw FormatError("line " + std::to_string(line_number) + ": N" + std::to_string(i) +
                          " must be a nonnegative integer");
      }
    }
    const std::string& d = fields[4];
    const auto res = std::from_chars(d.data(), d.data() + d.size(), r.duration_s);
    if (res.ec != std::errc() || res.ptr != d.data() + d.size() || !(r.duration_s >= 0.0)) {
      throw FormatError("line " + std::to_string(line_number) + ": duration_s must be a nonnegative number");
    }
    records.push_back(r);
  }
  if (!header_seen) {
    throw FormatError("counts file is empty");
  }
  return records;
}

std::string sphere_map_to_csv(const SphereMap& map) {
  std::ostringstream out;
  out << "in_rH,in_rD,in_rR,out_rH,out_rD,out_rR,weight\n";
  for (const SphereSample& s : map.samples) {
    out << format_double(s.input.rH) << ',' << format_double(s.input.rD) << ',' << format_double(s.input.rR) << ','
        << format_double(s.output.rH) << ',' << format_double(s.output.rD) << ',' << format_double(s.output.rR)
        << ',' << format_double(s.weight) << '\n';
  }
  return out.str();
}

std::string sphere_map_to_svg(const SphereMap& map) {
  constexpr double width = 720.0;
  constexpr double height = 360.0;
  auto project = [&](const PoincareVector& r, double& x, double& y) {
    const double lon = std::atan2(r.rD, r.rH);
    const double lat = std::atan2(r.rR, std::hypot(r.rH, r.rD));
    x = (lon + kPi) / (2.0 * kPi) * width;
    y = (0.5 * kPi - lat) / kPi * height;
  };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\" stroke=\"black\"/>\n";
  out << "<line x1=\"0\" y1=\"180\" x2=\"720\" y2=\"180\" stroke=\"#ccc\"/>\n";
  out << "<line x1=\"360\" y1=\"0\" x2=\"360\" y2=\"360\" stroke=\"#ccc\"/>\n";
  for (const SphereSample& s : map.samples) {
    double x = 0.0;
    double y = 0.0;
    project(s.input, x, y);
    out << "<circle cx=\"" << format_double(x) << "\" cy=\"" << format_double(y)
        << "\" r=\"1\" fill=\"#bbb\"/>\n";
  }
  for (const SphereSample& s : map.samples) {
    if (s.weight <= 1e-12) {
      continue;
    }
    double x = 0.0;
    double y = 0.0;
    project(s.output, x, y);
    // Radius marks the degree of polarization of the output, opacity its survival weight.
    const double radius = 1.0 + 2.0 * std::min(1.0, s.output.norm());
    out << "<circle cx=\"" << format_double(x) << "\" cy=\"" << format_double(y) << "\" r=\""
        << format_double(radius) << "\" fill=\"#1f4e9c\" fill-opacity=\"" << format_double(s.weight) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string profile_to_csv(const std::vector<UncertaintyEllipsoid>& profile) {
  std::ostringstream out;
  out << "radius,sigma_radial,sigma_t1,sigma_t2\n";
  for (const auto& e : profile) {
    out << format_double(e.mean_r.norm()) << ',' << format_double(e.radial_semiaxis / kEllipsoidSigmaScale) << ','
        << format_double(e.transverse_semiaxes[0] / kEllipsoidSigmaScale) << ','
        << format_double(e.transverse_semiaxes[1] / kEllipsoidSigmaScale) << '\n';
  }
  return out.str();
}

std::string patches_to_csv(const std::vector<UncertaintyEllipsoid>& profile, double scale) {
  std::ostringstream out;
  out << "center_rH,center_rD,center_rR,semi_radial,semi_t1,semi_t2,"
         "radial_x,radial_y,radial_z,t1_x,t1_y,t1_z,t2_x,t2_y,t2_z\n";
  for (const auto& e : profile) {
    out << format_double(e.mean_r.rH) << ',' << format_double(e.mean_r.rD) << ',' << format_double(e.mean_r.rR)
        << ',' << format_double(scale * e.radial_semiaxis) << ',' << format_double(scale * e.transverse_semiaxes[0])
        << ',' << format_double(scale * e.transverse_semiaxes[1]);
    for (const auto& axis : e.axes) {
      out << ',' << format_double(axis(0)) << ',' << format_double(axis(1)) << ',' << format_double(axis(2));
    }
    out << '\n';
  }
  return out.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
    out << content;
    if (!out) {
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, target);
}

} // namespace polq::io
