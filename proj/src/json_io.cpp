#include "krauslab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace krauslab {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::size_t dimension(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) {
    throw InputError(std::string(what) + " must be a positive integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (const auto& z : m.data()) data.push_back({z.real(), z.imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  const auto rows = dimension(field(j, "rows"), "rows");
  const auto cols = dimension(field(j, "cols"), "cols");
  const auto& data = field(j, "data");
  if (!data.is_array() || data.size() != rows * cols) {
    throw InputError("matrix data must hold rows*cols = " + std::to_string(rows * cols) +
                     " entries");
  }
  std::vector<Complex> values;
  values.reserve(data.size());
  for (const auto& entry : data) {
    if (!entry.is_array() || entry.size() != 2) {
      throw InputError("matrix entries must be [re, im] pairs");
    }
    values.emplace_back(number(entry[0], "re"), number(entry[1], "im"));
  }
  try {
    return {rows, cols, std::move(values)};
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

json bloch_to_json(const BlochVector& b) { return {{"r", b.r}, {"theta", b.theta}, {"phi", b.phi}}; }

ComplexMatrix state_matrix_from_json(const json& j, double tol) {
  if (j.is_object() && j.contains("bloch")) {
    const auto& b = j.at("bloch");
    const BlochVector bloch{number(field(b, "r"), "r"), number(field(b, "theta"), "theta"),
                            number(field(b, "phi"), "phi")};
    try {
      return bloch_to_density(bloch, tol).mat();
    } catch (const std::domain_error& e) {
      throw InputError(e.what());
    }
  }
  if (j.is_object() && j.contains("matrix")) return matrix_from_json(j.at("matrix"));
  throw InputError("state must contain \"bloch\" or \"matrix\"");
}

json kraus_to_json(const KrausSet& k) {
  json ops = json::array();
  for (const auto& m : k.ops()) ops.push_back(matrix_to_json(m));
  return {{"d_in", k.d_in()}, {"d_out", k.d_out()}, {"ops", std::move(ops)}};
}

KrausSet kraus_from_json(const json& j) {
  const auto d_in = dimension(field(j, "d_in"), "d_in");
  const auto d_out = dimension(field(j, "d_out"), "d_out");
  const auto& ops_json = field(j, "ops");
  if (!ops_json.is_array() || ops_json.empty()) throw InputError("ops must be a non-empty array");
  std::vector<ComplexMatrix> ops;
  for (const auto& op : ops_json) {
    auto m = matrix_from_json(op);
    if (m.rows() != d_out || m.cols() != d_in) {
      throw InputError("Kraus operator shape does not match d_out x d_in");
    }
    ops.push_back(std::move(m));
  }
  return KrausSet(std::move(ops));
}

json report_to_json(const ChannelReport& r) {
  return {{"completeness_residual", r.completeness_residual},
          {"reconstruction_residual", r.reconstruction_residual},
          {"choi_min_eigenvalue", r.choi_min_eigenvalue},
          {"output_trace_residual", r.output_trace_residual},
          {"output_min_eigenvalue", r.output_min_eigenvalue}};
}

Scenario scenario_from_json(const json& j, double tol) {
  const auto& kind = field(j, "scenario");
  if (kind == "cnot") {
    try {
      return CnotScenario(number(field(j, "r0"), "r0"));
    } catch (const std::domain_error& e) {
      throw InputError(e.what());
    }
  }
  if (kind == "custom") {
    const auto h = matrix_from_json(field(j, "hamiltonian"));
    const auto rho = matrix_from_json(field(j, "rho_ie0"));
    const auto& dims = field(j, "dims");
    if (!dims.is_array() || dims.size() != 2) throw InputError("dims must be [d_i, d_e]");
    const SubsystemDims sub{dimension(dims[0], "d_i"), dimension(dims[1], "d_e")};
    if (h.rows() != sub.joint() || h.cols() != sub.joint()) {
      throw InputError("hamiltonian does not match dims");
    }
    if (hermiticity_residual(h) > tol) throw InputError("hamiltonian is not Hermitian");
    auto validation = validate_density(rho, tol);
    if (!validation.ok()) throw InputError("rho_ie0: " + validation.describe());
    try {
      return CustomScenario{h, CompositeState(std::move(*validation.state), sub)};
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  throw InputError("unknown scenario kind " + kind.dump());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace krauslab
