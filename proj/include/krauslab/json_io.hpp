#pragma once

// JSON encodings:
//   matrix   {"rows": n, "cols": m, "data": [[re, im], ...]}   (row-major)
//   state    {"bloch": {"r":, "theta":, "phi":}} or {"matrix": <matrix>}
//   kraus    {"d_in": n, "d_out": m, "ops": [<matrix>, ...]}
//   scenario {"scenario": "cnot", "r0": x} or
//            {"scenario": "custom", "hamiltonian": <matrix>,
//             "rho_ie0": <matrix>, "dims": [d_i, d_e]}

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "krauslab/kraus.hpp"
#include "krauslab/linalg.hpp"
#include "krauslab/open_dynamics.hpp"
#include "krauslab/quantum_state.hpp"

namespace krauslab {

/// Malformed or semantically invalid input document.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json bloch_to_json(const BlochVector& b);

/// Decodes either state form into a raw matrix. Validation is left to the
/// caller so the violation report can be surfaced.
ComplexMatrix state_matrix_from_json(const json& j, double tol = kDefaultTol);

json kraus_to_json(const KrausSet& k);
KrausSet kraus_from_json(const json& j);

json report_to_json(const ChannelReport& r);

struct CustomScenario {
  ComplexMatrix hamiltonian;
  CompositeState initial;
};

using Scenario = std::variant<CnotScenario, CustomScenario>;

/// Throws InputError on unknown scenario kinds or invalid states.
Scenario scenario_from_json(const json& j, double tol = kDefaultTol);

/// Reads and parses a JSON file; every failure surfaces as InputError.
json read_json_file(const std::filesystem::path& path);

}  // namespace krauslab
