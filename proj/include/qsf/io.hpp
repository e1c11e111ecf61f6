#ifndef QSF_IO_HPP
#define QSF_IO_HPP

#include "qsf/measurement.hpp"
#include "qsf/types.hpp"

#include <json.hpp>
#include <string>

namespace qsf {

// Text schema: operators as {"dim": n, "entries": [[re, im], ...]}
// (row-major), states as {"dim": n, "amplitudes": [[re, im], ...]}.
// Instruments carry outcome labels and measure weights.

nlohmann::json to_json(const Operator& op);
nlohmann::json to_json(const StateVector& psi);
nlohmann::json to_json(const Instrument& inst);

Operator operator_from_json(const nlohmann::json& j);
StateVector state_from_json(const nlohmann::json& j);
Instrument instrument_from_json(const nlohmann::json& j);

}  // namespace qsf

#endif
