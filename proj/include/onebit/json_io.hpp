#pragma once

#include "onebit/estimate.hpp"
#include "onebit/measure.hpp"
#include "onebit/signal_sets.hpp"

#include <json.hpp>

#include <filesystem>

// JSON descriptors for the value types, e.g.
//   {"variant": "eff_sparse", "s": 4, "n": 128}
//   {"type": "bit_flip", "p": 0.75}
// Malformed descriptors raise InvalidArgument.

namespace onebit {

nlohmann::json signal_set_to_json(SignalSet const &set);
SignalSet signal_set_from_json(nlohmann::json const &j);

nlohmann::json quantizer_to_json(Quantizer const &q);
Quantizer quantizer_from_json(nlohmann::json const &j);

nlohmann::json signal_kind_to_json(SignalKind const &kind);
SignalKind signal_kind_from_json(nlohmann::json const &j);

nlohmann::json solver_config_to_json(SolverConfig const &cfg);
SolverConfig solver_config_from_json(nlohmann::json const &j);

// {x_hat, objective, iterations_used}
nlohmann::json estimate_to_json(Estimate const &est);
void write_trace_csv(Estimate const &est, std::filesystem::path const &path);

nlohmann::json vector_to_json(Vector const &v);
Vector vector_from_json(nlohmann::json const &j);
nlohmann::json matrix_to_json(Matrix const &m);
Matrix matrix_from_json(nlohmann::json const &j);

nlohmann::json read_json_file(std::filesystem::path const &path);
void write_json_file(nlohmann::json const &j, std::filesystem::path const &path);

} // namespace onebit
