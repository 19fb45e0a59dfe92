#ifndef CONVMPT_MODEL_IO_HPP
#define CONVMPT_MODEL_IO_HPP

#include <string>

#include "convmpt/dual_solver.hpp"
#include "convmpt/trainer.hpp"

namespace convmpt {

/// Versioned JSON form of a trained model (format_version 1): filters as a
/// row-major array with declared shape, activation tag, u, theta, config
/// echo and per-iteration diagnostics. Doubles use shortest round-trip
/// decimal form, so the text is stable across runs and loads back bit-exact.
std::string model_to_json(const Model& model);

void save_model(const Model& model, const std::string& path);

/// Parses and validates shapes; throws DataError on malformed input.
Model load_model_from_json(const std::string& text);
Model load_model(const std::string& path);

/// Diagnostic JSON for a KKT report.
std::string kkt_to_json(const KktReport& report);

/// Diagnostic JSON for a filter update trace.
std::string filter_trace_to_json(const std::vector<FilterStep>& trace);

}  // namespace convmpt

#endif  // CONVMPT_MODEL_IO_HPP
