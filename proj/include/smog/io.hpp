#pragma once

#include <string>

#include "smog/common.hpp"
#include "smog/estimator.hpp"
#include "smog/model.hpp"

namespace smog {

enum class SampleFormat { kCsv, kBinary, kAuto };

/// Model JSON: {"d", "k", "weights", "means" (list of k columns), "variances"}.
MixtureModel load_model_json(const std::string& path);
void save_model_json(const MixtureModel& m, const std::string& path);

/// Sample files: CSV with header x0,...,x{d-1}, or little-endian float64
/// binary with a 16-byte header (magic "SMOG", u32 n, u32 d, u32 reserved).
/// kAuto picks binary above 100000 rows.
void save_samples(const Matrix& data, const std::string& path,
                  SampleFormat format);
Matrix load_samples(const std::string& path);  // sniffs the magic bytes

void save_estimate_json(const EstimateReport& rep, const std::string& path);
EstimateReport load_estimate_json(const std::string& path);
std::string estimate_to_json(const EstimateReport& rep);

std::string score_to_json(const MatchScore& score);

}  // namespace smog
