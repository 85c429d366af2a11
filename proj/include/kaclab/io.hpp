#pragma once

// CSV and JSON serialization plus file digests.

#include <string>

#include "json.hpp"
#include "kaclab/coupling.hpp"
#include "kaclab/induced_map.hpp"
#include "kaclab/randmat.hpp"
#include "kaclab/stats.hpp"
#include "kaclab/walk.hpp"

namespace kaclab {

inline constexpr int kSchemaVersion = 1;

/// Decimal with 17 significant digits; parses back to the same double.
std::string fmt_double(double v);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Writes bytes exactly; throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Header "t,dist_main,dist_scaffold".
std::string trace_csv(const CouplingTrace& trace);
/// Row-major CSV without header.
std::string matrix_csv(const Matrix& m);
std::string update_csv(const UpdateSequence& seq);

nlohmann::json matrix_json(const Matrix& m);  ///< row-major nested arrays
Matrix matrix_from_json(const nlohmann::json& j);

/// {schema_version, n, base (row-major), T, S, I, eta, c}.
nlohmann::json spec_to_json(const InducedMapSpec& spec);
InducedMapSpec spec_from_json(const nlohmann::json& j);
std::string spec_hash(const InducedMapSpec& spec);

/// Matrix envelope {schema_version, n, N, seed, spec_hash, matrix}.
nlohmann::json jacobian_envelope(const Matrix& d, int n, std::uint64_t seed, const std::string& spec_digest);

nlohmann::json to_json(const QuantileEstimate& q);
nlohmann::json to_json(const MixingBoundReport& r);
nlohmann::json to_json(const ScheduleTimeStats& s);
nlohmann::json to_json(const PhiResult& p);
nlohmann::json to_json(const DriftTable& t);

/// Serializes with two-space indentation and a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace kaclab
