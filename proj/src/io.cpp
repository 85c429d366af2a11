#include "kaclab/io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "kaclab/errors.hpp"

namespace kaclab {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string trace_csv(const CouplingTrace& trace) {
  std::string out = "t,dist_main,dist_scaffold\n";
  const std::size_t len = std::max(trace.dist_main.size(), trace.dist_scaffold.size());
  for (std::size_t t = 0; t < len; ++t) {
    out += std::to_string(t);
    out += ',';
    out += t < trace.dist_main.size() ? fmt_double(trace.dist_main[t]) : "";
    out += ',';
    out += t < trace.dist_scaffold.size() ? fmt_double(trace.dist_scaffold[t]) : "";
    out += '\n';
  }
  return out;
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += fmt_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string update_csv(const UpdateSequence& seq) {
  std::ostringstream os;
  write_update_csv(os, seq);
  return os.str();
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  require(j.is_array(), "matrix JSON must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    require(static_cast<Eigen::Index>(j[i].size()) == cols, "matrix JSON rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

nlohmann::json spec_to_json(const InducedMapSpec& spec) {
  return nlohmann::json{{"schema_version", kSchemaVersion},
                        {"n", spec.n()},
                        {"base", matrix_json(spec.base)},
                        {"T", spec.horizon},
                        {"S", spec.marked},
                        {"I", spec.planes},
                        {"eta", spec.eta},
                        {"c", spec.half_width}};
}

InducedMapSpec spec_from_json(const nlohmann::json& j) {
  require(j.value("schema_version", -1) == kSchemaVersion, "unsupported spec schema_version");
  InducedMapSpec s;
  s.base = matrix_from_json(j.at("base"));
  s.horizon = j.at("T").get<int>();
  s.marked = j.at("S").get<std::vector<int>>();
  s.planes = j.at("I").get<std::vector<int>>();
  s.eta = j.at("eta").get<std::vector<double>>();
  s.half_width = j.at("c").get<double>();
  validate(s);
  return s;
}

std::string spec_hash(const InducedMapSpec& spec) { return sha256_hex(spec_to_json(spec).dump()); }

nlohmann::json jacobian_envelope(const Matrix& d, int n, std::uint64_t seed, const std::string& spec_digest) {
  return nlohmann::json{{"schema_version", kSchemaVersion},
                        {"n", n},
                        {"N", d.rows()},
                        {"seed", seed},
                        {"spec_hash", spec_digest},
                        {"matrix", matrix_json(d)}};
}

nlohmann::json to_json(const QuantileEstimate& q) {
  return nlohmann::json{{"level", q.level},   {"point", q.point},           {"lower", q.lower},
                        {"upper", q.upper},   {"confidence", q.confidence}, {"samples", q.samples},
                        {"seed", q.seed}};
}

nlohmann::json to_json(const MixingBoundReport& r) {
  return nlohmann::json{{"n", r.n},
                        {"phi", r.phi},
                        {"lower_bound_steps", r.lower_bound_steps},
                        {"headline_upper_steps", r.headline_upper_steps},
                        {"C", r.C},
                        {"C_is_rigorous", false},
                        {"phi_based_upper", r.phi_based_upper},
                        {"log_convention", r.log_convention},
                        {"Q", r.Q},
                        {"intermediate_upper", r.intermediate_upper},
                        {"notes", r.notes}};
}

nlohmann::json to_json(const ScheduleTimeStats& s) {
  nlohmann::json j{{"flavor", to_string(s.flavor)}, {"N", s.plane_total}, {"gap", s.gap},
                   {"trials", s.trials},           {"mean", s.mean},      {"variance", s.variance},
                   {"std_error", s.std_error}};
  nlohmann::json g = nlohmann::json::array();
  for (const CdfPoint& p : s.gumbel) g.push_back({{"c", p.c}, {"empirical", p.empirical}, {"reference", p.reference}});
  j["gumbel_cdf"] = g;
  return j;
}

nlohmann::json to_json(const PhiResult& p) {
  return nlohmann::json{{"flavor", to_string(p.flavor)},
                        {"n", p.n},
                        {"Q", p.Q},
                        {"uncapped", to_json(p.uncapped)},
                        {"cap", p.cap},
                        {"capped", p.capped},
                        {"min_sigma1", p.min_sigma1},
                        {"sigma1_floor_log10", p.floor_log10},
                        {"below_floor", p.below_floor}};
}

nlohmann::json to_json(const DriftTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const DriftRow& r : t.rows)
    rows.push_back({{"Q", r.Q}, {"ks_entry_1_2", r.ks_first_pair}, {"ks_entry_1_N", r.ks_last_pair}});
  return nlohmann::json{{"n", t.n},
                        {"samples", t.samples},
                        {"rows", rows},
                        {"control_ks", t.control_ks},
                        {"control_critical95", t.control_critical95}};
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace kaclab
