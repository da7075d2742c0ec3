#pragma once
// Check records and report emission. Every verification routine returns a
// LemmaReport; suites collect them into a Report that serializes to JSON and
// CSV with identical record content.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqspace/scalar.hpp"

#include <json.hpp>

namespace seqspace {

// One checked inequality: holds <=> lhs <= rhs + tolerance. `applicable`
// is false when a side condition failed to verify, in which case `holds`
// is not asserted by suites.
struct LemmaReport {
  std::string id;              // e.g. "eq1", "lemma_3_3_upper", "lemma_4_5"
  std::string inputs_digest;   // short fingerprint of the inputs
  Value lhs;
  Value rhs;
  bool holds = false;
  double tolerance = 0.0;
  Value margin;                // rhs - lhs
  bool applicable = true;
  std::string note;            // side-condition / scaling stamps

  static LemmaReport of(std::string id, const Value& lhs, const Value& rhs, double tol,
                        std::string digest = "", std::string note = "");
  nlohmann::json to_json() const;
};

// Fingerprint helper (FNV-1a, hex) used for inputs_digest and registry keys.
std::string fnv1a_hex(const std::string& data);

struct CheckRecord {
  std::string check_id;   // unique within a report
  LemmaReport report;
  std::uint64_t seed = 0;
  nlohmann::json to_json() const;
};

struct Report {
  nlohmann::json config_echo;
  std::string command;
  std::vector<CheckRecord> records;
  nlohmann::json extra;               // free-form experiment payloads
  std::optional<double> wall_seconds; // omitted in exact mode (determinism)
  std::string version;

  bool all_hold() const;  // every applicable record holds
  nlohmann::json to_json() const;
  std::string to_csv() const;  // fixed column order, RFC 4180 quoting
  // Writes <dir>/<stem>.json and <dir>/<stem>.csv.
  void write(const std::string& dir, const std::string& stem) const;
};

std::string library_version();

}  // namespace seqspace
