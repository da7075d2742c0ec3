#include "seqspace/report.hpp"

#include <filesystem>
#include <fstream>

namespace seqspace {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LemmaReport LemmaReport::of(std::string id, const Value& lhs, const Value& rhs, double tol,
                            std::string digest, std::string note) {
  LemmaReport r;
  r.id = std::move(id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tol;
  r.margin = rhs - lhs;
  r.holds = leq(lhs, rhs, tol);
  r.inputs_digest = std::move(digest);
  r.note = std::move(note);
  return r;
}

namespace {
nlohmann::json value_json(const Value& v) {
  nlohmann::json j;
  j["approx"] = v.approx();
  if (v.is_rational()) {
    j["exact"] = rational_to_string(v.rational());
  } else if (v.is_enclosure()) {
    j["lo"] = v.lower();
    j["hi"] = v.upper();
  }
  return j;
}
}  // namespace

nlohmann::json LemmaReport::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["inputs_digest"] = inputs_digest;
  j["lhs"] = value_json(lhs);
  j["rhs"] = value_json(rhs);
  j["holds"] = holds;
  j["tolerance"] = tolerance;
  j["margin"] = value_json(margin);
  j["applicable"] = applicable;
  j["note"] = note;
  return j;
}

nlohmann::json CheckRecord::to_json() const {
  nlohmann::json j = report.to_json();
  j["check_id"] = check_id;
  j["seed"] = seed;
  return j;
}

bool Report::all_hold() const {
  for (const auto& r : records)
    if (r.report.applicable && !r.report.holds) return false;
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["version"] = version.empty() ? library_version() : version;
  j["command"] = command;
  j["config"] = config_echo;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  j["records"] = recs;
  j["all_hold"] = all_hold();
  if (!extra.is_null()) j["extra"] = extra;
  if (wall_seconds) j["wall_seconds"] = *wall_seconds;
  return j;
}

namespace {
std::string csv_quote(const std::string& s) {
  bool need = s.find_first_of(",\"\n") != std::string::npos;
  if (!need) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}
}  // namespace

std::string Report::to_csv() const {
  std::string out =
      "check_id,id,lhs,rhs,holds,tolerance,margin,applicable,seed,inputs_digest,note\n";
  for (const auto& r : records) {
    out += csv_quote(r.check_id) + ",";
    out += csv_quote(r.report.id) + ",";
    out += format_double(r.report.lhs.approx()) + ",";
    out += format_double(r.report.rhs.approx()) + ",";
    out += (r.report.holds ? "true," : "false,");
    out += format_double(r.report.tolerance) + ",";
    out += format_double(r.report.margin.approx()) + ",";
    out += (r.report.applicable ? "true," : "false,");
    out += std::to_string(r.seed) + ",";
    out += csv_quote(r.report.inputs_digest) + ",";
    out += csv_quote(r.report.note) + "\n";
  }
  return out;
}

void Report::write(const std::string& dir, const std::string& stem) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream js(dir + "/" + stem + ".json");
    if (!js) throw std::runtime_error("cannot write report JSON in " + dir);
    js << to_json().dump(2) << "\n";
  }
  {
    std::ofstream cs(dir + "/" + stem + ".csv");
    if (!cs) throw std::runtime_error("cannot write report CSV in " + dir);
    cs << to_csv();
  }
}

std::string library_version() { return "0.1.0"; }

}  // namespace seqspace
