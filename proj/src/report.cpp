#include "harnack/report.hpp"

#include "harnack/acvt.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace harnack {

CheckRecord CheckRecord::residual(std::string name, double value, double tol, std::string anchor) {
  CheckRecord r;
  r.name = std::move(name);
  r.value = value;
  r.tolerance = tol;
  r.pass = std::isfinite(value) && std::abs(value) <= tol;
  r.paper_anchor = std::move(anchor);
  r.kind = Kind::residual;
  return r;
}

CheckRecord CheckRecord::nonneg(std::string name, double value, double tol, std::string anchor) {
  CheckRecord r;
  r.name = std::move(name);
  r.value = value;
  r.tolerance = tol;
  r.pass = std::isfinite(value) && value >= -tol;
  r.paper_anchor = std::move(anchor);
  r.kind = Kind::nonneg;
  return r;
}

int ReportDocument::passed() const {
  int k = 0;
  for (const CheckRecord& c : checks)
    if (c.pass) ++k;
  return k;
}

nlohmann::ordered_json ReportDocument::to_json(bool with_timestamp) const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config"] = config.is_null() ? nlohmann::ordered_json::object() : config;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CheckRecord& c : checks) {
    nlohmann::ordered_json rec;
    rec["name"] = c.name;
    rec["value"] = c.value;
    rec["tolerance"] = c.tolerance;
    rec["pass"] = c.pass;
    rec["paper_anchor"] = c.paper_anchor;
    arr.push_back(std::move(rec));
  }
  j["checks"] = std::move(arr);
  j["summary"] = {{"total", total()}, {"passed", passed()}};
  if (with_timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["generated_at"] = buf;
  }
  return j;
}

void write_json_report(const ReportDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << doc.to_json().dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const std::vector<double>& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("csv row width does not match header");
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << shortest_double(row[i]);
    out << "\n";
  }
}

}  // namespace harnack
