#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace harnack {

// One named check in a report. Two flavors share the record: residual
// checks pass when |value| <= tolerance, nonnegativity checks pass when
// value >= -tolerance.
struct CheckRecord {
  enum class Kind { residual, nonneg };

  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string paper_anchor;
  Kind kind = Kind::residual;

  static CheckRecord residual(std::string name, double value, double tol, std::string anchor);
  static CheckRecord nonneg(std::string name, double value, double tol, std::string anchor);
};

struct ReportDocument {
  std::string command;
  nlohmann::ordered_json config;  // echo of the resolved run configuration
  std::vector<CheckRecord> checks;

  void add(CheckRecord rec) { checks.push_back(std::move(rec)); }
  int total() const { return static_cast<int>(checks.size()); }
  int passed() const;
  bool all_pass() const { return passed() == total(); }

  // with_timestamp=false gives the form used for byte-level comparison
  // between runs; the timestamp is the only field allowed to differ.
  nlohmann::ordered_json to_json(bool with_timestamp = true) const;
};

void write_json_report(const ReportDocument& doc, const std::string& path);

// Rows of doubles under a header line; numbers are printed in the shortest
// round-trip form so repeated runs produce identical bytes.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace harnack
