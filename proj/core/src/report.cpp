#include "remctl/report.hpp"

#include <iomanip>
#include <ostream>

#include "json.hpp"

namespace remctl {

void write_results_csv(std::ostream& out, std::span<const TestResult> results) {
  out << "test, n, statistic, p_value, alpha, pass\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(10);
  for (const auto& r : results) {
    out << r.test_name << ", " << r.n << ", " << r.statistic << ", " << r.p_value << ", "
        << r.alpha << ", " << (r.pass ? "true" : "false") << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_autocorr_csv(std::ostream& out, const AutocorrSeries& series) {
  out << "tau, c\n";
  const auto precision = out.precision();
  out << std::setprecision(10);
  const auto t = static_cast<std::ptrdiff_t>(series.max_lag());
  for (std::ptrdiff_t tau = -t; tau <= t; ++tau) out << tau << ", " << series.at(tau) << '\n';
  out.precision(precision);
}

std::string report_json(const RandReport& report) {
  using nlohmann::json;
  json j;
  j["total_bits"] = report.total_bits;
  j["sequence_bits"] = report.sequence_bits;
  j["pass"] = report.pass;

  json tests = json::array();
  for (const auto& r : report.results) {
    json t{{"test", r.test_name}, {"n", r.n},         {"statistic", r.statistic},
           {"p_value", r.p_value}, {"alpha", r.alpha}, {"pass", r.pass}};
    if (!r.applicable) t["applicable"] = false;
    if (!r.note.empty()) t["note"] = r.note;
    tests.push_back(std::move(t));
  }
  j["tests"] = std::move(tests);

  json props = json::object();
  for (const auto& [name, p] : report.proportions) {
    props[name] = {{"passed", p.passed}, {"total", p.total},   {"proportion", p.proportion},
                   {"lower", p.lower},   {"upper", p.upper},   {"within", p.within}};
  }
  j["proportions"] = std::move(props);

  if (report.balance) {
    j["balance"] = {{"n", report.balance->n},
                    {"ones", report.balance->ones},
                    {"proportion", report.balance->proportion},
                    {"deviation", report.balance->deviation}};
  }
  if (report.run_lengths) {
    json hist = json::object();
    for (const auto& [len, count] : report.run_lengths->histogram) hist[std::to_string(len)] = count;
    json checks = json::array();
    for (const auto& c : report.run_lengths->checks) {
      checks.push_back({{"length", c.length}, {"observed", c.observed}, {"expected", c.expected},
                        {"tolerance", c.tolerance}, {"ok", c.ok}});
    }
    j["run_lengths"] = {{"total_runs", report.run_lengths->total_runs},
                        {"histogram", std::move(hist)},
                        {"checks", std::move(checks)},
                        {"pass", report.run_lengths->pass}};
  }
  if (report.autocorr) {
    j["autocorrelation"] = {{"max_lag", report.autocorr->max_lag()},
                            {"fraction_within_bound", *report.autocorr_fraction}};
  }
  return j.dump(2);
}

}  // namespace remctl
