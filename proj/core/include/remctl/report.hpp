#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "remctl/randtest.hpp"

namespace remctl {

/// `test, n, statistic, p_value, alpha, pass` with a header row.
void write_results_csv(std::ostream& out, std::span<const TestResult> results);

/// `tau, c` for tau in [-T, T].
void write_autocorr_csv(std::ostream& out, const AutocorrSeries& series);

/// Structured summary of a whole audit (the autocorrelation series itself is
/// left to write_autocorr_csv).
std::string report_json(const RandReport& report);

}  // namespace remctl
