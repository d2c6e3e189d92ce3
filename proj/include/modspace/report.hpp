#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "modspace/types.hpp"

namespace modspace {

/// One (input, scale) evaluation of an inequality LHS <= C * RHS.
struct ReportRow {
  std::string input_id;
  int j = 0;
  long k = 0;
  double lambda = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual.
  double residual = 0.0;
  Index points = 0;
};

/// Needs at least two distinct abscissae.
SlopeFit fit_slope(const RVector& x, const RVector& y);

struct EstimateReport {
  std::string estimate_id;
  std::vector<ReportRow> rows;
  double max_ratio = 0.0;
  bool has_fit = false;
  SlopeFit fit;
  double predicted_slope = 0.0;
  /// Verdict of the checks the producing operation asserts.
  bool passed = true;
  std::vector<std::string> notes;

  void add(ReportRow row);
  void note(std::string text) { notes.push_back(std::move(text)); }
};

/// Finite and strictly positive ratios only; zero-RHS rows are rejected.
bool ratios_finite(const EstimateReport& report);

/// Relative change |b - a| / |a| of two max ratios.
double relative_change(double a, double b);

/// Header: estimate_id,input_id,j,k,lambda,lhs,rhs,ratio,config_hash
void write_csv_header(std::ostream& os);
void write_csv_rows(std::ostream& os, const EstimateReport& report, std::uint64_t config_hash);

}  // namespace modspace
