#include "modspace/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace modspace {

SlopeFit fit_slope(const RVector& x, const RVector& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope fit needs matching samples, at least two");
  Eigen::MatrixXd a(x.size(), 2);
  a.col(0) = x;
  a.col(1).setOnes();
  if ((x.array() - x.mean()).abs().maxCoeff() == 0.0) throw InvalidArgument("slope fit needs distinct abscissae");
  const Eigen::Vector2d beta = a.colPivHouseholderQr().solve(y);
  SlopeFit fit;
  fit.slope = beta[0];
  fit.intercept = beta[1];
  fit.residual = std::sqrt((a * beta - y).squaredNorm() / static_cast<double>(x.size()));
  fit.points = x.size();
  return fit;
}

void EstimateReport::add(ReportRow row) {
  if (rows.empty() || row.ratio > max_ratio) max_ratio = row.ratio;
  rows.push_back(std::move(row));
}

bool ratios_finite(const EstimateReport& report) {
  for (const auto& r : report.rows)
    if (!std::isfinite(r.ratio) || !(r.rhs > 0.0) || r.ratio < 0.0) return false;
  return !report.rows.empty();
}

double relative_change(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(b - a) / std::abs(a);
}

void write_csv_header(std::ostream& os) { os << "estimate_id,input_id,j,k,lambda,lhs,rhs,ratio,config_hash\n"; }

void write_csv_rows(std::ostream& os, const EstimateReport& report, std::uint64_t config_hash) {
  std::ios saved(nullptr);
  saved.copyfmt(os);
  os << std::setprecision(17);
  for (const auto& r : report.rows) {
    os << report.estimate_id << ',' << r.input_id << ',' << r.j << ',' << r.k << ',' << r.lambda << ',' << r.lhs << ','
       << r.rhs << ',' << r.ratio << ',' << std::hex << std::setw(16) << std::setfill('0') << config_hash << std::dec
       << std::setfill(' ') << '\n';
  }
  os.copyfmt(saved);
}

}  // namespace modspace
