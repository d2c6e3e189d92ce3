#pragma once

#include "modspace/grid.hpp"

namespace modspace {

/// 2/3 rule: zeroes every mode with |m| > N/3.
void dealias(const GridSpec& spec, CVector& coeffs);
void dealias(const GridSpec& spec, CMatrix& coeffs);

/// Coefficients of u^n (complex power, repeated pointwise multiplication)
/// followed by one dealiasing pass. Column-wise for space-time samples.
CVector power_coeffs(const GridSpec& spec, const CVector& samples, int n);
CMatrix power_coeffs(const GridSpec& spec, const CMatrix& samples, int n);

}  // namespace modspace
