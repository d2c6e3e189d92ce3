#pragma once

#include <string>

#include "modspace/grid.hpp"

namespace modspace {

enum class SymbolKind {
  fourth_order_schrodinger,  // W(t) = F^{-1} e^{i t xi^4} F
  airy,                      // free flow of u_t + u_xxx = 0: F^{-1} e^{i t xi^3} F
};

struct SymbolSpec {
  SymbolKind kind = SymbolKind::fourth_order_schrodinger;

  /// phi(xi) with multiplier e^{i t phi(xi)}.
  double dispersion(double xi) const;
  /// e^{i t phi(xi)}; the phase is reduced modulo 2 pi in extended precision.
  Complex multiplier(double t, double xi) const;
};

std::string to_string(SymbolKind kind);
SymbolKind symbol_from_string(const std::string& name);

/// W(t) u0.
GridFunction propagate(const GridFunction& u0, double t, SymbolSpec symbol);

/// Multipliers e^{i t_n phi(xi_m)} for one (grid, time grid, symbol); column n
/// holds time t_n. Shared by the free flow and the Duhamel quadrature.
class FlowTable {
 public:
  FlowTable(const GridSpec& spec, const TimeGrid& time, SymbolSpec symbol);

  const GridSpec& spec() const { return spec_; }
  const TimeGrid& time() const { return time_; }
  SymbolSpec symbol() const { return symbol_; }
  const CMatrix& phases() const { return phases_; }

  /// Coefficients of t_n -> W(t_n) u0.
  CMatrix free_coeffs(const CVector& u0) const;
  /// Coefficients of t_n -> int_0^{t_n} W(t_n - s) f(s) ds, composite
  /// trapezoid in the interaction picture: W(t_n) sum_m w_m W(-t_m) f(t_m).
  CMatrix duhamel_coeffs(const CMatrix& f) const;

 private:
  GridSpec spec_;
  TimeGrid time_;
  SymbolSpec symbol_;
  CMatrix phases_;
};

/// t_n -> W(t_n) u0 on the given time grid.
SpaceTimeField propagate(const GridFunction& u0, const TimeGrid& time, SymbolSpec symbol);

/// The Duhamel integral A f (t) = int_0^t W(t - s) f(s) ds at every frame.
SpaceTimeField duhamel(const SpaceTimeField& f, SymbolSpec symbol);

/// Spectral d/dx of every frame.
SpaceTimeField derivative(const SpaceTimeField& u);

}  // namespace modspace
