#pragma once

#include <iosfwd>
#include <vector>

#include "qdepol/linalg.hpp"
#include "qdepol/types.hpp"

namespace qdepol {

enum class TraceMethod { ExactLambda, Lindblad, MemoryKernel };

/// Fixed-step trajectory; times are k * step starting at 0.
struct EvolutionTrace {
  std::vector<Real> times;
  std::vector<DensityMatrix> states;
  TraceMethod method = TraceMethod::ExactLambda;
  Real step = 0;
};

/// Classic RK4 on the isotropic depolarizing generator
///   d rho / dt = -(gamma/2) [rho - (sx rho sx + sy rho sy + sz rho sz)/3],
/// whose exact solution contracts every Bloch component by e^{-2 gamma t / 3}.
EvolutionTrace lindblad_evolve(Real gamma, const DensityMatrix& rho0,
                               Real t_final, Real step);

/// Integro-differential equation with a flat memory kernel on the x axis,
///   d rho / dt = -kappa  int_0^t ds [rho(s) - sx rho(s) sx],
/// integrated by a 2nd-order predictor-corrector with a trapezoid history
/// integral. `history_window` < 0 keeps the full history; a small window
/// truncates the integral to the last that many steps (used to demonstrate
/// that the dynamics genuinely depends on the past).
EvolutionTrace memory_kernel_evolve(Real kappa, const DensityMatrix& rho0,
                                    Real t_final, Real step,
                                    long history_window = -1);

/// CSV columns: t, re/im of all entries, then the Bloch components.
void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);

}  // namespace qdepol
