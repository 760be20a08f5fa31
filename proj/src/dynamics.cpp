#include "qdepol/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "qdepol/errors.hpp"

namespace qdepol {

namespace {

Matrix2c depolarizing_generator(Real gamma, const Matrix2c& rho) {
  Matrix2c mixed = Matrix2c::Zero();
  for (int i = 1; i <= 3; ++i) mixed += pauli(i) * rho * pauli(i);
  return -0.5 * gamma * (rho - mixed / 3.0);
}

Matrix2c symmetrized(const Matrix2c& m) { return 0.5 * (m + m.adjoint()); }

long step_count(Real t_final, Real step) {
  const long n = std::lround(t_final / step);
  if (n < 1) throw StabilityError("horizon shorter than one step");
  return n;
}

}  // namespace

EvolutionTrace lindblad_evolve(Real gamma, const DensityMatrix& rho0,
                               Real t_final, Real step) {
  if (!(gamma > 0)) throw ContractError("rate must be positive");
  if (rho0.dim() != 2) throw DimensionError("lindblad_evolve expects a qubit");
  if (step * gamma > 0.1) {
    throw StabilityError("step too large: h * gamma > 0.1");
  }
  if (step > t_final / 100.0) {
    throw StabilityError("step too large: need h <= T / 100");
  }

  const long n = step_count(t_final, step);
  EvolutionTrace trace;
  trace.method = TraceMethod::Lindblad;
  trace.step = step;
  trace.times.reserve(n + 1);
  trace.states.reserve(n + 1);

  Matrix2c rho = rho0.matrix();
  trace.times.push_back(0.0);
  trace.states.push_back(rho0);

  for (long k = 0; k < n; ++k) {
    const Matrix2c k1 = depolarizing_generator(gamma, rho);
    const Matrix2c k2 = depolarizing_generator(gamma, rho + 0.5 * step * k1);
    const Matrix2c k3 = depolarizing_generator(gamma, rho + 0.5 * step * k2);
    const Matrix2c k4 = depolarizing_generator(gamma, rho + step * k3);
    rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = symmetrized(rho);
    if (std::abs(rho.trace().real() - 1.0) > 1e-10) {
      throw StabilityError("trace drift exceeded 1e-10 at t = " +
                           std::to_string((k + 1) * step));
    }
    trace.times.push_back(static_cast<Real>(k + 1) * step);
    trace.states.push_back(DensityMatrix::trusted(rho));
  }
  return trace;
}

EvolutionTrace memory_kernel_evolve(Real kappa, const DensityMatrix& rho0,
                                    Real t_final, Real step,
                                    long history_window) {
  if (!(kappa > 0)) throw ContractError("kernel constant must be positive");
  if (rho0.dim() != 2) {
    throw DimensionError("memory_kernel_evolve expects a qubit");
  }
  if (step > 0.01 / std::sqrt(kappa) || step > t_final / 100.0) {
    throw StabilityError("step too large: need h <= min(0.01/sqrt(kappa), T/100)");
  }

  const long n = step_count(t_final, step);
  EvolutionTrace trace;
  trace.method = TraceMethod::MemoryKernel;
  trace.step = step;
  trace.times.reserve(n + 1);
  trace.states.reserve(n + 1);

  auto flip_difference = [](const Matrix2c& rho) -> Matrix2c {
    return rho - pauli(1) * rho * pauli(1);
  };

  std::vector<Matrix2c> history;  // D(t_k) = rho(t_k) - sx rho(t_k) sx
  history.reserve(n + 1);

  Matrix2c rho = rho0.matrix();
  history.push_back(flip_difference(rho));
  trace.times.push_back(0.0);
  trace.states.push_back(rho0);

  // Trapezoid over the stored history, optionally truncated to a window.
  auto history_integral = [&](long upto) -> Matrix2c {
    const long first = history_window < 0
                           ? 0
                           : std::max<long>(0, upto - history_window);
    Matrix2c acc = Matrix2c::Zero();
    for (long j = first; j < upto; ++j) {
      acc += 0.5 * step * (history[j] + history[j + 1]);
    }
    return acc;
  };

  for (long k = 0; k < n; ++k) {
    const Matrix2c integral_n = history_integral(k);
    const Matrix2c rate_n = -kappa * integral_n;

    const Matrix2c predicted = rho + step * rate_n;
    const Matrix2c integral_pred =
        integral_n + 0.5 * step * (history[k] + flip_difference(predicted));
    const Matrix2c rate_pred = -kappa * integral_pred;

    rho += 0.5 * step * (rate_n + rate_pred);
    rho = symmetrized(rho);
    history.push_back(flip_difference(rho));

    if (std::abs(rho.trace().real() - 1.0) > 1e-6) {
      throw StabilityError("memory-kernel trace drift exceeded 1e-6");
    }
    trace.times.push_back(static_cast<Real>(k + 1) * step);
    trace.states.push_back(DensityMatrix::trusted(rho));
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  out << "t";
  const int dim = trace.states.empty() ? 2 : trace.states.front().dim();
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      out << ",rho" << i << j << "_re,rho" << i << j << "_im";
    }
  }
  if (dim == 2) out << ",ax,ay,az";
  out << "\n";

  char buf[40];
  auto put = [&](Real x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    put(trace.times[k]);
    const auto& m = trace.states[k].matrix();
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        out << ",";
        put(m(i, j).real());
        out << ",";
        put(m(i, j).imag());
      }
    }
    if (dim == 2) {
      const Vector3 a = density_to_bloch(trace.states[k]).vec();
      for (int i = 0; i < 3; ++i) {
        out << ",";
        put(a[i]);
      }
    }
    out << "\n";
  }
}

}  // namespace qdepol
