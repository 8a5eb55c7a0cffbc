#pragma once

#include <array>
#include <cstddef>

namespace tramsim {

template <std::size_t N>
using StateVector = std::array<double, N>;

namespace detail {

template <std::size_t N>
StateVector<N> axpy(const StateVector<N>& y, double h, const StateVector<N>& k) {
  StateVector<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

}  // namespace detail

/// One classical fourth-order Runge-Kutta step of y' = f(t, y).
///
/// `f` is any callable `(double t, const StateVector<N>&) -> StateVector<N>`.
template <std::size_t N, typename Rhs>
StateVector<N> rk4_step(Rhs&& f, double t, const StateVector<N>& y, double dt) {
  const double half = 0.5 * dt;
  const StateVector<N> k1 = f(t, y);
  const StateVector<N> k2 = f(t + half, detail::axpy(y, half, k1));
  const StateVector<N> k3 = f(t + half, detail::axpy(y, half, k2));
  const StateVector<N> k4 = f(t + dt, detail::axpy(y, dt, k3));
  StateVector<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace tramsim
