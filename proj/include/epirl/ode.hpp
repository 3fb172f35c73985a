#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "epirl/params.hpp"

namespace epirl {

/// Continuous SIR state; compartments are real-valued counts, t in days.
struct OdeState {
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;
    double t = 0.0;

    double total() const { return s + i + r; }
    bool operator==(const OdeState&) const = default;
};

struct SirDerivative {
    double ds = 0.0;
    double di = 0.0;
    double dr = 0.0;
};

inline OdeState ode_init(const EpidemicParams& params) {
    params.validate();
    return OdeState{static_cast<double>(params.population - params.initial_infected),
                    static_cast<double>(params.initial_infected), 0.0, 0.0};
}

/// Right-hand side of the SIR system:
///   ds = -beta*s*i/N,  di = beta*s*i/N - gamma*i,  dr = gamma*i.
inline SirDerivative ode_derivative(const OdeState& state, const EpidemicParams& params) {
    const double n = static_cast<double>(params.population);
    const double force = params.beta * state.s * state.i / n;
    const double recovery = params.gamma * state.i;
    return SirDerivative{-force, force - recovery, recovery};
}

namespace detail {

inline void clamp_nonnegative(OdeState& st) {
    // Tiny negative drift is clamped; the removed mass goes to r so the
    // population sum is preserved.
    double deficit = 0.0;
    if (st.s < 0.0) { deficit += st.s; st.s = 0.0; }
    if (st.i < 0.0) { deficit += st.i; st.i = 0.0; }
    st.r += deficit;
    if (st.r < 0.0) st.r = 0.0;
}

} // namespace detail

/// Advance the state by dt days using classic fixed-step RK4. The interval is
/// divided into round(dt/h) equal substeps (default substep 0.1 day).
inline OdeState ode_step(OdeState state, const EpidemicParams& params, double dt,
                         double substep = 0.1) {
    if (!(dt > 0.0)) throw InvalidParams("ode_step: dt must be > 0");
    if (!(substep > 0.0)) throw InvalidParams("ode_step: substep must be > 0");
    const auto nsub = std::max<std::int64_t>(1, std::llround(dt / substep));
    const double h = dt / static_cast<double>(nsub);

    for (std::int64_t k = 0; k < nsub; ++k) {
        const SirDerivative k1 = ode_derivative(state, params);
        const OdeState s2{state.s + 0.5 * h * k1.ds, state.i + 0.5 * h * k1.di,
                          state.r + 0.5 * h * k1.dr, state.t};
        const SirDerivative k2 = ode_derivative(s2, params);
        const OdeState s3{state.s + 0.5 * h * k2.ds, state.i + 0.5 * h * k2.di,
                          state.r + 0.5 * h * k2.dr, state.t};
        const SirDerivative k3 = ode_derivative(s3, params);
        const OdeState s4{state.s + h * k3.ds, state.i + h * k3.di, state.r + h * k3.dr,
                          state.t};
        const SirDerivative k4 = ode_derivative(s4, params);

        state.s += h / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
        state.i += h / 6.0 * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di);
        state.r += h / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
        detail::clamp_nonnegative(state);
    }
    state.t += dt;
    return state;
}

/// Asymptotic outbreak fraction R(inf)/N: the largest root of
/// z = 1 - s0*exp(-R0*z), found by fixed-point iteration from z = 1.
inline double final_size(const EpidemicParams& params) {
    params.validate();
    const double s0 = static_cast<double>(params.population - params.initial_infected) /
                      static_cast<double>(params.population);
    const double r0 = params.r0();
    double z = 1.0;
    for (int iter = 0; iter < 1000000; ++iter) {
        const double next = 1.0 - s0 * std::exp(-r0 * z);
        if (std::fabs(next - z) <= 1e-10) {
            z = next;
            break;
        }
        z = next;
    }
    return std::clamp(z, 0.0, 1.0);
}

} // namespace epirl
