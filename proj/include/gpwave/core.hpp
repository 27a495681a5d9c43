#pragma once

// Physical parameters and time-dependent trap-frequency schedules shared by
// every other component. All types here are immutable values after
// construction and safe to share across threads.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gpwave {

/// Thrown when an integration produces a non-finite state or the packet
/// width collapses below its floor. Carries the time of the failure.
struct NumericalFailure : std::runtime_error {
    NumericalFailure(const std::string& what, double t_fail)
        : std::runtime_error(what), t(t_fail) {}
    double t;
};

// ---------------------------------------------------------------------------
// Trap schedules: omega^2(t). Parametrized as omega^2 rather than omega so
// inverted traps (omega^2 < 0) stay expressible without imaginary frequencies.
// ---------------------------------------------------------------------------

struct ConstantTrap {
    double omega2 = 1.0;
};

/// Piecewise-constant omega^2: values[i] holds on [breakpoints[i-1], breakpoints[i]),
/// with values.front() before the first breakpoint and values.back() from the
/// last breakpoint on. Requires values.size() == breakpoints.size() + 1.
struct PiecewiseConstantTrap {
    std::vector<double> breakpoints;  // strictly ascending, all > 0
    std::vector<double> values;       // one per interval
};

/// omega^2(t) = omega0_sq * (1 + epsilon * sin(big_omega * t))
struct ModulatedTrap {
    double omega0_sq = 1.0;
    double epsilon = 0.0;
    double big_omega = 0.0;
};

/// Linear interpolation through (t, omega^2) samples; clamped beyond the ends.
struct TabulatedTrap {
    std::vector<double> t;       // strictly ascending, at least 2 samples
    std::vector<double> omega2;  // same length as t
};

using OmegaSquaredSchedule =
    std::variant<ConstantTrap, PiecewiseConstantTrap, ModulatedTrap, TabulatedTrap>;

/// Evaluate omega^2 at time t. Pure; defined for all finite t >= 0.
inline double omega_squared_at(const OmegaSquaredSchedule& schedule, double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("omega_squared_at: t must be finite and >= 0");
    struct Eval {
        double t;
        double operator()(const ConstantTrap& s) const { return s.omega2; }
        double operator()(const PiecewiseConstantTrap& s) const {
            std::size_t i = 0;
            while (i < s.breakpoints.size() && t >= s.breakpoints[i]) ++i;
            return s.values[i];
        }
        double operator()(const ModulatedTrap& s) const {
            return s.omega0_sq * (1.0 + s.epsilon * std::sin(s.big_omega * t));
        }
        double operator()(const TabulatedTrap& s) const {
            if (t <= s.t.front()) return s.omega2.front();
            if (t >= s.t.back()) return s.omega2.back();
            std::size_t hi = 1;
            while (s.t[hi] <= t) ++hi;  // s.t strictly ascending, t < back
            const double alpha = (t - s.t[hi - 1]) / (s.t[hi] - s.t[hi - 1]);
            return s.omega2[hi - 1] + alpha * (s.omega2[hi] - s.omega2[hi - 1]);
        }
    };
    return std::visit(Eval{t}, schedule);
}

// ---------------------------------------------------------------------------

/// Fixed physical context: mass, hbar, mean-field coupling g (any sign:
/// positive repulsive, negative attractive), and the trap schedule.
struct PhysicsParams {
    double mass = 1.0;
    double hbar = 1.0;
    double g = 0.0;
    OmegaSquaredSchedule trap = ConstantTrap{1.0};

    double omega2(double t) const { return omega_squared_at(trap, t); }
};

namespace detail {

inline void check_schedule(const OmegaSquaredSchedule& schedule,
                           std::vector<std::string>& problems) {
    struct Check {
        std::vector<std::string>& problems;
        void operator()(const ConstantTrap& s) const {
            if (!std::isfinite(s.omega2))
                problems.push_back("trap.omega2: must be finite");
        }
        void operator()(const PiecewiseConstantTrap& s) const {
            if (s.values.size() != s.breakpoints.size() + 1)
                problems.push_back("trap.values: need exactly one value per interval "
                                   "(breakpoints + 1)");
            for (std::size_t i = 0; i + 1 < s.breakpoints.size(); ++i)
                if (!(s.breakpoints[i] < s.breakpoints[i + 1])) {
                    problems.push_back("trap.breakpoints: must be strictly ascending");
                    break;
                }
            for (double b : s.breakpoints)
                if (!std::isfinite(b) || b <= 0.0) {
                    problems.push_back("trap.breakpoints: must be finite and > 0");
                    break;
                }
            for (double v : s.values)
                if (!std::isfinite(v)) {
                    problems.push_back("trap.values: must be finite");
                    break;
                }
        }
        void operator()(const ModulatedTrap& s) const {
            if (!std::isfinite(s.omega0_sq) || !std::isfinite(s.epsilon) ||
                !std::isfinite(s.big_omega))
                problems.push_back("trap: modulated parameters must be finite");
        }
        void operator()(const TabulatedTrap& s) const {
            if (s.t.size() < 2)
                problems.push_back("trap.table: needs at least 2 samples");
            if (s.t.size() != s.omega2.size())
                problems.push_back("trap.table: time and value columns differ in length");
            for (std::size_t i = 0; i + 1 < s.t.size(); ++i)
                if (!(s.t[i] < s.t[i + 1])) {
                    problems.push_back("trap.table: times must be strictly ascending");
                    break;
                }
            for (double v : s.t)
                if (!std::isfinite(v)) {
                    problems.push_back("trap.table: times must be finite");
                    break;
                }
            for (double v : s.omega2)
                if (!std::isfinite(v)) {
                    problems.push_back("trap.table: values must be finite");
                    break;
                }
        }
    };
    std::visit(Check{problems}, schedule);
}

}  // namespace detail

/// Returns the input unchanged if every invariant holds; otherwise throws
/// std::invalid_argument listing each violated invariant by field name.
inline PhysicsParams validate_params(const PhysicsParams& raw) {
    std::vector<std::string> problems;
    if (!(raw.mass > 0.0) || !std::isfinite(raw.mass))
        problems.push_back("mass: must be finite and > 0");
    if (!(raw.hbar > 0.0) || !std::isfinite(raw.hbar))
        problems.push_back("hbar: must be finite and > 0");
    if (!std::isfinite(raw.g))
        problems.push_back("g: must be finite");
    detail::check_schedule(raw.trap, problems);
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid physics parameters: ";
        for (std::size_t i = 0; i < problems.size(); ++i)
            msg << (i ? "; " : "") << problems[i];
        throw std::invalid_argument(msg.str());
    }
    return raw;
}

}  // namespace gpwave
