#pragma once
#include <functional>
#include <limits>

#include "solitonlab/types.hpp"

namespace solitonlab {

// Embedded Dormand-Prince 5(4) stepper with standard step-size control
// (Hairer, Norsett, Wanner, Solving ODEs I, coefficients of DOPRI5).
//
// Hooks:
//   observer   - called at the initial state and after every accepted step
//                (after the transform has been applied)
//   transform  - in-place state fixup applied on acceptance, e.g. tangent
//                renormalization
//   guard      - returns true while the state is admissible; when a step
//                lands outside, the step size is bisected so the trajectory
//                stops just inside the boundary and status DomainExit is
//                returned
struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0; // 0 = automatic
    long max_steps = 4000000;
};

enum class OdeStatus { Done, DomainExit, StepUnderflow };

struct OdeResult {
    OdeStatus status = OdeStatus::Done;
    double t = 0.0;
    Vec y;
};

using OdeRhs = std::function<void(double, const Vec&, Vec&)>;
using OdeObserver = std::function<void(double, const Vec&)>;
using OdeTransform = std::function<void(double, Vec&)>;
using OdeGuard = std::function<bool(const Vec&)>;

OdeResult integrate_adaptive(const OdeRhs& rhs, double t0, double t1, Vec y0,
                             const OdeOptions& opts = {},
                             const OdeObserver& observer = nullptr,
                             const OdeTransform& transform = nullptr,
                             const OdeGuard& guard = nullptr);

} // namespace solitonlab
