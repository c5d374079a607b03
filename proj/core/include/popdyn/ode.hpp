#pragma once
#include <vector>
#include <functional>
#include <string>
#include <map>

namespace popdyn {

// fixed-step classical Runge-Kutta on vector states
using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;

struct OdeTrajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
    // named diagnostic series recorded alongside the state (same length as t)
    std::map<std::string, std::vector<double>> series;
};

// one RK4 step in place
void rk4_step(const OdeRhs& rhs, double t, double dt, std::vector<double>& y,
              std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4,
              std::vector<double>& tmp);

// integrate on [0, tmax] with fixed dt, recording every `record_every` steps
// (and always the endpoint); per_step, if given, runs after each step and can
// reproject the state (e.g. renormalize onto the simplex)
OdeTrajectory rk4_integrate(const OdeRhs& rhs, std::vector<double> y0, double tmax, double dt,
                            int record_every = 1,
                            const std::function<void(double, std::vector<double>&)>& per_step = {});

} // namespace popdyn
