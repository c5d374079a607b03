#include "popdyn/ode.hpp"
#include <cmath>
#include <stdexcept>

namespace popdyn {

void rk4_step(const OdeRhs& rhs, double t, double dt, std::vector<double>& y,
              std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4,
              std::vector<double>& tmp) {
    const std::size_t n = y.size();
    k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n); tmp.resize(n);
    rhs(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    rhs(t + dt, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

OdeTrajectory rk4_integrate(const OdeRhs& rhs, std::vector<double> y0, double tmax, double dt,
                            int record_every,
                            const std::function<void(double, std::vector<double>&)>& per_step) {
    if (!(dt > 0.0) || !(tmax >= 0.0))
        throw std::invalid_argument("rk4_integrate: dt must be > 0 and tmax >= 0");
    if (record_every < 1) record_every = 1;
    OdeTrajectory traj;
    const long nsteps = static_cast<long>(std::ceil(tmax / dt - 1e-12));
    std::vector<double> k1, k2, k3, k4, tmp;
    double t = 0.0;
    traj.t.push_back(t);
    traj.y.push_back(y0);
    for (long s = 0; s < nsteps; ++s) {
        double h = std::min(dt, tmax - t);
        rk4_step(rhs, t, h, y0, k1, k2, k3, k4, tmp);
        t += h;
        if (per_step) per_step(t, y0);
        if ((s + 1) % record_every == 0 || s + 1 == nsteps) {
            traj.t.push_back(t);
            traj.y.push_back(y0);
        }
    }
    return traj;
}

} // namespace popdyn
