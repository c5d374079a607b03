#include "popdyn/deterministic.hpp"
#include <cmath>
#include <stdexcept>

namespace popdyn {

double logistic_value(double alpha, double capacity, double x0, double t) {
    if (!(capacity > 0.0) || x0 < 0.0 || alpha < 0.0)
        throw std::invalid_argument("logistic: need capacity > 0, x0 >= 0, alpha >= 0");
    double g = std::exp(alpha * t);
    return capacity * x0 * g / (capacity + x0 * (g - 1.0));
}

OdeTrajectory logistic_solve(double alpha, double capacity, double x0, double tmax, double dt) {
    if (!(dt > 0.0) || !(tmax >= 0.0)) throw std::invalid_argument("logistic_solve: bad grid");
    OdeTrajectory traj;
    long n = static_cast<long>(std::ceil(tmax / dt - 1e-12));
    for (long i = 0; i <= n; ++i) {
        double t = std::min(i * dt, tmax);
        traj.t.push_back(t);
        traj.y.push_back({logistic_value(alpha, capacity, x0, t)});
    }
    return traj;
}

LotkaVolterraResult lotka_volterra_integrate(double r1, double r2, double k1, double k2,
                                             double a12, double a21,
                                             double x10, double x20, double tmax, double dt) {
    if (!(k1 > 0.0) || !(k2 > 0.0) || x10 < 0.0 || x20 < 0.0)
        throw std::invalid_argument("lotka_volterra: need K > 0 and x0 >= 0");
    LotkaVolterraResult out;
    OdeRhs rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy.resize(2);
        dy[0] = r1 * y[0] * (1.0 - (y[0] + a12 * y[1]) / k1);
        dy[1] = r2 * y[1] * (1.0 - (y[1] + a21 * y[0]) / k2);
    };
    auto guard = [](double, std::vector<double>& y) {
        if (std::fabs(y[0]) > 1e12 || std::fabs(y[1]) > 1e12 ||
            !std::isfinite(y[0]) || !std::isfinite(y[1]))
            throw std::runtime_error("lotka_volterra: trajectory blew up past 1e12");
    };
    out.traj = rk4_integrate(rhs, {x10, x20}, tmax, dt, 1, guard);
    double ratio = k1 / k2;
    out.coexistence = (1.0 / a21 > ratio) && (ratio > a12);
    if (out.coexistence) {
        double det = 1.0 - a12 * a21;
        out.interior_fixed_point = {(k1 - a12 * k2) / det, (k2 - a21 * k1) / det};
    }
    return out;
}

SirResult sir_integrate(double beta, double gamma, double s0, double i0, double r0_state,
                        double tmax, double dt) {
    if (beta < 0.0 || gamma <= 0.0 || s0 < 0.0 || i0 < 0.0 || r0_state < 0.0)
        throw std::invalid_argument("sir_integrate: bad parameters");
    SirResult out;
    out.r0 = beta * s0 / gamma;
    OdeRhs rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy.resize(3);
        double inf_rate = beta * y[0] * y[1];
        dy[0] = -inf_rate;
        dy[1] = inf_rate - gamma * y[1];
        dy[2] = gamma * y[1];
    };
    out.traj = rk4_integrate(rhs, {s0, i0, r0_state}, tmax, dt);
    return out;
}

FitnessSpec FitnessSpec::diploid(Matrix v) {
    if (v.n == 0) throw std::invalid_argument("FitnessSpec: empty matrix");
    for (std::size_t i = 0; i < v.n; ++i)
        for (std::size_t j = i + 1; j < v.n; ++j)
            if (std::fabs(v(i, j) - v(j, i)) > 1e-12)
                throw std::invalid_argument("FitnessSpec: payoff matrix must be symmetric");
    return FitnessSpec{std::move(v)};
}

FitnessSpec FitnessSpec::haploid(const std::vector<double>& v) {
    Matrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            m(i, j) = v[i] + v[j];
    return FitnessSpec{std::move(m)};
}

double FitnessSpec::marginal(const std::vector<double>& p, std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < V.n; ++j) s += V(i, j) * p[j];
    return s;
}

double FitnessSpec::mean(const std::vector<double>& p) const {
    double s = 0.0;
    for (std::size_t i = 0; i < V.n; ++i) s += p[i] * marginal(p, i);
    return s;
}

double FitnessSpec::variance(const std::vector<double>& p) const {
    double vbar = mean(p);
    double s = 0.0;
    for (std::size_t i = 0; i < V.n; ++i) {
        double d = marginal(p, i) - vbar;
        s += p[i] * d * d;
    }
    return s;
}

void MutationKernel::validate() const {
    for (std::size_t j = 0; j < q.n; ++j) {
        if (q(j, j) != 0.0)
            throw std::invalid_argument("MutationKernel: diagonal must be zero");
        double row = 0.0;
        for (std::size_t i = 0; i < q.n; ++i) {
            if (q(j, i) < 0.0) throw std::invalid_argument("MutationKernel: negative rate share");
            row += q(j, i);
        }
        if (std::fabs(row - 1.0) > 1e-9)
            throw std::invalid_argument("MutationKernel: rows must sum to 1 over targets");
    }
}

void validate_simplex(const std::vector<double>& p, double tol) {
    if (p.empty()) throw std::invalid_argument("simplex point is empty");
    double s = 0.0;
    for (double x : p) {
        if (x < -tol) throw std::invalid_argument("simplex point has a negative coordinate");
        s += x;
    }
    if (std::fabs(s - 1.0) > tol)
        throw std::invalid_argument("simplex point does not sum to 1");
}

ReplicatorResult replicator_integrate(const FitnessSpec& fitness, const MutationKernel& kernel,
                                      double m, std::vector<double> p0, double tmax, double dt,
                                      int record_every) {
    const std::size_t K = fitness.types();
    validate_simplex(p0);
    if (m < 0.0) throw std::invalid_argument("replicator_integrate: m must be >= 0");
    if (m > 0.0) {
        if (kernel.q.n != K) throw std::invalid_argument("replicator_integrate: kernel size mismatch");
        kernel.validate();
    }

    OdeRhs rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy.resize(K);
        double vbar = fitness.mean(y);
        for (std::size_t i = 0; i < K; ++i) {
            double flow = 0.0;
            if (m > 0.0) {
                for (std::size_t j = 0; j < K; ++j)
                    if (j != i) flow += kernel.q(j, i) * y[j];
                flow -= y[i];
            }
            dy[i] = y[i] * (fitness.marginal(y, i) - vbar) + m * flow;
        }
    };
    auto project = [&](double, std::vector<double>& y) {
        double s = 0.0;
        double worst = 0.0;
        for (double x : y) {
            s += x;
            if (x < worst) worst = x;
        }
        if (std::fabs(s - 1.0) > 1e-6 || worst < -1e-6)
            throw std::runtime_error("replicator_integrate: left the simplex by more than 1e-6");
        for (double& x : y) {
            if (x < 0.0) x = 0.0;
        }
        s = 0.0;
        for (double x : y) s += x;
        for (double& x : y) x /= s;
    };

    ReplicatorResult out;
    out.traj = rk4_integrate(rhs, std::move(p0), tmax, dt, record_every, project);
    auto& vb = out.traj.series["mean_fitness"];
    auto& vv = out.traj.series["fitness_variance"];
    vb.reserve(out.traj.y.size());
    vv.reserve(out.traj.y.size());
    for (const auto& p : out.traj.y) {
        vb.push_back(fitness.mean(p));
        vv.push_back(fitness.variance(p));
    }
    return out;
}

std::vector<double> shahshahani_gradient(const FitnessSpec& fitness, const std::vector<double>& p) {
    validate_simplex(p);
    for (double x : p)
        if (!(x > 0.0))
            throw std::domain_error("shahshahani_gradient: defined only in the simplex interior");
    double vbar = fitness.mean(p);
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        g[i] = p[i] * (fitness.marginal(p, i) - vbar);
    return g;
}

} // namespace popdyn
