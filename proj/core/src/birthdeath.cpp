#include "popdyn/birthdeath.hpp"
#include "popdyn/ensemble.hpp"
#include "popdyn/stats.hpp"
#include "popdyn/specfun.hpp"
#include <cmath>
#include <stdexcept>

namespace popdyn {

namespace {
void check_bd(double b, double d) {
    if (b < 0.0 || d < 0.0) throw std::invalid_argument("birth-death: rates must be >= 0");
    if (b == 0.0 && d == 0.0) throw std::invalid_argument("birth-death: b = d = 0 is frozen");
}
} // namespace

BdPath bd_gillespie(double b, double d, std::uint64_t x0, double tmax, RngStream& rng,
                    std::uint64_t max_events) {
    check_bd(b, d);
    BdPath path;
    path.t.push_back(0.0);
    path.n.push_back(x0);
    double t = 0.0;
    std::uint64_t n = x0;
    const double pb = b / (b + d);
    std::uint64_t events = 0;
    while (n > 0) {
        if (events >= max_events) {
            path.capped = true;
            break;
        }
        double rate = (b + d) * static_cast<double>(n);
        t += rng.exponential(rate);
        if (t > tmax) break;
        n += rng.uniform() < pb ? 1 : std::uint64_t(-1);
        path.t.push_back(t);
        path.n.push_back(n);
        ++events;
    }
    return path;
}

std::uint64_t bd_final_value(double b, double d, std::uint64_t x0, double tmax, RngStream& rng,
                             std::uint64_t max_events) {
    check_bd(b, d);
    double t = 0.0;
    std::uint64_t n = x0;
    const double pb = b / (b + d);
    std::uint64_t events = 0;
    while (n > 0 && events < max_events) {
        double rate = (b + d) * static_cast<double>(n);
        t += rng.exponential(rate);
        if (t > tmax) break;
        n += rng.uniform() < pb ? 1 : std::uint64_t(-1);
        ++events;
    }
    if (events >= max_events)
        throw std::runtime_error("bd_final_value: event cap exceeded");
    return n;
}

std::vector<double> bd_law(double b, double d, double t, double tail_tol) {
    check_bd(b, d);
    if (t < 0.0) throw std::invalid_argument("bd_law: negative time");
    std::vector<double> p;
    if (t == 0.0) {
        p = {0.0, 1.0};
        return p;
    }
    double p0, geom, scale; // p_n = scale * geom^{n-1} for n >= 1
    if (b == d) {
        double bt = b * t;
        p0 = bt / (1.0 + bt);
        geom = bt / (1.0 + bt);
        scale = 1.0 / ((1.0 + bt) * (1.0 + bt));
    } else {
        double ea = std::exp((b - d) * t);
        double denom = b * ea - d;
        double f = d * (ea - 1.0) / denom;
        double g = b * (ea - 1.0) / denom;
        p0 = f;
        geom = g;
        scale = (1.0 - f) * (1.0 - g);
    }
    p.push_back(p0);
    double cum = p0;
    double pn = scale;
    for (std::size_t n = 1; cum < 1.0 - tail_tol; ++n) {
        p.push_back(pn);
        cum += pn;
        pn *= geom;
        if (geom == 0.0) break;
        if (n > 100000000) throw std::runtime_error("bd_law: truncation runaway");
    }
    return p;
}

double bd_laplace(double b, double d, double x0, double t, double theta) {
    check_bd(b, d);
    if (theta < 0.0) throw std::domain_error("bd_laplace: theta must be >= 0");
    if (x0 < 0.0) throw std::invalid_argument("bd_laplace: x0 must be >= 0");
    const double x = std::exp(-theta);
    double base;
    if (b == d) {
        double bt = b * t;
        base = (1.0 - (bt - 1.0) * (x - 1.0)) / (1.0 - bt * (x - 1.0));
    } else {
        double ea = std::exp((b - d) * t);
        base = (d * (x - 1.0) * ea - (b * x - d)) / (b * (x - 1.0) * ea - (b * x - d));
    }
    return std::pow(base, x0);
}

BdMoments bd_moments(double b, double d, double x0, double t) {
    check_bd(b, d);
    BdMoments m;
    if (b == d) {
        m.mean = x0;
        m.second_moment = x0 * x0 + 2.0 * b * t * x0;
    } else {
        double ea = std::exp((b - d) * t);
        m.mean = x0 * ea;
        m.second_moment =
            x0 * x0 * ea * ea + x0 * (b + d) / (b - d) * ea * (ea - 1.0);
    }
    m.variance = m.second_moment - m.mean * m.mean;
    return m;
}

CsbpPath csbp_simulate(const CsbpParams& params, double x0, double tmax, double dt,
                       RngStream& rng, int record_every) {
    if (!(dt > 0.0) || tmax < 0.0) throw std::invalid_argument("csbp_simulate: bad grid");
    if (params.gamma < 0.0 || params.c < 0.0 || x0 < 0.0)
        throw std::invalid_argument("csbp_simulate: gamma, c, x0 must be >= 0");
    if (record_every < 1) record_every = 1;
    CsbpPath path;
    path.t.push_back(0.0);
    path.x.push_back(x0);
    double x = x0;
    const long nsteps = static_cast<long>(std::ceil(tmax / dt - 1e-12));
    bool dead = (params.c == 0.0 && x <= 0.0);
    double t = 0.0;
    for (long s = 0; s < nsteps; ++s) {
        double h = std::min(dt, tmax - t);
        if (!dead) {
            double xp = x > 0.0 ? x : 0.0;
            x += (params.c + params.m * xp) * h +
                 std::sqrt(2.0 * params.gamma * xp * h) * rng.normal();
            if (params.c == 0.0 && x <= 0.0) {
                x = 0.0;
                dead = true;
            }
        }
        t += h;
        if ((s + 1) % record_every == 0 || s + 1 == nsteps) {
            path.t.push_back(t);
            path.x.push_back(x);
        }
    }
    path.absorbed = dead;
    return path;
}

double csbp_laplace(double m, double gamma, double theta, double t) {
    if (theta < 0.0) throw std::domain_error("csbp_laplace: theta must be >= 0");
    if (gamma < 0.0) throw std::invalid_argument("csbp_laplace: gamma must be >= 0");
    if (t < 0.0) throw std::invalid_argument("csbp_laplace: negative time");
    if (theta == 0.0) return 0.0;
    if (m == 0.0) return theta / (1.0 + t * gamma * theta);
    // u = theta m e^{mt} / (m + gamma theta (e^{mt}-1)); expm1 keeps the
    // near-critical case |m| t << 1 exact (both terms scale like m)
    double em1 = std::expm1(m * t);
    return theta * m * (em1 + 1.0) / (m + gamma * theta * em1);
}

CriticalBdLimit critical_bd_conditioned_limit(double b, double t, std::uint64_t reps,
                                              std::uint64_t seed, int threads) {
    if (!(b > 0.0) || !(t > 0.0) || reps == 0)
        throw std::invalid_argument("critical_bd_conditioned_limit: bad parameters");
    EnsembleSpec spec{seed, reps, threads};
    auto finals = run_replicates<std::uint64_t>(spec, [&](std::uint64_t, RngStream& rng) {
        return bd_final_value(b, b, 1, t, rng);
    });
    CriticalBdLimit out;
    std::vector<double> rescaled;
    for (auto n : finals)
        if (n > 0) rescaled.push_back(static_cast<double>(n) / t);
    out.survivors = rescaled.size();
    double p_hat = static_cast<double>(out.survivors) / static_cast<double>(reps);
    out.survival = p_hat;
    out.survival_se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(reps));
    if (out.survivors == 0) {
        out.inconclusive = true;
        return out;
    }
    out.ks_distance =
        ks_statistic(std::move(rescaled), [b](double x) { return exponential_cdf(b, x); });
    return out;
}

} // namespace popdyn
