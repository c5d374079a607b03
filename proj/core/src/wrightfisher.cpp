#include "popdyn/wrightfisher.hpp"
#include "popdyn/deterministic.hpp"
#include "popdyn/ensemble.hpp"
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace popdyn {

namespace {
constexpr double kBoundaryEps = 1e-12;

void clip_renormalize(std::vector<double>& p) {
    double sum = 0.0;
    for (double& v : p) {
        if (v < 0.0) v = 0.0;
        else if (v > 1.0) v = 1.0;
        sum += v;
    }
    if (sum <= 0.0) throw std::runtime_error("simplex state collapsed to zero");
    for (double& v : p) v /= sum;
}
} // namespace

WfChainSpec WfChainSpec::neutral(std::uint64_t N, std::size_t K) {
    WfChainSpec spec;
    spec.N = N;
    spec.K = K;
    spec.mutation = Matrix::identity(K);
    spec.viability = Matrix(K);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) spec.viability(i, j) = 1.0;
    return spec;
}

void WfChainSpec::validate() const {
    if (N == 0 || K < 2) throw std::invalid_argument("WfChainSpec: need N >= 1 and K >= 2");
    if (mutation.n != K || viability.n != K)
        throw std::invalid_argument("WfChainSpec: matrix sizes must match K");
    for (std::size_t i = 0; i < K; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            if (mutation(i, j) < 0.0) throw std::invalid_argument("WfChainSpec: negative mutation entry");
            row += mutation(i, j);
            if (!(viability(i, j) > 0.0))
                throw std::invalid_argument("WfChainSpec: viabilities must be positive");
            if (std::fabs(viability(i, j) - viability(j, i)) > 1e-12)
                throw std::invalid_argument("WfChainSpec: viabilities must be symmetric");
        }
        if (std::fabs(row - 1.0) > 1e-9)
            throw std::invalid_argument("WfChainSpec: mutation rows must sum to 1");
    }
}

std::vector<double> wf_chain_step(const WfChainSpec& spec, const std::vector<double>& p,
                                  RngStream& rng) {
    if (p.size() != spec.K) throw std::invalid_argument("wf_chain_step: state size mismatch");
    validate_simplex(p, 1e-9);
    const std::size_t K = spec.K;

    // viability selection on Hardy-Weinberg genotype frequencies p_i p_j:
    // marginal allele frequency after selection is p_i (Vp)_i / p'Vp
    std::vector<double> selected(K);
    double mean_v = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        double vp = 0.0;
        for (std::size_t j = 0; j < K; ++j) vp += spec.viability(i, j) * p[j];
        selected[i] = p[i] * vp;
        mean_v += selected[i];
    }
    for (double& v : selected) v /= mean_v;

    std::vector<double> mutated(K, 0.0);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) mutated[j] += selected[i] * spec.mutation(i, j);

    const std::uint64_t draws = spec.diploid_sampling ? 2 * spec.N : spec.N;
    std::vector<std::uint64_t> counts = rng.multinomial(draws, mutated);
    std::vector<double> next(K);
    for (std::size_t i = 0; i < K; ++i)
        next[i] = static_cast<double>(counts[i]) / static_cast<double>(draws);
    return next;
}

OdeTrajectory wf_chain_run(const WfChainSpec& spec, std::vector<double> p0,
                           std::uint64_t ngen, RngStream& rng, std::uint64_t record_every) {
    spec.validate();
    if (record_every == 0) record_every = 1;
    OdeTrajectory traj;
    traj.t.push_back(0.0);
    traj.y.push_back(p0);
    std::vector<double> p = std::move(p0);
    for (std::uint64_t g = 1; g <= ngen; ++g) {
        p = wf_chain_step(spec, p, rng);
        if (g % record_every == 0 || g == ngen) {
            traj.t.push_back(static_cast<double>(g));
            traj.y.push_back(p);
        }
    }
    return traj;
}

void WfDiffusionSpec::validate() const {
    if (K < 2) throw std::invalid_argument("WfDiffusionSpec: K >= 2");
    if (gamma < 0.0 || theta < 0.0)
        throw std::invalid_argument("WfDiffusionSpec: gamma and theta must be >= 0");
    if (theta > 0.0) {
        if (nu.size() != K) throw std::invalid_argument("WfDiffusionSpec: nu size mismatch");
        validate_simplex(nu, 1e-9);
    }
    if (sigma.n != 0 && sigma.n != K)
        throw std::invalid_argument("WfDiffusionSpec: sigma size mismatch");
    if (mutation_rates.n != 0) {
        if (mutation_rates.n != K)
            throw std::invalid_argument("WfDiffusionSpec: mutation_rates size mismatch");
        for (std::size_t i = 0; i < K; ++i) {
            if (mutation_rates(i, i) != 0.0)
                throw std::invalid_argument("WfDiffusionSpec: mutation_rates diagonal must be zero");
            for (std::size_t j = 0; j < K; ++j)
                if (mutation_rates(i, j) < 0.0)
                    throw std::invalid_argument("WfDiffusionSpec: negative mutation rate");
        }
    }
}

namespace {

void wf_drift(const WfDiffusionSpec& spec, const std::vector<double>& p, std::vector<double>& b) {
    const std::size_t K = spec.K;
    b.assign(K, 0.0);
    if (spec.mutation_rates.n != 0) {
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                if (i != j) {
                    b[i] += p[j] * spec.mutation_rates(j, i);
                    b[i] -= p[i] * spec.mutation_rates(i, j);
                }
    } else if (spec.theta > 0.0) {
        for (std::size_t i = 0; i < K; ++i) b[i] += 0.5 * spec.theta * (spec.nu[i] - p[i]);
    }
    if (spec.sigma.n != 0) {
        std::vector<double> sp(K, 0.0);
        double mean = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            for (std::size_t j = 0; j < K; ++j) sp[i] += spec.sigma(i, j) * p[j];
            mean += p[i] * sp[i];
        }
        for (std::size_t i = 0; i < K; ++i) b[i] += p[i] * (sp[i] - mean);
    }
}

// spectral square root of gamma * p_i(delta_ij - p_j); boundary coordinates get
// zero rows up front (their noise vanishes there anyway), eigenvalues are
// floored at zero
Matrix wf_noise_factor(double gamma, const std::vector<double>& p) {
    const std::size_t K = p.size();
    Matrix a(K);
    for (std::size_t i = 0; i < K; ++i) {
        bool frozen_i = p[i] < kBoundaryEps || p[i] > 1.0 - kBoundaryEps;
        for (std::size_t j = 0; j < K; ++j) {
            bool frozen_j = p[j] < kBoundaryEps || p[j] > 1.0 - kBoundaryEps;
            if (frozen_i || frozen_j)
                a(i, j) = 0.0;
            else
                a(i, j) = gamma * p[i] * ((i == j ? 1.0 : 0.0) - p[j]);
        }
    }
    SymmetricEigen eig = jacobi_eigen(a);
    Matrix factor(K);
    for (std::size_t c = 0; c < K; ++c) {
        double lam = eig.values[c];
        double s = lam > 0.0 ? std::sqrt(lam) : 0.0;
        for (std::size_t r = 0; r < K; ++r) factor(r, c) = eig.vectors(r, c) * s;
    }
    return factor;
}

} // namespace

OdeTrajectory wf_diffusion_simulate(const WfDiffusionSpec& spec, std::vector<double> p0,
                                    double tmax, double dt, RngStream& rng,
                                    int record_every) {
    spec.validate();
    if (p0.size() != spec.K) throw std::invalid_argument("wf_diffusion_simulate: p0 size mismatch");
    validate_simplex(p0, 1e-9);
    if (!(dt > 0.0) || tmax < 0.0) throw std::invalid_argument("wf_diffusion_simulate: bad grid");
    if (record_every < 1) record_every = 1;

    OdeTrajectory traj;
    traj.t.push_back(0.0);
    traj.y.push_back(p0);
    std::vector<double> p = std::move(p0);
    std::vector<double> b, z(spec.K);
    const long nsteps = static_cast<long>(std::ceil(tmax / dt - 1e-12));
    double t = 0.0;
    const bool two_allele = spec.K == 2;
    for (long s = 0; s < nsteps; ++s) {
        double h = std::min(dt, tmax - t);
        wf_drift(spec, p, b);
        if (two_allele) {
            // scalar form: only p_0 is free, noise sd sqrt(gamma p (1-p) h)
            double sd = std::sqrt(std::max(spec.gamma * p[0] * (1.0 - p[0]) * h, 0.0));
            p[0] += b[0] * h + sd * rng.normal();
            p[1] = 1.0 - p[0];
        } else {
            Matrix factor = wf_noise_factor(spec.gamma, p);
            for (auto& v : z) v = rng.normal();
            double sh = std::sqrt(h);
            for (std::size_t i = 0; i < spec.K; ++i) {
                double noise = 0.0;
                for (std::size_t c = 0; c < spec.K; ++c) noise += factor(i, c) * z[c];
                p[i] += b[i] * h + sh * noise;
            }
        }
        clip_renormalize(p);
        t += h;
        if ((s + 1) % record_every == 0 || s + 1 == nsteps) {
            traj.t.push_back(t);
            traj.y.push_back(p);
        }
    }
    return traj;
}

FixationResult wf_fixation_experiment(std::uint64_t N, double p0, std::uint64_t reps,
                                      std::uint64_t seed, int threads, double dt) {
    if (p0 < 0.0 || p0 > 1.0) throw std::invalid_argument("wf_fixation_experiment: p0 in [0,1]");
    if (reps == 0 || N == 0) throw std::invalid_argument("wf_fixation_experiment: reps, N >= 1");
    FixationResult out;
    out.reps = reps;
    if (p0 == 0.0 || p0 == 1.0) {
        out.fixed_at_one = p0;
        return out;
    }
    struct Rep { double tau; bool at_one; };
    EnsembleSpec spec{seed, reps, threads};
    auto rows = run_replicates<Rep>(spec, [&](std::uint64_t, RngStream& rng) {
        // absorption time of dp = sqrt(2 p (1-p)) dW; one unit = N generations
        double p = p0;
        double tau = 0.0;
        while (p > 0.0 && p < 1.0) {
            p += std::sqrt(2.0 * p * (1.0 - p) * dt) * rng.normal();
            tau += dt;
            if (p <= 0.0) p = 0.0;
            else if (p >= 1.0) p = 1.0;
        }
        return Rep{tau, p == 1.0};
    });
    double sum = 0.0, sum2 = 0.0;
    std::uint64_t ones = 0;
    for (const Rep& r : rows) {
        double gens = static_cast<double>(N) * r.tau;
        sum += gens;
        sum2 += gens * gens;
        if (r.at_one) ++ones;
    }
    double n = static_cast<double>(reps);
    out.mean_generations = sum / n;
    double var = (sum2 - sum * sum / n) / (n - 1.0);
    out.se_generations = std::sqrt(var / n);
    out.fixed_at_one = static_cast<double>(ones) / n;
    out.fixed_at_one_se = std::sqrt(out.fixed_at_one * (1.0 - out.fixed_at_one) / n);
    return out;
}

std::vector<double> dirichlet_sample(const std::vector<double>& theta, RngStream& rng) {
    if (theta.size() < 2) throw std::invalid_argument("dirichlet_sample: need >= 2 components");
    std::vector<double> p(theta.size());
    for (;;) {
        double sum = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (!(theta[i] > 0.0)) throw std::domain_error("dirichlet_sample: theta_i > 0 required");
            p[i] = rng.gamma(theta[i], 1.0);
            sum += p[i];
        }
        if (sum > 0.0) {
            for (double& v : p) v /= sum;
            return p;
        }
        // all gamma draws underflowed to zero (tiny shapes); redraw
    }
}

double dirichlet_moment(const std::vector<double>& theta, const std::vector<int>& k) {
    if (theta.size() != k.size()) throw std::invalid_argument("dirichlet_moment: size mismatch");
    double tsum = 0.0;
    long ksum = 0;
    double log_num = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!(theta[i] > 0.0)) throw std::domain_error("dirichlet_moment: theta_i > 0 required");
        if (k[i] < 0) throw std::domain_error("dirichlet_moment: k_i >= 0 required");
        tsum += theta[i];
        ksum += k[i];
        log_num += std::lgamma(theta[i] + k[i]) - std::lgamma(theta[i]);
    }
    return std::exp(std::lgamma(tsum) - std::lgamma(tsum + static_cast<double>(ksum)) + log_num);
}

DensityTable selection_stationary_density(const WfDiffusionSpec& spec, std::size_t cells) {
    spec.validate();
    if (spec.K != 2) throw std::invalid_argument("selection_stationary_density: two alleles only");
    if (!(spec.gamma > 0.0)) throw std::invalid_argument("selection_stationary_density: gamma > 0");
    if (!(spec.theta > 0.0))
        throw std::invalid_argument("selection_stationary_density: needs mutation (theta > 0)");
    if (cells < 2) throw std::invalid_argument("selection_stationary_density: cells >= 2");
    const double a1 = spec.theta * spec.nu[0] / spec.gamma;
    const double a2 = spec.theta * spec.nu[1] / spec.gamma;
    DensityTable table;
    table.p.resize(cells);
    std::vector<double> logf(cells);
    double logmax = -1e300;
    for (std::size_t c = 0; c < cells; ++c) {
        double p = (static_cast<double>(c) + 0.5) / static_cast<double>(cells);
        table.p[c] = p;
        double q = 1.0 - p;
        double sel = 0.0;
        if (spec.sigma.n != 0)
            sel = (spec.sigma(0, 0) * p * p + 2.0 * spec.sigma(0, 1) * p * q +
                   spec.sigma(1, 1) * q * q) / spec.gamma;
        logf[c] = sel + (a1 - 1.0) * std::log(p) + (a2 - 1.0) * std::log(q);
        logmax = std::max(logmax, logf[c]);
    }
    table.mass.resize(cells);
    double total = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        table.mass[c] = std::exp(logf[c] - logmax);
        total += table.mass[c];
    }
    table.density.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        table.mass[c] /= total;
        table.density[c] = table.mass[c] * static_cast<double>(cells);
    }
    return table;
}

namespace {
// close the index set under k -> k - e_i, dropping the all-zero index
// (m_0 = 1 is substituted as a constant)
std::vector<std::vector<int>> close_indices(std::vector<std::vector<int>> indices, std::size_t K) {
    std::map<std::vector<int>, bool> seen;
    std::vector<std::vector<int>> queue = std::move(indices);
    for (auto& k : queue) {
        if (k.size() != K) throw std::invalid_argument("wf_moment_ode: index size mismatch");
        for (int v : k)
            if (v < 0) throw std::invalid_argument("wf_moment_ode: negative index entry");
    }
    std::vector<std::vector<int>> closed;
    while (!queue.empty()) {
        std::vector<int> k = queue.back();
        queue.pop_back();
        long total = 0;
        for (int v : k) total += v;
        if (total == 0 || seen.count(k)) continue;
        seen[k] = true;
        closed.push_back(k);
        for (std::size_t i = 0; i < K; ++i)
            if (k[i] > 0) {
                std::vector<int> down = k;
                --down[i];
                queue.push_back(down);
            }
    }
    std::sort(closed.begin(), closed.end(), [](const auto& x, const auto& y) {
        long sx = 0, sy = 0;
        for (int v : x) sx += v;
        for (int v : y) sy += v;
        if (sx != sy) return sx < sy;
        return x < y;
    });
    return closed;
}
} // namespace

MomentOdeResult wf_moment_ode(double gamma, double theta, const std::vector<double>& nu,
                              std::vector<std::vector<int>> indices,
                              const std::vector<double>& p0, double tmax, double dt,
                              int record_every) {
    const std::size_t K = p0.size();
    if (K < 2) throw std::invalid_argument("wf_moment_ode: K >= 2");
    validate_simplex(p0, 1e-9);
    if (gamma < 0.0 || theta < 0.0) throw std::invalid_argument("wf_moment_ode: negative rates");
    if (theta > 0.0) {
        if (nu.size() != K) throw std::invalid_argument("wf_moment_ode: nu size mismatch");
        validate_simplex(nu, 1e-9);
    }
    MomentOdeResult out;
    out.indices = close_indices(std::move(indices), K);
    const std::size_t M = out.indices.size();
    if (M == 0) throw std::invalid_argument("wf_moment_ode: empty index set");

    std::map<std::vector<int>, std::size_t> pos;
    for (std::size_t i = 0; i < M; ++i) pos[out.indices[i]] = i;
    // precompute, per index, the downward couplings (target slot, coefficient);
    // slot = M marks the constant m_0 = 1
    struct Term { std::size_t slot; double coef; };
    std::vector<std::vector<Term>> inflow(M);
    std::vector<double> decay(M);
    for (std::size_t i = 0; i < M; ++i) {
        const auto& k = out.indices[i];
        long total = 0;
        for (int v : k) total += v;
        decay[i] = 0.5 * gamma * static_cast<double>(total) * static_cast<double>(total - 1) +
                   0.5 * theta * static_cast<double>(total);
        for (std::size_t c = 0; c < K; ++c) {
            if (k[c] == 0) continue;
            double coef = 0.5 * gamma * static_cast<double>(k[c]) * static_cast<double>(k[c] - 1);
            if (theta > 0.0) coef += 0.5 * theta * nu[c] * static_cast<double>(k[c]);
            if (coef == 0.0) continue;
            std::vector<int> down = k;
            --down[c];
            long dtotal = total - 1;
            std::size_t slot = dtotal == 0 ? M : pos.at(down);
            inflow[i].push_back(Term{slot, coef});
        }
    }

    std::vector<double> y0(M);
    for (std::size_t i = 0; i < M; ++i) {
        double m = 1.0;
        for (std::size_t c = 0; c < K; ++c)
            for (int rep = 0; rep < out.indices[i][c]; ++rep) m *= p0[c];
        y0[i] = m;
    }
    OdeRhs rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        for (std::size_t i = 0; i < M; ++i) {
            double v = -decay[i] * y[i];
            for (const Term& term : inflow[i])
                v += term.coef * (term.slot == M ? 1.0 : y[term.slot]);
            dy[i] = v;
        }
    };
    out.traj = rk4_integrate(rhs, std::move(y0), tmax, dt, record_every);
    return out;
}

} // namespace popdyn
