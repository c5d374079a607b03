#include "popdyn/duality.hpp"
#include "popdyn/ensemble.hpp"
#include "popdyn/wrightfisher.hpp"
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace popdyn {

void validate_generator(const Matrix& q, double tol) {
    if (q.n == 0) throw std::invalid_argument("generator: empty matrix");
    for (std::size_t i = 0; i < q.n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < q.n; ++j) {
            if (i != j && q(i, j) < 0.0)
                throw std::invalid_argument("generator: negative off-diagonal");
            row += q(i, j);
        }
        if (std::fabs(row) > tol)
            throw std::invalid_argument("generator: row does not sum to zero");
    }
}

Matrix matrix_exp_transition(const Matrix& q, double t) {
    validate_generator(q);
    return matrix_exp_uniformization(q, t, 1e-13);
}

std::vector<double> stationary_of_generator(const Matrix& q) {
    validate_generator(q);
    const std::size_t n = q.n;
    // pi Q = 0 with sum(pi) = 1: transpose Q, overwrite the last equation
    Matrix a(n);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = q(j, i);
    for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
    b[n - 1] = 1.0;
    return solve_linear(std::move(a), std::move(b));
}

Matrix set_dual_generator(const Matrix& q) {
    validate_generator(q);
    const std::size_t K = q.n;
    if (K > 12) throw std::invalid_argument("set_dual_generator: K <= 12");
    const std::size_t S = std::size_t{1} << K;
    Matrix h(S);
    for (std::size_t A = 0; A < S; ++A) {
        double out_rate = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            const bool in_A = (A >> j) & 1;
            double rate = 0.0;
            for (std::size_t l = 0; l < K; ++l) {
                if (l == j) continue;
                const bool l_in_A = (A >> l) & 1;
                if (in_A != l_in_A) rate += q(j, l);
            }
            // j notin A: rate collects l in A, target adds j
            // j in A:    rate collects l in A-complement, target removes j
            if (rate == 0.0) continue;
            std::size_t target = A ^ (std::size_t{1} << j);
            h(A, target) += rate;
            out_rate += rate;
        }
        h(A, A) = -out_rate;
    }
    return h;
}

DualityCheck verify_mc_duality(const Matrix& q, std::size_t j, std::size_t l, double t) {
    const std::size_t K = q.n;
    if (j >= K || l >= K) throw std::invalid_argument("verify_mc_duality: index out of range");
    DualityCheck out;
    out.lhs = matrix_exp_transition(q, t)(j, l);
    Matrix h = set_dual_generator(q);
    Matrix ph = matrix_exp_uniformization(h, t, 1e-13);
    const std::size_t from = std::size_t{1} << l;
    double rhs = 0.0;
    for (std::size_t A = 0; A < ph.n; ++A)
        if ((A >> j) & 1) rhs += ph(from, A);
    out.rhs = rhs;
    out.diff = std::fabs(out.lhs - out.rhs);
    return out;
}

std::string duality_report_json(const std::vector<DualityCase>& cases) {
    nlohmann::json doc;
    doc["cases"] = nlohmann::json::array();
    double max_diff = 0.0;
    for (const auto& c : cases) {
        doc["cases"].push_back({{"case", c.label}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"diff", c.diff}});
        max_diff = std::max(max_diff, c.diff);
    }
    doc["max_diff"] = max_diff;
    return doc.dump(2);
}

Matrix random_irreducible_generator(std::size_t K, RngStream& rng, double lo, double hi) {
    if (K < 2) throw std::invalid_argument("random_irreducible_generator: K >= 2");
    if (!(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("random_irreducible_generator: need 0 < lo < hi");
    Matrix q(K);
    for (std::size_t i = 0; i < K; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            if (i == j) continue;
            q(i, j) = lo + (hi - lo) * rng.uniform();
            row += q(i, j);
        }
        q(i, i) = -row;
    }
    return q;
}

double wf_moment_dual_exact(double p0, double gamma, std::uint64_t n, double t) {
    if (p0 < 0.0 || p0 > 1.0) throw std::invalid_argument("wf_moment_dual: p0 in [0,1]");
    if (gamma < 0.0 || t < 0.0) throw std::invalid_argument("wf_moment_dual: negative parameter");
    if (n == 0) return 1.0;
    // death chain on block counts {1..n}, row index k-1
    Matrix q(n);
    for (std::uint64_t k = 2; k <= n; ++k) {
        double rate = 0.5 * gamma * static_cast<double>(k) * static_cast<double>(k - 1);
        q(k - 1, k - 2) = rate;
        q(k - 1, k - 1) = -rate;
    }
    Matrix pt = matrix_exp_uniformization(q, t, 1e-14);
    double value = 0.0;
    for (std::uint64_t k = 1; k <= n; ++k)
        value += pt(n - 1, k - 1) * std::pow(p0, static_cast<double>(k));
    return value;
}

McMoment wf_moment_dual_mc(double p0, double gamma, std::uint64_t n, double t, double dt,
                           std::uint64_t reps, std::uint64_t seed, int threads) {
    if (reps < 2) throw std::invalid_argument("wf_moment_dual_mc: reps >= 2");
    WfDiffusionSpec spec;
    spec.K = 2;
    spec.gamma = gamma;
    EnsembleSpec ens{seed, reps, threads};
    auto vals = run_replicates<double>(ens, [&](std::uint64_t, RngStream& rng) {
        auto traj = wf_diffusion_simulate(spec, {p0, 1.0 - p0}, t, dt, rng,
                                          std::numeric_limits<int>::max());
        return std::pow(traj.y.back()[0], static_cast<double>(n));
    });
    double sum = 0.0, sum2 = 0.0;
    for (double v : vals) {
        sum += v;
        sum2 += v * v;
    }
    double m = sum / static_cast<double>(reps);
    double var = (sum2 - sum * sum / static_cast<double>(reps)) / (static_cast<double>(reps) - 1.0);
    return {m, std::sqrt(var / static_cast<double>(reps))};
}

} // namespace popdyn
