#include "popdyn/branching.hpp"
#include "popdyn/ensemble.hpp"
#include "popdyn/specfun.hpp"
#include "popdyn/stats.hpp"
#include <cmath>
#include <stdexcept>
#include <algorithm>

namespace popdyn {

namespace {
std::uint64_t offspring_sum(const OffspringLaw& law, std::uint64_t n, RngStream& rng) {
    std::uint64_t s = 0;
    for (std::uint64_t i = 0; i < n; ++i) s += law.sample(rng);
    return s;
}
} // namespace

BgwPath simulate_bgw(const OffspringLaw& law, std::uint64_t z0, int ngen, RngStream& rng,
                     std::uint64_t cap) {
    if (ngen < 0) throw std::invalid_argument("simulate_bgw: ngen must be >= 0");
    BgwPath path;
    path.z.reserve(static_cast<std::size_t>(ngen) + 1);
    path.z.push_back(z0);
    if (z0 == 0) path.extinct_at = 0;
    std::uint64_t z = z0;
    for (int g = 1; g <= ngen; ++g) {
        if (z == 0) {
            path.z.push_back(0);
            continue;
        }
        if (z > cap) {
            path.capped = true;
            break;
        }
        z = offspring_sum(law, z, rng);
        path.z.push_back(z);
        if (z == 0 && path.extinct_at < 0) path.extinct_at = g;
    }
    return path;
}

bool bgw_extinct_by(const OffspringLaw& law, int ngen, RngStream& rng,
                    std::uint64_t survive_threshold) {
    std::uint64_t z = 1;
    for (int g = 0; g < ngen; ++g) {
        if (z == 0) return true;
        if (z >= survive_threshold) return false;
        z = offspring_sum(law, z, rng);
    }
    return z == 0;
}

BgwiPath simulate_bgwi(const OffspringLaw& law, const OffspringLaw& immigration,
                       std::uint64_t x0, int ngen, RngStream& rng, std::uint64_t cap) {
    if (ngen < 0) throw std::invalid_argument("simulate_bgwi: ngen must be >= 0");
    BgwiPath path;
    path.x.reserve(static_cast<std::size_t>(ngen) + 1);
    path.w.reserve(static_cast<std::size_t>(ngen) + 1);
    const double m = law.mean();
    double mn = 1.0;
    std::uint64_t x = x0;
    path.x.push_back(x);
    path.w.push_back(static_cast<double>(x));
    for (int g = 1; g <= ngen; ++g) {
        if (x > cap) {
            path.capped = true;
            break;
        }
        x = offspring_sum(law, x, rng) + immigration.sample(rng);
        mn *= m;
        path.x.push_back(x);
        path.w.push_back(static_cast<double>(x) / mn);
    }
    return path;
}

MultitypePath simulate_multitype_bgw(const std::vector<std::vector<OffspringLaw>>& laws,
                                     std::vector<std::uint64_t> z0, int ngen, RngStream& rng,
                                     std::uint64_t cap) {
    const std::size_t k = z0.size();
    if (laws.size() != k) throw std::invalid_argument("simulate_multitype_bgw: size mismatch");
    for (const auto& row : laws)
        if (row.size() != k) throw std::invalid_argument("simulate_multitype_bgw: ragged laws");
    MultitypePath path;
    path.z.push_back(z0);
    std::vector<std::uint64_t> cur = std::move(z0);
    for (int g = 1; g <= ngen; ++g) {
        std::uint64_t total = 0;
        for (auto c : cur) total += c;
        if (total > cap) {
            path.capped = true;
            break;
        }
        std::vector<std::uint64_t> next(k, 0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::uint64_t ind = 0; ind < cur[i]; ++ind)
                for (std::size_t j = 0; j < k; ++j)
                    next[j] += laws[i][j].sample(rng);
        cur = next;
        path.z.push_back(cur);
    }
    return path;
}

// ---- plane trees ----

namespace {
int add_node(PlaneTree& t, int parent) {
    int id = static_cast<int>(t.parent.size());
    t.parent.push_back(parent);
    t.children.emplace_back();
    t.depth.push_back(parent < 0 ? 0 : t.depth[static_cast<std::size_t>(parent)] + 1);
    if (parent >= 0) t.children[static_cast<std::size_t>(parent)].push_back(id);
    return id;
}
} // namespace

PlaneTree sample_bgw_tree(const OffspringLaw& law, std::size_t max_size, RngStream& rng) {
    PlaneTree t;
    add_node(t, -1);
    // grow generation by generation so truncation matches the population chain
    std::vector<int> frontier{0};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int node : frontier) {
            std::uint64_t k = law.sample(rng);
            for (std::uint64_t c = 0; c < k; ++c) {
                if (t.size() >= max_size) {
                    t.truncated = true;
                    return t;
                }
                next.push_back(add_node(t, node));
            }
        }
        frontier = std::move(next);
    }
    return t;
}

PlaneTree sample_size_biased_tree(const OffspringLaw& law, int ngen, std::size_t max_size,
                                  RngStream& rng) {
    if (ngen < 0) throw std::invalid_argument("sample_size_biased_tree: ngen must be >= 0");
    const OffspringLaw biased = law.size_biased();
    PlaneTree t;
    add_node(t, -1);
    t.spine.push_back(0);
    int spine_node = 0;
    // budding walk: the spine reproduces by the size-biased law, one uniform
    // child keeps the line going, siblings seed ordinary subtrees that run to
    // the same final generation
    std::vector<int> ordinary; // frontier of ordinary nodes, refilled per generation
    for (int g = 0; g < ngen; ++g) {
        std::vector<int> next_ordinary;
        // one generation of the ordinary frontier
        for (int node : ordinary) {
            std::uint64_t k = law.sample(rng);
            for (std::uint64_t c = 0; c < k; ++c) {
                if (t.size() >= max_size) { t.truncated = true; return t; }
                next_ordinary.push_back(add_node(t, node));
            }
        }
        // spine step
        std::uint64_t k = biased.sample(rng);
        std::uint64_t chosen = rng.uniform_below(k); // k >= 1 by construction
        int next_spine = -1;
        for (std::uint64_t c = 0; c < k; ++c) {
            if (t.size() >= max_size) { t.truncated = true; return t; }
            int id = add_node(t, spine_node);
            if (c == chosen) next_spine = id;
            else next_ordinary.push_back(id);
        }
        spine_node = next_spine;
        t.spine.push_back(spine_node);
        ordinary = std::move(next_ordinary);
    }
    return t;
}

namespace {
// decode a nonnegative walk (contour of the tree) into the tree itself
PlaneTree tree_from_dyck(const std::vector<int>& steps) {
    PlaneTree t;
    add_node(t, -1);
    std::vector<int> stack{0};
    for (int s : steps) {
        if (s > 0) {
            int id = add_node(t, stack.back());
            stack.push_back(id);
        } else {
            stack.pop_back();
        }
    }
    return t;
}
} // namespace

PlaneTree conditioned_tree_cycle_lemma(std::size_t n, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("conditioned tree: n must be >= 1");
    if (n == 1) {
        PlaneTree t;
        add_node(t, -1);
        return t;
    }
    // n-1 up steps and n down steps in random order sum to -1; exactly one
    // rotation (starting right at the first minimum of the partial sums) is a
    // nonnegative walk until its final step, and dropping that last down-step
    // leaves the contour of a uniform n-vertex tree
    const std::size_t N = 2 * n - 1;
    std::vector<int> steps(N, -1);
    for (std::size_t i = 0; i < n - 1; ++i) steps[i] = 1;
    for (std::size_t i = N - 1; i > 0; --i) {
        std::size_t j = rng.uniform_below(i + 1);
        std::swap(steps[i], steps[j]);
    }
    long sum = 0, min_sum = 0;
    std::size_t argmin = 0; // first index k (1-based prefix) attaining the minimum
    for (std::size_t k = 0; k < N; ++k) {
        sum += steps[k];
        if (sum < min_sum) {
            min_sum = sum;
            argmin = k + 1;
        }
    }
    std::vector<int> rotated(N);
    for (std::size_t k = 0; k < N; ++k) rotated[k] = steps[(argmin + k) % N];
    rotated.pop_back(); // strip the final forced down-step
    return tree_from_dyck(rotated);
}

PlaneTree conditioned_tree_rejection(std::size_t n, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("conditioned tree: n must be >= 1");
    if (n == 1) {
        PlaneTree t;
        add_node(t, -1);
        return t;
    }
    // walk excursion conditioned to first return at time 2n; attempts are
    // abandoned as soon as they return early or outlive 2n steps
    const std::size_t len = 2 * n;
    std::vector<int> steps;
    for (;;) {
        steps.clear();
        long h = 1; // first step up
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            int s = (rng.next_u64() & 1ULL) ? 1 : -1;
            h += s;
            if (h == 0) {
                ok = (k == len - 1);
                if (ok) steps.push_back(s);
                break;
            }
            steps.push_back(s);
            if (k == len - 1) ok = false; // did not close in time
        }
        if (ok && h == 0 && steps.size() == len - 1) {
            // drop the final down-step; what remains (after the implicit
            // leading up-step) is the tree contour
            steps.pop_back();
            return tree_from_dyck(steps);
        }
    }
}

PlaneTree sample_conditioned_geometric_tree(std::size_t n, RngStream& rng) {
    return n > 50 ? conditioned_tree_cycle_lemma(n, rng) : conditioned_tree_rejection(n, rng);
}

ContourHeight contour_and_height(const PlaneTree& tree) {
    ContourHeight out;
    if (tree.size() == 0) return out;
    out.height.reserve(tree.size());
    out.contour.reserve(2 * tree.size());
    // iterative depth-first walk; contour records the depth at the root, after
    // descending each edge, and after climbing back up
    struct Frame { int node; std::size_t next_child; };
    std::vector<Frame> stack;
    stack.push_back({0, 0});
    out.height.push_back(0);
    out.contour.push_back(0);
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& kids = tree.children[static_cast<std::size_t>(f.node)];
        if (f.next_child < kids.size()) {
            int ch = kids[f.next_child++];
            out.height.push_back(tree.depth[static_cast<std::size_t>(ch)]);
            out.contour.push_back(tree.depth[static_cast<std::size_t>(ch)]);
            stack.push_back({ch, 0});
        } else {
            stack.pop_back();
            if (!stack.empty())
                out.contour.push_back(tree.depth[static_cast<std::size_t>(stack.back().node)]);
        }
    }
    return out;
}

std::vector<std::uint64_t> level_counts(const PlaneTree& tree) {
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        std::size_t d = static_cast<std::size_t>(tree.depth[i]);
        if (d >= counts.size()) counts.resize(d + 1, 0);
        ++counts[d];
    }
    return counts;
}

namespace {
void brackets_rec(const PlaneTree& t, int node, std::string& out) {
    const auto& kids = t.children[static_cast<std::size_t>(node)];
    out += '[';
    out += std::to_string(kids.size());
    for (int ch : kids) brackets_rec(t, ch, out);
    out += ']';
}
void newick_rec(const PlaneTree& t, int node, const std::string& label, std::string& out) {
    const auto& kids = t.children[static_cast<std::size_t>(node)];
    if (!kids.empty()) {
        out += '(';
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (i) out += ',';
            newick_rec(t, kids[i], label + "." + std::to_string(i + 1), out);
        }
        out += ')';
    }
    out += label;
}
} // namespace

std::string tree_brackets(const PlaneTree& tree) {
    std::string out;
    if (tree.size() > 0) brackets_rec(tree, 0, out);
    return out;
}

std::string tree_newick(const PlaneTree& tree) {
    std::string out;
    if (tree.size() > 0) newick_rec(tree, 0, "1", out);
    out += ';';
    return out;
}

// ---- spectral data ----

PerronRoot perron_frobenius(const Matrix& m, double tol, int max_iter) {
    const std::size_t n = m.n;
    if (n == 0) throw std::invalid_argument("perron_frobenius: empty matrix");
    for (double x : m.a)
        if (x < 0.0 || !std::isfinite(x))
            throw std::invalid_argument("perron_frobenius: entries must be finite and >= 0");

    // primitivity via boolean reachability: some power of the pattern must be
    // strictly positive; (n-1)^2 + 1 powers suffice for primitive matrices
    {
        std::vector<char> pat(n * n), acc;
        for (std::size_t i = 0; i < n * n; ++i) pat[i] = m.a[i] > 0.0 ? 1 : 0;
        acc = pat;
        const std::size_t bound = (n - 1) * (n - 1) + 1;
        bool primitive = false;
        for (std::size_t p = 1; p <= bound; ++p) {
            bool all = true;
            for (char c : acc)
                if (!c) { all = false; break; }
            if (all) { primitive = true; break; }
            std::vector<char> nxt(n * n, 0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    if (acc[i * n + k])
                        for (std::size_t j = 0; j < n; ++j)
                            if (pat[k * n + j]) nxt[i * n + j] = 1;
            acc = std::move(nxt);
        }
        if (!primitive)
            throw std::domain_error("perron_frobenius: matrix is not primitive "
                                    "(no power has all entries positive)");
    }

    auto iterate = [&](bool transpose) {
        std::vector<double> x(n, 1.0 / static_cast<double>(n));
        double rho = 0.0;
        int it = 0;
        for (; it < max_iter; ++it) {
            std::vector<double> y = transpose ? vec_mat(x, m) : mat_vec(m, x);
            double s = 0.0;
            for (double v : y) s += v;
            if (s <= 0.0) throw std::domain_error("perron_frobenius: vanishing iterate");
            for (double& v : y) v /= s;
            rho = s;
            double diff = 0.0;
            for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::fabs(y[i] - x[i]));
            x = std::move(y);
            // residual check directly on the stated contract
            std::vector<double> mx = transpose ? vec_mat(x, m) : mat_vec(m, x);
            double resid = 0.0;
            for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::fabs(mx[i] - rho * x[i]));
            if (resid < tol && diff < tol) break;
        }
        if (it >= max_iter)
            throw std::runtime_error("perron_frobenius: power iteration cap exceeded");
        return std::pair<std::vector<double>, std::pair<double, int>>{x, {rho, it}};
    };

    auto [u, rho_it] = iterate(false);
    auto [v, rho_it2] = iterate(true);
    PerronRoot out;
    out.rho = rho_it.first;
    out.iterations = std::max(rho_it.second, rho_it2.second);
    out.u = std::move(u); // already scaled to sum 1
    out.v = std::move(v);
    double uv = 0.0;
    for (std::size_t i = 0; i < n; ++i) uv += out.u[i] * out.v[i];
    for (double& x : out.v) x /= uv;
    return out;
}

CriticalLimitEstimates critical_limit_estimates(const OffspringLaw& law, int n,
                                                std::uint64_t reps, std::uint64_t seed,
                                                int threads) {
    if (n <= 0 || reps == 0) throw std::invalid_argument("critical_limit_estimates: bad sizes");
    EnsembleSpec spec{seed, reps, threads};
    auto finals = run_replicates<std::uint64_t>(spec, [&](std::uint64_t, RngStream& rng) {
        BgwPath p = simulate_bgw(law, 1, n, rng);
        return p.capped ? std::uint64_t(1) /* surviving, size unusable */ : p.z.back();
    });
    CriticalLimitEstimates out;
    std::vector<double> rescaled;
    for (auto z : finals)
        if (z > 0) rescaled.push_back(static_cast<double>(z) / static_cast<double>(n));
    out.survivors = rescaled.size();
    double p_hat = static_cast<double>(out.survivors) / static_cast<double>(reps);
    out.n_survival = static_cast<double>(n) * p_hat;
    out.n_survival_se =
        static_cast<double>(n) * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(reps));
    if (out.survivors == 0) {
        out.inconclusive = true;
        return out;
    }
    const double mean = 0.5 * law.variance();
    out.ks_distance =
        ks_statistic(std::move(rescaled), [mean](double x) { return exponential_cdf(mean, x); });
    return out;
}

} // namespace popdyn
