#include "popdyn/genealogy.hpp"
#include "popdyn/specfun.hpp"
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace popdyn {

Partition Partition::singletons(std::size_t n) {
    Partition p;
    p.blocks.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.blocks[i] = {static_cast<int>(i)};
    return p;
}

void Partition::canonicalize() {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
}

std::vector<int> Partition::multiplicities(std::size_t n) const {
    std::vector<int> a(n, 0);
    for (const auto& b : blocks) {
        if (b.empty() || b.size() > n) throw std::logic_error("Partition: bad block size");
        ++a[b.size() - 1];
    }
    return a;
}

namespace {
// merge the chosen block indices into one block and record the event
void apply_merger(CoalescentPath& path, Partition& part, std::vector<std::size_t> which,
                  double t) {
    std::sort(which.begin(), which.end());
    std::vector<int>& target = part.blocks[which.front()];
    for (std::size_t i = which.size(); i-- > 1;) {
        auto& src = part.blocks[which[i]];
        target.insert(target.end(), src.begin(), src.end());
        part.blocks.erase(part.blocks.begin() + static_cast<std::ptrdiff_t>(which[i]));
    }
    part.canonicalize();
    path.times.push_back(t);
    path.partitions.push_back(part);
}
} // namespace

CoalescentPath kingman_sample(std::size_t n, double gamma, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("kingman_sample: n >= 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("kingman_sample: gamma > 0");
    CoalescentPath path;
    path.n = n;
    Partition part = Partition::singletons(n);
    double t = 0.0;
    while (part.size() > 1) {
        const std::size_t k = part.size();
        double rate = gamma * 0.5 * static_cast<double>(k) * static_cast<double>(k - 1);
        t += rng.exponential(rate);
        std::size_t i = rng.uniform_below(k);
        std::size_t j = rng.uniform_below(k - 1);
        if (j >= i) ++j;
        apply_merger(path, part, {i, j}, t);
    }
    return path;
}

LambdaMeasure LambdaMeasure::delta_zero(double weight) {
    LambdaMeasure m;
    m.atom_at_zero = weight;
    m.breaks = {0.0, 1.0};
    m.height = {0.0};
    return m;
}

LambdaMeasure LambdaMeasure::uniform(double weight) {
    LambdaMeasure m;
    m.breaks = {0.0, 1.0};
    m.height = {weight};
    return m;
}

void LambdaMeasure::validate() const {
    if (atom_at_zero < 0.0) throw std::invalid_argument("LambdaMeasure: negative atom");
    if (breaks.size() < 2 || breaks.front() != 0.0 || breaks.back() != 1.0)
        throw std::invalid_argument("LambdaMeasure: breaks must run 0 to 1");
    if (height.size() + 1 != breaks.size())
        throw std::invalid_argument("LambdaMeasure: height/breaks size mismatch");
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        if (!(breaks[p] < breaks[p + 1]))
            throw std::invalid_argument("LambdaMeasure: breaks must increase");
        if (height[p] < 0.0) throw std::invalid_argument("LambdaMeasure: negative density");
    }
    if (!(total_mass() > 0.0)) throw std::invalid_argument("LambdaMeasure: zero measure");
}

double LambdaMeasure::total_mass() const {
    double m = atom_at_zero;
    for (std::size_t p = 0; p < height.size(); ++p)
        m += height[p] * (breaks[p + 1] - breaks[p]);
    return m;
}

double LambdaMeasure::merger_rate(std::uint64_t b, std::uint64_t k) const {
    if (k < 2 || k > b) throw std::invalid_argument("LambdaMeasure::merger_rate: need 2 <= k <= b");
    double rate = k == 2 ? atom_at_zero : 0.0;
    // per piece: height * B(k-1, b-k+1) * [I_x(k-1, b-k+1)] difference
    const double ak = static_cast<double>(k - 1);
    const double bk = static_cast<double>(b - k + 1);
    const double log_beta = std::lgamma(ak) + std::lgamma(bk) - std::lgamma(ak + bk);
    for (std::size_t p = 0; p < height.size(); ++p) {
        if (height[p] == 0.0) continue;
        double di = beta_inc(ak, bk, breaks[p + 1]) - beta_inc(ak, bk, breaks[p]);
        if (di > 0.0) rate += height[p] * std::exp(log_beta) * di;
    }
    return rate;
}

double LambdaMeasure::total_rate(std::uint64_t b) const {
    double total = 0.0;
    for (std::uint64_t k = 2; k <= b; ++k) {
        // C(b,k) * B(k-1, b-k+1) = b / (k(k-1)) cancels the factorials, so the
        // binomial never overflows; redo the merger-rate integral with that
        // prefactor folded in
        double comb_beta = static_cast<double>(b) / (static_cast<double>(k) * static_cast<double>(k - 1));
        double density_part = 0.0;
        const double ak = static_cast<double>(k - 1);
        const double bk = static_cast<double>(b - k + 1);
        for (std::size_t p = 0; p < height.size(); ++p) {
            if (height[p] == 0.0) continue;
            density_part += height[p] * (beta_inc(ak, bk, breaks[p + 1]) - beta_inc(ak, bk, breaks[p]));
        }
        total += comb_beta * density_part;
        if (k == 2) total += 0.5 * static_cast<double>(b) * static_cast<double>(b - 1) * atom_at_zero;
    }
    return total;
}

CoalescentPath lambda_coalescent_sample(std::size_t n, const LambdaMeasure& lambda,
                                        RngStream& rng) {
    if (n == 0) throw std::invalid_argument("lambda_coalescent_sample: n >= 1");
    lambda.validate();
    CoalescentPath path;
    path.n = n;
    Partition part = Partition::singletons(n);
    double t = 0.0;
    std::vector<double> rate_k;
    std::vector<std::size_t> picked;
    while (part.size() > 1) {
        const std::uint64_t b = part.size();
        rate_k.assign(b + 1, 0.0);
        double total = 0.0;
        for (std::uint64_t k = 2; k <= b; ++k) {
            double comb_beta =
                static_cast<double>(b) / (static_cast<double>(k) * static_cast<double>(k - 1));
            const double ak = static_cast<double>(k - 1);
            const double bk = static_cast<double>(b - k + 1);
            double density_part = 0.0;
            for (std::size_t p = 0; p < lambda.height.size(); ++p) {
                if (lambda.height[p] == 0.0) continue;
                density_part += lambda.height[p] *
                                (beta_inc(ak, bk, lambda.breaks[p + 1]) -
                                 beta_inc(ak, bk, lambda.breaks[p]));
            }
            double r = comb_beta * density_part;
            if (k == 2)
                r += 0.5 * static_cast<double>(b) * static_cast<double>(b - 1) * lambda.atom_at_zero;
            rate_k[k] = r;
            total += r;
        }
        if (!(total > 0.0)) throw std::runtime_error("lambda_coalescent_sample: zero total rate");
        t += rng.exponential(total);
        double u = rng.uniform() * total;
        std::uint64_t k = 2;
        for (; k < b; ++k) {
            if (u < rate_k[k]) break;
            u -= rate_k[k];
        }
        // partial Fisher-Yates over block indices picks a uniform k-subset
        std::vector<std::size_t> idx(b);
        for (std::size_t i = 0; i < b; ++i) idx[i] = i;
        picked.clear();
        for (std::uint64_t c = 0; c < k; ++c) {
            std::size_t swap_at = c + rng.uniform_below(b - c);
            std::swap(idx[c], idx[swap_at]);
            picked.push_back(idx[c]);
        }
        apply_merger(path, part, picked, t);
    }
    return path;
}

std::string coalescent_event_csv(const CoalescentPath& path) {
    std::ostringstream out;
    out << "time,blocks_after,new_block\n";
    Partition prev = Partition::singletons(path.n);
    char buf[32];
    for (std::size_t e = 0; e < path.times.size(); ++e) {
        const Partition& cur = path.partitions[e];
        // the new block is the one absent from the previous partition
        const std::vector<int>* formed = nullptr;
        for (const auto& blk : cur.blocks) {
            if (std::find(prev.blocks.begin(), prev.blocks.end(), blk) == prev.blocks.end()) {
                formed = &blk;
                break;
            }
        }
        if (!formed) throw std::logic_error("coalescent_event_csv: no merger found at event");
        std::snprintf(buf, sizeof buf, "%.17g", path.times[e]);
        out << buf << ',' << cur.size() << ',';
        for (std::size_t i = 0; i < formed->size(); ++i) {
            if (i) out << '+';
            out << (*formed)[i] + 1;
        }
        out << '\n';
        prev = cur;
    }
    return out.str();
}

std::string coalescent_newick(const CoalescentPath& path) {
    if (path.n == 0) return ";";
    struct Clade {
        std::vector<int> leaves;
        std::string text;
        double height = 0.0;
    };
    std::vector<Clade> clades;
    clades.reserve(path.n);
    for (std::size_t i = 0; i < path.n; ++i)
        clades.push_back({{static_cast<int>(i)}, std::to_string(i + 1), 0.0});
    char buf[32];
    for (std::size_t e = 0; e < path.times.size(); ++e) {
        const double t = path.times[e];
        const Partition& cur = path.partitions[e];
        // children of the merger = clades whose leaf sets are no longer blocks
        std::vector<std::size_t> merged;
        for (std::size_t c = 0; c < clades.size(); ++c)
            if (std::find(cur.blocks.begin(), cur.blocks.end(), clades[c].leaves) ==
                cur.blocks.end())
                merged.push_back(c);
        if (merged.size() < 2) throw std::logic_error("coalescent_newick: malformed path");
        Clade next;
        std::string text = "(";
        for (std::size_t i = 0; i < merged.size(); ++i) {
            const Clade& ch = clades[merged[i]];
            next.leaves.insert(next.leaves.end(), ch.leaves.begin(), ch.leaves.end());
            std::snprintf(buf, sizeof buf, "%.17g", t - ch.height);
            if (i) text += ',';
            text += ch.text + ':' + buf;
        }
        text += ')';
        next.text = std::move(text);
        next.height = t;
        std::sort(next.leaves.begin(), next.leaves.end());
        for (std::size_t i = merged.size(); i-- > 0;)
            clades.erase(clades.begin() + static_cast<std::ptrdiff_t>(merged[i]));
        clades.push_back(std::move(next));
    }
    if (clades.size() != 1) throw std::logic_error("coalescent_newick: path does not reach MRCA");
    return clades.front().text + ";";
}

namespace {

struct MutationTable {
    std::size_t K = 0;
    std::vector<double> exit_rate;            // per type
    std::vector<std::vector<double>> target_cdf;  // conditional jump cdf per type

    MutationTable(const Matrix& rates, std::size_t K_) : K(K_) {
        if (rates.n == 0) {
            exit_rate.assign(K, 0.0);
            return;
        }
        if (rates.n != K) throw std::invalid_argument("mutation rate matrix size mismatch");
        exit_rate.resize(K);
        target_cdf.resize(K);
        for (std::size_t i = 0; i < K; ++i) {
            if (rates(i, i) != 0.0)
                throw std::invalid_argument("mutation rate matrix must have zero diagonal");
            double total = 0.0;
            for (std::size_t j = 0; j < K; ++j) {
                if (rates(i, j) < 0.0) throw std::invalid_argument("negative mutation rate");
                total += rates(i, j);
            }
            exit_rate[i] = total;
            target_cdf[i].resize(K);
            double cum = 0.0;
            for (std::size_t j = 0; j < K; ++j) {
                cum += total > 0.0 ? rates(i, j) / total : 0.0;
                target_cdf[i][j] = cum;
            }
            if (total > 0.0) target_cdf[i][K - 1] = 1.0;
        }
    }

    std::size_t jump_from(std::size_t i, RngStream& rng) const {
        double u = rng.uniform();
        const auto& cdf = target_cdf[i];
        return static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
};

// shared Gillespie driver: `resample_rate` is the total copy rate and
// `pick_pair` returns (source, target)
template <typename PickPair>
ParticlePath particle_gillespie(std::vector<int> types, std::size_t K, double resample_rate,
                                PickPair&& pick_pair, const MutationTable& mut, double tmax,
                                RngStream& rng) {
    const std::size_t n = types.size();
    ParticlePath path;
    std::vector<std::uint64_t> counts(K, 0);
    double mut_total = 0.0;
    for (int ty : types) {
        if (ty < 0 || static_cast<std::size_t>(ty) >= K)
            throw std::invalid_argument("particle type out of range");
        ++counts[static_cast<std::size_t>(ty)];
        mut_total += mut.exit_rate[static_cast<std::size_t>(ty)];
    }
    path.t.push_back(0.0);
    path.counts.push_back(counts);
    double t = 0.0;
    for (;;) {
        double total = resample_rate + mut_total;
        if (!(total > 0.0)) break;
        t += rng.exponential(total);
        if (t > tmax) break;
        if (rng.uniform() * total < resample_rate) {
            auto [src, dst] = pick_pair(rng);
            auto from = static_cast<std::size_t>(types[dst]);
            auto to = static_cast<std::size_t>(types[src]);
            if (from != to) {
                --counts[from];
                ++counts[to];
                mut_total += mut.exit_rate[to] - mut.exit_rate[from];
                types[dst] = types[src];
            }
        } else {
            // choose the mutating particle proportionally to its exit rate
            double u = rng.uniform() * mut_total;
            std::size_t who = 0;
            for (; who + 1 < n; ++who) {
                double r = mut.exit_rate[static_cast<std::size_t>(types[who])];
                if (u < r) break;
                u -= r;
            }
            auto from = static_cast<std::size_t>(types[who]);
            std::size_t to = mut.jump_from(from, rng);
            if (to != from) {
                --counts[from];
                ++counts[to];
                mut_total += mut.exit_rate[to] - mut.exit_rate[from];
                types[who] = static_cast<int>(to);
            }
        }
        path.t.push_back(t);
        path.counts.push_back(counts);
    }
    path.t.push_back(tmax);
    path.counts.push_back(counts);
    path.final_types = std::move(types);
    return path;
}

} // namespace

ParticlePath moran_simulate(std::vector<int> init_types, std::size_t K, double gamma,
                            const Matrix& mutation_rates, double tmax, RngStream& rng) {
    const std::size_t n = init_types.size();
    if (n < 2) throw std::invalid_argument("moran_simulate: n >= 2");
    if (gamma < 0.0) throw std::invalid_argument("moran_simulate: gamma >= 0");
    MutationTable mut(mutation_rates, K);
    double resample = 0.5 * gamma * static_cast<double>(n) * static_cast<double>(n - 1);
    auto pick = [n](RngStream& r) {
        std::size_t src = r.uniform_below(n);
        std::size_t dst = r.uniform_below(n - 1);
        if (dst >= src) ++dst;
        return std::pair<std::size_t, std::size_t>{src, dst};
    };
    return particle_gillespie(std::move(init_types), K, resample, pick, mut, tmax, rng);
}

ParticlePath lookdown_simulate(std::vector<int> init_types, std::size_t K, double gamma,
                               const Matrix& mutation_rates, double tmax, RngStream& rng) {
    const std::size_t n = init_types.size();
    if (n < 2) throw std::invalid_argument("lookdown_simulate: n >= 2");
    if (gamma < 0.0) throw std::invalid_argument("lookdown_simulate: gamma >= 0");
    MutationTable mut(mutation_rates, K);
    double resample = 0.5 * gamma * static_cast<double>(n) * static_cast<double>(n - 1);
    auto pick = [n](RngStream& r) {
        // uniform unordered pair i < j; j looks down and copies i
        std::size_t i = r.uniform_below(n);
        std::size_t j = r.uniform_below(n - 1);
        if (j >= i) ++j;
        if (i > j) std::swap(i, j);
        return std::pair<std::size_t, std::size_t>{i, j};
    };
    return particle_gillespie(std::move(init_types), K, resample, pick, mut, tmax, rng);
}

Partition ewens_sample(std::size_t n, double theta, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("ewens_sample: n >= 1");
    if (!(theta > 0.0)) throw std::domain_error("ewens_sample: theta > 0");
    Partition part;
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform() * (theta + static_cast<double>(i));
        if (u < theta || part.blocks.empty()) {
            part.blocks.push_back({static_cast<int>(i)});
            sizes.push_back(1);
        } else {
            u -= theta;
            std::size_t b = 0;
            for (; b + 1 < part.blocks.size(); ++b) {
                if (u < static_cast<double>(sizes[b])) break;
                u -= static_cast<double>(sizes[b]);
            }
            part.blocks[b].push_back(static_cast<int>(i));
            ++sizes[b];
        }
    }
    part.canonicalize();
    return part;
}

double ewens_probability(const std::vector<int>& a, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("ewens_probability: theta > 0");
    long n = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] < 0) throw std::invalid_argument("ewens_probability: negative multiplicity");
        n += static_cast<long>(j + 1) * a[j];
    }
    if (n == 0) throw std::invalid_argument("ewens_probability: empty partition");
    double log_p = std::lgamma(static_cast<double>(n) + 1.0) + std::lgamma(theta) -
                   std::lgamma(static_cast<double>(n) + theta);
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] == 0) continue;
        double aj = a[j];
        log_p += aj * std::log(theta) - aj * std::log(static_cast<double>(j + 1)) -
                 std::lgamma(aj + 1.0);
    }
    return std::exp(log_p);
}

AtomVector gem_sample(double theta, double eps, RngStream& rng) {
    if (!(theta > 0.0)) throw std::domain_error("gem_sample: theta > 0");
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("gem_sample: eps in (0,1)");
    AtomVector out;
    double rem = 1.0;
    while (rem >= eps) {
        double v = rng.beta(1.0, theta);
        double q = v * rem;
        out.xi.push_back(q);
        rem -= q;  // subtraction keeps sum(xi) + remainder == 1 up to rounding
        if (out.xi.size() > 100000000)
            throw std::runtime_error("gem_sample: stick failed to shrink");
    }
    out.remainder = rem;
    return out;
}

AtomVector pd_sample_via_gamma(double theta, double eps, RngStream& rng) {
    if (!(theta > 0.0)) throw std::domain_error("pd_sample_via_gamma: theta > 0");
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("pd_sample_via_gamma: eps in (0,1)");
    const double u_min = -std::log1p(-eps);
    AtomVector out;
    double arrivals = 0.0;
    double total = 0.0;
    for (;;) {
        arrivals += rng.exponential(1.0);
        double u = expint_e1_inv(arrivals / theta);
        if (u < u_min) break;
        out.xi.push_back(u);
        total += u;
        if (out.xi.size() > 100000000)
            throw std::runtime_error("pd_sample_via_gamma: atom count runaway");
    }
    if (out.xi.empty()) {
        // all jumps fell below the cut (tiny theta); return a single atom
        out.xi.push_back(1.0);
        return out;
    }
    for (double& x : out.xi) x /= total;
    return out;
}

double homozygosity(std::size_t n, double theta) {
    if (n < 2) throw std::invalid_argument("homozygosity: n >= 2");
    if (theta < 0.0) throw std::domain_error("homozygosity: theta >= 0");
    double h = 1.0;
    for (std::size_t j = 1; j < n; ++j)
        h *= static_cast<double>(j) / (static_cast<double>(j) + theta);
    return h;
}

} // namespace popdyn
