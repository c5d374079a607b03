#include "popdyn/spatial.hpp"
#include "popdyn/ensemble.hpp"
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace popdyn {

TorusLattice TorusLattice::nearest_neighbor(std::size_t d, std::size_t L) {
    TorusLattice lat;
    lat.d = d;
    lat.L = L;
    const double p = 1.0 / (2.0 * static_cast<double>(d));
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<int> plus(d, 0), minus(d, 0);
        plus[i] = 1;
        minus[i] = -1;
        lat.offsets.push_back(plus);
        lat.offsets.push_back(minus);
        lat.probs.push_back(p);
        lat.probs.push_back(p);
    }
    return lat;
}

void TorusLattice::validate() const {
    if (d == 0 || L < 2) throw std::invalid_argument("TorusLattice: need d >= 1, L >= 2");
    if (offsets.empty() || offsets.size() != probs.size())
        throw std::invalid_argument("TorusLattice: offsets/probs mismatch");
    double total = 0.0;
    std::map<std::vector<int>, double> table;
    for (std::size_t k = 0; k < offsets.size(); ++k) {
        if (offsets[k].size() != d) throw std::invalid_argument("TorusLattice: offset dimension");
        if (!(probs[k] > 0.0)) throw std::invalid_argument("TorusLattice: kernel weights must be > 0");
        bool all_zero_mod = true;
        for (int v : offsets[k])
            if (((v % static_cast<int>(L)) + static_cast<int>(L)) % static_cast<int>(L) != 0)
                all_zero_mod = false;
        if (all_zero_mod) throw std::invalid_argument("TorusLattice: kernel must have p(0) = 0");
        if (table.count(offsets[k])) throw std::invalid_argument("TorusLattice: duplicate offset");
        table[offsets[k]] = probs[k];
        total += probs[k];
    }
    if (std::fabs(total - 1.0) > 1e-9) throw std::invalid_argument("TorusLattice: kernel must sum to 1");
    for (const auto& [off, p] : table) {
        std::vector<int> neg(d);
        for (std::size_t i = 0; i < d; ++i) neg[i] = -off[i];
        auto it = table.find(neg);
        if (it == table.end() || std::fabs(it->second - p) > 1e-12)
            throw std::invalid_argument("TorusLattice: kernel must be symmetric");
    }
}

std::size_t TorusLattice::sites() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < d; ++i) n *= L;
    return n;
}

std::vector<int> TorusLattice::coords(std::size_t site) const {
    std::vector<int> c(d);
    for (std::size_t i = 0; i < d; ++i) {
        c[i] = static_cast<int>(site % L);
        site /= L;
    }
    return c;
}

std::size_t TorusLattice::index(const std::vector<int>& c) const {
    std::size_t site = 0;
    for (std::size_t i = d; i-- > 0;) {
        int v = ((c[i] % static_cast<int>(L)) + static_cast<int>(L)) % static_cast<int>(L);
        site = site * L + static_cast<std::size_t>(v);
    }
    return site;
}

std::size_t TorusLattice::neighbor(std::size_t site, std::size_t offset_idx) const {
    std::vector<int> c = coords(site);
    const std::vector<int>& off = offsets[offset_idx];
    for (std::size_t i = 0; i < d; ++i) c[i] += off[i];
    return index(c);
}

std::size_t TorusLattice::sample_neighbor(std::size_t site, RngStream& rng) const {
    double u = rng.uniform();
    std::size_t k = 0;
    for (; k + 1 < probs.size(); ++k) {
        if (u < probs[k]) break;
        u -= probs[k];
    }
    return neighbor(site, k);
}

Matrix TorusLattice::rw_generator(double rate) const {
    const std::size_t n = sites();
    Matrix q(n);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t k = 0; k < offsets.size(); ++k)
            q(x, neighbor(x, k)) += rate * probs[k];
        q(x, x) -= rate;
    }
    return q;
}

VoterPath voter_simulate(const TorusLattice& lat, SpinConfig eta0, double tmax, RngStream& rng,
                         std::uint64_t record_every, std::uint64_t max_events) {
    lat.validate();
    const std::size_t n = lat.sites();
    if (eta0.size() != n) throw std::invalid_argument("voter_simulate: config size mismatch");
    if (record_every == 0) record_every = 1;
    VoterPath path;
    std::uint64_t ones = 0;
    for (std::uint8_t v : eta0) {
        if (v > 1) throw std::invalid_argument("voter_simulate: spins are 0/1");
        ones += v;
    }
    path.t.push_back(0.0);
    path.ones.push_back(ones);
    double t = 0.0;
    const double total_rate = static_cast<double>(n);
    std::uint64_t events = 0;
    while (ones != 0 && ones != n) {
        if (events >= max_events) {
            path.capped = true;
            break;
        }
        t += rng.exponential(total_rate);
        if (t > tmax) {
            t = tmax;
            break;
        }
        std::size_t x = rng.uniform_below(n);
        std::size_t y = lat.sample_neighbor(x, rng);
        ++events;
        if (eta0[x] != eta0[y]) {
            eta0[x] = eta0[y];
            ones += eta0[x] ? 1 : std::uint64_t(-1);
        }
        if (events % record_every == 0) {
            path.t.push_back(t);
            path.ones.push_back(ones);
        }
    }
    if (ones == 0 || ones == n) {
        path.consensus = true;
        path.consensus_value = ones == 0 ? 0 : 1;
    }
    path.final_time = std::min(t, tmax);
    if (path.t.back() != path.final_time || path.ones.back() != ones) {
        path.t.push_back(path.final_time);
        path.ones.push_back(ones);
    }
    path.final_config = std::move(eta0);
    return path;
}

DualWalkersPath coalescing_rw_dual(const TorusLattice& lat, std::vector<std::size_t> start_sites,
                                   double tmax, double jump_rate, double kappa, RngStream& rng) {
    lat.validate();
    if (start_sites.empty()) throw std::invalid_argument("coalescing_rw_dual: empty start set");
    if (!(jump_rate > 0.0)) throw std::invalid_argument("coalescing_rw_dual: jump_rate > 0");
    if (kappa < 0.0) throw std::invalid_argument("coalescing_rw_dual: kappa >= 0");
    const bool instant = std::isinf(kappa);
    DualWalkersPath path;
    path.initial_count = start_sites.size();
    std::vector<std::size_t>& w = start_sites;
    if (instant) {
        // merge any initially stacked walkers
        std::sort(w.begin(), w.end());
        w.erase(std::unique(w.begin(), w.end()), w.end());
    }
    auto colocated_pairs = [&]() {
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = i + 1; j < w.size(); ++j)
                if (w[i] == w[j]) ++pairs;
        return pairs;
    };
    double t = 0.0;
    // survivors keep walking after every merge: positions are reported at
    // tmax, not at the last coalescence
    for (;;) {
        std::size_t pairs = instant ? 0 : colocated_pairs();
        double walk = jump_rate * static_cast<double>(w.size());
        double coal = instant ? 0.0 : kappa * static_cast<double>(pairs);
        double total = walk + coal;
        if (total <= 0.0) break;
        t += rng.exponential(total);
        if (t > tmax) break;
        if (rng.uniform() * total < walk) {
            std::size_t who = rng.uniform_below(w.size());
            w[who] = lat.sample_neighbor(w[who], rng);
            if (instant) {
                for (std::size_t other = 0; other < w.size(); ++other)
                    if (other != who && w[other] == w[who]) {
                        w.erase(w.begin() + static_cast<std::ptrdiff_t>(std::max(who, other)));
                        path.coalescence_times.push_back(t);
                        break;
                    }
            }
        } else {
            std::size_t pick = rng.uniform_below(pairs);
            for (std::size_t i = 0; i < w.size(); ++i) {
                bool done = false;
                for (std::size_t j = i + 1; j < w.size(); ++j)
                    if (w[i] == w[j]) {
                        if (pick == 0) {
                            w.erase(w.begin() + static_cast<std::ptrdiff_t>(j));
                            path.coalescence_times.push_back(t);
                            done = true;
                            break;
                        }
                        --pick;
                    }
                if (done) break;
            }
        }
    }
    path.sites = std::move(w);
    return path;
}

DualityMcCheck voter_duality_check(const TorusLattice& lat, const SpinConfig& eta0,
                                   const std::vector<std::size_t>& a_sites, double t,
                                   std::uint64_t reps, std::uint64_t seed, int threads) {
    lat.validate();
    if (a_sites.empty() || a_sites.size() > 4)
        throw std::invalid_argument("voter_duality_check: 1 <= |A| <= 4");
    for (std::size_t x : a_sites)
        if (x >= lat.sites()) throw std::invalid_argument("voter_duality_check: site out of range");
    EnsembleSpec fwd{seed, reps, threads};
    auto lhs_vals = run_replicates<double>(fwd, [&](std::uint64_t, RngStream& rng) {
        VoterPath p = voter_simulate(lat, eta0, t, rng, std::uint64_t(-1));
        double prod = 1.0;
        for (std::size_t x : a_sites) prod *= p.final_config[x];
        return prod;
    });
    EnsembleSpec bwd{derive_seed(seed, "voter-dual-rhs"), reps, threads};
    auto rhs_vals = run_replicates<double>(bwd, [&](std::uint64_t, RngStream& rng) {
        std::vector<std::size_t> start(a_sites.begin(), a_sites.end());
        DualWalkersPath dual =
            coalescing_rw_dual(lat, std::move(start), t, 1.0, kInstantCoalescence, rng);
        double prod = 1.0;
        for (std::size_t y : dual.sites) prod *= eta0[y];
        return prod;
    });
    auto mean_se = [reps](const std::vector<double>& v) {
        double s = 0.0, s2 = 0.0;
        for (double x : v) {
            s += x;
            s2 += x * x;
        }
        double n = static_cast<double>(reps);
        double m = s / n;
        double var = std::max(0.0, (s2 - s * s / n) / (n - 1.0));
        return std::pair<double, double>{m, std::sqrt(var / n)};
    };
    DualityMcCheck out;
    std::tie(out.lhs, out.lhs_se) = mean_se(lhs_vals);
    std::tie(out.rhs, out.rhs_se) = mean_se(rhs_vals);
    double combined = std::sqrt(out.lhs_se * out.lhs_se + out.rhs_se * out.rhs_se);
    out.z = combined > 0.0 ? std::fabs(out.lhs - out.rhs) / combined : 0.0;
    return out;
}

FreqPath stepping_stone_simulate(const TorusLattice& lat, double c, double gamma, double s,
                                 FreqConfig x0, double tmax, double dt, RngStream& rng,
                                 int record_every) {
    lat.validate();
    const std::size_t n = lat.sites();
    if (x0.size() != n) throw std::invalid_argument("stepping_stone_simulate: config size mismatch");
    if (c < 0.0 || gamma < 0.0) throw std::invalid_argument("stepping_stone_simulate: c, gamma >= 0");
    if (!(dt > 0.0) || tmax < 0.0) throw std::invalid_argument("stepping_stone_simulate: bad grid");
    if (dt * (c + gamma) >= 0.05)
        throw std::invalid_argument("stepping_stone_simulate: need dt (c + gamma) < 0.05");
    for (double v : x0)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("stepping_stone_simulate: frequencies in [0,1]");
    if (record_every < 1) record_every = 1;
    FreqPath path;
    path.t.push_back(0.0);
    path.x.push_back(x0);
    FreqConfig x = std::move(x0), next(n);
    const long nsteps = static_cast<long>(std::ceil(tmax / dt - 1e-12));
    double t = 0.0;
    for (long step = 0; step < nsteps; ++step) {
        double h = std::min(dt, tmax - t);
        for (std::size_t site = 0; site < n; ++site) {
            double drift = s * x[site] * (1.0 - x[site]);
            for (std::size_t k = 0; k < lat.offsets.size(); ++k)
                drift += c * lat.probs[k] * (x[lat.neighbor(site, k)] - x[site]);
            double var = 2.0 * gamma * x[site] * (1.0 - x[site]);
            double v = x[site] + drift * h +
                       (var > 0.0 ? std::sqrt(var * h) * rng.normal() : 0.0);
            next[site] = std::min(1.0, std::max(0.0, v));
        }
        x.swap(next);
        t += h;
        if ((step + 1) % record_every == 0 || step + 1 == nsteps) {
            path.t.push_back(t);
            path.x.push_back(x);
        }
    }
    return path;
}

TwoPointPrediction stepping_stone_moment_dual(const TorusLattice& lat, double c, double gamma,
                                              std::size_t xi_site, double theta, double t,
                                              std::uint64_t reps, std::uint64_t seed,
                                              int threads) {
    lat.validate();
    if (xi_site >= lat.sites()) throw std::invalid_argument("stepping_stone_moment_dual: bad site");
    if (theta < 0.0 || theta > 1.0)
        throw std::invalid_argument("stepping_stone_moment_dual: theta in [0,1]");
    if (!(gamma >= 0.0) || !(c > 0.0))
        throw std::invalid_argument("stepping_stone_moment_dual: need c > 0, gamma >= 0");
    EnsembleSpec spec{seed, reps, threads};
    auto merged = run_replicates<double>(spec, [&](std::uint64_t, RngStream& rng) {
        DualWalkersPath dual = coalescing_rw_dual(lat, {0, xi_site}, t, c, 2.0 * gamma, rng);
        return dual.sites.size() == 1 ? 1.0 : 0.0;
    });
    double hits = 0.0;
    for (double v : merged) hits += v;
    double p_hat = hits / static_cast<double>(reps);
    double p_se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(reps));
    TwoPointPrediction out;
    out.p_coalesced = p_hat;
    out.prediction = theta * p_hat + theta * theta * (1.0 - p_hat);
    out.se = std::fabs(theta - theta * theta) * p_se;
    return out;
}

double escape_probability(double q0, double qe, double kappa) {
    if (!(q0 > 0.0)) throw std::invalid_argument("escape_probability: q0 > 0");
    if (qe < 0.0 || qe > 1.0) throw std::invalid_argument("escape_probability: qe in [0,1]");
    if (kappa < 0.0) throw std::invalid_argument("escape_probability: kappa >= 0");
    double meet = 2.0 * q0 * qe;
    if (kappa == 0.0) return 1.0;
    return meet / (kappa + meet);
}

BrwPath brw_simulate(const TorusLattice& lat, double branch_rate, const OffspringLaw& law,
                     double walk_rate, std::vector<std::uint64_t> x0, double tmax,
                     RngStream& rng, std::uint64_t cap, std::uint64_t record_every) {
    lat.validate();
    const std::size_t n = lat.sites();
    if (x0.size() != n) throw std::invalid_argument("brw_simulate: occupancy size mismatch");
    if (branch_rate < 0.0 || walk_rate < 0.0)
        throw std::invalid_argument("brw_simulate: rates >= 0");
    if (record_every == 0) record_every = 1;
    BrwPath path;
    std::vector<std::uint64_t>& occ = x0;
    std::uint64_t total = 0;
    for (std::uint64_t v : occ) total += v;
    path.t.push_back(0.0);
    path.total.push_back(total);
    double t = 0.0;
    std::uint64_t events = 0;
    auto pick_site = [&](RngStream& r) {
        std::uint64_t u = r.uniform_below(total);
        std::size_t site = 0;
        for (; site + 1 < n; ++site) {
            if (u < occ[site]) break;
            u -= occ[site];
        }
        return site;
    };
    const double per_particle = branch_rate + walk_rate;
    while (total > 0) {
        if (total >= cap) {
            path.capped = true;
            break;
        }
        double rate = per_particle * static_cast<double>(total);
        if (!(rate > 0.0)) break;
        t += rng.exponential(rate);
        if (t > tmax) break;
        std::size_t site = pick_site(rng);
        if (rng.uniform() * per_particle < walk_rate) {
            --occ[site];
            ++occ[lat.sample_neighbor(site, rng)];
        } else {
            std::uint64_t k = law.sample(rng);
            occ[site] += k - 1;
            total += k - 1;
        }
        ++events;
        if (events % record_every == 0) {
            path.t.push_back(std::min(t, tmax));
            path.total.push_back(total);
        }
    }
    path.extinct = total == 0;
    if (path.t.back() != std::min(t, tmax)) {
        path.t.push_back(std::min(t, tmax));
        path.total.push_back(total);
    }
    path.final_occupancy = std::move(occ);
    return path;
}

BrwMeanReport brw_mean_check(const TorusLattice& lat, double branch_rate,
                             const OffspringLaw& law, double walk_rate,
                             const std::vector<std::uint64_t>& x0, double t,
                             std::uint64_t reps, std::uint64_t seed, int threads) {
    lat.validate();
    const std::size_t n = lat.sites();
    EnsembleSpec spec{seed, reps, threads};
    auto finals = run_replicates<std::vector<std::uint64_t>>(spec, [&](std::uint64_t, RngStream& rng) {
        BrwPath p = brw_simulate(lat, branch_rate, law, walk_rate, x0, t, rng,
                                 10'000'000, std::uint64_t(-1));
        if (p.capped) throw std::runtime_error("brw_mean_check: replicate hit the population cap");
        return p.final_occupancy;
    });
    BrwMeanReport report;
    report.mc_mean.assign(n, 0.0);
    report.mc_se.assign(n, 0.0);
    std::vector<double> sum2(n, 0.0);
    for (const auto& occ : finals)
        for (std::size_t i = 0; i < n; ++i) {
            double v = static_cast<double>(occ[i]);
            report.mc_mean[i] += v;
            sum2[i] += v * v;
        }
    const double r = static_cast<double>(reps);
    for (std::size_t i = 0; i < n; ++i) {
        report.mc_mean[i] /= r;
        double var = std::max(0.0, (sum2[i] - r * report.mc_mean[i] * report.mc_mean[i]) / (r - 1.0));
        report.mc_se[i] = std::sqrt(var / r);
    }
    Matrix semigroup = matrix_exp_uniformization(lat.rw_generator(walk_rate), t);
    std::vector<double> x0d(n);
    for (std::size_t i = 0; i < n; ++i) x0d[i] = static_cast<double>(x0[i]);
    // mean field: occupancy evolves by the walk semigroup times total-mass growth
    std::vector<double> predicted = vec_mat(x0d, semigroup);
    const double growth = std::exp(branch_rate * (law.mean() - 1.0) * t);
    report.predicted.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        report.predicted[i] = growth * predicted[i];
        double err = std::fabs(report.mc_mean[i] - report.predicted[i]);
        if (report.predicted[i] > 0.0)
            report.max_rel_err = std::max(report.max_rel_err, err / report.predicted[i]);
        if (report.mc_se[i] > 0.0)
            report.max_z = std::max(report.max_z, err / report.mc_se[i]);
    }
    return report;
}

std::string lattice_csv(const TorusLattice& lat, const std::vector<double>& values) {
    if (values.size() != lat.sites()) throw std::invalid_argument("lattice_csv: size mismatch");
    std::ostringstream out;
    char buf[32];
    const std::size_t row_len = lat.L;
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        out << buf;
        out << ((i + 1) % row_len == 0 ? '\n' : ',');
    }
    return out.str();
}

} // namespace popdyn
