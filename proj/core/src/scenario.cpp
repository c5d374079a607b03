#include "popdyn/scenario.hpp"

#include "popdyn/birthdeath.hpp"
#include "popdyn/branching.hpp"
#include "popdyn/deterministic.hpp"
#include "popdyn/duality.hpp"
#include "popdyn/ensemble.hpp"
#include "popdyn/epidemics.hpp"
#include "popdyn/genealogy.hpp"
#include "popdyn/io.hpp"
#include "popdyn/life_history.hpp"
#include "popdyn/spatial.hpp"
#include "popdyn/stats.hpp"
#include "popdyn/wrightfisher.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>

#ifndef POPDYN_VERSION_STRING
#define POPDYN_VERSION_STRING "dev"
#endif

namespace popdyn {
namespace {

// ---- shared helpers ---------------------------------------------------

// z-comparison row against an exact oracle; tolerance in SE units.
// Scenario-level checks are deliberately loose (default 4 sigma) so a routine
// run does not trip on ordinary fluctuation; the acceptance suite carries the
// tight versions.
StatRow z_row(const std::string& name, double est, double se, double oracle, double tol = 4.0) {
    double d;
    if (se > 0.0)
        d = std::abs(est - oracle) / se;
    else
        d = (est == oracle) ? 0.0 : std::numeric_limits<double>::infinity();
    StatRow row = StatRow::checked(name, est, oracle, "z", d, tol);
    row.has_se = true;
    row.se = se;
    return row;
}

StatRow abs_row(const std::string& name, double est, double oracle, double tol) {
    return StatRow::checked(name, est, oracle, "abs", std::abs(est - oracle), tol);
}

StatRow rel_row(const std::string& name, double est, double oracle, double tol) {
    double denom = std::max(std::abs(oracle), 1e-300);
    return StatRow::checked(name, est, oracle, "rel", std::abs(est - oracle) / denom, tol);
}

// binary indicator mean with the usual binomial SE
StatRow freq_z_row(const std::string& name, std::uint64_t hits, std::uint64_t reps,
                   double oracle, double tol = 4.0) {
    double p = static_cast<double>(hits) / static_cast<double>(reps);
    double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(reps));
    return z_row(name, p, se, oracle, tol);
}

// square matrix from a config block with keys row_0, row_1, ...
Matrix read_matrix(const ConfigNode& cfg, const std::string& key) {
    const ConfigNode& block = cfg.child(key);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0;; ++i) {
        std::string rk = "row_" + std::to_string(i);
        if (!block.has(rk)) break;
        rows.push_back(block.get_double_list(rk));
    }
    if (rows.empty())
        throw std::runtime_error("matrix block '" + key + "' needs keys row_0, row_1, ...");
    Matrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            throw std::runtime_error("matrix block '" + key + "' is not square");
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

OffspringLaw read_law(const ConfigNode& cfg, const std::string& key = "pmf") {
    return OffspringLaw::from_pmf(cfg.get_double_list(key));
}

std::vector<int> read_int_list(const ConfigNode& cfg, const std::string& key) {
    std::vector<int> out;
    for (double v : cfg.get_double_list(key)) {
        double r = std::round(v);
        if (std::abs(v - r) > 1e-9)
            throw std::runtime_error("key '" + key + "' must hold integers");
        out.push_back(static_cast<int>(r));
    }
    return out;
}

// columnar table, CSV or JSON per the request; returns "" when no out_dir
std::string write_table(const ScenarioRequest& req, const std::string& basename,
                        const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& columns) {
    if (req.out_dir.empty()) return "";
    std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (const auto& c : columns)
        if (c.size() != rows) throw std::runtime_error("write_table: ragged columns");
    if (req.format == "json") {
        nlohmann::json j;
        for (std::size_t c = 0; c < names.size(); ++c) j[names[c]] = columns[c];
        std::string path = req.out_dir + "/" + basename + ".json";
        write_text_file(path, j.dump(2) + "\n");
        return path;
    }
    std::string path = req.out_dir + "/" + basename + ".csv";
    CsvWriter csv(path);
    csv.header(names);
    std::vector<double> row(names.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < names.size(); ++c) row[c] = columns[c][r];
        csv.row(row);
    }
    return path;
}

std::string write_artifact(const ScenarioRequest& req, const std::string& filename,
                           const std::string& content) {
    if (req.out_dir.empty()) return "";
    std::string path = req.out_dir + "/" + filename;
    write_text_file(path, content);
    return path;
}

void add_file(RunReport& rep, const std::string& path) {
    if (!path.empty()) rep.data_files.push_back(path);
}

EnsembleSpec ensemble_of(const ScenarioRequest& req) {
    return EnsembleSpec{req.seed, req.reps, req.threads};
}

// short %g form for row names (format_double keeps full precision for files)
std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// ---- simulate models ---------------------------------------------------

void run_bgw(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    OffspringLaw law = read_law(cfg);
    std::uint64_t z0 = cfg.get_uint("z0", 1);
    int ngen = static_cast<int>(cfg.get_int("generations", 20));
    if (ngen < 1) throw std::runtime_error("generations must be >= 1");
    if (req.reps == 0) return;

    auto paths = run_replicates<BgwPath>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        return simulate_bgw(law, z0, ngen, rng);
    });

    std::uint64_t extinct = 0, capped = 0;
    std::vector<double> finals;
    std::vector<double> mean_z(static_cast<std::size_t>(ngen) + 1, 0.0);
    std::uint64_t counted = 0;
    for (const auto& p : paths) {
        if (p.capped) { ++capped; continue; }
        ++counted;
        if (p.z.back() == 0) ++extinct;
        finals.push_back(static_cast<double>(p.z.back()));
        for (std::size_t g = 0; g < p.z.size(); ++g) mean_z[g] += static_cast<double>(p.z[g]);
    }
    if (counted == 0) throw std::runtime_error("all replicates hit the population cap");
    for (double& v : mean_z) v /= static_cast<double>(counted);

    // extinction by generation n has the exact probability f_n(0)^z0
    double qn = std::pow(pgf_iterate(law, 0.0, ngen), static_cast<double>(z0));
    rep.stats.push_back(freq_z_row("extinct_by_n", extinct, counted, qn));
    Summary fs = summarize(finals);
    double mean_oracle = static_cast<double>(z0) * std::pow(law.mean(), ngen);
    rep.stats.push_back(z_row("mean_final", fs.mean, fs.se, mean_oracle));
    if (capped > 0)
        rep.stats.push_back(StatRow::plain("capped_replicates", static_cast<double>(capped)));

    std::vector<double> gens(mean_z.size());
    for (std::size_t g = 0; g < gens.size(); ++g) gens[g] = static_cast<double>(g);
    add_file(rep, write_table(req, "bgw_mean_path", {"generation", "mean_population"},
                              {gens, mean_z}));
}

void run_bgw_tree(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::string mode = cfg.get_string("mode", "conditioned");
    std::uint64_t size = cfg.get_uint("size", 64);
    std::uint64_t max_size = cfg.get_uint("max_size", 100000);
    int ngen = static_cast<int>(cfg.get_int("generations", 8));
    OffspringLaw law = cfg.has("pmf") ? read_law(cfg) : OffspringLaw::geometric_half();
    if (mode != "conditioned" && mode != "free" && mode != "spine")
        throw std::runtime_error("mode must be conditioned, free, or spine");
    if (req.reps == 0) return;

    auto one_tree = [&](RngStream& rng) {
        if (mode == "conditioned") return sample_conditioned_geometric_tree(size, rng);
        if (mode == "spine") return sample_size_biased_tree(law, ngen, max_size, rng);
        return sample_bgw_tree(law, max_size, rng);
    };

    struct TreeStats { double size = 0.0, height = 0.0; };
    auto stats = run_replicates<TreeStats>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        PlaneTree t = one_tree(rng);
        TreeStats s;
        s.size = static_cast<double>(t.size());
        s.height = static_cast<double>(*std::max_element(t.depth.begin(), t.depth.end()));
        return s;
    });
    std::vector<double> sizes, heights;
    for (const auto& s : stats) { sizes.push_back(s.size); heights.push_back(s.height); }
    Summary ssum = summarize(sizes), hsum = summarize(heights);
    rep.stats.push_back(StatRow::with_se("mean_size", ssum.mean, ssum.se));
    rep.stats.push_back(StatRow::with_se("mean_height", hsum.mean, hsum.se));

    // replicate 0 again for the artifacts (same stream, same tree)
    RngStream rng0(req.seed, 0);
    PlaneTree t0 = one_tree(rng0);
    ContourHeight ch = contour_and_height(t0);
    rep.stats.push_back(abs_row("contour_length", static_cast<double>(ch.contour.size()),
                                2.0 * (static_cast<double>(t0.size()) - 1.0) + 1.0, 0.0));
    std::vector<double> cwalk(ch.contour.begin(), ch.contour.end());
    std::vector<double> cstep(cwalk.size());
    for (std::size_t i = 0; i < cstep.size(); ++i) cstep[i] = static_cast<double>(i);
    add_file(rep, write_table(req, "tree_contour", {"step", "depth"}, {cstep, cwalk}));
    std::vector<double> hvals(ch.height.begin(), ch.height.end());
    std::vector<double> hidx(hvals.size());
    for (std::size_t i = 0; i < hvals.size(); ++i) hidx[i] = static_cast<double>(i);
    add_file(rep, write_table(req, "tree_height", {"vertex", "depth"}, {hidx, hvals}));
    auto lv = level_counts(t0);
    std::vector<double> lvv(lv.begin(), lv.end()), lvi(lv.size());
    for (std::size_t i = 0; i < lv.size(); ++i) lvi[i] = static_cast<double>(i);
    add_file(rep, write_table(req, "tree_levels", {"level", "count"}, {lvi, lvv}));
    add_file(rep, write_artifact(req, "tree.newick", tree_newick(t0) + "\n"));
}

void run_bd(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double b = cfg.get_double("birth_rate");
    double d = cfg.get_double("death_rate");
    std::uint64_t x0 = cfg.get_uint("x0", 1);
    double t = cfg.get_double("t");
    if (b < 0 || d < 0 || t < 0) throw std::runtime_error("rates and t must be nonnegative");
    if (req.reps == 0) return;

    auto finals = run_replicates<std::uint64_t>(ensemble_of(req),
        [&](std::uint64_t, RngStream& rng) { return bd_final_value(b, d, x0, t, rng); });

    std::vector<double> xs(finals.begin(), finals.end());
    Summary s = summarize(xs);
    BdMoments mom = bd_moments(b, d, static_cast<double>(x0), t);
    rep.stats.push_back(z_row("mean", s.mean, s.se, mom.mean));

    std::vector<double> law = bd_law(b, d, t);
    std::uint64_t alive = 0;
    for (std::uint64_t v : finals) alive += (v > 0);
    double survival_oracle = 1.0 - std::pow(law[0], static_cast<double>(x0));
    rep.stats.push_back(freq_z_row("survival", alive, finals.size(), survival_oracle));

    if (x0 == 1) {
        // empirical law vs the exact one-ancestor transition probabilities
        std::vector<double> ns, emp, exact;
        for (std::size_t n = 0; n < law.size(); ++n) {
            std::uint64_t cnt = 0;
            for (std::uint64_t v : finals) cnt += (v == n);
            ns.push_back(static_cast<double>(n));
            emp.push_back(static_cast<double>(cnt) / static_cast<double>(finals.size()));
            exact.push_back(law[n]);
        }
        add_file(rep, write_table(req, "bd_law", {"n", "empirical", "exact"}, {ns, emp, exact}));
    }
}

void run_csbp(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    CsbpParams params;
    params.m = cfg.get_double("m", 0.0);
    params.gamma = cfg.get_double("gamma", 1.0);
    params.c = cfg.get_double("immigration", 0.0);
    double x0 = cfg.get_double("x0", 1.0);
    double t = cfg.get_double("t");
    double dt = cfg.get_double("dt", 1e-3);
    if (req.reps == 0) return;

    struct End { double x = 0.0; bool dead = false; };
    auto ends = run_replicates<End>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        CsbpPath p = csbp_simulate(params, x0, t, dt, rng, 1 << 30);
        return End{p.x.back(), p.absorbed || p.x.back() <= 0.0};
    });

    std::vector<double> xs;
    std::uint64_t dead = 0;
    for (const auto& e : ends) { xs.push_back(e.x); dead += e.dead; }
    Summary s = summarize(xs);
    double mean_oracle = params.m == 0.0
        ? x0 + params.c * t
        : x0 * std::exp(params.m * t) + params.c * std::expm1(params.m * t) / params.m;
    // Euler time stepping carries an O(dt) bias on top of the Monte-Carlo SE
    rep.stats.push_back(z_row("mean", s.mean, s.se, mean_oracle, 6.0));

    if (params.c == 0.0) {
        double u_inf = params.m == 0.0
            ? 1.0 / (params.gamma * t)
            : params.m * std::exp(params.m * t) / (params.gamma * std::expm1(params.m * t));
        double ext_oracle = std::exp(-x0 * u_inf);
        rep.stats.push_back(freq_z_row("extinct_by_t", dead, ends.size(), ext_oracle, 6.0));
    } else {
        rep.stats.push_back(StatRow::plain("hit_zero_fraction",
            static_cast<double>(dead) / static_cast<double>(ends.size())));
    }

    RngStream rng0(req.seed, 0);
    CsbpPath p0 = csbp_simulate(params, x0, t, dt, rng0,
                                std::max(1, static_cast<int>(t / dt / 400)));
    add_file(rep, write_table(req, "csbp_path", {"t", "x"}, {p0.t, p0.x}));
}

void run_wf_chain(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    WfChainSpec spec = WfChainSpec::neutral(cfg.get_uint("N"),
                                            static_cast<std::size_t>(cfg.get_int("K", 2)));
    bool neutral = true;
    if (cfg.has_child("viability")) { spec.viability = read_matrix(cfg, "viability"); neutral = false; }
    if (cfg.has_child("mutation")) { spec.mutation = read_matrix(cfg, "mutation"); neutral = false; }
    spec.diploid_sampling = cfg.get_bool("diploid", false);
    std::vector<double> p0 = cfg.has("p0")
        ? cfg.get_double_list("p0")
        : std::vector<double>(spec.K, 1.0 / static_cast<double>(spec.K));
    std::uint64_t ngen = cfg.get_uint("generations", 100);
    spec.validate();
    validate_simplex(p0);
    if (req.reps == 0) return;

    auto finals = run_replicates<std::vector<double>>(ensemble_of(req),
        [&](std::uint64_t, RngStream& rng) {
            OdeTrajectory tr = wf_chain_run(spec, p0, ngen, rng, ngen);
            return tr.y.back();
        });
    for (std::size_t i = 0; i < spec.K; ++i) {
        std::vector<double> xs;
        for (const auto& f : finals) xs.push_back(f[i]);
        Summary s = summarize(xs);
        std::string name = "mean_p" + std::to_string(i);
        if (neutral)
            rep.stats.push_back(z_row(name, s.mean, s.se, p0[i]));  // allele frequency martingale
        else
            rep.stats.push_back(StatRow::with_se(name, s.mean, s.se));
    }

    RngStream rng0(req.seed, 0);
    OdeTrajectory tr0 = wf_chain_run(spec, p0, ngen, rng0,
                                     std::max<std::uint64_t>(1, ngen / 400));
    std::vector<std::string> names{"generation"};
    std::vector<std::vector<double>> cols{tr0.t};
    for (std::size_t i = 0; i < spec.K; ++i) {
        names.push_back("p" + std::to_string(i));
        std::vector<double> c;
        for (const auto& y : tr0.y) c.push_back(y[i]);
        cols.push_back(c);
    }
    add_file(rep, write_table(req, "wf_chain_path", names, cols));
}

void run_wf_diffusion(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    WfDiffusionSpec spec;
    spec.K = static_cast<std::size_t>(cfg.get_int("K", 2));
    spec.gamma = cfg.get_double("gamma", 1.0);
    spec.theta = cfg.get_double("theta", 0.0);
    if (cfg.has("nu")) spec.nu = cfg.get_double_list("nu");
    else if (spec.theta > 0) spec.nu.assign(spec.K, 1.0 / static_cast<double>(spec.K));
    if (cfg.has_child("sigma")) spec.sigma = read_matrix(cfg, "sigma");
    if (cfg.has_child("mutation_rates")) spec.mutation_rates = read_matrix(cfg, "mutation_rates");
    std::vector<double> p0 = cfg.has("p0")
        ? cfg.get_double_list("p0")
        : std::vector<double>(spec.K, 1.0 / static_cast<double>(spec.K));
    double t = cfg.get_double("t", 1.0);
    double dt = cfg.get_double("dt", 1e-3);
    spec.validate();
    validate_simplex(p0);
    if (req.reps == 0) return;

    auto finals = run_replicates<std::vector<double>>(ensemble_of(req),
        [&](std::uint64_t, RngStream& rng) {
            OdeTrajectory tr = wf_diffusion_simulate(spec, p0, t, dt, rng, 1 << 30);
            return tr.y.back();
        });

    bool neutral = spec.theta == 0.0 && spec.sigma.n == 0 && spec.mutation_rates.n == 0;
    bool moments_closed = spec.sigma.n == 0 && spec.mutation_rates.n == 0;
    for (std::size_t i = 0; i < spec.K; ++i) {
        std::vector<double> xs;
        for (const auto& f : finals) xs.push_back(f[i]);
        Summary s = summarize(xs);
        std::string name = "mean_p" + std::to_string(i);
        if (neutral)
            rep.stats.push_back(z_row(name, s.mean, s.se, p0[i], 6.0));
        else
            rep.stats.push_back(StatRow::with_se(name, s.mean, s.se));
    }
    if (moments_closed) {
        // second moment of the first coordinate against the closed moment system
        std::vector<double> sq;
        for (const auto& f : finals) sq.push_back(f[0] * f[0]);
        Summary s2 = summarize(sq);
        std::vector<double> nu = spec.nu.empty()
            ? std::vector<double>(spec.K, 1.0 / static_cast<double>(spec.K)) : spec.nu;
        std::vector<int> k2(spec.K, 0);
        k2[0] = 2;
        MomentOdeResult mo = wf_moment_ode(spec.gamma, spec.theta, nu, {k2}, p0, t,
                                           std::min(1e-3, t / 100.0), 1 << 30);
        std::size_t slot = 0;
        for (std::size_t j = 0; j < mo.indices.size(); ++j)
            if (mo.indices[j] == k2) slot = j;
        double oracle = mo.traj.y.back()[slot];
        rep.stats.push_back(z_row("mean_p0_sq", s2.mean, s2.se, oracle, 6.0));
    }
}

void run_wf_fixation(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::uint64_t N = cfg.get_uint("N", 100);
    double p0 = cfg.get_double("p0", 0.5);
    double dt = cfg.get_double("dt", 1e-4);
    if (p0 < 0.0 || p0 > 1.0) throw std::runtime_error("p0 must lie in [0,1]");
    if (req.reps == 0) return;

    FixationResult r = wf_fixation_experiment(N, p0, req.reps, req.seed, req.threads, dt);
    double entropy = 0.0;
    if (p0 > 0.0 && p0 < 1.0)
        entropy = -(p0 * std::log(p0) + (1.0 - p0) * std::log(1.0 - p0));
    rep.stats.push_back(z_row("mean_generations", r.mean_generations, r.se_generations,
                              static_cast<double>(N) * entropy, 6.0));
    rep.stats.push_back(z_row("fixed_at_one", r.fixed_at_one, r.fixed_at_one_se, p0, 6.0));
}

void run_kingman(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::size_t n = static_cast<std::size_t>(cfg.get_int("n", 10));
    double gamma = cfg.get_double("gamma", 1.0);
    if (n < 2) throw std::runtime_error("n must be >= 2");
    if (req.reps == 0) return;

    auto mrca = run_replicates<double>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        return kingman_sample(n, gamma, rng).mrca_time();
    });
    Summary s = summarize(mrca);
    double oracle = (2.0 / gamma) * (1.0 - 1.0 / static_cast<double>(n));
    rep.stats.push_back(z_row("mrca_mean", s.mean, s.se, oracle));

    RngStream rng0(req.seed, 0);
    CoalescentPath p0 = kingman_sample(n, gamma, rng0);
    add_file(rep, write_artifact(req, "kingman_events.csv", coalescent_event_csv(p0)));
    add_file(rep, write_artifact(req, "kingman_tree.newick", coalescent_newick(p0) + "\n"));
}

LambdaMeasure read_lambda_measure(const ConfigNode& cfg) {
    const ConfigNode& block = cfg.child("measure");
    LambdaMeasure lm;
    lm.atom_at_zero = block.get_double("atom", 0.0);
    if (block.has("breaks")) {
        lm.breaks = block.get_double_list("breaks");
        lm.height = block.get_double_list("heights");
    } else {
        lm.breaks = {0.0, 1.0};
        lm.height = {0.0};
    }
    lm.validate();
    return lm;
}

void run_lambda(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::size_t n = static_cast<std::size_t>(cfg.get_int("n", 10));
    LambdaMeasure lm = read_lambda_measure(cfg);
    if (n < 2) throw std::runtime_error("n must be >= 2");
    if (req.reps == 0) return;

    struct R { double mrca = 0.0, events = 0.0; };
    auto rs = run_replicates<R>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        CoalescentPath p = lambda_coalescent_sample(n, lm, rng);
        return R{p.mrca_time(), static_cast<double>(p.times.size())};
    });
    std::vector<double> mrca, events;
    for (const auto& r : rs) { mrca.push_back(r.mrca); events.push_back(r.events); }
    Summary ms = summarize(mrca), es = summarize(events);
    double density_mass = lm.total_mass() - lm.atom_at_zero;
    if (density_mass == 0.0 && lm.atom_at_zero > 0.0) {
        // pure atom at zero is the pairwise-merger coalescent with rate = atom
        double oracle = (2.0 / lm.atom_at_zero) * (1.0 - 1.0 / static_cast<double>(n));
        rep.stats.push_back(z_row("mrca_mean", ms.mean, ms.se, oracle));
    } else {
        rep.stats.push_back(StatRow::with_se("mrca_mean", ms.mean, ms.se));
    }
    rep.stats.push_back(StatRow::with_se("mean_events", es.mean, es.se));

    RngStream rng0(req.seed, 0);
    CoalescentPath p0 = lambda_coalescent_sample(n, lm, rng0);
    add_file(rep, write_artifact(req, "lambda_events.csv", coalescent_event_csv(p0)));
    add_file(rep, write_artifact(req, "lambda_tree.newick", coalescent_newick(p0) + "\n"));
}

// shared body for the two exchangeable particle models
void run_particles(ScenarioRequest& req, RunReport& rep, bool lookdown) {
    const ConfigNode& cfg = req.config;
    std::size_t n = static_cast<std::size_t>(cfg.get_int("n", 50));
    if (n < 2) throw std::runtime_error("n must be >= 2");
    std::size_t K = static_cast<std::size_t>(cfg.get_int("K", 2));
    double gamma = cfg.get_double("gamma", 1.0);
    double tmax = cfg.get_double("t", 1.0);
    Matrix mutation;
    if (cfg.has_child("mutation")) mutation = read_matrix(cfg, "mutation");
    std::vector<int> init;
    if (cfg.has("init")) {
        std::vector<int> counts = read_int_list(cfg, "init");
        if (counts.size() != K) throw std::runtime_error("init needs one count per type");
        for (std::size_t ty = 0; ty < counts.size(); ++ty)
            for (int c = 0; c < counts[ty]; ++c) init.push_back(static_cast<int>(ty));
        if (init.size() != n) throw std::runtime_error("init counts must sum to n");
    } else {
        for (std::size_t i = 0; i < n; ++i) init.push_back(i < n / 2 ? 0 : 1);
    }
    if (req.reps == 0) return;

    double frac0 = 0.0;
    for (int ty : init) frac0 += (ty == 0);
    frac0 /= static_cast<double>(n);

    auto finals = run_replicates<double>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        std::vector<int> types = init;
        if (lookdown) {
            // lookdown levels are not symmetric, so a deterministic assignment
            // must be exchanged before the level dynamics see it
            for (std::size_t i = types.size() - 1; i > 0; --i) {
                std::size_t j = rng.uniform_below(i + 1);
                std::swap(types[i], types[j]);
            }
        }
        ParticlePath p = lookdown
            ? lookdown_simulate(std::move(types), K, gamma, mutation, tmax, rng)
            : moran_simulate(std::move(types), K, gamma, mutation, tmax, rng);
        return static_cast<double>(p.counts.back()[0]) / static_cast<double>(n);
    });
    Summary s = summarize(finals);
    if (mutation.n == 0)
        rep.stats.push_back(z_row("mean_type0_fraction", s.mean, s.se, frac0));
    else
        rep.stats.push_back(StatRow::with_se("mean_type0_fraction", s.mean, s.se));
}

void run_moran(ScenarioRequest& req, RunReport& rep) { run_particles(req, rep, false); }
void run_lookdown(ScenarioRequest& req, RunReport& rep) { run_particles(req, rep, true); }

void run_ewens(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::size_t n = static_cast<std::size_t>(cfg.get_int("n", 20));
    double theta = cfg.get_double("theta", 1.0);
    if (n < 1 || theta <= 0) throw std::runtime_error("need n >= 1 and theta > 0");
    if (req.reps == 0) return;

    struct R { double blocks = 0.0; bool monotypic = false; };
    auto rs = run_replicates<R>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        Partition p = ewens_sample(n, theta, rng);
        return R{static_cast<double>(p.size()), p.size() == 1};
    });
    std::vector<double> blocks;
    std::uint64_t mono = 0;
    for (const auto& r : rs) { blocks.push_back(r.blocks); mono += r.monotypic; }
    double mean_blocks_oracle = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        mean_blocks_oracle += theta / (theta + static_cast<double>(i));
    Summary s = summarize(blocks);
    rep.stats.push_back(z_row("mean_blocks", s.mean, s.se, mean_blocks_oracle));
    rep.stats.push_back(freq_z_row("monotypic", mono, rs.size(), homozygosity(n, theta)));

    std::vector<double> ks, freq;
    for (std::size_t k = 1; k <= n; ++k) {
        std::uint64_t cnt = 0;
        for (const auto& r : rs) cnt += (static_cast<std::size_t>(r.blocks) == k);
        ks.push_back(static_cast<double>(k));
        freq.push_back(static_cast<double>(cnt) / static_cast<double>(rs.size()));
    }
    add_file(rep, write_table(req, "ewens_block_counts", {"blocks", "frequency"}, {ks, freq}));
}

void run_gem(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double theta = cfg.get_double("theta", 1.0);
    double eps = cfg.get_double("eps", 1e-12);
    if (theta <= 0) throw std::runtime_error("theta must be > 0");
    if (req.reps == 0) return;

    struct R { double first = 0.0, sumsq = 0.0; };
    auto rs = run_replicates<R>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        AtomVector v = gem_sample(theta, eps, rng);
        R r;
        r.first = v.xi.empty() ? 0.0 : v.xi[0];
        for (double x : v.xi) r.sumsq += x * x;
        return r;
    });
    std::vector<double> first, sumsq;
    for (const auto& r : rs) { first.push_back(r.first); sumsq.push_back(r.sumsq); }
    Summary f = summarize(first), q = summarize(sumsq);
    // first size-biased stick is Beta(1, theta); sum of squares is the
    // two-sample match probability, both with mean 1/(1+theta)
    rep.stats.push_back(z_row("first_stick_mean", f.mean, f.se, 1.0 / (1.0 + theta)));
    rep.stats.push_back(z_row("sum_sq_mean", q.mean, q.se, 1.0 / (1.0 + theta)));
}

void run_pd(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double theta = cfg.get_double("theta", 1.0);
    double eps = cfg.get_double("eps", 1e-8);
    if (theta <= 0) throw std::runtime_error("theta must be > 0");
    if (req.reps == 0) return;

    struct R { double largest = 0.0, sumsq = 0.0; };
    auto rs = run_replicates<R>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        AtomVector v = pd_sample_via_gamma(theta, eps, rng);
        R r;
        r.largest = v.xi.empty() ? 0.0 : v.xi[0];
        for (double x : v.xi) r.sumsq += x * x;
        return r;
    });
    std::vector<double> largest, sumsq;
    for (const auto& r : rs) { largest.push_back(r.largest); sumsq.push_back(r.sumsq); }
    Summary l = summarize(largest), q = summarize(sumsq);
    rep.stats.push_back(StatRow::with_se("largest_mean", l.mean, l.se));
    rep.stats.push_back(z_row("sum_sq_mean", q.mean, q.se, 1.0 / (1.0 + theta)));

    RngStream rng0(req.seed, 0);
    AtomVector v0 = pd_sample_via_gamma(theta, eps, rng0);
    std::vector<double> idx(v0.xi.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i + 1);
    add_file(rep, write_table(req, "pd_atoms", {"rank", "mass"}, {idx, v0.xi}));
}

void run_voter(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::size_t d = static_cast<std::size_t>(cfg.get_int("d", 1));
    std::size_t L = static_cast<std::size_t>(cfg.get_int("L", 20));
    double tmax = cfg.get_double("t", 5.0);
    double density = cfg.get_double("init_density", 0.5);
    TorusLattice lat = TorusLattice::nearest_neighbor(d, L);
    std::size_t nsites = lat.sites();
    std::size_t kones = static_cast<std::size_t>(std::llround(density * static_cast<double>(nsites)));
    if (kones > nsites) throw std::runtime_error("init_density must lie in [0,1]");
    SpinConfig eta0(nsites, 0);
    for (std::size_t i = 0; i < kones; ++i) eta0[i] = 1;
    if (req.reps == 0) return;

    struct R { double frac = 0.0; bool consensus = false; };
    auto rs = run_replicates<R>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        VoterPath p = voter_simulate(lat, eta0, tmax, rng, 1 << 30);
        std::uint64_t ones = 0;
        for (auto v : p.final_config) ones += v;
        return R{static_cast<double>(ones) / static_cast<double>(nsites), p.consensus};
    });
    std::vector<double> fracs;
    std::uint64_t cons = 0;
    for (const auto& r : rs) { fracs.push_back(r.frac); cons += r.consensus; }
    Summary s = summarize(fracs);
    double frac0 = static_cast<double>(kones) / static_cast<double>(nsites);
    rep.stats.push_back(z_row("mean_ones_fraction", s.mean, s.se, frac0));  // martingale
    rep.stats.push_back(StatRow::with_se("consensus_fraction",
        static_cast<double>(cons) / static_cast<double>(rs.size()),
        std::sqrt(std::max(1e-300,
            (static_cast<double>(cons) / rs.size()) * (1.0 - static_cast<double>(cons) / rs.size()))
            / static_cast<double>(rs.size()))));

    RngStream rng0(req.seed, 0);
    VoterPath p0 = voter_simulate(lat, eta0, tmax, rng0, std::max<std::uint64_t>(1, nsites / 4));
    std::vector<double> ones(p0.ones.begin(), p0.ones.end());
    add_file(rep, write_table(req, "voter_magnetization", {"t", "ones"}, {p0.t, ones}));
}

void run_stepping_stone(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::size_t d = static_cast<std::size_t>(cfg.get_int("d", 1));
    std::size_t L = static_cast<std::size_t>(cfg.get_int("L", 10));
    double c = cfg.get_double("migration", 1.0);
    double gamma = cfg.get_double("gamma", 1.0);
    double sel = cfg.get_double("selection", 0.0);
    double theta0 = cfg.get_double("init_freq", 0.5);
    double t = cfg.get_double("t", 1.0);
    double dt = cfg.get_double("dt", 1e-3);
    TorusLattice lat = TorusLattice::nearest_neighbor(d, L);
    std::vector<int> xi_coords = cfg.has("xi") ? read_int_list(cfg, "xi")
                                               : std::vector<int>(d, 1);
    if (xi_coords.size() != d) throw std::runtime_error("xi needs one coordinate per dimension");
    std::size_t xi_site = lat.index(xi_coords);
    if (req.reps == 0) return;

    FreqConfig x0(lat.sites(), theta0);
    struct R { double product = 0.0, mean = 0.0; };
    auto rs = run_replicates<R>(ensemble_of(req), [&](std::uint64_t, RngStream& rng) {
        FreqPath p = stepping_stone_simulate(lat, c, gamma, sel, x0, t, dt, rng, 1 << 30);
        const FreqConfig& xf = p.x.back();
        double mean = 0.0;
        for (double v : xf) mean += v;
        return R{xf[0] * xf[xi_site], mean / static_cast<double>(xf.size())};
    });
    std::vector<double> prods, means;
    for (const auto& r : rs) { prods.push_back(r.product); means.push_back(r.mean); }
    Summary ps = summarize(prods), ms = summarize(means);
    if (sel == 0.0) {
        // the mean frequency is a martingale, but per-step clipping to [0,1]
        // injects an O(sqrt(dt)) boundary bias (measured ~0.23 sqrt(dt) at
        // gamma = 1), so at high replicate counts the tolerance needs that
        // allowance on top of the Monte-Carlo term
        double clip_bias = 0.5 * std::sqrt(gamma * dt);
        StatRow mf = StatRow::checked("mean_freq", ms.mean, theta0, "abs",
                                      std::abs(ms.mean - theta0), 6.0 * ms.se + clip_bias);
        mf.has_se = true;
        mf.se = ms.se;
        rep.stats.push_back(mf);
        TwoPointPrediction pred = stepping_stone_moment_dual(
            lat, c, gamma, xi_site, theta0, t, req.reps,
            derive_seed(req.seed, "two-point-dual"), req.threads);
        double comb = std::sqrt(ps.se * ps.se + pred.se * pred.se);
        StatRow row = StatRow::checked("two_point_vs_dual", ps.mean, pred.prediction, "z",
                                       comb > 0 ? std::abs(ps.mean - pred.prediction) / comb
                                                : 0.0,
                                       6.0);
        row.has_se = true;
        row.se = comb;
        rep.stats.push_back(row);
    } else {
        rep.stats.push_back(StatRow::with_se("mean_freq", ms.mean, ms.se));
        rep.stats.push_back(StatRow::with_se("two_point", ps.mean, ps.se));
    }

    RngStream rng0(req.seed, 0);
    FreqPath p0 = stepping_stone_simulate(lat, c, gamma, sel, x0, t, dt, rng0, 1 << 30);
    add_file(rep, write_artifact(req, "stepping_stone_profile.csv",
                                 lattice_csv(lat, p0.x.back())));
}

void run_brw(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::size_t d = static_cast<std::size_t>(cfg.get_int("d", 1));
    std::size_t L = static_cast<std::size_t>(cfg.get_int("L", 8));
    double branch_rate = cfg.get_double("branch_rate", 1.0);
    double walk_rate = cfg.get_double("walk_rate", 1.0);
    double t = cfg.get_double("t", 1.0);
    OffspringLaw law = cfg.has("pmf") ? read_law(cfg)
                                      : OffspringLaw::from_pmf({0.5, 0.0, 0.5});
    TorusLattice lat = TorusLattice::nearest_neighbor(d, L);
    std::vector<std::uint64_t> x0(lat.sites(), 1);
    if (cfg.has("x0")) {
        std::vector<int> given = read_int_list(cfg, "x0");
        if (given.size() != lat.sites())
            throw std::runtime_error("x0 needs one count per site");
        for (std::size_t i = 0; i < x0.size(); ++i) {
            if (given[i] < 0) throw std::runtime_error("x0 counts must be >= 0");
            x0[i] = static_cast<std::uint64_t>(given[i]);
        }
    }
    if (req.reps == 0) return;

    BrwMeanReport mr = brw_mean_check(lat, branch_rate, law, walk_rate, x0, t,
                                      req.reps, req.seed, req.threads);
    rep.stats.push_back(StatRow::checked("site_mean_max_z", mr.max_z, 0.0, "z", mr.max_z, 4.0));
    rep.stats.push_back(StatRow::plain("site_mean_max_rel_err", mr.max_rel_err));
    double mc_total = 0.0, pred_total = 0.0;
    for (double v : mr.mc_mean) mc_total += v;
    for (double v : mr.predicted) pred_total += v;
    rep.stats.push_back(StatRow::plain("mc_total", mc_total));
    rep.stats.push_back(StatRow::plain("predicted_total", pred_total));

    std::vector<double> site(mr.mc_mean.size());
    for (std::size_t i = 0; i < site.size(); ++i) site[i] = static_cast<double>(i);
    add_file(rep, write_table(req, "brw_site_means", {"site", "mc_mean", "mc_se", "predicted"},
                              {site, mr.mc_mean, mr.mc_se, mr.predicted}));
}

void run_reed_frost(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::uint64_t N = cfg.get_uint("N", 10000);
    double lambda = cfg.get_double("lambda", 1.5);
    std::uint64_t i0 = cfg.get_uint("i0", 1);
    if (req.reps == 0) return;

    auto sizes = run_replicates<std::uint64_t>(ensemble_of(req),
        [&](std::uint64_t, RngStream& rng) {
            return reed_frost_simulate(N, lambda, i0, rng).final_size();
        });
    double cutoff = std::sqrt(static_cast<double>(N));
    std::uint64_t large = 0;
    std::vector<double> xs;
    for (std::uint64_t v : sizes) {
        large += (static_cast<double>(v) > cutoff);
        xs.push_back(static_cast<double>(v));
    }
    Summary s = summarize(xs);
    double p_large = static_cast<double>(large) / static_cast<double>(sizes.size());
    double se = std::sqrt(std::max(p_large * (1.0 - p_large), 1e-300)
                          / static_cast<double>(sizes.size()));
    // early generations are a branching process with near-Poisson(lambda)
    // offspring; the envelope survival probability is exact only as N -> inf,
    // so the tolerance carries an O(1/sqrt(N)) allowance besides the SE
    double q = extinction_probability(OffspringLaw::poisson(lambda));
    double envelope = 1.0 - std::pow(q, static_cast<double>(i0));
    StatRow row = StatRow::checked("p_large", p_large, envelope, "abs",
                                   std::abs(p_large - envelope),
                                   4.0 * se + 2.0 / std::sqrt(static_cast<double>(N)));
    row.has_se = true;
    row.se = se;
    rep.stats.push_back(row);
    rep.stats.push_back(StatRow::with_se("mean_final_size", s.mean, s.se));

    int nbins = 40;
    std::vector<double> counts = bin_counts(xs, 0.0, static_cast<double>(N), nbins);
    std::vector<double> lo(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        lo[i] = static_cast<double>(N) * static_cast<double>(i) / nbins;
    add_file(rep, write_table(req, "reed_frost_final_sizes", {"bin_lo", "count"}, {lo, counts}));
}

void run_reed_frost_scan(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::uint64_t N = cfg.get_uint("N", 10000);
    std::uint64_t i0 = cfg.get_uint("i0", 1);
    std::vector<double> lambdas = cfg.has("lambdas")
        ? cfg.get_double_list("lambdas")
        : std::vector<double>{0.5, 0.8, 1.0, 1.2, 1.5, 2.0};
    if (req.reps == 0) return;

    auto rows = reed_frost_threshold_scan(N, lambdas, i0, req.reps, req.seed, req.threads);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        double drop = rows[i].p_large - rows[i + 1].p_large;
        if (drop <= 0) continue;
        double comb = std::sqrt(rows[i].se * rows[i].se + rows[i + 1].se * rows[i + 1].se);
        worst = std::max(worst, comb > 0 ? drop / comb
                                         : std::numeric_limits<double>::infinity());
    }
    rep.stats.push_back(StatRow::checked("monotone_violation_z", worst, 0.0, "z", worst, 3.0));
    std::vector<double> ls, ps, ses, means;
    for (const auto& r : rows) {
        ls.push_back(r.lambda);
        ps.push_back(r.p_large);
        ses.push_back(r.se);
        means.push_back(r.mean_final_size);
        rep.stats.push_back(StatRow::with_se("p_large_" + fmt_g(r.lambda), r.p_large, r.se));
    }
    add_file(rep, write_table(req, "reed_frost_scan",
                              {"lambda", "p_large", "se", "mean_final_size"},
                              {ls, ps, ses, means}));
}

void run_wf_moment_dual(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double p0 = cfg.get_double("p0", 0.5);
    double gamma = cfg.get_double("gamma", 1.0);
    std::uint64_t n = cfg.get_uint("n", 2);
    double t = cfg.get_double("t", 1.0);
    double dt = cfg.get_double("dt", 1e-3);
    if (req.reps == 0) return;

    double exact = wf_moment_dual_exact(p0, gamma, n, t);
    McMoment mc = wf_moment_dual_mc(p0, gamma, n, t, dt, req.reps, req.seed, req.threads);
    rep.stats.push_back(StatRow::plain("moment_exact", exact));
    rep.stats.push_back(z_row("moment_mc", mc.mean, mc.se, exact, 6.0));
}

// ---- analyze models ----------------------------------------------------

void run_bd_law(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double b = cfg.get_double("birth_rate");
    double d = cfg.get_double("death_rate");
    double t = cfg.get_double("t");
    std::vector<double> law = bd_law(b, d, t);
    double total = 0.0, mean = 0.0;
    for (std::size_t n = 0; n < law.size(); ++n) {
        total += law[n];
        mean += static_cast<double>(n) * law[n];
    }
    BdMoments mom = bd_moments(b, d, 1.0, t);
    for (std::size_t n = 0; n < std::min<std::size_t>(law.size(), 5); ++n)
        rep.stats.push_back(StatRow::plain("p" + std::to_string(n), law[n]));
    rep.stats.push_back(abs_row("total_mass", total, 1.0, 1e-8));
    rep.stats.push_back(rel_row("mean_from_law", mean, mom.mean, 1e-6));

    std::vector<double> ns(law.size());
    for (std::size_t n = 0; n < law.size(); ++n) ns[n] = static_cast<double>(n);
    add_file(rep, write_table(req, "bd_law", {"n", "p"}, {ns, law}));
}

void run_bd_laplace(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double b = cfg.get_double("birth_rate");
    double d = cfg.get_double("death_rate");
    double x0 = cfg.get_double("x0", 1.0);
    double t = cfg.get_double("t");
    double theta = cfg.get_double("theta", 1.0);
    double value = bd_laplace(b, d, x0, t, theta);
    // second route: transform of the truncated transition law
    std::vector<double> law = bd_law(b, d, t, 1e-14);
    double one = 0.0;
    for (std::size_t n = 0; n < law.size(); ++n)
        one += law[n] * std::exp(-theta * static_cast<double>(n));
    double via_law = std::pow(one, x0);
    rep.stats.push_back(StatRow::plain("laplace", value));
    rep.stats.push_back(abs_row("laplace_vs_law_sum", via_law, value, 1e-8));
}

void run_csbp_laplace(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double m = cfg.get_double("m", 0.0);
    double gamma = cfg.get_double("gamma", 1.0);
    double theta = cfg.get_double("theta", 1.0);
    double t = cfg.get_double("t", 1.0);
    double x0 = cfg.get_double("x0", 1.0);
    double u = csbp_laplace(m, gamma, theta, t);
    rep.stats.push_back(StatRow::plain("u", u));
    rep.stats.push_back(StatRow::plain("laplace", std::exp(-x0 * u)));
    double u_inf = m == 0.0 ? 1.0 / (gamma * t)
                            : m * std::exp(m * t) / (gamma * std::expm1(m * t));
    rep.stats.push_back(StatRow::plain("extinct_by_t", std::exp(-x0 * u_inf)));

    // independent route: integrate u' = m u - gamma u^2 numerically
    OdeRhs rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = m * y[0] - gamma * y[0] * y[0];
    };
    OdeTrajectory traj = rk4_integrate(rhs, {theta}, t, t / 20000.0, 1 << 30);
    rep.stats.push_back(abs_row("u_vs_ode", traj.y.back()[0], u, 1e-8));
}

void run_extinction(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    OffspringLaw law = read_law(cfg);
    double q = extinction_probability(law);
    rep.stats.push_back(StatRow::plain("q", q));
    rep.stats.push_back(abs_row("fixed_point_residual", pgf_eval(law, q), q, 1e-12));
    rep.stats.push_back(StatRow::plain("mean", law.mean()));
    rep.stats.push_back(StatRow::plain("variance", law.variance()));
}

void run_malthusian(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    if (cfg.has("birth_rate")) {
        double b = cfg.get_double("birth_rate");
        double d = cfg.get_double("death_rate");
        double horizon = cfg.get_double("horizon", 30.0 / std::max(b, 1e-6));
        double step = cfg.get_double("step", horizon / 20000.0);
        LifeHistory lh = make_exponential_life_history(b, d, horizon, step);
        double alpha = solve_malthusian(lh);
        rep.stats.push_back(rel_row("alpha", alpha, b - d, 1e-4));
        rep.stats.push_back(rel_row("net_reproduction", lh.net_reproduction(), b / d, 1e-4));
        return;
    }
    LifeHistory lh;
    lh.age = cfg.get_double_list("age");
    lh.fecundity = cfg.get_double_list("fecundity");
    lh.death_cdf = cfg.get_double_list("death_cdf");
    lh.validate();
    rep.stats.push_back(StatRow::plain("net_reproduction", lh.net_reproduction()));
    rep.stats.push_back(StatRow::plain("alpha", solve_malthusian(lh)));
}

void run_dirichlet_moment(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::vector<double> theta = cfg.get_double_list("theta");
    std::vector<int> k = read_int_list(cfg, "k");
    rep.stats.push_back(StatRow::plain("moment", dirichlet_moment(theta, k)));
}

void run_ewens_probability(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double theta = cfg.get_double("theta");
    std::vector<int> a = read_int_list(cfg, "a");
    std::size_t n = 0;
    for (std::size_t j = 0; j < a.size(); ++j)
        n += static_cast<std::size_t>(a[j]) * (j + 1);
    rep.stats.push_back(StatRow::plain("n", static_cast<double>(n)));
    rep.stats.push_back(StatRow::plain("probability", ewens_probability(a, theta)));
}

void run_homozygosity(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::size_t n = static_cast<std::size_t>(cfg.get_int("n"));
    double theta = cfg.get_double("theta");
    double h = homozygosity(n, theta);
    rep.stats.push_back(StatRow::plain("h", h));
    // second route: the allelic-partition probability of the single-block state
    std::vector<int> a(n, 0);
    a[n - 1] = 1;
    rep.stats.push_back(abs_row("h_vs_partition_probability", ewens_probability(a, theta), h,
                                1e-12));
}

void run_lambda_rates(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    std::uint64_t b = cfg.get_uint("b", 10);
    LambdaMeasure lm = read_lambda_measure(cfg);
    if (b < 2) throw std::runtime_error("b must be >= 2");
    std::vector<double> ks, lams, rates;
    double total = 0.0;
    for (std::uint64_t k = 2; k <= b; ++k) {
        double lam = lm.merger_rate(b, k);
        // binomial coefficient via lgamma, an independent route from the
        // cancellation used inside total_rate
        double logc = std::lgamma(static_cast<double>(b + 1))
                    - std::lgamma(static_cast<double>(k + 1))
                    - std::lgamma(static_cast<double>(b - k + 1));
        double rate = std::exp(logc) * lam;
        ks.push_back(static_cast<double>(k));
        lams.push_back(lam);
        rates.push_back(rate);
        total += rate;
    }
    rep.stats.push_back(rel_row("total_rate", lm.total_rate(b), total, 1e-9));
    add_file(rep, write_table(req, "lambda_rates", {"k", "lambda_bk", "rate"},
                              {ks, lams, rates}));
}

void run_matrix_exp(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    Matrix q = read_matrix(cfg, "generator");
    double t = cfg.get_double("t", 1.0);
    validate_generator(q);
    Matrix p = matrix_exp_transition(q, t);
    double worst = 0.0, min_entry = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < p.n; ++j) {
            sum += p(i, j);
            min_entry = std::min(min_entry, p(i, j));
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    rep.stats.push_back(StatRow::checked("max_row_sum_error", worst, 0.0, "abs", worst, 1e-9));
    rep.stats.push_back(StatRow::plain("min_entry", min_entry));

    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < p.n; ++j) {
        names.push_back("to_" + std::to_string(j));
        std::vector<double> col;
        for (std::size_t i = 0; i < p.n; ++i) col.push_back(p(i, j));
        cols.push_back(col);
    }
    add_file(rep, write_table(req, "transition_matrix", names, cols));
}

void run_duality_check(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    int count = static_cast<int>(cfg.get_int("count", 20));
    int kmax = static_cast<int>(cfg.get_int("kmax", 5));
    std::vector<double> ts = cfg.has("t") ? cfg.get_double_list("t")
                                          : std::vector<double>{0.1, 1.0, 10.0};
    if (kmax < 2 || kmax > 12) throw std::runtime_error("kmax must lie in [2,12]");

    RngStream rng(req.seed, 0);
    std::vector<DualityCase> cases;
    double max_diff = 0.0, max_stat_residual = 0.0;
    for (int i = 0; i < count; ++i) {
        std::size_t K = 2 + static_cast<std::size_t>(i) % static_cast<std::size_t>(kmax - 1);
        Matrix q = random_irreducible_generator(K, rng);
        for (double t : ts) {
            DualityCase worst;
            worst.diff = -1.0;
            for (std::size_t j = 0; j < K; ++j)
                for (std::size_t l = 0; l < K; ++l) {
                    DualityCheck chk = verify_mc_duality(q, j, l, t);
                    if (chk.diff > worst.diff) {
                        worst.lhs = chk.lhs;
                        worst.rhs = chk.rhs;
                        worst.diff = chk.diff;
                        worst.label = "case " + std::to_string(i) + " K=" + std::to_string(K)
                                    + " t=" + fmt_g(t) + " j=" + std::to_string(j)
                                    + " l=" + std::to_string(l);
                    }
                }
            cases.push_back(worst);
            max_diff = std::max(max_diff, worst.diff);
        }
        std::vector<double> pi = stationary_of_generator(q);
        std::vector<double> res = vec_mat(pi, q);
        for (double v : res) max_stat_residual = std::max(max_stat_residual, std::abs(v));
    }
    rep.stats.push_back(StatRow::checked("max_duality_diff", max_diff, 0.0, "abs",
                                         max_diff, 1e-8));
    rep.stats.push_back(StatRow::checked("max_stationary_residual", max_stat_residual, 0.0,
                                         "abs", max_stat_residual, 1e-9));
    add_file(rep, write_artifact(req, "duality_report.json", duality_report_json(cases)));
}

void run_wf_moment_ode(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double gamma = cfg.get_double("gamma", 1.0);
    double theta = cfg.get_double("theta", 0.0);
    std::size_t K = static_cast<std::size_t>(cfg.get_int("K", 2));
    std::vector<double> nu = cfg.has("nu")
        ? cfg.get_double_list("nu")
        : std::vector<double>(K, 1.0 / static_cast<double>(K));
    std::vector<double> p0 = cfg.has("p0")
        ? cfg.get_double_list("p0")
        : std::vector<double>(K, 1.0 / static_cast<double>(K));
    std::vector<int> orders = cfg.has("orders") ? read_int_list(cfg, "orders")
                                                : std::vector<int>{1, 2};
    double tmax = cfg.get_double("t", 1.0);
    double dt = cfg.get_double("dt", 1e-3);
    bool check_stationary = cfg.get_bool("check_stationary", false);
    double stationary_tol = cfg.get_double("stationary_tol", 1e-3);

    std::vector<std::vector<int>> indices;
    for (int k : orders) {
        std::vector<int> ix(K, 0);
        ix[0] = k;
        indices.push_back(ix);
    }
    MomentOdeResult mo = wf_moment_ode(gamma, theta, nu, indices, p0, tmax, dt, 1 << 30);
    for (int k : orders) {
        std::vector<int> ix(K, 0);
        ix[0] = k;
        std::size_t slot = 0;
        for (std::size_t j = 0; j < mo.indices.size(); ++j)
            if (mo.indices[j] == ix) slot = j;
        double val = mo.traj.y.back()[slot];
        std::string name = "moment_p0_" + std::to_string(k);
        if (check_stationary && theta > 0) {
            std::vector<double> alpha(nu.size());
            for (std::size_t i = 0; i < nu.size(); ++i) alpha[i] = theta * nu[i] / gamma;
            rep.stats.push_back(abs_row(name, val, dirichlet_moment(alpha, ix),
                                        stationary_tol));
        } else {
            rep.stats.push_back(StatRow::plain(name, val));
        }
    }
}

void run_selection_density(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    WfDiffusionSpec spec;
    spec.K = 2;
    spec.gamma = cfg.get_double("gamma", 1.0);
    spec.theta = cfg.get_double("theta");
    spec.nu = cfg.has("nu") ? cfg.get_double_list("nu") : std::vector<double>{0.5, 0.5};
    if (cfg.has_child("sigma")) spec.sigma = read_matrix(cfg, "sigma");
    spec.validate();
    std::size_t cells = static_cast<std::size_t>(cfg.get_int("cells", 200));
    DensityTable tab = selection_stationary_density(spec, cells);
    double total = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < tab.p.size(); ++i) {
        total += tab.mass[i];
        mean += tab.p[i] * tab.mass[i];
    }
    rep.stats.push_back(abs_row("total_mass", total, 1.0, 1e-12));
    rep.stats.push_back(StatRow::plain("mean_p", mean));
    add_file(rep, write_table(req, "stationary_density", {"p", "density", "mass"},
                              {tab.p, tab.density, tab.mass}));
}

void run_logistic(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double alpha = cfg.get_double("alpha", 1.0);
    double capacity = cfg.get_double("capacity", 100.0);
    double x0 = cfg.get_double("x0", 1.0);
    double tmax = cfg.get_double("t", 10.0);
    double dt = cfg.get_double("dt", 1e-3);
    OdeTrajectory traj = logistic_solve(alpha, capacity, x0, tmax, dt);
    double closed = logistic_value(alpha, capacity, x0, tmax);
    rep.stats.push_back(StatRow::plain("x_final", closed));
    // closed form against a plain integration of the same field
    OdeRhs rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = alpha * y[0] * (1.0 - y[0] / capacity);
    };
    OdeTrajectory num = rk4_integrate(rhs, {x0}, tmax, dt, 1 << 30);
    rep.stats.push_back(abs_row("closed_vs_rk4", num.y.back()[0], closed, 1e-6));

    std::vector<double> xs;
    for (const auto& y : traj.y) xs.push_back(y[0]);
    add_file(rep, write_table(req, "logistic_path", {"t", "x"}, {traj.t, xs}));
}

void run_lotka_volterra(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double r1 = cfg.get_double("r1", 1.0), r2 = cfg.get_double("r2", 1.0);
    double k1 = cfg.get_double("k1", 100.0), k2 = cfg.get_double("k2", 100.0);
    double a12 = cfg.get_double("a12", 0.5), a21 = cfg.get_double("a21", 0.5);
    double x10 = cfg.get_double("x10", 10.0), x20 = cfg.get_double("x20", 10.0);
    double tmax = cfg.get_double("t", 100.0);
    double dt = cfg.get_double("dt", 1e-3);
    LotkaVolterraResult r = lotka_volterra_integrate(r1, r2, k1, k2, a12, a21,
                                                     x10, x20, tmax, dt);
    rep.stats.push_back(StatRow::plain("x1_final", r.traj.y.back()[0]));
    rep.stats.push_back(StatRow::plain("x2_final", r.traj.y.back()[1]));
    rep.stats.push_back(StatRow::plain("coexistence", r.coexistence ? 1.0 : 0.0));
    if (r.coexistence) {
        double d0 = r.traj.y.back()[0] - r.interior_fixed_point[0];
        double d1 = r.traj.y.back()[1] - r.interior_fixed_point[1];
        rep.stats.push_back(StatRow::plain("distance_to_fixed_point", std::hypot(d0, d1)));
    }
    std::vector<double> x1, x2;
    for (const auto& y : r.traj.y) { x1.push_back(y[0]); x2.push_back(y[1]); }
    add_file(rep, write_table(req, "lotka_volterra_path", {"t", "x1", "x2"},
                              {r.traj.t, x1, x2}));
}

void run_sir(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double beta = cfg.get_double("beta", 0.3);
    double gamma = cfg.get_double("gamma", 0.1);
    double s0 = cfg.get_double("s0", 0.99);
    double i0 = cfg.get_double("i0", 0.01);
    double r0s = cfg.get_double("r0", 0.0);
    double tmax = cfg.get_double("t", 200.0);
    double dt = cfg.get_double("dt", 1e-2);
    SirResult r = sir_integrate(beta, gamma, s0, i0, r0s, tmax, dt);
    double total = s0 + i0 + r0s;
    double worst = 0.0;
    for (const auto& y : r.traj.y)
        worst = std::max(worst, std::abs(y[0] + y[1] + y[2] - total));
    rep.stats.push_back(StatRow::plain("basic_reproduction", r.r0));
    rep.stats.push_back(StatRow::plain("s_final", r.traj.y.back()[0]));
    rep.stats.push_back(StatRow::plain("i_final", r.traj.y.back()[1]));
    rep.stats.push_back(StatRow::plain("r_final", r.traj.y.back()[2]));
    rep.stats.push_back(StatRow::checked("conservation_error", worst, 0.0, "abs", worst, 1e-9));
    std::vector<double> s, i, rr;
    for (const auto& y : r.traj.y) { s.push_back(y[0]); i.push_back(y[1]); rr.push_back(y[2]); }
    add_file(rep, write_table(req, "sir_path", {"t", "s", "i", "r"}, {r.traj.t, s, i, rr}));
}

void run_replicator(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    FitnessSpec fitness = cfg.has("haploid")
        ? FitnessSpec::haploid(cfg.get_double_list("haploid"))
        : FitnessSpec::diploid(read_matrix(cfg, "payoff"));
    double m = cfg.get_double("mutation_rate", 0.0);
    MutationKernel kernel;
    if (cfg.has_child("mutation")) {
        kernel.q = read_matrix(cfg, "mutation");
        kernel.validate();
    } else {
        // uniform redistribution kernel; inert while mutation_rate = 0
        std::size_t K = fitness.types();
        kernel.q = Matrix(K);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                if (i != j) kernel.q(i, j) = 1.0 / static_cast<double>(K - 1);
    }
    std::vector<double> p0 = cfg.has("p0")
        ? cfg.get_double_list("p0")
        : std::vector<double>(fitness.types(), 1.0 / static_cast<double>(fitness.types()));
    double tmax = cfg.get_double("t", 5.0);
    double dt = cfg.get_double("dt", 1e-3);
    ReplicatorResult r = replicator_integrate(fitness, kernel, m, p0, tmax, dt);

    for (std::size_t i = 0; i < fitness.types(); ++i)
        rep.stats.push_back(StatRow::plain("p" + std::to_string(i) + "_final",
                                           r.traj.y.back()[i]));
    const std::vector<double>& vbar = r.traj.series.at("mean_fitness");
    const std::vector<double>& var = r.traj.series.at("fitness_variance");
    rep.stats.push_back(StatRow::plain("mean_fitness_final", vbar.back()));
    if (m == 0.0) {
        // gradient-flow facts: mean fitness never decreases, and its slope is
        // twice the fitness variance
        double min_slope = std::numeric_limits<double>::infinity();
        double max_rel = 0.0;
        for (std::size_t k = 0; k + 1 < vbar.size(); ++k) {
            double h = r.traj.t[k + 1] - r.traj.t[k];
            double slope = (vbar[k + 1] - vbar[k]) / h;
            min_slope = std::min(min_slope, slope);
            double target = var[k] + var[k + 1];  // 2 * variance at the midpoint
            if (target > 1e-8)
                max_rel = std::max(max_rel, std::abs(slope - target) / target);
        }
        rep.stats.push_back(StatRow::checked("min_mean_fitness_slope", min_slope, 0.0, "min",
                                             std::max(0.0, -min_slope), 1e-8));
        rep.stats.push_back(StatRow::checked("slope_vs_2variance_rel", max_rel, 0.0, "rel",
                                             max_rel, 1e-2));
    }
    std::vector<std::string> names{"t"};
    std::vector<std::vector<double>> cols{r.traj.t};
    for (std::size_t i = 0; i < fitness.types(); ++i) {
        names.push_back("p" + std::to_string(i));
        std::vector<double> c;
        for (const auto& y : r.traj.y) c.push_back(y[i]);
        cols.push_back(c);
    }
    names.push_back("mean_fitness");
    cols.push_back(vbar);
    names.push_back("fitness_variance");
    cols.push_back(var);
    add_file(rep, write_table(req, "replicator_path", names, cols));
}

void run_perron(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    Matrix m = read_matrix(cfg, "matrix");
    PerronRoot pr = perron_frobenius(m);
    rep.stats.push_back(StatRow::plain("rho", pr.rho));
    std::vector<double> mu = mat_vec(m, pr.u);
    double resid = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        resid = std::max(resid, std::abs(mu[i] - pr.rho * pr.u[i]));
    rep.stats.push_back(StatRow::checked("eigen_residual", resid, 0.0, "abs", resid, 1e-9));
    for (std::size_t i = 0; i < pr.u.size(); ++i) {
        rep.stats.push_back(StatRow::plain("u" + std::to_string(i), pr.u[i]));
        rep.stats.push_back(StatRow::plain("v" + std::to_string(i), pr.v[i]));
    }
}

void run_escape(ScenarioRequest& req, RunReport& rep) {
    const ConfigNode& cfg = req.config;
    double q0 = cfg.get_double("q0");
    double qe = cfg.get_double("qe");
    double kappa = cfg.get_double("kappa");
    rep.stats.push_back(StatRow::plain("escape_probability",
                                       escape_probability(q0, qe, kappa)));
}

// ---- registry ----------------------------------------------------------

struct ModelEntry {
    const char* name;
    const char* command;
    const char* summary;
    void (*run)(ScenarioRequest&, RunReport&);
};

const ModelEntry kModels[] = {
    {"bgw", "simulate", "discrete branching process: extinction and mean growth vs exact pgf iterates", run_bgw},
    {"bgw-tree", "simulate", "plane genealogy trees with contour/height/level data files", run_bgw_tree},
    {"bd", "simulate", "linear birth-death jump chain vs closed-form law and moments", run_bd},
    {"csbp", "simulate", "continuous-state branching diffusion vs Laplace-exponent predictions", run_csbp},
    {"wf-chain", "simulate", "discrete Wright-Fisher chain with selection/mutation options", run_wf_chain},
    {"wf-diffusion", "simulate", "K-allele diffusion; neutral runs checked against the moment system", run_wf_diffusion},
    {"wf-fixation", "simulate", "two-allele absorption times and fixation fractions", run_wf_fixation},
    {"kingman", "simulate", "pairwise coalescent: time to common ancestor vs 2(1-1/n)/gamma", run_kingman},
    {"lambda", "simulate", "multiple-merger coalescent driven by a measure on [0,1]", run_lambda},
    {"moran", "simulate", "pairwise-resampling particle system (frequency martingale check)", run_moran},
    {"lookdown", "simulate", "ordered-level particle system matching the unordered one in law", run_lookdown},
    {"ewens", "simulate", "allelic partitions from the urn vs exact block-count and monotypic formulas", run_ewens},
    {"gem", "simulate", "stick-breaking mass vector; first-stick and match-probability checks", run_gem},
    {"pd", "simulate", "ranked atom masses from the subordinator construction", run_pd},
    {"voter", "simulate", "opinion copying on a torus; density martingale and consensus tracking", run_voter},
    {"stepping-stone", "simulate", "coupled per-site diffusions vs the two-walker moment dual", run_stepping_stone},
    {"brw", "simulate", "branching random walk occupancy means vs the semigroup formula", run_brw},
    {"reed-frost", "simulate", "chain-binomial epidemic final sizes vs the branching envelope", run_reed_frost},
    {"reed-frost-scan", "simulate", "large-outbreak probability across infection rates (monotone check)", run_reed_frost_scan},
    {"wf-moment-dual", "simulate", "diffusion moments vs the exact block-counting dual", run_wf_moment_dual},
    {"bd-law", "analyze", "closed-form birth-death transition probabilities", run_bd_law},
    {"bd-laplace", "analyze", "birth-death Laplace transform, cross-checked against the law", run_bd_laplace},
    {"csbp-laplace", "analyze", "branching-diffusion Laplace exponent, cross-checked by quadrature", run_csbp_laplace},
    {"extinction", "analyze", "smallest pgf fixed point of an offspring law", run_extinction},
    {"malthusian", "analyze", "growth exponent of an age-structured reproduction profile", run_malthusian},
    {"dirichlet-moment", "analyze", "mixed moments of a Dirichlet law", run_dirichlet_moment},
    {"ewens-probability", "analyze", "exact probability of an allelic partition", run_ewens_probability},
    {"homozygosity", "analyze", "monotypic-sample probability, cross-checked two ways", run_homozygosity},
    {"lambda-rates", "analyze", "merger-rate table of a coalescent measure", run_lambda_rates},
    {"matrix-exp", "analyze", "transition matrix of a rate matrix (row-sum check)", run_matrix_exp},
    {"duality-check", "analyze", "random-generator set-valued duality identity sweep", run_duality_check},
    {"wf-moment-ode", "analyze", "moment trajectories of the neutral diffusion with mutation", run_wf_moment_ode},
    {"selection-density", "analyze", "two-allele stationary density with selection tilt", run_selection_density},
    {"logistic", "analyze", "saturating growth curve, closed form vs integration", run_logistic},
    {"lotka-volterra", "analyze", "two-species competition trajectories and coexistence", run_lotka_volterra},
    {"sir", "analyze", "compartmental epidemic flow with conservation check", run_sir},
    {"replicator", "analyze", "selection-mutation flow; gradient-flow identities when mutation-free", run_replicator},
    {"perron", "analyze", "spectral growth data of a nonnegative mean matrix", run_perron},
    {"escape", "analyze", "non-recoalescence probability of a delayed-merging walker pair", run_escape},
};

const ModelEntry* find_model(const std::string& name) {
    for (const auto& e : kModels)
        if (name == e.name) return &e;
    return nullptr;
}

}  // namespace

std::vector<ModelInfo> list_models() {
    std::vector<ModelInfo> out;
    for (const auto& e : kModels) out.push_back({e.name, e.command, e.summary});
    return out;
}

RunReport run_scenario(const std::string& command, ScenarioRequest& req) {
    auto t0 = std::chrono::steady_clock::now();
    std::string model = req.config.get_string("model");
    const ModelEntry* entry = find_model(model);
    if (entry == nullptr) {
        std::string known;
        for (const auto& e : kModels) known += std::string(" ") + e.name;
        throw std::runtime_error("unknown model '" + model + "'; known models:" + known);
    }
    if (command != entry->command)
        throw std::runtime_error("model '" + model + "' runs under '"
                                 + std::string(entry->command) + "', not '" + command + "'");

    // ensemble keys may live in the config file; command-line flags win
    if (req.config.has("seed")) {
        std::uint64_t v = req.config.get_uint("seed");
        if (!req.seed_override) req.seed = v;
    }
    if (req.config.has("reps")) {
        std::uint64_t v = req.config.get_uint("reps");
        if (!req.reps_override) req.reps = v;
    }
    if (req.config.has("threads")) {
        int v = static_cast<int>(req.config.get_int("threads"));
        if (!req.threads_override) req.threads = v;
    }
    if (!req.out_dir.empty()) std::filesystem::create_directories(req.out_dir);

    RunReport rep;
    rep.command = command;
    rep.model = model;
    rep.seed = req.seed;
    rep.reps = req.reps;
    rep.config_echo = req.config.serialize();
    entry->run(req, rep);
    req.config.check_consumed();

    rep.version = POPDYN_VERSION_STRING;
    rep.threads_used = req.threads > 0 ? req.threads : default_thread_count();
    rep.wall_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace popdyn
