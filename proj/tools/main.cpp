#include "CLI11.hpp"

#include "popdyn/acceptance.hpp"
#include "popdyn/config.hpp"
#include "popdyn/io.hpp"
#include "popdyn/scenario.hpp"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

namespace {

struct EnsembleFlags {
    std::uint64_t seed = 1;
    std::uint64_t reps = 0;
    int threads = 0;
    std::string out_dir;
    std::string format = "csv";
    CLI::Option* seed_opt = nullptr;
    CLI::Option* reps_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
};

void attach_ensemble_flags(CLI::App* cmd, EnsembleFlags& f) {
    f.seed_opt = cmd->add_option("--seed", f.seed, "master seed (beats a seed key in the config)");
    f.reps_opt = cmd->add_option("--reps", f.reps, "replicate count (beats the config)");
    f.threads_opt = cmd->add_option("--threads", f.threads,
                                    "worker threads; default from POPDYN_THREADS or hardware");
    cmd->add_option("--out-dir", f.out_dir, "directory for data files and report.json");
    cmd->add_option("--format", f.format, "data file format")
        ->check(CLI::IsMember({"csv", "json"}));
}

int run_model(const std::string& command, const std::string& config_path,
              const EnsembleFlags& f) {
    popdyn::ScenarioRequest req;
    req.config = popdyn::ConfigNode::parse_file(config_path);
    req.out_dir = f.out_dir;
    req.format = f.format;
    if (f.seed_opt->count() > 0) { req.seed = f.seed; req.seed_override = true; }
    if (f.reps_opt->count() > 0) { req.reps = f.reps; req.reps_override = true; }
    if (f.threads_opt->count() > 0) { req.threads = f.threads; req.threads_override = true; }

    popdyn::RunReport rep = popdyn::run_scenario(command, req);
    std::fputs(rep.text_table().c_str(), stdout);
    std::printf("results_hash: %016llx\n",
                static_cast<unsigned long long>(rep.results_hash()));
    if (!f.out_dir.empty()) {
        std::string path = f.out_dir + "/report.json";
        popdyn::write_text_file(path, rep.full_json() + "\n");
        std::printf("report: %s\n", path.c_str());
        for (const auto& d : rep.data_files) std::printf("data: %s\n", d.c_str());
    }
    return rep.all_pass() ? 0 : 1;
}

int run_validate(const std::string& suite, const popdyn::AcceptanceOptions& opts,
                 const std::string& out_dir) {
    auto results = popdyn::run_acceptance(suite, opts);
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("[%s] %02d %-28s %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    std::printf("%s: %zu criteria, suite '%s'\n", all_pass ? "OK" : "FAILED",
                results.size(), suite.c_str());
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::string path = out_dir + "/acceptance.json";
        popdyn::write_text_file(path, popdyn::acceptance_json(results));
        std::printf("report: %s\n", path.c_str());
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic population dynamics toolkit"};
    app.require_subcommand(1);

    std::string sim_config, ana_config;
    EnsembleFlags sim_flags, ana_flags;
    CLI::App* sim = app.add_subcommand("simulate", "run a Monte-Carlo scenario");
    sim->add_option("config", sim_config, "scenario config file")
        ->required()->check(CLI::ExistingFile);
    attach_ensemble_flags(sim, sim_flags);
    CLI::App* ana = app.add_subcommand("analyze", "evaluate closed-form quantities");
    ana->add_option("config", ana_config, "scenario config file")
        ->required()->check(CLI::ExistingFile);
    attach_ensemble_flags(ana, ana_flags);

    std::string suite = "all", val_out_dir;
    popdyn::AcceptanceOptions val_opts;
    CLI::App* val = app.add_subcommand("validate", "run the acceptance criteria");
    val->add_option("suite", suite, "all, exact-laws, mc, or determinism");
    val->add_option("--seed", val_opts.seed, "master seed for the criteria");
    val->add_option("--threads", val_opts.threads, "worker threads");
    val->add_option("--out-dir", val_out_dir, "directory for acceptance.json");

    CLI::App* lst = app.add_subcommand("list-models", "show every model id");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit clean, bad usage exits 2
    }

    try {
        if (*sim) return run_model("simulate", sim_config, sim_flags);
        if (*ana) return run_model("analyze", ana_config, ana_flags);
        if (*val) return run_validate(suite, val_opts, val_out_dir);
        if (*lst) {
            for (const auto& m : popdyn::list_models())
                std::printf("%-18s %-9s %s\n", m.name.c_str(), m.command.c_str(),
                            m.summary.c_str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
