#pragma once
#include <vector>
#include <thread>
#include <atomic>
#include <mutex>
#include <string>
#include <cstdint>
#include <stdexcept>
#include "popdyn/rng.hpp"

namespace popdyn {

// Replicate-parallel execution. Replicate k always uses RngStream(seed, k) and
// writes into slot k, so results are independent of worker count and
// scheduling; reductions over the returned vector must stay sequential to
// keep reports byte-identical.
struct EnsembleSpec {
    std::uint64_t seed = 0;
    std::uint64_t reps = 0;
    int threads = 0; // <= 0 means default_thread_count()
};

int default_thread_count(); // POPDYN_THREADS env var, else hardware concurrency

template <class R, class Fn>
std::vector<R> run_replicates(const EnsembleSpec& spec, Fn&& fn) {
    std::vector<R> out(spec.reps);
    int threads = spec.threads > 0 ? spec.threads : default_thread_count();
    if (threads < 1) threads = 1;
    if (spec.reps == 0) return out;
    // failures carry the replicate index so a bad parameter set is traceable
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::string err_text;
    auto record_failure = [&](std::uint64_t k, const char* what) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!failed.exchange(true))
            err_text = "replicate " + std::to_string(k) + ": " + what;
    };
    auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t k = lo; k < hi; ++k) {
            try {
                RngStream rng(spec.seed, k);
                out[k] = fn(k, rng);
            } catch (const std::exception& e) {
                record_failure(k, e.what());
                return;
            } catch (...) {
                record_failure(k, "unknown error");
                return;
            }
        }
    };
    if (threads == 1 || spec.reps < 2) {
        run_range(0, spec.reps);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::uint64_t chunk = spec.reps / (static_cast<std::uint64_t>(threads) * 16);
        if (chunk == 0) chunk = 1;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    std::uint64_t start = next.fetch_add(chunk);
                    if (start >= spec.reps || failed.load(std::memory_order_relaxed)) break;
                    run_range(start, std::min(start + chunk, spec.reps));
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error(err_text);
    return out;
}

// sub-seed derivation for named sub-experiments of a scenario
std::uint64_t derive_seed(std::uint64_t seed, const char* tag);

} // namespace popdyn
