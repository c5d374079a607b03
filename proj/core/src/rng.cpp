#include "popdyn/rng.hpp"
#include <cmath>
#include <stdexcept>

namespace popdyn {

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
struct SplitMix64 {
    std::uint64_t x;
    std::uint64_t next() {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};
} // namespace

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_tag(const char* tag) {
    // FNV-1a, then an avalanche pass
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char* p = tag; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001B3ULL;
    }
    return mix64(h);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), id_(stream_id) {
    SplitMix64 sm{mix64(master_seed) ^ mix64(stream_id * 0x9E3779B97F4A7C15ULL + 1)};
    for (auto& w : s_) w = sm.next();
    // all-zero state is the one forbidden point of xoshiro
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t rem = (~n + 1) % n; // 2^64 mod n
    for (;;) {
        std::uint64_t x = next_u64();
        if (x >= rem) return x % n;
    }
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
    // -log(1-U) with U in [0,1) avoids log(0)
    return -std::log1p(-uniform()) / rate;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_normal_;
    }
    for (;;) {
        double u = 2.0 * uniform() - 1.0;
        double v = 2.0 * uniform() - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            double f = std::sqrt(-2.0 * std::log(s) / s);
            spare_normal_ = v * f;
            have_spare_ = true;
            return u * f;
        }
    }
}

double RngStream::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("gamma: shape and scale must be positive");
    if (shape < 1.0) {
        // boost: G(a) = G(a+1) * U^{1/a}
        double u = uniform();
        while (u == 0.0) u = uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

double RngStream::beta(double a, double b) {
    if (a == 1.0) {
        // inverse cdf, cheaper and exact: 1 - (1-U)^{1/b}
        return 1.0 - std::pow(1.0 - uniform(), 1.0 / b);
    }
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
}

std::uint64_t RngStream::binomial(std::uint64_t n, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: p out of [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    bool flipped = false;
    if (p > 0.5) { p = 1.0 - p; flipped = true; }
    std::uint64_t k = 0;
    if (static_cast<double>(n) * p < 30.0) {
        // count successes by geometric gaps between them
        const double log1mp = std::log1p(-p);
        double i = -1.0;
        for (;;) {
            double u = uniform();
            while (u == 0.0) u = uniform();
            i += std::floor(std::log(u) / log1mp) + 1.0;
            if (i >= static_cast<double>(n)) break;
            ++k;
        }
    } else {
        for (std::uint64_t i = 0; i < n; ++i)
            if (uniform() < p) ++k;
    }
    return flipped ? n - k : k;
}

std::vector<std::uint64_t> RngStream::multinomial(std::uint64_t n, const std::vector<double>& probs) {
    std::vector<std::uint64_t> out(probs.size(), 0);
    double rest = 1.0;
    std::uint64_t left = n;
    for (std::size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
        double q = probs[i] / rest;
        if (q > 1.0) q = 1.0;
        std::uint64_t c = binomial(left, q);
        out[i] = c;
        left -= c;
        rest -= probs[i];
        if (rest <= 0.0) rest = 0.0;
    }
    if (!probs.empty()) out.back() += left;
    return out;
}

std::size_t RngStream::sample_cdf(const std::vector<double>& cdf) {
    double u = uniform();
    std::size_t lo = 0, hi = cdf.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (cdf[mid] <= u) lo = mid + 1; else hi = mid;
    }
    return lo < cdf.size() ? lo : cdf.size() - 1;
}

} // namespace popdyn
