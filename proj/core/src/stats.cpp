#include "popdyn/stats.hpp"
#include "popdyn/specfun.hpp"
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace popdyn {

Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.n = xs.size();
    if (s.n == 0) return s;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(s.n);
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    s.mean = m;
    s.variance = s.n > 1 ? v / static_cast<double>(s.n - 1) : 0.0;
    s.se = s.n > 1 ? std::sqrt(s.variance / static_cast<double>(s.n)) : 0.0;
    return s;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

namespace {
// pool adjacent bins until every expected count reaches the floor
void pool_bins(std::vector<double>& obs, std::vector<double>& exp_, double min_expected) {
    for (std::size_t i = 0; i < exp_.size();) {
        if (exp_[i] < min_expected && exp_.size() > 1) {
            std::size_t j = (i + 1 < exp_.size()) ? i + 1 : i - 1;
            exp_[j] += exp_[i];
            obs[j] += obs[i];
            exp_.erase(exp_.begin() + static_cast<long>(i));
            obs.erase(obs.begin() + static_cast<long>(i));
            if (j < i) i = j; // merged left; re-check that bin
        } else {
            ++i;
        }
    }
}
} // namespace

Chi2Result chi2_test(const std::vector<double>& observed, const std::vector<double>& expected,
                     double min_expected, int dof_reduction) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi2_test: size mismatch");
    std::vector<double> obs = observed, exp_ = expected;
    pool_bins(obs, exp_, min_expected);
    Chi2Result r;
    r.bins_used = static_cast<int>(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (exp_[i] <= 0.0) continue;
        double d = obs[i] - exp_[i];
        r.statistic += d * d / exp_[i];
    }
    r.dof = std::max(1, r.bins_used - dof_reduction);
    r.p_value = gamma_q(0.5 * r.dof, 0.5 * r.statistic);
    return r;
}

Chi2Result chi2_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                           double min_expected) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("chi2_two_sample: size mismatch");
    double ta = 0.0, tb = 0.0;
    for (double x : a) ta += x;
    for (double x : b) tb += x;
    if (ta <= 0.0 || tb <= 0.0) throw std::invalid_argument("chi2_two_sample: empty counts");
    // expected under homogeneity: row total * column total / grand total
    std::vector<double> obs, exp_;
    obs.reserve(2 * a.size());
    exp_.reserve(2 * a.size());
    const double tot = ta + tb;
    // interleave the two rows so pooling merges matching bins consistently:
    // instead, pool on the pooled-column expectation first
    std::vector<double> ca = a, cb = b;
    // merge adjacent columns whose pooled expectation is too small
    for (std::size_t i = 0; i < ca.size();) {
        double col = ca[i] + cb[i];
        double emin = std::min(col * ta / tot, col * tb / tot);
        if (emin < min_expected && ca.size() > 1) {
            std::size_t j = (i + 1 < ca.size()) ? i + 1 : i - 1;
            ca[j] += ca[i]; cb[j] += cb[i];
            ca.erase(ca.begin() + static_cast<long>(i));
            cb.erase(cb.begin() + static_cast<long>(i));
            if (j < i) i = j;
        } else ++i;
    }
    Chi2Result r;
    r.bins_used = static_cast<int>(ca.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
        double col = ca[i] + cb[i];
        if (col <= 0.0) continue;
        double ea = col * ta / tot, eb = col * tb / tot;
        r.statistic += (ca[i] - ea) * (ca[i] - ea) / ea + (cb[i] - eb) * (cb[i] - eb) / eb;
    }
    r.dof = std::max(1, r.bins_used - 1);
    r.p_value = gamma_q(0.5 * r.dof, 0.5 * r.statistic);
    return r;
}

std::vector<double> bin_counts(const std::vector<double>& xs, double lo, double hi, int nbins) {
    if (!(hi > lo) || nbins < 1) throw std::invalid_argument("bin_counts: bad range");
    std::vector<double> c(static_cast<std::size_t>(nbins), 0.0);
    const double w = (hi - lo) / nbins;
    for (double x : xs) {
        int k = static_cast<int>(std::floor((x - lo) / w));
        if (k < 0) k = 0;
        if (k >= nbins) k = nbins - 1;
        c[static_cast<std::size_t>(k)] += 1.0;
    }
    return c;
}

std::vector<double> bin_expected(const std::function<double(double)>& cdf,
                                 double lo, double hi, int nbins, double total) {
    std::vector<double> e(static_cast<std::size_t>(nbins), 0.0);
    const double w = (hi - lo) / nbins;
    for (int k = 0; k < nbins; ++k) {
        double a = (k == 0) ? -1e308 : lo + k * w;
        double b = (k == nbins - 1) ? 1e308 : lo + (k + 1) * w;
        double fa = (k == 0) ? 0.0 : cdf(a);
        double fb = (k == nbins - 1) ? 1.0 : cdf(b);
        e[static_cast<std::size_t>(k)] = total * (fb - fa);
    }
    return e;
}

double z_score(double a, double sa, double b, double sb) {
    double s = std::sqrt(sa * sa + sb * sb);
    if (s == 0.0) return a == b ? 0.0 : 1e308;
    return std::fabs(a - b) / s;
}

} // namespace popdyn
