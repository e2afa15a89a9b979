#include "qtarrow/stats.hpp"

#include "qtarrow/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qta {

void QEnsemble::validate() const {
    if (values.empty()) throw std::invalid_argument("ensemble: no samples");
    if (!(duration >= 0)) throw std::invalid_argument("ensemble: negative duration");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("ensemble: non-finite sample");
}

double Histogram::center(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(half_bins) + 0.5) * bin_width;
}

std::size_t Histogram::mirror(std::size_t i) const {
    return static_cast<std::size_t>(2 * half_bins - 1) - i;
}

Histogram build_histogram(const QEnsemble& ens, double bin_width, double q_max) {
    ens.validate();
    if (!(bin_width > 0) || !(q_max > 0))
        throw std::invalid_argument("histogram: bin width and range must be positive");
    Histogram h;
    h.bin_width = bin_width;
    h.half_bins = static_cast<long>(std::ceil(q_max / bin_width - 1e-12));
    h.counts.assign(static_cast<std::size_t>(2 * h.half_bins), 0);
    for (double v : ens.values) {
        const long idx = static_cast<long>(std::floor(v / bin_width)) + h.half_bins;
        if (idx < 0)
            ++h.overflow_low;
        else if (idx >= 2 * h.half_bins)
            ++h.overflow_high;
        else
            ++h.counts[static_cast<std::size_t>(idx)];
        ++h.total;
    }
    return h;
}

FtCurve detailed_ft_curve(const Histogram& h, double window, int min_count) {
    if (min_count < 1) throw std::invalid_argument("ft curve: min_count must be >= 1");
    FtCurve c;
    c.window = window;
    c.min_count = min_count;
    for (std::size_t i = static_cast<std::size_t>(h.half_bins);
         i < static_cast<std::size_t>(2 * h.half_bins); ++i) {
        const long np = h.counts[i];
        const long nm = h.counts[h.mirror(i)];
        if (np < min_count || nm < min_count) continue;
        FtPoint pt;
        pt.q = h.center(i);
        pt.ln_ratio = std::log(static_cast<double>(np) / static_cast<double>(nm));
        pt.stderr_ = std::sqrt(1.0 / np + 1.0 / nm);
        c.points.push_back(pt);
    }
    if (c.points.empty())
        throw std::runtime_error(
            "ft curve: no mirrored bin pair reaches min_count = " + std::to_string(min_count));
    double swqq = 0.0, swqy = 0.0;
    for (const auto& pt : c.points) {
        if (pt.q > window + 1e-12) continue;
        const double w = 1.0 / (pt.stderr_ * pt.stderr_);
        swqq += w * pt.q * pt.q;
        swqy += w * pt.q * pt.ln_ratio;
    }
    if (!(swqq > 0))
        throw std::runtime_error("ft curve: no qualifying bins inside the fit window");
    c.slope = swqy / swqq;
    c.slope_err = 1.0 / std::sqrt(swqq);
    return c;
}

IntegralFt integral_ft(const QEnsemble& ens) {
    ens.validate();
    const std::size_t n = ens.values.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(-ens.values[i]);
    IntegralFt out;
    out.n = n;
    const double total = kahan_total(w);
    out.mean = total / static_cast<double>(n);
    if (n > 1) {
        // leave-one-out means; for the mean this reduces to the classic s/sqrt(n)
        kahan_sum dev2;
        for (double wi : w) {
            const double loo = (total - wi) / static_cast<double>(n - 1);
            dev2.add((loo - out.mean) * (loo - out.mean));
        }
        out.stderr_ = std::sqrt(dev2.value() * static_cast<double>(n - 1) /
                                static_cast<double>(n));
    }
    std::vector<double> sorted = w;
    const std::size_t mid = n / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    if (n % 2 == 1) {
        out.median = sorted[mid];
    } else {
        const double hi = sorted[mid];
        std::nth_element(sorted.begin(), sorted.begin() + (mid - 1), sorted.begin() + mid);
        out.median = 0.5 * (sorted[mid - 1] + hi);
    }
    return out;
}

namespace {

// u = arcosh(e^{q/2}) without cancellation near q = 0 or overflow at large q
double arcosh_exp_half(double q) {
    return 0.5 * q + std::log1p(std::sqrt(-std::expm1(-q)));
}

void check_qnd_args(double T, double tau) {
    if (!(T > 0) || !(tau > 0))
        throw std::invalid_argument("analytic law: T and tau must be positive");
}

}  // namespace

double analytic_qnd_density(double q, double T, double tau) {
    check_qnd_args(T, tau);
    if (!(q > 0)) return 0.0;
    const double theta = T / tau;
    const double u = arcosh_exp_half(q);
    const double log_em1 = (q > 30.0) ? q : std::log(std::expm1(q));
    const double lp = -0.5 * std::log(2.0 * M_PI * theta) - 0.5 * theta + q -
                      0.5 * log_em1 - u * u / (2.0 * theta);
    return std::exp(lp);
}

double analytic_qnd_cdf(double q, double T, double tau) {
    check_qnd_args(T, tau);
    if (!(q > 0)) return 0.0;
    const double theta = T / tau;
    const double rt = std::sqrt(theta);
    const double u = arcosh_exp_half(q);
    const double v = norm_cdf((u - theta) / rt) + norm_cdf((u + theta) / rt) - 1.0;
    return std::clamp(v, 0.0, 1.0);
}

double ks_distance(const QEnsemble& ens, const std::function<double(double)>& cdf) {
    ens.validate();
    std::vector<double> sorted = ens.values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

}  // namespace qta
