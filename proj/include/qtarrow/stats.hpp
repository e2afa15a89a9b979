#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace qta {

struct QEnsemble {
    std::vector<double> values;
    double duration = 0.0;            // n_steps * dt of the generating run
    std::string params_fingerprint;

    void validate() const;            // nonempty, all finite
};

// Uniform bins symmetric about 0 covering [-half_bins*w, +half_bins*w];
// out-of-range samples land in the overflow tallies.
struct Histogram {
    double bin_width = 0.0;
    long half_bins = 0;               // bins per side; total bins = 2*half_bins
    std::vector<long> counts;
    long total = 0;
    long overflow_low = 0;
    long overflow_high = 0;

    double center(std::size_t i) const;
    std::size_t mirror(std::size_t i) const;  // index of the sign-reflected bin
};

Histogram build_histogram(const QEnsemble& ens, double bin_width, double q_max);

struct FtPoint {
    double q = 0.0;         // positive bin center
    double ln_ratio = 0.0;  // ln(count(+q)/count(-q))
    double stderr_ = 0.0;   // Poisson: sqrt(1/n+ + 1/n-)
};

struct FtCurve {
    std::vector<FtPoint> points;
    double slope = 0.0;      // weighted least squares through the origin over |q| <= window
    double slope_err = 0.0;
    double window = 3.0;
    int min_count = 10;
};

// Points exist only where both mirrored bins have >= min_count samples; throws
// std::runtime_error naming the threshold when nothing qualifies.
FtCurve detailed_ft_curve(const Histogram& h, double window = 3.0, int min_count = 10);

struct IntegralFt {
    double mean = 0.0;     // sample mean of exp(-Q), compensated summation
    double stderr_ = 0.0;  // jackknife standard error of the mean
    double median = 0.0;   // median of exp(-Q), heavy-tail diagnostic
    std::size_t n = 0;
};

IntegralFt integral_ft(const QEnsemble& ens);

// Probability density of the total arrow statistic for an undriven run of
// duration T from an equatorial (z = 0) pure state. The aggregated readout sum
// S = (dt/tau)*sum r_k is an equal mixture of N(+T/tau, T/tau) and
// N(-T/tau, T/tau) at any step size, and Q = 2 ln cosh S, so with
// theta = T/tau and u = arcosh(e^{q/2}):
//   P(q) = (2 pi theta)^{-1/2} e^{-theta/2} e^{q} (e^q - 1)^{-1/2} e^{-u^2/(2 theta)}
// for q > 0 and 0 otherwise. Integrates to 1.
double analytic_qnd_density(double q, double T, double tau);

// closed-form CDF of the same law: Phi((u-theta)/sqrt(theta)) + Phi((u+theta)/sqrt(theta)) - 1
double analytic_qnd_cdf(double q, double T, double tau);

// sup distance between the empirical CDF of the ensemble and an analytic CDF
double ks_distance(const QEnsemble& ens, const std::function<double(double)>& cdf);

}  // namespace qta
