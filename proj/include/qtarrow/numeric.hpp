#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qta {

// log(e^a + e^b) without overflow; tolerates -inf arguments.
double log_sum_exp(double a, double b);

// standard normal CDF
double norm_cdf(double x);

// Neumaier-compensated accumulator; summation error independent of order
// to well below 1e-12 relative, which the concurrency contract relies on.
struct kahan_sum {
    double s = 0.0;
    double c = 0.0;
    void add(double v);
    double value() const { return s + c; }
};

double kahan_total(const std::vector<double>& v);

// adaptive Simpson on [a,b]; tol is absolute on the integral
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth = 40);

// FNV-1a 64-bit, hex string; used for manifest checksums and config fingerprints
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string fnv1a64_hex(const std::string& bytes);

// %.17g rendering, enough digits for exact double round-trip
std::string format_double(double v);

}  // namespace qta
