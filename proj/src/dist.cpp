#include "sovrisk/dist.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <numbers>

namespace sovrisk {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}

double norm_pdf(double z) { return boost::math::pdf(kStdNormal, z); }
double norm_cdf(double z) { return boost::math::cdf(kStdNormal, z); }
double norm_quantile(double p) { return boost::math::quantile(kStdNormal, p); }

double inverse_mills(double z) {
    if (z < -35.0) {
        // lambda(z) = -z / (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - ...)
        double u = 1.0 / (z * z);
        return -z / (1.0 - u + 3.0 * u * u - 15.0 * u * u * u +
                     105.0 * u * u * u * u);
    }
    return norm_pdf(z) / norm_cdf(z);
}

double pvalue_normal(double stat) {
    return 2.0 * norm_cdf(-std::fabs(stat));
}

double pvalue_t(double stat, double df) {
    boost::math::students_t_distribution<double> d(df);
    return 2.0 * boost::math::cdf(d, -std::fabs(stat));
}

double pvalue_chisq(double stat, double df) {
    if (stat <= 0) return 1.0;
    boost::math::chi_squared_distribution<double> d(df);
    return boost::math::cdf(boost::math::complement(d, stat));
}

double std_t_logpdf(double z, double nu) {
    // t_nu scaled to unit variance: z = x / sqrt(nu/(nu-2))
    double c = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
               0.5 * std::log((nu - 2.0) * std::numbers::pi);
    return c - (nu + 1.0) / 2.0 * std::log1p(z * z / (nu - 2.0));
}

double ged_lambda(double shape) {
    return std::sqrt(std::exp2(-2.0 / shape) *
                     std::exp(std::lgamma(1.0 / shape) - std::lgamma(3.0 / shape)));
}

double std_ged_logpdf(double z, double shape) {
    double lam = ged_lambda(shape);
    double az = std::fabs(z / lam);
    return std::log(shape) - std::log(lam) - (1.0 + 1.0 / shape) * std::numbers::ln2 -
           std::lgamma(1.0 / shape) - 0.5 * std::pow(az, shape);
}

const char* stars(double pvalue) {
    if (pvalue < 0.01) return "***";
    if (pvalue < 0.05) return "**";
    if (pvalue < 0.10) return "*";
    return "";
}

} // namespace sovrisk
