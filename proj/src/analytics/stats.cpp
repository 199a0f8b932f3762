#include "surveybot/analytics/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <string>

namespace surveybot::analytics {

GroupStats descriptive(std::span<const double> values) {
    if (values.size() < 2) throw TooFewError("need at least 2 values, got " + std::to_string(values.size()));
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {static_cast<int>(values.size()), mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

double critical_t_two_tailed_05(int df) {
    if (df < 1) throw std::invalid_argument("df must be positive");
    return boost::math::quantile(boost::math::students_t(df), 0.975);
}

TTestResult student_t_independent(const GroupStats& a, const GroupStats& b) {
    if (a.n < 2 || b.n < 2) throw TooFewError("both groups need n >= 2");
    const int df = a.n + b.n - 2;
    const double pooled = ((a.n - 1) * a.sd * a.sd + (b.n - 1) * b.sd * b.sd) / df;
    const double se = std::sqrt(pooled * (1.0 / a.n + 1.0 / b.n));
    const double diff = a.mean - b.mean;
    double t = 0.0;
    if (se > 0.0) t = diff / se;
    else if (diff != 0.0) t = std::copysign(HUGE_VAL, diff);
    TTestResult r;
    r.t = t;
    r.df = df;
    r.critical = critical_t_two_tailed_05(df);
    r.significant_at_05 = std::fabs(t) > r.critical;
    return r;
}

TTestResult student_t_independent(std::span<const double> a, std::span<const double> b) {
    return student_t_independent(descriptive(a), descriptive(b));
}

}  // namespace surveybot::analytics
