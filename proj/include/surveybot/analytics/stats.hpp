#pragma once

#include <span>
#include <stdexcept>

namespace surveybot::analytics {

/// Thrown when a group has fewer than two values.
class TooFewError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct GroupStats {
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample SD, n - 1 denominator
};

struct TTestResult {
    double t = 0.0;
    int df = 0;
    double critical = 0.0;  // two-tailed, alpha 0.05
    bool significant_at_05 = false;
};

GroupStats descriptive(std::span<const double> values);

/// Two-tailed 0.05 critical value of Student's t, from the inverse CDF.
double critical_t_two_tailed_05(int df);

/// Pooled-variance Student t for independent groups.
TTestResult student_t_independent(const GroupStats& a, const GroupStats& b);
TTestResult student_t_independent(std::span<const double> a, std::span<const double> b);

}  // namespace surveybot::analytics
