#pragma once

#include "invert.hpp"

namespace lnsum {

// Split [0, omega_m] (omega_m: where exp(X1) first drops below 1e-4) into
// n_segments of approximately equal cumulative activity, with per-segment
// secant slopes and sine-series residual coefficients.
SegmentPlan build_segment_plan(const CumulantCurve& curve, int n_segments,
                               int n_corrections = 8);

// Frequency nodes with local spacing proportional to 1/sqrt(a1^2 + b1^2).
std::vector<double> node_intervals(const CumulantCurve& curve, int target_count);

// Nonlinear least squares fit of phi(j omega) as sum_k A_k e^{(-a_k + j b_k) w}
// with A_k >= 0, sum A_k = 1 (renormalized), a_k > 0 by construction.
ArctanMixture fit_exponential_sum(const TransformTable& samples,
                                  const std::vector<double>& nodes, int K,
                                  double* final_residual = nullptr);

struct QuantileBracket {
    double x10 = 0.0, x50 = 0.0, x90 = 0.0;
};
QuantileBracket quantile_bracket(double a, double b);

}  // namespace lnsum
