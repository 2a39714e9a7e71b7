#pragma once

namespace labbook::analysis {

// Regularized incomplete beta I_x(a, b) for a, b > 0 and 0 <= x <= 1.
double incomplete_beta(double x, double a, double b);

// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

// Two-sided tail probability of the standard normal.
double normal_two_sided(double z);

} // namespace labbook::analysis
