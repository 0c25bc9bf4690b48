#pragma once

// Regularized incomplete beta and the t / F tail probabilities built on it.

namespace pcd {

/// I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// P(|T| > |t|) for Student's t with nu degrees of freedom.
double t_two_sided_p(double t, double nu);

/// P(F > f) for the F distribution with (d1, d2) degrees of freedom.
double f_upper_p(double f, double d1, double d2);

}  // namespace pcd
