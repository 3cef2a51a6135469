#pragma once

#include <functional>
#include <vector>

#include "rloc/scenario.hpp"

namespace rloc {

// Dense univariate polynomial, coefficients in ascending degree.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs);

    static Polynomial constant(double c) { return Polynomial({c}); }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double leading() const { return coeffs_.back(); }

    double operator()(double x) const; // Horner
    Polynomial derivative() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;

    // Euclidean division; returns {quotient, remainder}.
    std::pair<Polynomial, Polynomial> divide(const Polynomial& divisor) const;

    // Drops coefficients below eps * max |coeff|. Used to stop floating-point
    // remainder noise from producing spurious Sturm chain elements.
    Polynomial pruned(double eps = 1e-13) const;

private:
    std::vector<double> coeffs_;
};

// Sturm chain of the square-free part of p. Sign variation differences count
// distinct real roots; repeated roots count once.
class SturmSequence {
public:
    explicit SturmSequence(const Polynomial& p);

    const std::vector<Polynomial>& chain() const { return chain_; }

    // Sign variations at x; x = +/-inf handled via leading coefficients.
    int variations(double x) const;
    int variations_at_pos_inf() const;
    int variations_at_neg_inf() const;

private:
    std::vector<Polynomial> chain_;
};

// Distinct real roots of p in the half-open interval (lo, hi].
// hi may be +inf and lo may be -inf.
int sturm_count(const Polynomial& p, double lo, double hi);

// 1 + max_{i<deg} |c_i| / |c_deg|; bounds the magnitude of every root.
double cauchy_bound(const Polynomial& p);

struct BisectResult {
    double root;
    double residual; // |f(root)|
    int iterations;
    bool hit_iteration_cap;
};

// Bisection on a sign change of f over (lo, hi). Relative-width tolerance;
// capped at max_iter, returning the midpoint with hit_iteration_cap set.
BisectResult bisect_root(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-12, int max_iter = 200);

} // namespace rloc
