#include "rloc/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace rloc {

namespace {
void trim(std::vector<double>& c) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    if (c.empty()) c.push_back(0.0);
}
int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }
} // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    trim(coeffs_);
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (degree() == 0) return constant(0.0);
    std::vector<double> d(coeffs_.size() - 1);
    for (size_t i = 1; i < coeffs_.size(); ++i)
        d[i - 1] = static_cast<double>(i) * coeffs_[i];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<double> c(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
    for (size_t i = 0; i < o.coeffs_.size(); ++i) c[i] += o.coeffs_[i];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    return *this + o * -1.0;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    std::vector<double> c(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (size_t i = 0; i < coeffs_.size(); ++i)
        for (size_t j = 0; j < o.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * o.coeffs_[j];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(double s) const {
    std::vector<double> c = coeffs_;
    for (double& v : c) v *= s;
    return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> Polynomial::divide(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw NumericalError("polynomial division by zero");
    std::vector<double> rem = coeffs_;
    const auto& dc = divisor.coeffs_;
    const int dd = divisor.degree();
    if (degree() < dd) return {constant(0.0), *this};
    std::vector<double> quot(coeffs_.size() - dc.size() + 1, 0.0);
    for (int k = static_cast<int>(rem.size()) - 1; k >= dd; --k) {
        const double q = rem[static_cast<size_t>(k)] / dc.back();
        quot[static_cast<size_t>(k - dd)] = q;
        for (int j = 0; j <= dd; ++j)
            rem[static_cast<size_t>(k - dd + j)] -= q * dc[static_cast<size_t>(j)];
        rem[static_cast<size_t>(k)] = 0.0;
    }
    trim(rem);
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial Polynomial::pruned(double eps) const {
    double mx = 0.0;
    for (double c : coeffs_) mx = std::max(mx, std::abs(c));
    if (mx == 0.0) return constant(0.0);
    std::vector<double> c = coeffs_;
    for (double& v : c)
        if (std::abs(v) < eps * mx) v = 0.0;
    return Polynomial(std::move(c));
}

SturmSequence::SturmSequence(const Polynomial& p) {
    if (p.is_zero()) throw NumericalError("Sturm chain of the zero polynomial");
    // gcd(p, p') via the Euclidean algorithm, so the chain is built from the
    // square-free part and repeated roots are counted once.
    auto gcd = [](Polynomial a, Polynomial b) {
        while (!b.is_zero() && b.degree() >= 0) {
            Polynomial r = a.divide(b).second.pruned();
            if (r.is_zero()) break;
            a = b;
            b = r;
        }
        return b.is_zero() ? a : b;
    };
    Polynomial p0 = p;
    if (p.degree() >= 1) {
        Polynomial g = gcd(p, p.derivative());
        if (g.degree() >= 1) p0 = p.divide(g).first.pruned();
    }
    chain_.push_back(p0);
    if (p0.degree() >= 1) {
        chain_.push_back(p0.derivative());
        while (chain_.back().degree() >= 1) {
            Polynomial r = chain_[chain_.size() - 2].divide(chain_.back()).second.pruned();
            if (r.is_zero()) break;
            chain_.push_back(r * -1.0);
        }
    }
}

int SturmSequence::variations(double x) const {
    int count = 0, prev = 0;
    for (const auto& q : chain_) {
        const int s = sign_of(q(x));
        if (s != 0) {
            if (prev != 0 && s != prev) ++count;
            prev = s;
        }
    }
    return count;
}

int SturmSequence::variations_at_pos_inf() const {
    int count = 0, prev = 0;
    for (const auto& q : chain_) {
        const int s = sign_of(q.leading());
        if (s != 0) {
            if (prev != 0 && s != prev) ++count;
            prev = s;
        }
    }
    return count;
}

int SturmSequence::variations_at_neg_inf() const {
    int count = 0, prev = 0;
    for (const auto& q : chain_) {
        int s = sign_of(q.leading());
        if (q.degree() % 2 == 1) s = -s;
        if (s != 0) {
            if (prev != 0 && s != prev) ++count;
            prev = s;
        }
    }
    return count;
}

int sturm_count(const Polynomial& p, double lo, double hi) {
    if (!(lo < hi)) throw NumericalError("sturm_count: invalid interval");
    SturmSequence chain(p);
    const int vlo = std::isinf(lo) ? chain.variations_at_neg_inf() : chain.variations(lo);
    const int vhi = std::isinf(hi) ? chain.variations_at_pos_inf() : chain.variations(hi);
    return vlo - vhi;
}

double cauchy_bound(const Polynomial& p) {
    if (p.degree() < 1) throw NumericalError("cauchy_bound: constant polynomial");
    const double lead = std::abs(p.leading());
    double mx = 0.0;
    for (int i = 0; i < p.degree(); ++i)
        mx = std::max(mx, std::abs(p.coeffs()[static_cast<size_t>(i)]));
    return 1.0 + mx / lead;
}

BisectResult bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                         int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0, false};
    if (fhi == 0.0) return {hi, 0.0, 0, false};
    if (flo * fhi > 0.0) throw NumericalError("bisect_root: no sign change over bracket");
    int it = 0;
    double mid = 0.5 * (lo + hi);
    for (; it < max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        if (hi - lo <= tol * (1.0 + std::abs(mid))) break;
        const double fm = f(mid);
        if (fm == 0.0) break;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return {mid, std::abs(f(mid)), it, it >= max_iter};
}

} // namespace rloc
