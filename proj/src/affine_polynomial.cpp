#include "wavespeed/affine_polynomial.hpp"

#include <set>
#include <stdexcept>

namespace wavespeed {

AffineScalar& AffineScalar::operator+=(const AffineScalar& o) {
    constant += o.constant;
    for (const auto& [v, c] : o.coeffs) {
        auto [it, inserted] = coeffs.emplace(v, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) coeffs.erase(it);
        }
    }
    return *this;
}

AffineScalar AffineScalar::operator*(const Rational& s) const {
    AffineScalar r;
    if (s == 0) return r;
    r.constant = constant * s;
    for (const auto& [v, c] : coeffs) r.coeffs.emplace(v, c * s);
    return r;
}

AffinePolynomial AffinePolynomial::decision(Polynomial poly, int var) {
    AffinePolynomial a(poly.arity());
    a.add_var_term(var, poly);
    return a;
}

void AffinePolynomial::add_var_term(int var, const Polynomial& p) {
    if (p.arity() != arity())
        throw std::invalid_argument("AffinePolynomial: arity mismatch");
    if (p.is_zero()) return;
    auto [it, inserted] = var_terms_.emplace(var, p);
    if (!inserted) {
        it->second = it->second + p;
        if (it->second.is_zero()) var_terms_.erase(it);
    }
}

int AffinePolynomial::degree() const {
    int d = base_.degree();
    for (const auto& [v, p] : var_terms_) d = std::max(d, p.degree());
    return d;
}

AffinePolynomial AffinePolynomial::operator+(const AffinePolynomial& o) const {
    if (o.arity() != arity())
        throw std::invalid_argument("AffinePolynomial add: arity mismatch");
    AffinePolynomial r(base_ + o.base_);
    r.var_terms_ = var_terms_;
    for (const auto& [v, p] : o.var_terms_) r.add_var_term(v, p);
    return r;
}

AffinePolynomial AffinePolynomial::operator-() const { return *this * Rational(-1); }

AffinePolynomial AffinePolynomial::operator-(const AffinePolynomial& o) const {
    return *this + (-o);
}

AffinePolynomial AffinePolynomial::operator*(const Polynomial& p) const {
    AffinePolynomial r(base_ * p);
    for (const auto& [v, q] : var_terms_) r.add_var_term(v, q * p);
    return r;
}

AffinePolynomial AffinePolynomial::operator*(const Rational& s) const {
    AffinePolynomial r(base_ * s);
    for (const auto& [v, q] : var_terms_) r.add_var_term(v, q * s);
    return r;
}

AffinePolynomial AffinePolynomial::derivative(int var) const {
    AffinePolynomial r(base_.derivative(var));
    for (const auto& [v, q] : var_terms_) r.add_var_term(v, q.derivative(var));
    return r;
}

AffinePolynomial AffinePolynomial::antiderivative(int var) const {
    AffinePolynomial r(base_.antiderivative(var));
    for (const auto& [v, q] : var_terms_) r.add_var_term(v, q.antiderivative(var));
    return r;
}

AffinePolynomial AffinePolynomial::substitute(int var, const Rational& value) const {
    AffinePolynomial r(base_.substitute(var, value));
    for (const auto& [v, q] : var_terms_) r.add_var_term(v, q.substitute(var, value));
    return r;
}

AffinePolynomial AffinePolynomial::drop_var(int var) const {
    AffinePolynomial r(base_.drop_var(var));
    for (const auto& [v, q] : var_terms_) r.add_var_term(v, q.drop_var(var));
    return r;
}

AffinePolynomial AffinePolynomial::extend_arity(int extra) const {
    AffinePolynomial r(base_.extend_arity(extra));
    for (const auto& [v, q] : var_terms_) r.add_var_term(v, q.extend_arity(extra));
    return r;
}

Polynomial AffinePolynomial::evaluate_assignment(
    const std::map<int, Rational>& assignment) const {
    Polynomial p = base_;
    for (const auto& [v, q] : var_terms_) {
        auto it = assignment.find(v);
        if (it == assignment.end())
            throw std::invalid_argument("evaluate_assignment: missing decision variable");
        p = p + q * it->second;
    }
    return p;
}

AffineScalar AffinePolynomial::evaluate_point(std::span<const Rational> point) const {
    AffineScalar s;
    s.constant = base_.evaluate_exact(point);
    for (const auto& [v, q] : var_terms_) {
        Rational c = q.evaluate_exact(point);
        if (c != 0) s.coeffs.emplace(v, c);
    }
    return s;
}

std::vector<LinearEquation> match_coefficients(const AffinePolynomial& lhs,
                                               const AffinePolynomial& rhs) {
    if (lhs.arity() != rhs.arity())
        throw std::invalid_argument("match_coefficients: arity mismatch");
    AffinePolynomial diff = lhs - rhs;

    std::set<Monomial> support;
    for (const auto& [m, c] : diff.base().terms()) support.insert(m);
    for (const auto& [v, p] : diff.var_terms())
        for (const auto& [m, c] : p.terms()) support.insert(m);

    std::vector<LinearEquation> eqs;
    eqs.reserve(support.size());
    for (const Monomial& m : support) {
        LinearEquation eq;
        eq.rhs = -diff.base().coefficient(m);
        for (const auto& [v, p] : diff.var_terms()) {
            Rational c = p.coefficient(m);
            if (c != 0) eq.coeffs.emplace(v, c);
        }
        eqs.push_back(std::move(eq));
    }
    return eqs;
}

}  // namespace wavespeed
