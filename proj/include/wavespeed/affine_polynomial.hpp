#pragma once

#include <map>
#include <span>
#include <vector>

#include "wavespeed/polynomial.hpp"

namespace wavespeed {

// A linear expression c0 + sum_i coeffs[i]*x_i over scalar decision
// variables, used for pointwise constraints like V(0,0) = 0.
struct AffineScalar {
    std::map<int, Rational> coeffs;
    Rational constant = 0;

    AffineScalar& operator+=(const AffineScalar& o);
    AffineScalar operator*(const Rational& s) const;
};

// One coefficient-matching equation: sum_i coeffs[i]*x_i = rhs.
struct LinearEquation {
    std::map<int, Rational> coeffs;
    Rational rhs = 0;
};

// Polynomial whose coefficients are affine in scalar decision variables:
//   p(u; x) = base(u) + sum_d var_terms[d](u) * x_d.
// This is the template form of the auxiliary functions and multipliers; the
// whole pipeline depends on decision variables entering only linearly.
class AffinePolynomial {
  public:
    explicit AffinePolynomial(Polynomial base) : base_(std::move(base)) {}
    explicit AffinePolynomial(int nvars) : base_(nvars) {}

    // The template term poly * x_var.
    static AffinePolynomial decision(Polynomial poly, int var);

    int arity() const { return base_.arity(); }
    bool has_decision_vars() const { return !var_terms_.empty(); }
    const Polynomial& base() const { return base_; }
    const std::map<int, Polynomial>& var_terms() const { return var_terms_; }
    int degree() const;

    AffinePolynomial operator+(const AffinePolynomial& o) const;
    AffinePolynomial operator-(const AffinePolynomial& o) const;
    AffinePolynomial operator-() const;
    AffinePolynomial operator*(const Polynomial& p) const;
    AffinePolynomial operator*(const Rational& s) const;

    AffinePolynomial derivative(int var) const;
    AffinePolynomial antiderivative(int var) const;

    AffinePolynomial substitute(int var, const Rational& value) const;
    AffinePolynomial drop_var(int var) const;
    AffinePolynomial extend_arity(int extra) const;

    // Substitute numeric values for the decision variables.
    Polynomial evaluate_assignment(const std::map<int, Rational>& assignment) const;

    // Evaluate at a phase-space point, leaving decision variables symbolic.
    AffineScalar evaluate_point(std::span<const Rational> point) const;

    void add_var_term(int var, const Polynomial& p);

  private:
    Polynomial base_;
    std::map<int, Polynomial> var_terms_;
};

// Product with a bare polynomial from the left.
inline AffinePolynomial operator*(const Polynomial& p, const AffinePolynomial& a) {
    return a * p;
}

// Equality of two affine polynomial templates, monomial by monomial: the
// returned equations hold for an assignment iff lhs == rhs as polynomials.
std::vector<LinearEquation> match_coefficients(const AffinePolynomial& lhs,
                                               const AffinePolynomial& rhs);

}  // namespace wavespeed
