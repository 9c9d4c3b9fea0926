#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "wavespeed/monomial.hpp"
#include "wavespeed/rational.hpp"

namespace wavespeed {

// Sparse multivariate polynomial with exact rational coefficients.
// Canonical form: no zero coefficients are ever stored, and all monomials
// share the polynomial's arity. Immutable in spirit: operations return new
// values, so instances are safe to share across threads.
class Polynomial {
  public:
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const Rational& c);
    static Polynomial variable(int nvars, int index);
    static Polynomial monomial(const Monomial& m, const Rational& c);

    int arity() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;  // -1 for the zero polynomial
    const std::map<Monomial, Rational>& terms() const { return terms_; }
    Rational coefficient(const Monomial& m) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const Rational& s) const;

    Polynomial derivative(int var) const;
    // Term-by-term antiderivative in `var` with zero constant of integration,
    // i.e. the definite integral from 0 in that variable.
    Polynomial antiderivative(int var) const;

    double evaluate(std::span<const double> point) const;
    Rational evaluate_exact(std::span<const Rational> point) const;

    // Replace variable `var` by an exact constant; arity is unchanged.
    Polynomial substitute(int var, const Rational& value) const;
    // Remove a variable that no longer appears (exponent 0 everywhere).
    Polynomial drop_var(int var) const;
    // Append `extra` fresh trailing variables.
    Polynomial extend_arity(int extra) const;

    bool operator==(const Polynomial& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }

    std::string str(const std::vector<std::string>& names = {}) const;

    // Internal: insert c*m, dropping the term if the sum cancels.
    void add_term(const Monomial& m, const Rational& c);

  private:
    int nvars_;
    std::map<Monomial, Rational> terms_;
};

inline Polynomial operator*(const Rational& s, const Polynomial& p) { return p * s; }

}  // namespace wavespeed
