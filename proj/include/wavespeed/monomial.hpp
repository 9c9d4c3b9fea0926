#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavespeed {

// Power product of a fixed set of variables. Ordering is graded
// lexicographic (total degree first, then leading variables dominate) and is
// fixed globally so monomial bases and Gram indices are reproducible.
class Monomial {
  public:
    explicit Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
        for (int e : exps_)
            if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
    }

    static Monomial unit(int arity) { return Monomial(std::vector<int>(arity, 0)); }

    static Monomial var(int arity, int index, int power = 1) {
        std::vector<int> e(arity, 0);
        e.at(index) = power;
        return Monomial(std::move(e));
    }

    int arity() const { return static_cast<int>(exps_.size()); }

    int degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

    int exponent(int i) const { return exps_.at(i); }

    const std::vector<int>& exponents() const { return exps_; }

    Monomial operator*(const Monomial& o) const {
        if (o.arity() != arity()) throw std::invalid_argument("Monomial: arity mismatch");
        std::vector<int> e(exps_);
        for (int i = 0; i < arity(); ++i) e[i] += o.exps_[i];
        return Monomial(std::move(e));
    }

    bool operator==(const Monomial& o) const { return exps_ == o.exps_; }

    // Graded lex: lower total degree first; within a degree, larger exponent
    // on an earlier variable sorts first (so [1, u, v, u^2, uv, v^2]).
    bool operator<(const Monomial& o) const {
        int da = degree(), db = o.degree();
        if (da != db) return da < db;
        return exps_ > o.exps_;
    }

    std::string str(const std::vector<std::string>& names) const;

  private:
    std::vector<int> exps_;
};

}  // namespace wavespeed
