#include "wavespeed/polynomial.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wavespeed {

std::string Monomial::str(const std::vector<std::string>& names) const {
    std::ostringstream os;
    bool any = false;
    for (int i = 0; i < arity(); ++i) {
        if (exps_[i] == 0) continue;
        if (any) os << "*";
        if (i < static_cast<int>(names.size()))
            os << names[i];
        else
            os << "x" << i;
        if (exps_[i] > 1) os << "^" << exps_[i];
        any = true;
    }
    if (!any) os << "1";
    return os.str();
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
    Polynomial p(nvars);
    p.add_term(Monomial::unit(nvars), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int index) {
    Polynomial p(nvars);
    p.add_term(Monomial::var(nvars, index), 1);
    return p;
}

Polynomial Polynomial::monomial(const Monomial& m, const Rational& c) {
    Polynomial p(m.arity());
    p.add_term(m, c);
    return p;
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
}

Rational Polynomial::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (m.arity() != nvars_) throw std::invalid_argument("Polynomial: arity mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("Polynomial add: arity mismatch");
    Polynomial r(*this);
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("Polynomial mul: arity mismatch");
    Polynomial r(nvars_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
    return r;
}

Polynomial Polynomial::operator*(const Rational& s) const {
    Polynomial r(nvars_);
    if (s == 0) return r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
    return r;
}

Polynomial Polynomial::derivative(int var) const {
    if (var < 0 || var >= nvars_) throw std::invalid_argument("derivative: bad variable");
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_) {
        int e = m.exponent(var);
        if (e == 0) continue;
        std::vector<int> exps = m.exponents();
        exps[var] = e - 1;
        r.add_term(Monomial(std::move(exps)), c * e);
    }
    return r;
}

Polynomial Polynomial::antiderivative(int var) const {
    if (var < 0 || var >= nvars_) throw std::invalid_argument("antiderivative: bad variable");
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_) {
        int e = m.exponent(var);
        std::vector<int> exps = m.exponents();
        exps[var] = e + 1;
        r.add_term(Monomial(std::move(exps)), c / (e + 1));
    }
    return r;
}

double Polynomial::evaluate(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("evaluate: point dimension mismatch");
    double total = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = to_double(c);
        for (int i = 0; i < nvars_; ++i) {
            int e = m.exponent(i);
            if (e > 0) t *= std::pow(point[i], e);
        }
        total += t;
    }
    return total;
}

Rational Polynomial::evaluate_exact(std::span<const Rational> point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("evaluate_exact: point dimension mismatch");
    Rational total = 0;
    for (const auto& [m, c] : terms_) {
        Rational t = c;
        for (int i = 0; i < nvars_; ++i)
            for (int k = 0; k < m.exponent(i); ++k) t *= point[i];
        total += t;
    }
    return total;
}

Polynomial Polynomial::substitute(int var, const Rational& value) const {
    if (var < 0 || var >= nvars_) throw std::invalid_argument("substitute: bad variable");
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_) {
        Rational coef = c;
        for (int k = 0; k < m.exponent(var); ++k) coef *= value;
        if (coef == 0) continue;
        std::vector<int> exps = m.exponents();
        exps[var] = 0;
        r.add_term(Monomial(std::move(exps)), coef);
    }
    return r;
}

Polynomial Polynomial::drop_var(int var) const {
    Polynomial r(nvars_ - 1);
    for (const auto& [m, c] : terms_) {
        if (m.exponent(var) != 0)
            throw std::invalid_argument("drop_var: variable still present");
        std::vector<int> exps;
        exps.reserve(nvars_ - 1);
        for (int i = 0; i < nvars_; ++i)
            if (i != var) exps.push_back(m.exponent(i));
        r.add_term(Monomial(std::move(exps)), c);
    }
    return r;
}

Polynomial Polynomial::extend_arity(int extra) const {
    Polynomial r(nvars_ + extra);
    for (const auto& [m, c] : terms_) {
        std::vector<int> exps = m.exponents();
        exps.resize(nvars_ + extra, 0);
        r.add_term(Monomial(std::move(exps)), c);
    }
    return r;
}

std::string Polynomial::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        os << to_string(c);
        if (m.degree() > 0) os << "*" << m.str(names);
        first = false;
    }
    return os.str();
}

}  // namespace wavespeed
