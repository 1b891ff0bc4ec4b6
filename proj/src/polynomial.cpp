#include "qlpde/polynomial.hpp"

#include <cmath>

#include "qlpde/types.hpp"

namespace qlpde {

Polynomial::Polynomial(int variables, std::vector<Monomial> terms)
    : variables_(variables), terms_(std::move(terms)) {
    for (auto& t : terms_) {
        if (t.pow.empty()) t.pow.assign(variables_, 0);
        if (static_cast<int>(t.pow.size()) != variables_)
            throw ConfigError("polynomial term has " + std::to_string(t.pow.size()) + " exponents, expected " +
                              std::to_string(variables_));
        for (int p : t.pow)
            if (p < 0) throw ConfigError("polynomial exponents must be nonnegative");
    }
}

Polynomial Polynomial::constant(int variables, double c) {
    return Polynomial(variables, {Monomial{c, std::vector<int>(variables, 0)}});
}

double Polynomial::operator()(std::span<const double> v) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        double term = t.coef;
        for (int j = 0; j < variables_; ++j) {
            const int p = t.pow[j];
            if (p == 0) continue;
            term *= p == 1 ? v[j] : std::pow(v[j], p);
        }
        sum += term;
    }
    return sum;
}

Polynomial Polynomial::derivative(int j) const {
    std::vector<Monomial> out;
    for (const auto& t : terms_) {
        if (t.pow[j] == 0) continue;
        Monomial d = t;
        d.coef *= t.pow[j];
        d.pow[j] -= 1;
        out.push_back(std::move(d));
    }
    return Polynomial(variables_, std::move(out));
}

}  // namespace qlpde
