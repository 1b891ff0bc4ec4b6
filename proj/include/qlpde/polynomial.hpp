#pragma once

#include <span>
#include <string>
#include <vector>

namespace qlpde {

struct Monomial {
    double coef = 0.0;
    std::vector<int> pow;
};

/// Sparse multivariate polynomial sum_t coef_t * prod_j v_j^pow_tj.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(int variables, std::vector<Monomial> terms);

    static Polynomial constant(int variables, double c);

    int variables() const { return variables_; }
    const std::vector<Monomial>& terms() const { return terms_; }

    double operator()(std::span<const double> v) const;
    /// Partial derivative with respect to variable j.
    Polynomial derivative(int j) const;

private:
    int variables_ = 0;
    std::vector<Monomial> terms_;
};

}  // namespace qlpde
