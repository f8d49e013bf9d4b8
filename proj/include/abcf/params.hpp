#pragma once

#include "abcf/arith.hpp"

#include <string>

namespace abcf {

struct invalid_params : error {
    using error::error;
};

// (a, b) with a <= 0 <= b, b - a >= 1, -ab <= 1.
template <Scalar S>
struct Params {
    S a;
    S b;

    Params(S a_, S b_) : a(std::move(a_)), b(std::move(b_))
    {
        S zero = from_int<S>(0L, a);
        S one = from_int<S>(1L, a);
        if (zero < a)
            throw invalid_params("parameter violates a <= 0 (a = " + to_string(a) + ")");
        if (b < zero)
            throw invalid_params("parameter violates b >= 0 (b = " + to_string(b) + ")");
        if (b - a < one)
            throw invalid_params("parameters violate b - a >= 1 (a = " + to_string(a) + ", b = " + to_string(b) + ")");
        if (one < -(a * b))
            throw invalid_params("parameters violate -ab <= 1 (a = " + to_string(a) + ", b = " + to_string(b) + ")");
    }

    S zero() const { return from_int<S>(0L, a); }
    S one() const { return from_int<S>(1L, a); }

    bool a_zero() const { return sign_of(a) == 0; }
    bool b_zero() const { return sign_of(b) == 0; }
    bool is_minus_one_one() const { return a == -one() && b == one(); }
    // a = 0, b = 0 and (-1, 1): the attractor is the trapping region itself.
    bool degenerate() const { return a_zero() || b_zero() || is_minus_one_one(); }

    std::string str() const { return "(" + to_string(a) + ", " + to_string(b) + ")"; }
};

}  // namespace abcf
