#pragma once

#include <cstdint>
#include <string>

#include "apollo/error.hpp"

namespace apollo {

using Int128 = __int128;

namespace checked {

inline Int128 add(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("128-bit overflow in addition");
    return r;
}

inline Int128 sub(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("128-bit overflow in subtraction");
    return r;
}

inline Int128 mul(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("128-bit overflow in multiplication");
    return r;
}

}  // namespace checked

inline Int128 abs128(Int128 v) { return v < 0 ? -v : v; }

std::string to_string(Int128 v);

}  // namespace apollo
