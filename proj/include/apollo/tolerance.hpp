#pragma once

namespace apollo {

// Numerical tolerances shared by every module.
struct Tolerances {
    double normalization = 1e-12;  // |Q - 1| at construction
    double chain = 1e-10;          // after chains of operations
    double dedup_grid = 1e-9;      // float-mode canonical key quantum
    double quadrature = 1e-9;      // relative target for adaptive quadrature
};

inline constexpr Tolerances kTol{};

}  // namespace apollo
