#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace predmdp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IntVec = Eigen::VectorXi;
using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Tolerance used everywhere a probability row must sum to one.
inline constexpr double kRowSumTol = 1e-9;

/// True if v is entrywise non-negative and sums to 1 within kRowSumTol.
template <typename Derived>
bool is_probability_row(const Eigen::MatrixBase<Derived>& v, double tol = kRowSumTol) {
    if ((v.array() < 0.0).any()) return false;
    return std::abs(v.sum() - 1.0) <= tol;
}

}  // namespace predmdp
