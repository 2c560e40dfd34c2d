#pragma once

#include <span>

#include "opchain/driving.hpp"
#include "opchain/ncpart.hpp"

namespace opchain {

inline constexpr int kMaxMuOrder = 8;
inline constexpr int kMaxSigmaOrder = 10;

// s -> Q_{pi; s, t}(a_1..a_{k-1}) for a fixed upper time t, exact as a piecewise polynomial in s.
struct QValue {
    Partition pi;
    double t = 0.0;
    PiecewisePoly q;
    Mat at(double s) const { return q.eval(s); }
};

QValue q_eval(const StepDriving& dr, const Partition& p, double t, std::span<const Mat> coeffs);

// mu_{s,t}(a0 X a1 ... X ak) and sigma_{s,t}(a0 X a1 ... X ak).
Mat mu_moment(const StepDriving& dr, double s, double t, std::span<const Mat> coeffs);
Mat sigma_moment(const StepDriving& dr, double s, double t, std::span<const Mat> coeffs);

// The same recursion with the plain law in place of the time integral.
Mat lambda_pi(const GeneralizedLaw& sigma, const Partition& p, std::span<const Mat> coeffs);

struct QGuard {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

// ||Q_{pi;s,t}|| <= alpha_pi (C(t-s))^{|pi|} M^{k-2|pi|} prod ||a_i||, with slack 1 + 1e-9.
QGuard q_estimate_guard(const StepDriving& dr, const Partition& p, double t, double s, std::span<const Mat> coeffs);

}  // namespace opchain
