#pragma once

#include <functional>
#include <span>
#include <vector>

#include "opchain/matalg.hpp"

namespace opchain {

// sigma(p) = W* pi(p) W with pi(a0 X a1 ... X am) = rho(a0) X rho(a1) ... X rho(am), rho(a) = I_k (x) a.
struct GeneralizedLaw {
    int d = 1;
    int k = 1;
    Mat X;  // (k*d) x (k*d), hermitian
    Mat W;  // (k*d) x d

    GeneralizedLaw() = default;
    GeneralizedLaw(int d, int k, Mat X, Mat W);

    Mat sigma_one() const { return W.adjoint() * W; }
    double rad_bound() const { return op_norm(X); }
};

// A law: W is the first block column e_1 (x) I_d, so sigma(1) = I_d.
struct Law {
    GeneralizedLaw g;

    Law() = default;
    Law(int d, int k, Mat X);

    int d() const { return g.d; }
    int k() const { return g.k; }
    const Mat& X() const { return g.X; }
    Mat mean() const { return g.X.topLeftCorner(g.d, g.d); }
};

Mat first_block_column(int d, int k);

// rho(a) applied to a (k*d) x c block column: each d-row block is left-multiplied by a.
Mat rho_apply(const Mat& a, const Mat& v, int k);

Mat moment(const GeneralizedLaw& law, std::span<const Mat> coeffs);
inline Mat moment(const Law& law, std::span<const Mat> coeffs) { return moment(law.g, coeffs); }

BlockMatrix cauchy_transform(const GeneralizedLaw& law, const BlockMatrix& z);
inline BlockMatrix cauchy_transform(const Law& law, const BlockMatrix& z) { return cauchy_transform(law.g, z); }

// G~(z) = G(z^{-1}) = (I (x) W)* Z (I - X^(n) Z)^{-1} (I (x) W). Admissible when ||z|| rad_bound < 1
// or when z is strictly block upper triangular (the series then terminates).
BlockMatrix g_tilde(const GeneralizedLaw& law, const BlockMatrix& z);
inline BlockMatrix g_tilde(const Law& law, const BlockMatrix& z) { return g_tilde(law.g, z); }

BlockMatrix f_transform(const Law& law, const BlockMatrix& z);

struct SchurParts {
    Mat a0;
    GeneralizedLaw sigma;
};

SchurParts schur_decompose(const Law& law);

// Any source of A-valued moments: coeffs [a0..am] -> mu(a0 X a1 ... X am).
using MomentOracle = std::function<Mat(std::span<const Mat>)>;

MomentOracle moment_oracle(const Law& law);

// G~ at a strictly block upper triangular z, from moments only. The result is again strictly upper.
BlockMatrix g_tilde_nilpotent(const MomentOracle& mu, const BlockMatrix& z);

// The strictly upper triangular level-(m+2) point carrying a0..am on its superdiagonal.
BlockMatrix moment_extraction_point(std::span<const Mat> coeffs);

Mat monotone_convolve_moment(const Law& mu1, const Law& mu2, std::span<const Mat> coeffs);
Mat monotone_convolve_moment(const MomentOracle& mu1, const MomentOracle& mu2, std::span<const Mat> coeffs);

struct InverseResult {
    BlockMatrix z;
    int iterations = 0;
    double residual = 0.0;
};

// Solves G~(z) = w by z <- w - (G~(z) - z) from z = w.
InverseResult invert_g_tilde(const Law& law, const BlockMatrix& w, double target = 1e-12, int max_iter = 10000);

// Direct sum realization of sigma1 + sigma2: X1 (+) X2, W stacked.
GeneralizedLaw direct_sum(const GeneralizedLaw& a, const GeneralizedLaw& b);

}  // namespace opchain
