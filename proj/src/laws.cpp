#include "opchain/laws.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace opchain {

namespace {

Mat block_diag_repeat(const Mat& w, int n) {
    Mat out = Mat::Zero(n * w.rows(), n * w.cols());
    for (int i = 0; i < n; ++i) out.block(i * w.rows(), i * w.cols(), w.rows(), w.cols()) = w;
    return out;
}

Mat solve_checked(const Mat& a, const Mat& b, const char* where) {
    Eigen::PartialPivLU<Mat> lu(a);
    double rc = lu.rcond();
    if (std::isnan(rc)) rc = 0.0;
    if (!(rc > kMinRcond)) {
        std::ostringstream os;
        os << where << ": resolvent is singular (rcond estimate " << rc << ")";
        throw SingularityError(os.str(), rc);
    }
    return lu.solve(b);
}

void require_point(const BlockMatrix& z, int d, const char* where) {
    if (z.dims().k != 1 || z.dims().d != d) {
        std::ostringstream os;
        os << where << ": point must have dims (n,1," << d << "), got (" << z.dims().n << "," << z.dims().k
           << "," << z.dims().d << ")";
        throw DimensionError(os.str());
    }
}

bool strictly_block_upper(const BlockMatrix& z) {
    const int n = z.dims().n;
    const int b = z.dims().k * z.dims().d;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            if (!z.data().block(i * b, j * b, b, b).isZero(0.0)) return false;
    return true;
}

}  // namespace

GeneralizedLaw::GeneralizedLaw(int d_, int k_, Mat X_, Mat W_) : d(d_), k(k_), X(std::move(X_)), W(std::move(W_)) {
    if (d < 1 || k < 1) throw DimensionError("GeneralizedLaw: d and k must be positive");
    if (X.rows() != k * d || X.cols() != k * d) throw DimensionError("GeneralizedLaw: X must be (k*d)x(k*d)");
    if (W.rows() != k * d || W.cols() != d) throw DimensionError("GeneralizedLaw: W must be (k*d)xd");
    if (!is_hermitian(X)) throw DimensionError("GeneralizedLaw: X is not hermitian");
}

Mat first_block_column(int d, int k) {
    Mat w = Mat::Zero(k * d, d);
    w.topRows(d).setIdentity();
    return w;
}

Law::Law(int d, int k, Mat X) : g(d, k, std::move(X), first_block_column(d, k)) {}

Mat rho_apply(const Mat& a, const Mat& v, int k) {
    const Eigen::Index d = a.rows();
    if (a.cols() != d || v.rows() != k * d) throw DimensionError("rho_apply: shape mismatch");
    Mat out(v.rows(), v.cols());
    for (int i = 0; i < k; ++i) out.middleRows(i * d, d).noalias() = a * v.middleRows(i * d, d);
    return out;
}

Mat moment(const GeneralizedLaw& law, std::span<const Mat> coeffs) {
    if (coeffs.empty()) throw DimensionError("moment: need at least a0");
    for (const Mat& a : coeffs)
        if (a.rows() != law.d || a.cols() != law.d) throw DimensionError("moment: coefficient is not d x d");
    Mat v = rho_apply(coeffs.back(), law.W, law.k);
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
        Mat xv = law.X * v;
        v = rho_apply(coeffs[i], xv, law.k);
    }
    return law.W.adjoint() * v;
}

BlockMatrix cauchy_transform(const GeneralizedLaw& law, const BlockMatrix& z) {
    require_point(z, law.d, "cauchy_transform");
    const int n = z.dims().n;
    const double eps = min_eig_herm(imag_part(z.data()));
    if (!(eps > kTolEig)) {
        // outside the half-plane we still accept a neighbourhood of infinity
        const double m = law.rad_bound();
        double inv_norm = std::numeric_limits<double>::infinity();
        try {
            inv_norm = op_norm(inverse(z.data()));
        } catch (const SingularityError&) {
        }
        if (!(inv_norm * m < 1.0))
            throw DomainError("cauchy_transform: point is neither in the upper half-plane nor near infinity");
    }
    Mat resolvent_arg = embed_mat(z.data(), n, law.k, law.d) - amplify_mat(law.X, n);
    Mat iw = block_diag_repeat(law.W, n);
    Mat y = solve_checked(resolvent_arg, iw, "cauchy_transform");
    return BlockMatrix(iw.adjoint() * y, z.dims());
}

BlockMatrix g_tilde(const GeneralizedLaw& law, const BlockMatrix& z) {
    require_point(z, law.d, "g_tilde");
    const int n = z.dims().n;
    Mat big_z = embed_mat(z.data(), n, law.k, law.d);
    Mat xn = amplify_mat(law.X, n);
    Mat iw = block_diag_repeat(law.W, n);
    if (strictly_block_upper(z)) {
        // X^(n) Z is nilpotent of order n: the geometric series stops by itself
        Mat xz = xn * big_z;
        Mat acc = iw;
        Mat term = iw;
        for (int j = 1; j < n; ++j) {
            term = xz * term;
            acc += term;
        }
        return BlockMatrix(iw.adjoint() * (big_z * acc), z.dims());
    }
    if (!(op_norm(z.data()) * law.rad_bound() < 1.0))
        throw DomainError("g_tilde: ||z|| * rad_bound must be < 1");
    Mat lhs = Mat::Identity(xn.rows(), xn.cols()) - xn * big_z;
    Mat y = solve_checked(lhs, iw, "g_tilde");
    return BlockMatrix(iw.adjoint() * (big_z * y), z.dims());
}

BlockMatrix f_transform(const Law& law, const BlockMatrix& z) {
    BlockMatrix g = cauchy_transform(law, z);
    return inverse(g);
}

SchurParts schur_decompose(const Law& law) {
    const int d = law.d(), k = law.k();
    SchurParts out;
    out.a0 = law.mean();
    if (k == 1) {
        out.sigma = GeneralizedLaw(d, 1, Mat::Zero(d, d), Mat::Zero(d, d));
        return out;
    }
    const int r = (k - 1) * d;
    Mat xhat = law.X().bottomRightCorner(r, r);
    Mat b = law.X().bottomLeftCorner(r, d);
    out.sigma = GeneralizedLaw(d, k - 1, std::move(xhat), std::move(b));
    return out;
}

MomentOracle moment_oracle(const Law& law) {
    return [law](std::span<const Mat> c) { return moment(law, c); };
}

namespace {

// Sums mu(z_{c0 c1} X z_{c1 c2} ... ) over all increasing chains from `from` to `to`.
void chain_sum(const MomentOracle& mu, const BlockMatrix& z, int from, int to, std::vector<Mat>& path, Mat& acc) {
    const int d = z.dims().d;
    for (int next = from + 1; next <= to; ++next) {
        Mat blk = z.data().block(from * d, next * d, d, d);
        if (blk.isZero(0.0)) continue;
        path.push_back(std::move(blk));
        if (next == to)
            acc += mu(std::span<const Mat>(path.data(), path.size()));
        else
            chain_sum(mu, z, next, to, path, acc);
        path.pop_back();
    }
}

}  // namespace

BlockMatrix g_tilde_nilpotent(const MomentOracle& mu, const BlockMatrix& z) {
    if (z.dims().k != 1) throw DimensionError("g_tilde_nilpotent: point must have middle size 1");
    if (!strictly_block_upper(z)) throw DomainError("g_tilde_nilpotent: point is not strictly upper triangular");
    const int n = z.dims().n, d = z.dims().d;
    Mat out = Mat::Zero(n * d, n * d);
    std::vector<Mat> path;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Mat acc = Mat::Zero(d, d);
            chain_sum(mu, z, i, j, path, acc);
            out.block(i * d, j * d, d, d) = acc;
        }
    return BlockMatrix(std::move(out), z.dims());
}

BlockMatrix moment_extraction_point(std::span<const Mat> coeffs) {
    if (coeffs.empty()) throw DimensionError("moment_extraction_point: need at least a0");
    const int d = static_cast<int>(coeffs[0].rows());
    const int n = static_cast<int>(coeffs.size()) + 1;
    Mat z = Mat::Zero(n * d, n * d);
    for (int i = 0; i + 1 < n; ++i) {
        if (coeffs[i].rows() != d || coeffs[i].cols() != d)
            throw DimensionError("moment_extraction_point: coefficients must share d");
        z.block(i * d, (i + 1) * d, d, d) = coeffs[i];
    }
    return BlockMatrix(std::move(z), Dims{n, 1, d});
}

Mat monotone_convolve_moment(const Law& mu1, const Law& mu2, std::span<const Mat> coeffs) {
    if (mu1.d() != mu2.d()) throw DimensionError("monotone_convolve_moment: laws have different d");
    BlockMatrix z = moment_extraction_point(coeffs);
    if (z.dims().d != mu1.d()) throw DimensionError("monotone_convolve_moment: coefficients do not match d");
    // G~ of mu1 |> mu2 is G~_{mu1} o G~_{mu2}
    BlockMatrix inner = g_tilde(mu2, z);
    BlockMatrix outer = g_tilde(mu1, inner);
    const int n = z.dims().n, d = z.dims().d;
    return outer.data().block(0, (n - 1) * d, d, d);
}

Mat monotone_convolve_moment(const MomentOracle& mu1, const MomentOracle& mu2, std::span<const Mat> coeffs) {
    BlockMatrix z = moment_extraction_point(coeffs);
    BlockMatrix inner = g_tilde_nilpotent(mu2, z);
    BlockMatrix outer = g_tilde_nilpotent(mu1, inner);
    const int n = z.dims().n, d = z.dims().d;
    return outer.data().block(0, (n - 1) * d, d, d);
}

InverseResult invert_g_tilde(const Law& law, const BlockMatrix& w, double target, int max_iter) {
    require_point(w, law.d(), "invert_g_tilde");
    const double m = law.g.rad_bound();
    const double r2 = m > 0 ? (3.0 - 2.0 * std::sqrt(2.0)) / m : std::numeric_limits<double>::infinity();
    const double wn = op_norm(w.data());
    if (!(wn < r2)) {
        std::ostringstream os;
        os << "invert_g_tilde: ||w|| = " << wn << " is not below R2 = " << r2;
        throw DomainError(os.str());
    }
    InverseResult res{w, 0, 0.0};
    for (int it = 0; it <= max_iter; ++it) {
        BlockMatrix gz = g_tilde(law, res.z);
        BlockMatrix diff = gz - w;
        res.residual = op_norm(diff.data());
        res.iterations = it;
        if (res.residual < target) return res;
        // z <- w - P(z) with P(z) = G~(z) - z
        res.z = res.z - diff;
    }
    std::ostringstream os;
    os << "invert_g_tilde: no convergence after " << max_iter << " iterations (residual " << res.residual << ")";
    throw ConvergenceError(os.str());
}

GeneralizedLaw direct_sum(const GeneralizedLaw& a, const GeneralizedLaw& b) {
    if (a.d != b.d) throw DimensionError("direct_sum: laws have different d");
    const Eigen::Index ra = a.X.rows(), rb = b.X.rows();
    Mat x = Mat::Zero(ra + rb, ra + rb);
    x.topLeftCorner(ra, ra) = a.X;
    x.bottomRightCorner(rb, rb) = b.X;
    Mat w(ra + rb, a.d);
    w.topRows(ra) = a.W;
    w.bottomRows(rb) = b.W;
    return GeneralizedLaw(a.d, a.k + b.k, std::move(x), std::move(w));
}

}  // namespace opchain
