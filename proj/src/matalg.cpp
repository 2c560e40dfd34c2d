#include "opchain/matalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace opchain {

namespace {

void require_square(const Mat& m, const char* where) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << where << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
        throw DimensionError(os.str());
    }
}

}  // namespace

BlockMatrix::BlockMatrix(Mat data, Dims dims) : data_(std::move(data)), dims_(dims) {
    if (dims_.n < 1 || dims_.k < 1 || dims_.d < 1)
        throw DimensionError("BlockMatrix: factor sizes must be positive");
    if (data_.rows() != dims_.side() || data_.cols() != dims_.side()) {
        std::ostringstream os;
        os << "BlockMatrix: side " << data_.rows() << "x" << data_.cols() << " does not match n*k*d = "
           << dims_.side();
        throw DimensionError(os.str());
    }
}

Mat BlockMatrix::block(int i, int j) const {
    const int b = dims_.k * dims_.d;
    return data_.block(i * b, j * b, b, b);
}

BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b) {
    if (!(a.dims_ == b.dims_)) throw DimensionError("BlockMatrix +: dims differ");
    return BlockMatrix(a.data_ + b.data_, a.dims_);
}

BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b) {
    if (!(a.dims_ == b.dims_)) throw DimensionError("BlockMatrix -: dims differ");
    return BlockMatrix(a.data_ - b.data_, a.dims_);
}

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
    if (!(a.dims_ == b.dims_)) throw DimensionError("BlockMatrix *: dims differ");
    return BlockMatrix(a.data_ * b.data_, a.dims_);
}

BlockMatrix operator*(cplx s, const BlockMatrix& a) { return BlockMatrix(s * a.data_, a.dims_); }

BlockMatrix scalar_point(cplx zeta, int n, int d) {
    return BlockMatrix(zeta * Mat::Identity(n * d, n * d), Dims{n, 1, d});
}

Mat imag_part(const Mat& m) {
    require_square(m, "imag_part");
    // -(i/2)(M - M*)
    return cplx(0.0, -0.5) * (m - m.adjoint());
}

BlockMatrix imag_part(const BlockMatrix& m) { return BlockMatrix(imag_part(m.data()), m.dims()); }

bool is_hermitian(const Mat& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, op_norm(m));
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool in_upper_halfplane(const Mat& m, double eps) {
    require_square(m, "in_upper_halfplane");
    if (m.size() == 0) return true;
    return min_eig_herm(imag_part(m)) >= eps - kTolEig;
}

bool in_upper_halfplane(const BlockMatrix& m, double eps) { return in_upper_halfplane(m.data(), eps); }

Mat amplify_mat(const Mat& x, int n) {
    require_square(x, "amplify_n");
    if (n < 1) throw DimensionError("amplify_n: n must be >= 1");
    const Eigen::Index b = x.rows();
    Mat out = Mat::Zero(n * b, n * b);
    for (int i = 0; i < n; ++i) out.block(i * b, i * b, b, b) = x;
    return out;
}

BlockMatrix amplify_n(const BlockMatrix& x, int n) {
    if (x.dims().n != 1) throw DimensionError("amplify_n: input must have outer size 1");
    return BlockMatrix(amplify_mat(x.data(), n), Dims{n, x.dims().k, x.dims().d});
}

Mat embed_mat(const Mat& z, int n, int k, int d) {
    if (z.rows() != n * d || z.cols() != n * d) throw DimensionError("embed_k: z must be (n*d)x(n*d)");
    if (k < 1) throw DimensionError("embed_k: k must be >= 1");
    Mat out = Mat::Zero(n * k * d, n * k * d);
    for (int in = 0; in < n; ++in)
        for (int jn = 0; jn < n; ++jn) {
            auto zb = z.block(in * d, jn * d, d, d);
            if (zb.isZero(0.0)) continue;
            for (int ik = 0; ik < k; ++ik) out.block((in * k + ik) * d, (jn * k + ik) * d, d, d) = zb;
        }
    return out;
}

BlockMatrix embed_k(const BlockMatrix& z, int k) {
    if (z.dims().k != 1) throw DimensionError("embed_k: input must have middle size 1");
    const Dims& dz = z.dims();
    return BlockMatrix(embed_mat(z.data(), dz.n, k, dz.d), Dims{dz.n, k, dz.d});
}

double op_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double op_norm(const BlockMatrix& m) { return op_norm(m.data()); }

double min_eig_herm(const Mat& m) {
    require_square(m, "min_eig_herm");
    // symmetrize so that rounding noise cannot produce complex eigenvalues
    Mat h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double min_eig_herm(const BlockMatrix& m) { return min_eig_herm(m.data()); }

double rcond_estimate(const Mat& m) {
    require_square(m, "rcond_estimate");
    Eigen::PartialPivLU<Mat> lu(m);
    const double rc = lu.rcond();
    return std::isnan(rc) ? 0.0 : rc;  // an exactly zero pivot yields NaN
}

Mat inverse(const Mat& m) {
    require_square(m, "inverse");
    if (m.size() == 0) return m;
    Eigen::PartialPivLU<Mat> lu(m);
    double rc = lu.rcond();
    if (std::isnan(rc)) rc = 0.0;
    if (!(rc > kMinRcond)) {
        std::ostringstream os;
        os << "inverse: matrix is singular or ill-conditioned (rcond estimate " << rc << ")";
        throw SingularityError(os.str(), rc);
    }
    return lu.inverse();
}

BlockMatrix inverse(const BlockMatrix& m) { return BlockMatrix(inverse(m.data()), m.dims()); }

double max_abs_diff(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shapes differ");
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace opchain
