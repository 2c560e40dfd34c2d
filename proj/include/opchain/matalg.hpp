#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "opchain/errors.hpp"

namespace opchain {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Eigenvalue slack used by every half-plane membership test.
inline constexpr double kTolEig = 1e-12;
// Relative tolerance for hermiticity checks.
inline constexpr double kTolHerm = 1e-12;
// Reciprocal condition number below which inverse() refuses to work.
inline constexpr double kMinRcond = 1e-14;

// Factor sizes of M_n(M_k(M_d(C))). Flattened index is ((i_n*k)+i_k)*d+i_d.
struct Dims {
    int n = 1, k = 1, d = 1;
    int side() const { return n * k * d; }
    bool operator==(const Dims&) const = default;
};

class BlockMatrix {
public:
    BlockMatrix() = default;
    BlockMatrix(Mat data, Dims dims);

    const Mat& data() const { return data_; }
    const Dims& dims() const { return dims_; }
    int side() const { return dims_.side(); }

    // The (i,j) block with respect to the outer index n, as a k*d square matrix.
    Mat block(int i, int j) const;

    BlockMatrix adjoint() const { return BlockMatrix(data_.adjoint(), dims_); }

    friend BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b);
    friend BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b);
    friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);
    friend BlockMatrix operator*(cplx s, const BlockMatrix& a);

private:
    Mat data_;
    Dims dims_;
};

// Scalar multiple of the identity at level (n, 1, d).
BlockMatrix scalar_point(cplx zeta, int n, int d);

BlockMatrix imag_part(const BlockMatrix& m);
Mat imag_part(const Mat& m);

bool is_hermitian(const Mat& m, double rel_tol = kTolHerm);

bool in_upper_halfplane(const BlockMatrix& m, double eps);
bool in_upper_halfplane(const Mat& m, double eps);

// I_n (x) X on the outer index. X must have dims (1, k, d).
BlockMatrix amplify_n(const BlockMatrix& x, int n);

// z (dims (n,1,d)) -> entries delta_{i_k j_k} z, i.e. the image of z under rho(a) = I_k (x) a.
BlockMatrix embed_k(const BlockMatrix& z, int k);

// Plain-matrix forms of the two embeddings, used in the inner loops.
Mat amplify_mat(const Mat& x, int n);
Mat embed_mat(const Mat& z, int n, int k, int d);

double op_norm(const Mat& m);
double op_norm(const BlockMatrix& m);

double min_eig_herm(const Mat& m);
double min_eig_herm(const BlockMatrix& m);

// Solves with partial-pivot LU and refuses ill-conditioned inputs.
Mat inverse(const Mat& m);
BlockMatrix inverse(const BlockMatrix& m);

double rcond_estimate(const Mat& m);

// Largest entrywise deviation, used by tests.
double max_abs_diff(const Mat& a, const Mat& b);

}  // namespace opchain
