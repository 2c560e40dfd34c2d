#include <doctest.h>

#include "opchain/matalg.hpp"

using namespace opchain;

TEST_CASE("operator norm of a diagonal matrix is the largest modulus") {
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = cplx(0.0, -2.0);
    m(1, 1) = 3.0;
    m(2, 2) = cplx(1.0, 1.0);
    CHECK(op_norm(m) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("norm of a rank one matrix is the product of vector norms") {
    Eigen::VectorXcd u(3), v(2);
    u << cplx(1, 2), cplx(0, -1), 3.0;
    v << cplx(0.5, 0.5), -1.0;
    const Mat m = u * v.adjoint();
    CHECK(op_norm(m) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-13));
}

TEST_CASE("inverse and singular input") {
    Mat m(2, 2);
    m << cplx(2, 1), 1.0, 0.5, cplx(0, 3);
    CHECK(max_abs_diff(inverse(m) * m, Mat::Identity(2, 2)) < 1e-14);

    Mat s(2, 2);
    s << 1.0, 2.0, 2.0, 4.0;
    CHECK_THROWS_AS(inverse(s), SingularityError);
    try {
        inverse(s);
    } catch (const SingularityError& e) {
        CHECK(e.rcond == 0.0);
    }
}

TEST_CASE("smallest eigenvalue of a hermitian matrix") {
    Mat h(2, 2);
    h << 2.0, cplx(0, 1), cplx(0, -1), 2.0;  // eigenvalues 1 and 3
    CHECK(min_eig_herm(h) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(is_hermitian(h));
    h(0, 1) += 1e-3;
    CHECK_FALSE(is_hermitian(h));
}

TEST_CASE("half-plane membership uses the smallest eigenvalue of Im z") {
    Mat z = Mat::Identity(2, 2) * cplx(0.0, 1.0);
    z(0, 1) = 0.3;
    z(1, 0) = 0.3;
    CHECK(in_upper_halfplane(z, 0.99));
    Mat w = z;
    w(0, 1) = cplx(0.0, 0.75);  // Im w = [[1, .75], [.75, 1]]: eigenvalues 0.25, 1.75
    w(1, 0) = cplx(0.0, 0.75);
    CHECK(min_eig_herm(imag_part(w)) == doctest::Approx(0.25));
    CHECK_FALSE(in_upper_halfplane(w, 0.3));
}

TEST_CASE("flattened index order is (n, k, d)") {
    // x at level (1, k=2, d=2); amplify to n=2 puts copies on the outer diagonal
    Mat x(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) x(i, j) = cplx(i, j);
    const BlockMatrix big = amplify_n(BlockMatrix(x, Dims{1, 2, 2}), 2);
    CHECK(big.dims() == Dims{2, 2, 2});
    CHECK(max_abs_diff(big.block(0, 0), x) == 0.0);
    CHECK(max_abs_diff(big.block(1, 1), x) == 0.0);
    CHECK(big.block(0, 1).norm() == 0.0);

    // z at level (2, 1, d=2); embedding repeats each d-block over the k index
    Mat z(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) z(i, j) = cplx(10 * i + j, 0);
    const BlockMatrix e = embed_k(BlockMatrix(z, Dims{2, 1, 2}), 3);
    CHECK(e.dims() == Dims{2, 3, 2});
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    for (int r = 0; r < 2; ++r)
                        for (int s = 0; s < 2; ++s) {
                            const cplx want = p == q ? z(a * 2 + r, b * 2 + s) : cplx(0.0);
                            CHECK(e.data()((a * 3 + p) * 2 + r, (b * 3 + q) * 2 + s) == want);
                        }
    CHECK(max_abs_diff(embed_mat(z, 2, 3, 2), e.data()) == 0.0);
}

TEST_CASE("shape mismatches are rejected") {
    CHECK_THROWS_AS(BlockMatrix(Mat::Zero(3, 3), Dims{2, 1, 2}), DimensionError);
    const BlockMatrix a(Mat::Zero(2, 2), Dims{1, 1, 2});
    const BlockMatrix b(Mat::Zero(2, 2), Dims{2, 1, 1});
    CHECK_THROWS_AS(a + b, DimensionError);
}
