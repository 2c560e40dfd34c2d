#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "opchain/gen.hpp"
#include "opchain/laws.hpp"

using namespace opchain;

namespace {

Mat bernoulli_x() {
    Mat x = Mat::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    return x;
}

GeneralizedLaw random_law(std::uint64_t seed, int d, int k) {
    SplitMix64 rng(seed);
    Mat x = random_hermitian(rng, k * d);
    x /= op_norm(x);
    Mat w = random_matrix(rng, k * d, d);
    w /= op_norm(w);
    return GeneralizedLaw(d, k, x, w);
}

std::vector<Mat> copies(const Mat& a, int n) { return std::vector<Mat>(n, a); }

}  // namespace

TEST_CASE("scalar moments and Cauchy transform from the spectral decomposition") {
    SplitMix64 rng(5);
    const Mat x = random_hermitian(rng, 4);
    const Law law(1, 4, x);
    Eigen::SelfAdjointEigenSolver<Mat> es(x);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::VectorXd wt = es.eigenvectors().row(0).cwiseAbs2().transpose();

    const Mat one = Mat::Identity(1, 1);
    for (int m = 0; m <= 6; ++m) {
        double want = 0.0;
        for (int i = 0; i < 4; ++i) want += wt[i] * std::pow(lam[i], m);
        CHECK(moment(law, copies(one, m + 1))(0, 0).real() == doctest::Approx(want).epsilon(1e-12));
    }

    const cplx z(0.3, 0.7);
    cplx want = 0.0;
    for (int i = 0; i < 4; ++i) want += wt[i] / (z - lam[i]);
    const cplx got = cauchy_transform(law, scalar_point(z, 1, 1)).data()(0, 0);
    CHECK(std::abs(got - want) < 1e-13);
}

TEST_CASE("G~ near zero agrees with its truncated moment series") {
    const GeneralizedLaw law = random_law(11, 2, 3);
    SplitMix64 rng(12);
    Mat z = random_matrix(rng, 2, 2);
    z *= 0.25 / op_norm(z);  // ||z|| M <= 1/4
    const BlockMatrix g = g_tilde(law, BlockMatrix(z, Dims{1, 1, 2}));
    const double M = law.rad_bound(), zn = op_norm(z);
    for (int K : {3, 6, 10}) {
        Mat sum = Mat::Zero(2, 2);
        for (int k = 0; k <= K; ++k) sum += moment(law, copies(z, k + 1));
        const double bound = op_norm(law.sigma_one()) * std::pow(zn * M, K + 1) / (1.0 / zn - M);
        CHECK(op_norm(g.data() - sum) <= bound * (1 + 1e-9) + 1e-15);
    }
}

TEST_CASE("moment extraction point reads moments off the corner block") {
    const GeneralizedLaw law = random_law(21, 2, 2);
    SplitMix64 rng(22);
    std::vector<Mat> a;
    for (int i = 0; i < 5; ++i) a.push_back(random_matrix(rng, 2, 2));
    for (int m = 0; m < 5; ++m) {
        std::span<const Mat> c(a.data(), m + 1);
        const BlockMatrix z = moment_extraction_point(c);
        const BlockMatrix g = g_tilde(law, z);
        CHECK(max_abs_diff(g.block(0, m + 1), moment(law, c)) < 1e-13);
    }
}

TEST_CASE("nilpotent G~ from an oracle matches the resolvent form") {
    SplitMix64 rng(31);
    const Law law(2, 3, random_hermitian(rng, 6));
    Mat z = Mat::Zero(8, 8);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) z.block(2 * i, 2 * j, 2, 2) = random_matrix(rng, 2, 2);
    const BlockMatrix zb(z, Dims{4, 1, 2});
    CHECK(max_abs_diff(g_tilde_nilpotent(moment_oracle(law), zb).data(), g_tilde(law, zb).data()) < 1e-12);
}

TEST_CASE("Schur decomposition reproduces the F-transform") {
    SplitMix64 rng(41);
    const Law law(2, 3, random_hermitian(rng, 6));
    const SchurParts sp = schur_decompose(law);
    for (int n : {1, 2}) {
        Mat z = random_matrix(rng, 2 * n, 2 * n) * 0.3;
        z += cplx(0.0, 1.5) * Mat::Identity(2 * n, 2 * n);
        const BlockMatrix zb(z, Dims{n, 1, 2});
        const Mat f = f_transform(law, zb).data();
        const Mat rhs = z - amplify_mat(sp.a0, n) - cauchy_transform(sp.sigma, zb).data();
        CHECK(max_abs_diff(f, rhs) < 1e-12);
    }
}

TEST_CASE("Bernoulli |> Bernoulli has variance 2 and fourth moment 5") {
    const Law b(1, 2, bernoulli_x());
    const Mat one = Mat::Identity(1, 1);
    // F = z - 1/z composed with itself: G = 1/z + 2/z^3 + 5/z^5 + ...
    CHECK(monotone_convolve_moment(b, b, copies(one, 3))(0, 0).real() == doctest::Approx(2.0));
    CHECK(monotone_convolve_moment(b, b, copies(one, 5))(0, 0).real() == doctest::Approx(5.0));
    CHECK(std::abs(monotone_convolve_moment(b, b, copies(one, 4))(0, 0)) < 1e-14);
}

TEST_CASE("the oracle form of monotone convolution matches the realization form") {
    SplitMix64 rng(51);
    const Law l1(2, 2, random_hermitian(rng, 4)), l2(2, 3, random_hermitian(rng, 6));
    std::vector<Mat> a;
    for (int i = 0; i < 5; ++i) a.push_back(random_matrix(rng, 2, 2));
    for (int m = 0; m < 5; ++m) {
        std::span<const Mat> c(a.data(), m + 1);
        CHECK(max_abs_diff(monotone_convolve_moment(l1, l2, c),
                           monotone_convolve_moment(moment_oracle(l1), moment_oracle(l2), c)) < 1e-12);
    }
}

TEST_CASE("inverting G~ near zero") {
    SplitMix64 rng(61);
    Mat x = random_hermitian(rng, 4);
    x /= op_norm(x);
    const Law law(2, 2, x);
    Mat w = random_matrix(rng, 2, 2);
    w *= 0.1 / op_norm(w);
    const BlockMatrix wb(w, Dims{1, 1, 2});
    const InverseResult r = invert_g_tilde(law, wb);
    CHECK(r.residual < 1e-12);
    CHECK(max_abs_diff(g_tilde(law, r.z).data(), w) < 1e-12);
    const BlockMatrix far(w * 10.0, Dims{1, 1, 2});
    CHECK_THROWS_AS(invert_g_tilde(law, far), DomainError);
}

TEST_CASE("direct sums add moments") {
    const GeneralizedLaw a = random_law(71, 2, 2), b = random_law(72, 2, 1);
    const GeneralizedLaw s = direct_sum(a, b);
    SplitMix64 rng(73);
    std::vector<Mat> c;
    for (int i = 0; i < 4; ++i) c.push_back(random_matrix(rng, 2, 2));
    CHECK(max_abs_diff(moment(s, c), moment(a, c) + moment(b, c)) < 1e-13);
}

TEST_CASE("invalid laws and points") {
    Mat x = Mat::Zero(2, 2);
    x(0, 1) = 1.0;  // not hermitian
    CHECK_THROWS_AS(Law(1, 2, x), DimensionError);
    CHECK_THROWS_AS(GeneralizedLaw(1, 2, Mat::Zero(2, 2), Mat::Zero(1, 1)), DimensionError);
    const Law b(1, 2, bernoulli_x());
    CHECK_THROWS_AS(cauchy_transform(b, scalar_point(cplx(0.5, 0.0), 1, 1)), DomainError);
    CHECK_THROWS_AS(cauchy_transform(b, scalar_point(cplx(0.0, 1.0), 1, 2)), DimensionError);
    // real points far out are near infinity and accepted
    CHECK_NOTHROW(cauchy_transform(b, scalar_point(cplx(3.0, 0.0), 1, 1)));
}
