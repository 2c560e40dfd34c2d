#include "opchain/gen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace opchain {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return double(next() >> 11) * 0x1.0p-53; }

double SplitMix64::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

Mat random_matrix(SplitMix64& rng, int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            m(i, j) = cplx(re, im);
        }
    return m;
}

Mat random_hermitian(SplitMix64& rng, int n) {
    Mat r = random_matrix(rng, n, n);
    return (r + r.adjoint()) / 2.0;
}

StepDriving random_driving(std::uint64_t seed, int d, int k, int J, double T) {
    if (d < 1 || k < 1 || J < 1 || !(T > 0.0)) throw DimensionError("random_driving: need d, k, J >= 1 and T > 0");
    if (d * k > kMaxGenSide || J > kMaxGenPieces) {
        std::ostringstream os;
        os << "random_driving: d*k = " << d * k << " and J = " << J << " exceed the budget (" << kMaxGenSide << ", "
           << kMaxGenPieces << ")";
        throw BudgetError(os.str());
    }
    SplitMix64 rng(seed);
    std::vector<double> grid(J + 1);
    for (int j = 0; j <= J; ++j) grid[j] = T * j / J;
    grid[J] = T;
    std::vector<GeneralizedLaw> pieces;
    for (int j = 0; j < J; ++j) {
        Mat X = random_hermitian(rng, k * d);
        Mat W = random_matrix(rng, k * d, d);
        X *= std::min(1.0, 2.0 / op_norm(X));
        W *= std::min(1.0, 1.0 / op_norm(W));
        X = (X + X.adjoint()) / 2.0;
        pieces.emplace_back(d, k, std::move(X), std::move(W));
    }
    return StepDriving(std::move(grid), std::move(pieces));
}

}  // namespace opchain
