#pragma once

#include <cstdint>

#include "opchain/driving.hpp"

namespace opchain {

// splitmix64 stream; Gaussians by Box-Muller. Every random object in the project comes from here.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double uniform();  // [0, 1), 53 bits
    double gaussian();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Entries with independent standard normal real and imaginary parts.
Mat random_matrix(SplitMix64& rng, int rows, int cols);
// (R + R*) / 2
Mat random_hermitian(SplitMix64& rng, int n);

inline constexpr int kMaxGenSide = 16;
inline constexpr int kMaxGenPieces = 4;

// Uniform grid on [0, T]; X_j rescaled to norm <= 2, W_j to norm <= 1.
StepDriving random_driving(std::uint64_t seed, int d, int k, int J, double T);

}  // namespace opchain
