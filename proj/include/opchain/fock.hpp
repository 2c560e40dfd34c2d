#pragma once

#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "opchain/driving.hpp"

namespace opchain {

struct TruncationError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Per-piece realized image of a one-particle element, values in M_{k_j d}.
using OneParticle = PiecewisePoly;

// f_m (x) ... (x) f_1 a. `f` is stored bottom first: f[0] = f_1, f.back() = f_m.
struct FockTerm {
    std::vector<OneParticle> f;
    Mat amp;
    int depth() const { return static_cast<int>(f.size()); }
};

struct FockVector {
    std::vector<FockTerm> terms;
    int depth() const;
};

FockVector operator+(const FockVector& a, const FockVector& b);
FockVector operator-(const FockVector& a, const FockVector& b);
FockVector operator*(cplx s, const FockVector& a);
// Right A-action: every amplitude a becomes a b.
FockVector operator*(const FockVector& a, const Mat& b);

struct Process {
    enum class Kind { Y, Z } kind = Kind::Y;
    double s = 0.0, t = 0.0;
};

// Alternating word entries; coefficients act through m_0 of a constant.
using WordItem = std::variant<Process, Mat>;

class FockSpace {
public:
    // Refines the driving's grid at extra_times so that indicator functions over them are exact.
    FockSpace(const StepDriving& dr, int N, std::span<const double> extra_times = {});

    const StepDriving& driving() const { return dr_; }
    int truncation() const { return N_; }
    int d() const { return dr_.d; }

    FockVector vacuum(const Mat& a) const;
    FockVector vacuum() const { return vacuum(Mat::Identity(d(), d())); }

    OneParticle chi(double t1, double t2) const { return indicator(dr_, t1, t2); }
    OneParticle chi_x(double t1, double t2) const { return indicator_x(dr_, t1, t2); }
    OneParticle lift_a(const PiecewisePoly& a_valued) const { return lift(dr_, a_valued); }

    Mat inner(const FockVector& v, const FockVector& w) const;

    FockVector create(const OneParticle& f, const FockVector& v) const;
    FockVector annihilate(const OneParticle& f, const FockVector& v) const;
    FockVector multiply(const OneParticle& f, const FockVector& v) const;
    FockVector mult0(const PiecewisePoly& g, const FockVector& v) const;
    FockVector mult0(const Mat& a, const FockVector& v) const;

    // The vacuum component a of v, as the projection onto A xi.
    FockVector vacuum_part(const FockVector& v) const;

    FockVector apply(const Process& p, const FockVector& v) const;
    FockVector apply_word(std::span<const WordItem> word, const FockVector& v) const;

    Mat expectation(std::span<const WordItem> word) const;

    // I_nu(f* g) as an A-valued function of t on [0, T].
    PiecewisePoly i_nu(const OneParticle& f, const OneParticle& g) const;

private:
    void check_one_particle(const OneParticle& f, const char* where) const;
    void check_a_valued(const PiecewisePoly& g, const char* where) const;

    StepDriving dr_;
    int N_;
};

// <xi, word xi>, with the truncation depth set to the number of process entries.
Mat expectation_of_word(const StepDriving& dr, std::span<const WordItem> word);

// Moments of Y_{s,t} as a moment oracle, for monotone convolution checks.
std::function<Mat(std::span<const Mat>)> fock_moment_oracle(const StepDriving& dr, double s, double t);

struct CouplingRow {
    double lhs = 0.0;  // ||<(Y - Z) v, (Y - Z) v>||^{1/2}
    double rhs = 0.0;  // M ||<v, v>||^{1/2}
    bool ok = true;
};

struct CouplingReport {
    std::vector<CouplingRow> rows;
    int violations = 0;
};

CouplingReport coupling_defect(const FockSpace& space, double s, double t, std::span<const FockVector> vectors,
                               double tol = 1e-10);

}  // namespace opchain
