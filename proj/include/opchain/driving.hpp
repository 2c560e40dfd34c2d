#pragma once

#include <span>
#include <vector>

#include "opchain/laws.hpp"

namespace opchain {

// Matrix polynomial in the local variable tau = t - (left grid point); entry p is the tau^p coefficient.
using MPoly = std::vector<Mat>;

MPoly poly_add(const MPoly& a, const MPoly& b);
MPoly poly_sub(const MPoly& a, const MPoly& b);
MPoly poly_mul(const MPoly& a, const MPoly& b);
MPoly poly_scale(cplx s, const MPoly& a);
MPoly poly_adjoint(const MPoly& a);
MPoly poly_left(const Mat& m, const MPoly& a);
MPoly poly_right(const MPoly& a, const Mat& m);
Mat poly_eval(const MPoly& a, double tau, Eigen::Index rows, Eigen::Index cols);
// Coefficientwise I_k (x) c.
MPoly poly_lift(const MPoly& a, int k);

// Function on [t_0, t_J] given by one square matrix polynomial per grid interval. Shapes may differ
// between intervals (realized images live in M_{k_j d}). No continuity is assumed.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(std::vector<double> grid, std::vector<int> dims);

    static PiecewisePoly constant(std::vector<double> grid, std::vector<int> dims, const std::vector<Mat>& values);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<int>& dims() const { return dims_; }
    int intervals() const { return static_cast<int>(dims_.size()); }

    const MPoly& piece(int j) const { return piece_[j]; }
    MPoly& piece(int j) { return piece_[j]; }
    void set_piece(int j, MPoly p);

    int degree() const;
    bool is_zero() const;

    // t in [t_j, t_{j+1}) uses piece j; the right end point uses the last piece.
    Mat eval(double t) const;
    Mat eval_in(int j, double t) const;

    PiecewisePoly adjoint() const;

    friend PiecewisePoly operator+(const PiecewisePoly& a, const PiecewisePoly& b);
    friend PiecewisePoly operator-(const PiecewisePoly& a, const PiecewisePoly& b);
    friend PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b);
    friend PiecewisePoly operator*(cplx s, const PiecewisePoly& a);

    // Max over intervals of the sum of coefficient norms times powers of the interval length: an
    // upper bound of the sup norm, used for cheap zero tests.
    double coarse_norm() const;

private:
    std::vector<double> grid_;
    std::vector<int> dims_;
    std::vector<MPoly> piece_;
};

int locate_interval(const std::vector<double>& grid, double t);
// Index of a grid point equal to t up to a relative 1e-12; throws DomainError otherwise.
int grid_index(const std::vector<double>& grid, double t);

struct StepDriving {
    std::vector<double> grid;
    std::vector<GeneralizedLaw> pieces;
    int d = 1;

    StepDriving() = default;
    StepDriving(std::vector<double> grid, std::vector<GeneralizedLaw> pieces);

    static StepDriving constant(const GeneralizedLaw& law, double T);

    double T() const { return grid.back(); }
    int J() const { return static_cast<int>(pieces.size()); }

    double M() const;   // max_j ||X_j||
    double C() const;   // max_j ||W_j* W_j||
    double C2() const;  // max_j ||X_j||^2 ||W_j||^2

    int interval_of(double t) const { return locate_interval(grid, t); }

    std::vector<int> realized_dims() const;
    std::vector<int> a_dims() const { return std::vector<int>(pieces.size(), d); }

    // Inserts the given times into the grid, duplicating the pieces they split.
    StepDriving refined(std::span<const double> times) const;
};

// V(z) = -G_{sigma_j}(z).
BlockMatrix herglotz_field(const StepDriving& dr, const BlockMatrix& z, int j);

// A-valued functions of t.
PiecewisePoly a_constant(const StepDriving& dr, const Mat& a);
PiecewisePoly a_time(const StepDriving& dr);  // t -> t * I_d
// Realized one-particle functions.
PiecewisePoly lift(const StepDriving& dr, const PiecewisePoly& a_valued);
PiecewisePoly indicator(const StepDriving& dr, double t1, double t2);  // I on (t1,t2), realized
PiecewisePoly indicator_x(const StepDriving& dr, double t1, double t2);  // X_j on (t1,t2), realized

// t -> sum_j integral over [t, t_hi] cap [t_lo, t_hi] cap I_j of W_j* f_j(s) W_j ds.
// t_lo and t_hi must be grid points. f is realized; the result is A-valued.
PiecewisePoly integrate_nu(const StepDriving& dr, const PiecewisePoly& f, double t_lo, double t_hi);
// Same tail integral for an integrand that is already A-valued.
PiecewisePoly integrate_tail(const PiecewisePoly& h, double t_lo, double t_hi);

}  // namespace opchain
