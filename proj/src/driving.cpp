#include "opchain/driving.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opchain {

MPoly poly_add(const MPoly& a, const MPoly& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    MPoly out(std::max(a.size(), b.size()));
    for (std::size_t p = 0; p < out.size(); ++p) {
        if (p < a.size() && p < b.size())
            out[p] = a[p] + b[p];
        else
            out[p] = p < a.size() ? a[p] : b[p];
    }
    return out;
}

MPoly poly_sub(const MPoly& a, const MPoly& b) { return poly_add(a, poly_scale(-1.0, b)); }

MPoly poly_mul(const MPoly& a, const MPoly& b) {
    if (a.empty() || b.empty()) return {};
    MPoly out(a.size() + b.size() - 1);
    for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t q = 0; q < b.size(); ++q) {
            if (out[p + q].size() == 0)
                out[p + q] = a[p] * b[q];
            else
                out[p + q].noalias() += a[p] * b[q];
        }
    return out;
}

MPoly poly_scale(cplx s, const MPoly& a) {
    MPoly out(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = s * a[p];
    return out;
}

MPoly poly_adjoint(const MPoly& a) {
    MPoly out(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = a[p].adjoint();
    return out;
}

MPoly poly_left(const Mat& m, const MPoly& a) {
    MPoly out(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = m * a[p];
    return out;
}

MPoly poly_right(const MPoly& a, const Mat& m) {
    MPoly out(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = a[p] * m;
    return out;
}

Mat poly_eval(const MPoly& a, double tau, Eigen::Index rows, Eigen::Index cols) {
    Mat acc = Mat::Zero(rows, cols);
    for (std::size_t p = a.size(); p-- > 0;) acc = acc * tau + a[p];
    return acc;
}

MPoly poly_lift(const MPoly& a, int k) {
    MPoly out(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) {
        const Eigen::Index d = a[p].rows();
        out[p] = Mat::Zero(k * d, k * d);
        for (int i = 0; i < k; ++i) out[p].block(i * d, i * d, d, d) = a[p];
    }
    return out;
}

PiecewisePoly::PiecewisePoly(std::vector<double> grid, std::vector<int> dims)
    : grid_(std::move(grid)), dims_(std::move(dims)), piece_(dims_.size()) {
    if (grid_.size() != dims_.size() + 1) throw DimensionError("PiecewisePoly: grid and dims disagree");
}

PiecewisePoly PiecewisePoly::constant(std::vector<double> grid, std::vector<int> dims, const std::vector<Mat>& values) {
    PiecewisePoly out(std::move(grid), std::move(dims));
    if (values.size() != out.dims_.size()) throw DimensionError("PiecewisePoly::constant: one value per interval");
    for (int j = 0; j < out.intervals(); ++j) out.set_piece(j, MPoly{values[j]});
    return out;
}

void PiecewisePoly::set_piece(int j, MPoly p) {
    for (const Mat& c : p)
        if (c.rows() != dims_[j] || c.cols() != dims_[j]) {
            std::ostringstream os;
            os << "PiecewisePoly: coefficient shape " << c.rows() << "x" << c.cols() << " on interval " << j
               << " where " << dims_[j] << " is expected";
            throw DimensionError(os.str());
        }
    piece_[j] = std::move(p);
}

int PiecewisePoly::degree() const {
    int deg = -1;
    for (const auto& p : piece_) deg = std::max(deg, static_cast<int>(p.size()) - 1);
    return deg;
}

bool PiecewisePoly::is_zero() const {
    for (const auto& p : piece_)
        for (const Mat& c : p)
            if (!c.isZero(0.0)) return false;
    return true;
}

Mat PiecewisePoly::eval_in(int j, double t) const {
    return poly_eval(piece_[j], t - grid_[j], dims_[j], dims_[j]);
}

Mat PiecewisePoly::eval(double t) const { return eval_in(locate_interval(grid_, t), t); }

PiecewisePoly PiecewisePoly::adjoint() const {
    PiecewisePoly out(grid_, dims_);
    for (int j = 0; j < intervals(); ++j) out.piece_[j] = poly_adjoint(piece_[j]);
    return out;
}

namespace {

void require_compatible(const PiecewisePoly& a, const PiecewisePoly& b, const char* where) {
    if (a.grid() != b.grid() || a.dims() != b.dims()) {
        std::ostringstream os;
        os << where << ": operands live on different grids or shapes";
        throw DimensionError(os.str());
    }
}

}  // namespace

PiecewisePoly operator+(const PiecewisePoly& a, const PiecewisePoly& b) {
    require_compatible(a, b, "PiecewisePoly +");
    PiecewisePoly out(a.grid_, a.dims_);
    for (int j = 0; j < a.intervals(); ++j) out.piece_[j] = poly_add(a.piece_[j], b.piece_[j]);
    return out;
}

PiecewisePoly operator-(const PiecewisePoly& a, const PiecewisePoly& b) {
    require_compatible(a, b, "PiecewisePoly -");
    PiecewisePoly out(a.grid_, a.dims_);
    for (int j = 0; j < a.intervals(); ++j) out.piece_[j] = poly_sub(a.piece_[j], b.piece_[j]);
    return out;
}

PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b) {
    require_compatible(a, b, "PiecewisePoly *");
    PiecewisePoly out(a.grid_, a.dims_);
    for (int j = 0; j < a.intervals(); ++j) out.piece_[j] = poly_mul(a.piece_[j], b.piece_[j]);
    return out;
}

PiecewisePoly operator*(cplx s, const PiecewisePoly& a) {
    PiecewisePoly out(a.grid_, a.dims_);
    for (int j = 0; j < a.intervals(); ++j) out.piece_[j] = poly_scale(s, a.piece_[j]);
    return out;
}

double PiecewisePoly::coarse_norm() const {
    double best = 0.0;
    for (int j = 0; j < intervals(); ++j) {
        const double len = grid_[j + 1] - grid_[j];
        double acc = 0.0, pw = 1.0;
        for (const Mat& c : piece_[j]) {
            acc += op_norm(c) * pw;
            pw *= len;
        }
        best = std::max(best, acc);
    }
    return best;
}

int locate_interval(const std::vector<double>& grid, double t) {
    const int J = static_cast<int>(grid.size()) - 1;
    if (J < 1) throw DimensionError("locate_interval: empty grid");
    if (t < grid.front() || t > grid.back()) {
        std::ostringstream os;
        os << "time " << t << " outside [" << grid.front() << ", " << grid.back() << "]";
        throw DomainError(os.str());
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    int j = static_cast<int>(it - grid.begin()) - 1;
    return std::clamp(j, 0, J - 1);
}

int grid_index(const std::vector<double>& grid, double t) {
    const double tol = 1e-12 * std::max(1.0, std::abs(grid.back()));
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (std::abs(grid[j] - t) <= tol) return static_cast<int>(j);
    std::ostringstream os;
    os << "time " << t << " is not a grid point";
    throw DomainError(os.str());
}

StepDriving::StepDriving(std::vector<double> grid_, std::vector<GeneralizedLaw> pieces_)
    : grid(std::move(grid_)), pieces(std::move(pieces_)) {
    if (pieces.empty()) throw DimensionError("StepDriving: needs at least one piece");
    if (grid.size() != pieces.size() + 1) throw DimensionError("StepDriving: grid must have J+1 points");
    for (std::size_t j = 0; j + 1 < grid.size(); ++j)
        if (!(grid[j] < grid[j + 1])) throw DimensionError("StepDriving: grid must be strictly increasing");
    if (grid.front() != 0.0) throw DimensionError("StepDriving: grid must start at 0");
    d = pieces.front().d;
    for (const auto& p : pieces)
        if (p.d != d) throw DimensionError("StepDriving: pieces must share d");
}

StepDriving StepDriving::constant(const GeneralizedLaw& law, double T) { return StepDriving({0.0, T}, {law}); }

double StepDriving::M() const {
    double m = 0.0;
    for (const auto& p : pieces) m = std::max(m, op_norm(p.X));
    return m;
}

double StepDriving::C() const {
    double c = 0.0;
    for (const auto& p : pieces) c = std::max(c, op_norm(p.sigma_one()));
    return c;
}

double StepDriving::C2() const {
    double c = 0.0;
    for (const auto& p : pieces) {
        const double x = op_norm(p.X), w = op_norm(p.W);
        c = std::max(c, x * x * w * w);
    }
    return c;
}

std::vector<int> StepDriving::realized_dims() const {
    std::vector<int> out;
    for (const auto& p : pieces) out.push_back(p.k * p.d);
    return out;
}

StepDriving StepDriving::refined(std::span<const double> times) const {
    std::vector<double> g = grid;
    std::vector<GeneralizedLaw> pc = pieces;
    const double tol = 1e-12 * std::max(1.0, std::abs(T()));
    for (double t : times) {
        if (t < -tol || t > T() + tol) {
            std::ostringstream os;
            os << "refined: time " << t << " outside [0, " << T() << "]";
            throw DomainError(os.str());
        }
        bool present = false;
        for (double x : g) present = present || std::abs(x - t) <= tol;
        if (present) continue;
        int j = locate_interval(g, t);
        g.insert(g.begin() + j + 1, t);
        pc.insert(pc.begin() + j + 1, pc[j]);
    }
    return StepDriving(std::move(g), std::move(pc));
}

BlockMatrix herglotz_field(const StepDriving& dr, const BlockMatrix& z, int j) {
    if (j < 0 || j >= dr.J()) throw DimensionError("herglotz_field: interval index out of range");
    return -1.0 * cauchy_transform(dr.pieces[j], z);
}

PiecewisePoly a_constant(const StepDriving& dr, const Mat& a) {
    return PiecewisePoly::constant(dr.grid, dr.a_dims(), std::vector<Mat>(dr.J(), a));
}

PiecewisePoly a_time(const StepDriving& dr) {
    PiecewisePoly out(dr.grid, dr.a_dims());
    const Mat id = Mat::Identity(dr.d, dr.d);
    for (int j = 0; j < dr.J(); ++j) out.set_piece(j, MPoly{dr.grid[j] * id, id});
    return out;
}

PiecewisePoly lift(const StepDriving& dr, const PiecewisePoly& a) {
    if (a.grid() != dr.grid) throw DimensionError("lift: grid mismatch");
    PiecewisePoly out(dr.grid, dr.realized_dims());
    for (int j = 0; j < dr.J(); ++j) out.set_piece(j, poly_lift(a.piece(j), dr.pieces[j].k));
    return out;
}

PiecewisePoly indicator(const StepDriving& dr, double t1, double t2) {
    const int j1 = grid_index(dr.grid, t1), j2 = grid_index(dr.grid, t2);
    PiecewisePoly out(dr.grid, dr.realized_dims());
    for (int j = j1; j < j2; ++j) {
        const int n = dr.pieces[j].k * dr.d;
        out.set_piece(j, MPoly{Mat::Identity(n, n)});
    }
    return out;
}

PiecewisePoly indicator_x(const StepDriving& dr, double t1, double t2) {
    const int j1 = grid_index(dr.grid, t1), j2 = grid_index(dr.grid, t2);
    PiecewisePoly out(dr.grid, dr.realized_dims());
    for (int j = j1; j < j2; ++j) out.set_piece(j, MPoly{dr.pieces[j].X});
    return out;
}

PiecewisePoly integrate_tail(const PiecewisePoly& h, double t_lo, double t_hi) {
    const auto& grid = h.grid();
    const int jl = grid_index(grid, t_lo), jh = grid_index(grid, t_hi);
    if (jl > jh) throw DomainError("integrate_tail: t_lo > t_hi");
    const int J = h.intervals();
    std::vector<Mat> total(J);
    for (int j = 0; j < J; ++j) {
        const int n = h.dims()[j];
        total[j] = Mat::Zero(n, n);
        const double len = grid[j + 1] - grid[j];
        double pw = len;
        const MPoly& c = h.piece(j);
        for (std::size_t p = 0; p < c.size(); ++p, pw *= len) total[j] += c[p] * (pw / double(p + 1));
    }
    PiecewisePoly out(grid, h.dims());
    Mat after;  // integral over intervals strictly after the current one, up to jh
    for (int j = J - 1; j >= 0; --j) {
        const int n = h.dims()[j];
        if (after.size() == 0 || after.rows() != n) {
            if (after.size() != 0 && after.rows() != n)
                throw DimensionError("integrate_tail: shapes differ between intervals");
            after = Mat::Zero(n, n);
        }
        if (j >= jh) continue;
        if (j < jl) {
            out.set_piece(j, MPoly{after});
            continue;
        }
        const MPoly& c = h.piece(j);
        MPoly g(c.size() + 1);
        g[0] = after + total[j];
        for (std::size_t p = 0; p < c.size(); ++p) g[p + 1] = c[p] * (-1.0 / double(p + 1));
        out.set_piece(j, std::move(g));
        after += total[j];
    }
    return out;
}

PiecewisePoly integrate_nu(const StepDriving& dr, const PiecewisePoly& f, double t_lo, double t_hi) {
    if (f.grid() != dr.grid || f.dims() != dr.realized_dims())
        throw DimensionError("integrate_nu: integrand does not match the driving's realized shapes");
    PiecewisePoly h(dr.grid, dr.a_dims());
    for (int j = 0; j < dr.J(); ++j) {
        const Mat& w = dr.pieces[j].W;
        MPoly c;
        for (const Mat& m : f.piece(j)) c.push_back(w.adjoint() * m * w);
        h.set_piece(j, std::move(c));
    }
    return integrate_tail(h, t_lo, t_hi);
}

}  // namespace opchain
