#include "opchain/loewner.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <sstream>

namespace opchain {

const char* to_string(FlowMethod m) { return m == FlowMethod::RK4 ? "rk4" : "picard"; }

FlowMethod parse_flow_method(const std::string& s) {
    if (s == "rk4") return FlowMethod::RK4;
    if (s == "picard") return FlowMethod::Picard;
    throw std::invalid_argument("unknown flow method '" + s + "' (expected rk4 or picard)");
}

namespace {

// A stretch of the tau axis (tau = t - u) on which the driving is one fixed law.
struct Segment {
    double len;
    int piece;
};

std::vector<Segment> segments_backward(const StepDriving& dr, double s, double t) {
    std::vector<Segment> out;
    if (t <= s) return out;
    const int jt = dr.interval_of(t);
    const int js = dr.interval_of(s);
    for (int j = jt; j >= js; --j) {
        const double a = std::max(s, dr.grid[j]);
        const double b = std::min(t, dr.grid[j + 1]);
        if (b > a) out.push_back({b - a, j});
    }
    return out;
}

Mat field(const GeneralizedLaw& law, const Mat& y, const Dims& dims) {
    return -cauchy_transform(law, BlockMatrix(y, dims)).data();
}

Mat rk4_run(const GeneralizedLaw& law, const Mat& y0, const Dims& dims, double len, long n) {
    const double h = len / double(n);
    Mat y = y0;
    for (long i = 0; i < n; ++i) {
        Mat k1 = field(law, y, dims);
        Mat k2 = field(law, y + 0.5 * h * k1, dims);
        Mat k3 = field(law, y + 0.5 * h * k2, dims);
        Mat k4 = field(law, y + h * k3, dims);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

// Clenshaw-Curtis style cumulative integration on Chebyshev-Lobatto nodes of [-1,1].
struct ChebyshevIntegrator {
    int p;
    std::vector<double> x;
    Eigen::MatrixXd S;  // (S v)_i = integral from -1 to x_i of the interpolant of v

    explicit ChebyshevIntegrator(int p_) : p(p_), x(p_) {
        for (int i = 0; i < p; ++i) x[i] = -std::cos(M_PI * i / double(p - 1));
        Eigen::MatrixXd T(p, p), E(p, p + 1);
        for (int i = 0; i < p; ++i) {
            E(i, 0) = 1.0;
            E(i, 1) = x[i];
            for (int j = 2; j <= p; ++j) E(i, j) = 2.0 * x[i] * E(i, j - 1) - E(i, j - 2);
        }
        T = E.leftCols(p);
        // antiderivative coefficients of each T_j
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p + 1, p);
        B(1, 0) = 1.0;
        if (p > 1) B(2, 1) = 0.25;
        for (int j = 2; j < p; ++j) {
            B(j + 1, j) += 1.0 / (2.0 * (j + 1));
            B(j - 1, j) -= 1.0 / (2.0 * (j - 1));
        }
        Eigen::RowVectorXd at_minus_one(p + 1);
        for (int j = 0; j <= p; ++j) at_minus_one(j) = (j % 2 == 0) ? 1.0 : -1.0;
        Eigen::MatrixXd EB = E * B;
        Eigen::RowVectorXd base = at_minus_one * B;
        for (int i = 0; i < p; ++i) EB.row(i) -= base;
        S = EB * T.inverse();
    }
};

double log_factorial(int m) { return std::lgamma(double(m) + 1.0); }

FlowResult picard_flow(const StepDriving& dr, double s, double t, const BlockMatrix& z, const FlowOptions& opt,
                       FlowResult res) {
    const double C = res.C, eps = res.eps, L = t - s;
    const int p = std::max(4, opt.picard_nodes);
    ChebyshevIntegrator cheb(p);

    struct Panel {
        double h;
        int piece;
    };
    std::vector<Panel> panels;
    for (const Segment& seg : segments_backward(dr, s, t)) {
        const int q = std::max(1, int(std::ceil(2.0 * seg.len * C / (eps * eps))));
        for (int i = 0; i < q; ++i) panels.push_back({seg.len / q, seg.piece});
    }
    const Mat& z0 = z.data();
    const Dims dims = z.dims();
    std::vector<std::vector<Mat>> w(panels.size(), std::vector<Mat>(p, z0));

    // bound on ||W_m - W_{m-1}|| as printed, and the one that follows from the first step C t / eps
    auto paper_bound = [&](int m) {
        if (C == 0.0) return 0.0;
        return std::exp((m + 1) * std::log(C) + m * std::log(L) - log_factorial(m) - (2 * m + 1) * std::log(eps));
    };
    auto derived_bound = [&](int m) {
        if (C == 0.0) return 0.0;
        return std::exp(m * std::log(C) + m * std::log(L) - log_factorial(m) - (2 * m - 1) * std::log(eps));
    };

    res.certified = false;
    for (int m = 1; m <= opt.picard_max_iter; ++m) {
        std::vector<std::vector<Mat>> next(panels.size(), std::vector<Mat>(p));
        Mat carry = z0;
        double gap = 0.0;
        for (std::size_t k = 0; k < panels.size(); ++k) {
            const GeneralizedLaw& law = dr.pieces[panels[k].piece];
            std::vector<Mat> v(p);
            for (int i = 0; i < p; ++i) v[i] = field(law, w[k][i], dims);
            const double half = 0.5 * panels[k].h;
            for (int i = 0; i < p; ++i) {
                Mat acc = carry;
                for (int l = 0; l < p; ++l)
                    if (cheb.S(i, l) != 0.0) acc += (half * cheb.S(i, l)) * v[l];
                next[k][i] = std::move(acc);
                gap = std::max(gap, op_norm(next[k][i] - w[k][i]));
            }
            carry = next[k][p - 1];
        }
        w.swap(next);
        res.steps += long(p) * long(panels.size());
        const double pb = paper_bound(m);
        const double cb = std::max(pb, derived_bound(m));
        res.picard.push_back({m, gap, pb, cb});
        // geometric tail of the certified bounds beyond m
        const double ratio = C * L / (eps * eps * (m + 1));
        const double tail = ratio < 1.0 ? cb * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
        if (tail < opt.tol && gap < opt.tol) {
            res.certified = true;
            res.err = tail + gap;
            break;
        }
        if (gap < 1e-15 * std::max(1.0, op_norm(carry))) {
            // iterates stopped moving before the a-priori tail became small
            res.err = gap;
            break;
        }
        if (m == opt.picard_max_iter) {
            std::ostringstream os;
            os << "picard: no convergence after " << m << " sweeps (last gap " << gap << ")";
            throw ConvergenceError(os.str());
        }
    }
    res.value = BlockMatrix(panels.empty() ? z0 : w.back().back(), dims);
    return res;
}

}  // namespace

FlowResult subordination(const StepDriving& dr, double s, double t, const BlockMatrix& z, const FlowOptions& opt) {
    if (!(0.0 <= s && s <= t && t <= dr.T() * (1 + 1e-15))) {
        std::ostringstream os;
        os << "subordination: need 0 <= s <= t <= T, got s=" << s << " t=" << t << " T=" << dr.T();
        throw DomainError(os.str());
    }
    if (z.dims().k != 1 || z.dims().d != dr.d) throw DimensionError("subordination: point has the wrong shape");
    const double eps = min_eig_herm(imag_part(z.data()));
    if (!(eps > 0.0)) throw DomainError("subordination: Im z must be positive definite");

    FlowResult res;
    res.s = s;
    res.t = t;
    res.z0 = z;
    res.value = z;
    res.method = opt.method;
    res.M = dr.M();
    res.C = dr.C();
    res.eps = eps;
    if (t == s) return res;
    if (opt.method == FlowMethod::Picard) return picard_flow(dr, s, t, z, opt, std::move(res));

    Mat y = z.data();
    for (const Segment& seg : segments_backward(dr, s, t)) {
        const GeneralizedLaw& law = dr.pieces[seg.piece];
        const double eps_now = std::max(eps, min_eig_herm(imag_part(y)));
        const double c = op_norm(law.sigma_one());
        long n = std::max(1L, long(std::ceil(seg.len * c / (eps_now * eps_now) * 64.0)));
        Mat coarse = rk4_run(law, y, z.dims(), seg.len, n);
        res.steps += n;
        Mat fine;
        double err = 0.0;
        for (int dbl = 0;; ++dbl) {
            fine = rk4_run(law, y, z.dims(), seg.len, 2 * n);
            res.steps += 2 * n;
            err = op_norm(fine - coarse) / 15.0;
            if (err <= opt.tol) break;
            if (dbl >= opt.max_doublings) {
                std::ostringstream os;
                os << "rk4: step control failed on piece " << seg.piece << " (error estimate " << err << " with "
                   << 2 * n << " steps)";
                throw ConvergenceError(os.str());
            }
            n *= 2;
            coarse = std::move(fine);
        }
        y = std::move(fine);
        res.err += err;
    }
    res.value = BlockMatrix(std::move(y), z.dims());
    return res;
}

ChainReport chain_check(const StepDriving& dr, double s, double t, double u, const BlockMatrix& z, double tol) {
    if (!(s <= t && t <= u)) throw DomainError("chain_check: need s <= t <= u");
    FlowResult whole = subordination(dr, s, u, z);
    FlowResult inner = subordination(dr, t, u, z);
    FlowResult outer = subordination(dr, s, t, inner.value);
    ChainReport rep;
    rep.defect = op_norm(whole.value.data() - outer.value.data());
    rep.solver_err = whole.err + inner.err + outer.err;
    rep.tol = tol;
    rep.ok = rep.defect < tol;
    return rep;
}

RadiusReport radius_certificate(const StepDriving& dr, double t, const std::vector<RadiusSample>& samples) {
    RadiusReport rep;
    const double M = dr.M(), C = dr.C();
    for (const RadiusSample& smp : samples) {
        RadiusRow row;
        const double r = op_norm(inverse(smp.w.data()));
        FlowResult f = subordination(dr, 0.0, t, smp.w);
        row.psd_margin = min_eig_herm(imag_part(f.value.data()) - imag_part(smp.w.data()));
        row.lhs = op_norm(inverse(f.value.data()));
        if (C == 0.0) {
            row.u = smp.u;
            row.rhs = M > 0 ? 1.0 / M : std::numeric_limits<double>::infinity();
            row.precondition = r * M < 1.0;
        } else {
            double u = smp.u;
            const double umax = std::pow((1.0 / r - M) / std::sqrt(2.0 * C), 2);
            if (u < 0) u = umax * (1.0 - 1e-12);
            row.u = u;
            row.precondition = (1.0 / r > M) && u > t && r < 1.0 / (M + std::sqrt(2.0 * C * u));
            row.rhs = 1.0 / (M + std::sqrt(2.0 * C * std::max(0.0, u - t)));
        }
        const bool psd_ok = row.psd_margin >= -1e-10;
        const bool ineq_ok = !row.precondition || row.lhs <= row.rhs * (1.0 + 1e-10) + 10.0 * f.err;
        row.ok = psd_ok && ineq_ok;
        if (!row.ok) ++rep.violations;
        rep.rows.push_back(row);
    }
    return rep;
}

BlockMatrix semigroup_flow(const GeneralizedLaw& sigma, double t, const BlockMatrix& z, double tol) {
    if (z.dims().k != 1 || z.dims().d != sigma.d) throw DimensionError("semigroup_flow: point has the wrong shape");
    if (!(min_eig_herm(imag_part(z.data())) > 0.0)) throw DomainError("semigroup_flow: Im z must be positive");
    if (t < 0.0) throw DomainError("semigroup_flow: t must be nonnegative");
    const Dims dims = z.dims();
    const Eigen::Index side = z.side();
    using State = std::vector<double>;
    auto pack = [&](const Mat& m, State& x) {
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            x[2 * i] = m.data()[i].real();
            x[2 * i + 1] = m.data()[i].imag();
        }
    };
    auto unpack = [&](const State& x) {
        Mat m(side, side);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(x[2 * i], x[2 * i + 1]);
        return m;
    };
    State x(2 * side * side);
    pack(z.data(), x);
    if (t == 0.0) return z;
    auto rhs = [&](const State& y, State& dy, double) { pack(field(sigma, unpack(y), dims), dy); };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, x, 0.0, t, t / 64.0);
    return BlockMatrix(unpack(x), dims);
}

double injectivity_delta(const StepDriving& dr, double s, double t, double eps) {
    const double C = dr.C();
    if (C == 0.0 || t <= s) return 1.0;
    const double gamma = eps * eps / (2.0 * C);
    const int m = int(std::floor((t - s) / gamma)) + 1;
    return std::ldexp(1.0, -m);
}

}  // namespace opchain
