#include "opchain/qmoments.hpp"

#include <cmath>
#include <sstream>

namespace opchain {

namespace {

// rho(a(t)) v(t) for polynomial a (d x d) and v ((k d) x d).
MPoly poly_rho_apply(const MPoly& a, const MPoly& v, int k) {
    if (a.empty() || v.empty()) return {};
    MPoly out(a.size() + v.size() - 1);
    for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t q = 0; q < v.size(); ++q) {
            Mat term = rho_apply(a[p], v[q], k);
            if (out[p + q].size() == 0)
                out[p + q] = std::move(term);
            else
                out[p + q] += term;
        }
    return out;
}

// Segments of a nesting: seg_j = a_{K_{j-1}} Q_{pi_j}(...) a_{K_j - 1}, or the single a_{K_{j-1}}
// when pi_j is empty. `inner` evaluates the inner coefficient for one part.
template <class Value, class Inner, class Constant, class Mul>
std::vector<Value> nest_segments(const Decomposition& dec, std::span<const Mat> a, Inner inner, Constant constant,
                                 Mul mul) {
    std::vector<Value> segs;
    int K = 1;  // current outer element, 1-based; a_i is a[i-1]
    for (const Partition& part : dec.parts) {
        const int next = K + part.k() + 1;
        if (part.empty()) {
            segs.push_back(constant(a[K - 1]));
        } else {
            Value q = inner(part, a.subspan(K, part.k() - 1));
            segs.push_back(mul(mul(constant(a[K - 1]), q), constant(a[next - 2])));
        }
        K = next;
    }
    return segs;
}

void check_coeffs(const Partition& p, std::span<const Mat> coeffs, int d, const char* where) {
    if (static_cast<int>(coeffs.size()) != p.k() - 1) {
        std::ostringstream os;
        os << where << ": partition " << p.str() << " needs " << p.k() - 1 << " coefficients, got " << coeffs.size();
        throw DimensionError(os.str());
    }
    for (const Mat& a : coeffs)
        if (a.rows() != d || a.cols() != d) throw DimensionError(std::string(where) + ": coefficient is not d x d");
}

PiecewisePoly q_rec(const StepDriving& dr, const Partition& p, double t, std::span<const Mat> a) {
    const Decomposition dec = decompose(p);
    if (dec.kind == Decomposition::Kind::Concat) {
        PiecewisePoly acc;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < dec.parts.size(); ++i) {
            const Partition& part = dec.parts[i];
            PiecewisePoly sep;
            if (i > 0) sep = a_constant(dr, a[pos++]);  // the coefficient between consecutive factors
            PiecewisePoly q = q_rec(dr, part, t, a.subspan(pos, part.k() - 1));
            pos += part.k() - 1;
            acc = (i == 0) ? std::move(q) : acc * sep * q;
        }
        return acc;
    }

    const int J = dr.J();
    const int jt = grid_index(dr.grid, t);
    auto inner = [&](const Partition& part, std::span<const Mat> sub) { return q_rec(dr, part, t, sub); };
    auto constant = [&](const Mat& m) { return a_constant(dr, m); };
    auto mul = [](const PiecewisePoly& x, const PiecewisePoly& y) { return x * y; };
    std::vector<PiecewisePoly> segs = nest_segments<PiecewisePoly>(dec, a, inner, constant, mul);

    PiecewisePoly integrand(dr.grid, dr.a_dims());
    for (int j = 0; j < std::min(J, jt); ++j) {
        const GeneralizedLaw& law = dr.pieces[j];
        MPoly v = poly_rho_apply(segs.back().piece(j), MPoly{law.W}, law.k);
        for (std::size_t i = segs.size() - 1; i-- > 0;) {
            MPoly xv = poly_left(law.X, v);
            v = poly_rho_apply(segs[i].piece(j), xv, law.k);
        }
        integrand.set_piece(j, poly_left(law.W.adjoint(), v));
    }
    return integrate_tail(integrand, 0.0, t);
}

Mat lambda_rec(const GeneralizedLaw& sigma, const Partition& p, std::span<const Mat> a) {
    const Decomposition dec = decompose(p);
    if (dec.kind == Decomposition::Kind::Concat) {
        Mat acc;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < dec.parts.size(); ++i) {
            const Partition& part = dec.parts[i];
            if (i > 0) acc = acc * a[pos++];
            Mat q = lambda_rec(sigma, part, a.subspan(pos, part.k() - 1));
            pos += part.k() - 1;
            acc = (i == 0) ? std::move(q) : Mat(acc * q);
        }
        return acc;
    }
    auto inner = [&](const Partition& part, std::span<const Mat> sub) { return lambda_rec(sigma, part, sub); };
    auto constant = [](const Mat& m) { return m; };
    auto mul = [](const Mat& x, const Mat& y) -> Mat { return x * y; };
    std::vector<Mat> segs = nest_segments<Mat>(dec, a, inner, constant, mul);
    return moment(sigma, segs);
}

}  // namespace

QValue q_eval(const StepDriving& dr, const Partition& p, double t, std::span<const Mat> coeffs) {
    check_coeffs(p, coeffs, dr.d, "q_eval");
    if (p.empty() || !in_family(p, Family::NCge2))
        throw FamilyError("q_eval: partition " + p.str() + " is not in NC_{>=2}");
    const double tt[] = {t};
    StepDriving fine = dr.refined(tt);
    return QValue{p, t, q_rec(fine, p, t, coeffs)};
}

Mat mu_moment(const StepDriving& dr, double s, double t, std::span<const Mat> coeffs) {
    if (coeffs.empty()) throw DimensionError("mu_moment: need at least a0");
    const int k = static_cast<int>(coeffs.size()) - 1;
    if (k > kMaxMuOrder) {
        std::ostringstream os;
        os << "mu_moment: order " << k << " exceeds the budget " << kMaxMuOrder;
        throw BudgetError(os.str());
    }
    if (k == 0) return coeffs[0];
    if (!(0.0 <= s && s <= t)) throw DomainError("mu_moment: need 0 <= s <= t");
    const double tt[] = {s, t};
    StepDriving fine = dr.refined(tt);
    Mat acc = Mat::Zero(dr.d, dr.d);
    for_each_partition(k, Family::NCge2, [&](const Partition& p) {
        acc += coeffs[0] * q_rec(fine, p, t, coeffs.subspan(1, k - 1)).eval(s) * coeffs[k];
    });
    return acc;
}

Mat sigma_moment(const StepDriving& dr, double s, double t, std::span<const Mat> coeffs) {
    if (coeffs.empty()) throw DimensionError("sigma_moment: need at least a0");
    const int k = static_cast<int>(coeffs.size()) - 1;
    if (k + 2 > kMaxSigmaOrder) {
        std::ostringstream os;
        os << "sigma_moment: order " << k << " exceeds the budget " << kMaxSigmaOrder - 2;
        throw BudgetError(os.str());
    }
    if (!(0.0 <= s && s <= t)) throw DomainError("sigma_moment: need 0 <= s <= t");
    const double tt[] = {s, t};
    StepDriving fine = dr.refined(tt);
    Mat acc = Mat::Zero(dr.d, dr.d);
    for_each_partition(k + 2, Family::NCge2, [&](const Partition& p) {
        if (!p.joins(1, k + 2)) return;
        acc += q_rec(fine, p, t, coeffs).eval(s);
    });
    return acc;
}

Mat lambda_pi(const GeneralizedLaw& sigma, const Partition& p, std::span<const Mat> coeffs) {
    check_coeffs(p, coeffs, sigma.d, "lambda_pi");
    if (p.empty() || !in_family(p, Family::NCge2))
        throw FamilyError("lambda_pi: partition " + p.str() + " is not in NC_{>=2}");
    return lambda_rec(sigma, p, coeffs);
}

QGuard q_estimate_guard(const StepDriving& dr, const Partition& p, double t, double s, std::span<const Mat> coeffs) {
    QValue q = q_eval(dr, p, t, coeffs);
    QGuard g;
    g.lhs = op_norm(q.at(s));
    const int k = p.k(), nb = p.size();
    double prod = 1.0;
    for (const Mat& a : coeffs) prod *= op_norm(a);
    const double a_pi = alpha(p).convert_to<double>();
    const double mpow = (k - 2 * nb == 0) ? 1.0 : std::pow(dr.M(), k - 2 * nb);
    g.rhs = a_pi * std::pow(dr.C() * (t - s), nb) * mpow * prod;
    g.ok = g.lhs <= g.rhs * (1.0 + 1e-9);
    return g;
}

}  // namespace opchain
