#include "opchain/clt.hpp"

#include <cmath>
#include <sstream>

#include "opchain/laws.hpp"

namespace opchain {

StepDriving arcsine_of(const StepDriving& dr) {
    std::vector<GeneralizedLaw> pieces;
    pieces.reserve(dr.pieces.size());
    for (const GeneralizedLaw& p : dr.pieces)
        pieces.emplace_back(p.d, p.k, Mat::Zero(p.X.rows(), p.X.cols()), p.W);
    return StepDriving(dr.grid, std::move(pieces));
}

namespace {

Mat repeat_diag(const Mat& w, int n) {
    Mat out = Mat::Zero(n * w.rows(), n * w.cols());
    for (int i = 0; i < n; ++i) out.block(i * w.rows(), i * w.cols(), w.rows(), w.cols()) = w;
    return out;
}

void check_eps(const BlockMatrix& z, double eps, const char* where) {
    if (!in_upper_halfplane(z, eps)) {
        std::ostringstream os;
        os << where << ": Im z must dominate eps = " << eps;
        throw DomainError(os.str());
    }
}

}  // namespace

BlockMatrix eta(const GeneralizedLaw& law, const BlockMatrix& b) {
    const int n = b.dims().n;
    const Mat iw = repeat_diag(law.W, n);
    return BlockMatrix(iw.adjoint() * embed_mat(b.data(), n, law.k, law.d) * iw, b.dims());
}

CltReport clt_report(const StepDriving& dr, const std::vector<double>& times, const std::vector<BlockMatrix>& zs,
                     double eps, const FlowOptions& opt) {
    if (!(eps > 0.0)) throw DomainError("clt_report: eps must be positive");
    const StepDriving as = arcsine_of(dr);
    CltReport rep;
    rep.eps = eps;
    rep.C1 = dr.C();
    rep.C2 = dr.C2();
    rep.M = dr.M();
    const double root = std::sqrt(rep.C1 * rep.C2);
    const double e2 = eps * eps;

    for (double t : times) {
        if (!(t > 0.0 && t <= dr.T())) throw DomainError("clt_report: times must lie in (0, T]");
        const double st = std::sqrt(t);
        for (std::size_t zi = 0; zi < zs.size(); ++zi) {
            const BlockMatrix& z = zs[zi];
            check_eps(z, eps, "clt_report");
            const BlockMatrix zt = cplx(st) * z;
            FlowResult fm = subordination(dr, 0.0, t, zt, opt);
            FlowResult fa = subordination(as, 0.0, t, zt, opt);

            CltRow row;
            row.t = t;
            row.z_index = static_cast<int>(zi);
            const Mat df = fm.value.data() - fa.value.data();
            row.lhs_f = op_norm(df) / st;
            const Mat gm = inverse(fm.value.data()), ga = inverse(fa.value.data());
            row.lhs_g = st * op_norm(gm - ga);

            row.rhs_clt1 = (1.0 + rep.C1 / (2.0 * e2)) * root / (e2 * st);
            row.rhs_clt2 = root / (e2 * e2 * st);
            row.rhs_coupling = rep.M / (e2 * st);

            // Both flows keep Im F >= t^{1/2} eps, so ||G|| <= 1/(t^{1/2} eps) and a perturbation dF of
            // F moves t^{1/2} G by at most dF / (t^{1/2} eps^2).
            const double ode = fm.err + fa.err;
            row.budget_f = 10.0 * ode / st;
            row.budget_g = 10.0 * ode / (st * e2);

            row.ok_clt1 = row.lhs_f <= row.rhs_clt1 + row.budget_f;
            row.ok_clt2 = row.lhs_g <= row.rhs_clt2 + row.budget_g;
            row.ok_coupling = row.lhs_g <= row.rhs_coupling + row.budget_g;
            rep.violations += !row.ok_clt1 + !row.ok_clt2 + !row.ok_coupling;
            rep.rows.push_back(row);
        }
    }
    return rep;
}

std::string clt_csv(const CltReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "t,LHS,RHS_CLT1,RHS_CLT2,RHS_coupling,LHS_G,z_index\n";
    for (const CltRow& r : rep.rows)
        os << r.t << ',' << r.lhs_f << ',' << r.rhs_clt1 << ',' << r.rhs_clt2 << ',' << r.rhs_coupling << ','
           << r.lhs_g << ',' << r.z_index << '\n';
    return os.str();
}

FieldGuardReport field_difference_guard(const StepDriving& dr, const std::vector<BlockMatrix>& zs, double eps) {
    FieldGuardReport rep;
    const double rhs = std::sqrt(dr.C() * dr.C2()) / (eps * eps);
    for (std::size_t zi = 0; zi < zs.size(); ++zi) {
        check_eps(zs[zi], eps, "field_difference_guard");
        const BlockMatrix zinv = inverse(zs[zi]);
        for (int j = 0; j < dr.J(); ++j) {
            const GeneralizedLaw& law = dr.pieces[j];
            const Mat diff = -cauchy_transform(law, zs[zi]).data() + eta(law, zinv).data();
            FieldGuardRow row;
            row.piece = j;
            row.z_index = static_cast<int>(zi);
            row.lhs = op_norm(diff);
            row.rhs = rhs;
            row.ok = row.lhs <= rhs * (1.0 + 1e-12) + 1e-14;
            if (!row.ok) ++rep.violations;
            rep.rows.push_back(row);
        }
    }
    return rep;
}

}  // namespace opchain
