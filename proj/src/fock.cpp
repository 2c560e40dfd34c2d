#include "opchain/fock.hpp"

#include <cmath>
#include <sstream>

namespace opchain {

namespace {

// Folds all vacuum terms into one.
FockVector compact(FockVector v) {
    FockVector out;
    Mat vac;
    for (FockTerm& t : v.terms) {
        if (t.depth() == 0) {
            if (vac.size() == 0)
                vac = std::move(t.amp);
            else
                vac += t.amp;
        } else {
            out.terms.push_back(std::move(t));
        }
    }
    if (vac.size() != 0) out.terms.insert(out.terms.begin(), FockTerm{{}, std::move(vac)});
    return out;
}

}  // namespace

int FockVector::depth() const {
    int m = 0;
    for (const FockTerm& t : terms) m = std::max(m, t.depth());
    return m;
}

FockVector operator+(const FockVector& a, const FockVector& b) {
    FockVector out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return compact(std::move(out));
}

FockVector operator*(cplx s, const FockVector& a) {
    FockVector out = a;
    for (FockTerm& t : out.terms) t.amp *= s;
    return out;
}

FockVector operator-(const FockVector& a, const FockVector& b) { return a + cplx(-1.0) * b; }

FockVector operator*(const FockVector& a, const Mat& b) {
    FockVector out = a;
    for (FockTerm& t : out.terms) t.amp = t.amp * b;
    return out;
}

FockSpace::FockSpace(const StepDriving& dr, int N, std::span<const double> extra_times)
    : dr_(dr.refined(extra_times)), N_(N) {
    if (N < 0) throw DimensionError("FockSpace: negative truncation depth");
}

void FockSpace::check_one_particle(const OneParticle& f, const char* where) const {
    if (f.grid() != dr_.grid || f.dims() != dr_.realized_dims()) {
        std::ostringstream os;
        os << where << ": one-particle element does not live on this space's grid";
        throw DimensionError(os.str());
    }
}

void FockSpace::check_a_valued(const PiecewisePoly& g, const char* where) const {
    if (g.grid() != dr_.grid || g.dims() != dr_.a_dims()) {
        std::ostringstream os;
        os << where << ": A-valued function does not live on this space's grid";
        throw DimensionError(os.str());
    }
}

FockVector FockSpace::vacuum(const Mat& a) const {
    if (a.rows() != d() || a.cols() != d()) throw DimensionError("vacuum: amplitude must be d x d");
    return FockVector{{FockTerm{{}, a}}};
}

PiecewisePoly FockSpace::i_nu(const OneParticle& f, const OneParticle& g) const {
    return integrate_nu(dr_, f.adjoint() * g, 0.0, dr_.T());
}

Mat FockSpace::inner(const FockVector& v, const FockVector& w) const {
    Mat acc = Mat::Zero(d(), d());
    for (const FockTerm& p : v.terms)
        for (const FockTerm& q : w.terms) {
            if (p.depth() != q.depth()) continue;
            const int k = p.depth();
            if (k == 0) {
                acc += p.amp.adjoint() * q.amp;
                continue;
            }
            // innermost pair first: the top factors
            PiecewisePoly h = i_nu(p.f[k - 1], q.f[k - 1]);
            for (int i = k - 2; i >= 0; --i) h = i_nu(p.f[i], lift(dr_, h) * q.f[i]);
            acc += p.amp.adjoint() * h.eval(0.0) * q.amp;
        }
    return acc;
}

FockVector FockSpace::create(const OneParticle& f, const FockVector& v) const {
    check_one_particle(f, "create");
    FockVector out;
    for (const FockTerm& t : v.terms) {
        if (t.depth() + 1 > N_) {
            std::ostringstream os;
            os << "create: depth " << t.depth() + 1 << " exceeds the truncation depth " << N_;
            throw TruncationError(os.str());
        }
        FockTerm n = t;
        n.f.push_back(f);
        out.terms.push_back(std::move(n));
    }
    return out;
}

FockVector FockSpace::annihilate(const OneParticle& f, const FockVector& v) const {
    check_one_particle(f, "annihilate");
    FockVector out;
    for (const FockTerm& t : v.terms) {
        const int k = t.depth();
        if (k == 0) continue;
        PiecewisePoly h = i_nu(f, t.f[k - 1]);
        if (k == 1) {
            out.terms.push_back(FockTerm{{}, h.eval(0.0) * t.amp});
        } else {
            FockTerm n{std::vector<OneParticle>(t.f.begin(), t.f.end() - 1), t.amp};
            n.f.back() = lift(dr_, h) * n.f.back();
            out.terms.push_back(std::move(n));
        }
    }
    return compact(std::move(out));
}

FockVector FockSpace::multiply(const OneParticle& f, const FockVector& v) const {
    check_one_particle(f, "multiply");
    FockVector out;
    for (const FockTerm& t : v.terms) {
        if (t.depth() == 0) continue;
        FockTerm n = t;
        n.f.back() = f * n.f.back();
        out.terms.push_back(std::move(n));
    }
    return out;
}

FockVector FockSpace::mult0(const PiecewisePoly& g, const FockVector& v) const {
    check_a_valued(g, "mult0");
    const OneParticle lifted = lift(dr_, g);
    FockVector out;
    for (const FockTerm& t : v.terms) {
        FockTerm n = t;
        if (t.depth() == 0)
            n.amp = g.eval(0.0) * t.amp;
        else
            n.f.back() = lifted * n.f.back();
        out.terms.push_back(std::move(n));
    }
    return out;
}

FockVector FockSpace::mult0(const Mat& a, const FockVector& v) const { return mult0(a_constant(dr_, a), v); }

FockVector FockSpace::vacuum_part(const FockVector& v) const {
    FockVector out;
    for (const FockTerm& t : v.terms)
        if (t.depth() == 0) out.terms.push_back(t);
    return compact(std::move(out));
}

FockVector FockSpace::apply(const Process& p, const FockVector& v) const {
    if (!(p.s < p.t)) throw DomainError("process: need s < t");
    const OneParticle c = chi(p.s, p.t);
    FockVector out = annihilate(c, v);
    FockVector cr = create(c, v);
    out.terms.insert(out.terms.end(), cr.terms.begin(), cr.terms.end());
    if (p.kind == Process::Kind::Y) {
        FockVector m = multiply(chi_x(p.s, p.t), v);
        out.terms.insert(out.terms.end(), m.terms.begin(), m.terms.end());
    }
    return compact(std::move(out));
}

FockVector FockSpace::apply_word(std::span<const WordItem> word, const FockVector& v) const {
    FockVector cur = v;
    for (std::size_t i = word.size(); i-- > 0;) {
        if (const Process* p = std::get_if<Process>(&word[i]))
            cur = apply(*p, cur);
        else
            cur = mult0(std::get<Mat>(word[i]), cur);
    }
    return cur;
}

Mat FockSpace::expectation(std::span<const WordItem> word) const {
    return inner(vacuum(), apply_word(word, vacuum()));
}

Mat expectation_of_word(const StepDriving& dr, std::span<const WordItem> word) {
    std::vector<double> times;
    int n = 0;
    for (const WordItem& w : word)
        if (const Process* p = std::get_if<Process>(&w)) {
            times.push_back(p->s);
            times.push_back(p->t);
            ++n;
        }
    FockSpace space(dr, n, times);
    return space.expectation(word);
}

std::function<Mat(std::span<const Mat>)> fock_moment_oracle(const StepDriving& dr, double s, double t) {
    return [dr, s, t](std::span<const Mat> coeffs) {
        std::vector<WordItem> word;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (i > 0) word.emplace_back(Process{Process::Kind::Y, s, t});
            word.emplace_back(coeffs[i]);
        }
        return expectation_of_word(dr, word);
    };
}

CouplingReport coupling_defect(const FockSpace& space, double s, double t, std::span<const FockVector> vectors,
                               double tol) {
    CouplingReport rep;
    const double M = space.driving().M();
    const OneParticle cx = space.chi_x(s, t);
    for (const FockVector& v : vectors) {
        const FockVector u = space.multiply(cx, v);
        CouplingRow row;
        row.lhs = std::sqrt(op_norm(space.inner(u, u)));
        row.rhs = M * std::sqrt(op_norm(space.inner(v, v)));
        row.ok = row.lhs <= row.rhs + tol;
        if (!row.ok) ++rep.violations;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace opchain
