#include "opchain/suites.hpp"

#include <cmath>
#include <sstream>

#include "opchain/qmoments.hpp"

namespace opchain {

int SuiteReport::failures() const {
    int n = 0;
    for (const Check& c : checks) n += !c.ok;
    return n;
}

void SuiteReport::add(std::string name, double lhs, double rhs) {
    checks.push_back(Check{std::move(name), lhs, rhs, lhs <= rhs});
}

OneParticle random_one_particle(const FockSpace& space, SplitMix64& rng, int degree, double t_lo, double t_hi) {
    const StepDriving& dr = space.driving();
    const int jl = grid_index(dr.grid, t_lo), jh = grid_index(dr.grid, t_hi);
    OneParticle f(dr.grid, dr.realized_dims());
    for (int j = jl; j < jh; ++j) {
        const int n = dr.realized_dims()[j];
        MPoly p;
        for (int q = 0; q <= degree; ++q) p.push_back(0.5 * random_matrix(rng, n, n));
        f.set_piece(j, std::move(p));
    }
    return f;
}

FockVector random_fock_vector(const FockSpace& space, SplitMix64& rng) {
    const int d = space.d();
    const double T = space.driving().T();
    auto f = [&] { return random_one_particle(space, rng, 1, 0.0, T); };
    FockVector v = space.vacuum(random_matrix(rng, d, d));
    v = v + space.create(f(), space.vacuum(random_matrix(rng, d, d)));
    const OneParticle f2 = f(), f3 = f();
    v = v + space.create(f2, space.create(f3, space.vacuum(random_matrix(rng, d, d))));
    return v;
}

namespace {

double qnorm(const FockSpace& sp, const FockVector& v) { return op_norm(sp.inner(v, v)); }

// lhs v == rhs v, tested on the squared norm of the difference.
void relation(SuiteReport& rep, const std::string& name, const FockSpace& sp, const FockVector& lhs,
              const FockVector& rhs, double tol) {
    const double scale = std::max(1.0, qnorm(sp, lhs) + qnorm(sp, rhs));
    rep.add(name, qnorm(sp, lhs - rhs), tol * scale);
}

void vanishes(SuiteReport& rep, const std::string& name, const FockSpace& sp, const FockVector& w,
              const FockVector& v, double tol) {
    rep.add(name, qnorm(sp, w), tol * std::max(1.0, qnorm(sp, v)));
}

std::vector<WordItem> random_word(SplitMix64& rng, int d, double s, double t, int processes) {
    std::vector<WordItem> w;
    w.emplace_back(random_matrix(rng, d, d));
    for (int i = 0; i < processes; ++i) {
        w.emplace_back(Process{Process::Kind::Y, s, t});
        w.emplace_back(random_matrix(rng, d, d));
    }
    return w;
}

std::string tag(const char* what, double s, double t, int k = -1) {
    std::ostringstream os;
    os << what << " (" << s << "," << t << ")";
    if (k >= 0) os << " order " << k;
    return os.str();
}

}  // namespace

SuiteReport fock_suite(const StepDriving& dr, int max_order, std::uint64_t seed, double tol) {
    if (max_order < 0 || max_order > kMaxMuOrder) {
        std::ostringstream os;
        os << "fock_suite: max order must lie in [0, " << kMaxMuOrder << "]";
        throw BudgetError(os.str());
    }
    SuiteReport rep;
    SplitMix64 rng(seed);
    const int d = dr.d;
    const double T = dr.T(), t1 = T / 2.0;
    const double times[] = {t1};
    const FockSpace sp(dr, std::max(max_order, 8), times);

    // moments of Y against the partition sums
    const std::pair<double, double> ranges[] = {{0.0, T}, {0.0, t1}, {t1, T}};
    for (auto [s, t] : ranges)
        for (int k = 0; k <= max_order; ++k) {
            std::vector<Mat> a;
            for (int i = 0; i <= k; ++i) a.push_back(random_matrix(rng, d, d));
            const Mat ref = mu_moment(sp.driving(), s, t, a);
            const Mat got = fock_moment_oracle(sp.driving(), s, t)(a);
            rep.add(tag("moment", s, t, k), max_abs_diff(ref, got), tol * std::max(1.0, op_norm(ref)));
        }

    rep.add("<xi, xi> = 1", max_abs_diff(sp.inner(sp.vacuum(), sp.vacuum()), Mat::Identity(d, d)), tol);

    for (int rep_i = 0; rep_i < 4; ++rep_i) {
        const FockVector v = random_fock_vector(sp, rng), w = random_fock_vector(sp, rng);
        const OneParticle f = random_one_particle(sp, rng, 1, 0.0, T);
        const OneParticle g = random_one_particle(sp, rng, 1, 0.0, T);
        const std::string n = " #" + std::to_string(rep_i);

        // adjoint pairs
        const Mat l1 = sp.inner(sp.create(f, v), w), r1 = sp.inner(v, sp.annihilate(f, w));
        rep.add("create/annihilate adjoint" + n, max_abs_diff(l1, r1), tol * std::max(1.0, op_norm(l1)));
        const OneParticle h = f + f.adjoint();
        const Mat l2 = sp.inner(sp.multiply(h, v), w), r2 = sp.inner(v, sp.multiply(h, w));
        rep.add("multiply self-adjoint" + n, max_abs_diff(l2, r2), tol * std::max(1.0, op_norm(l2)));

        // product relations
        relation(rep, "m(f)m(g) = m(fg)" + n, sp, sp.multiply(f, sp.multiply(g, v)), sp.multiply(f * g, v), tol);
        relation(rep, "m(f)l(g) = l(fg)" + n, sp, sp.multiply(f, sp.create(g, v)), sp.create(f * g, v), tol);
        relation(rep, "l(f)*m(g) = l(g*f)*" + n, sp, sp.annihilate(f, sp.multiply(g, v)),
                 sp.annihilate(g.adjoint() * f, v), tol);
        const PiecewisePoly ifg = sp.i_nu(f, g);
        const FockVector proj = sp.vacuum_part(v);
        relation(rep, "l(f)*l(g) = I0(f*g)P + m(I(f*g))" + n, sp, sp.annihilate(f, sp.create(g, v)),
                 sp.mult0(ifg, proj) + sp.multiply(sp.lift_a(ifg), v), tol);
        const Mat a = random_matrix(rng, d, d);
        relation(rep, "m0(a) xi = xi a" + n, sp, sp.mult0(a, sp.vacuum()), sp.vacuum() * a, tol);

        // disjoint supports: f early, g late
        const OneParticle fe = random_one_particle(sp, rng, 1, 0.0, t1);
        const OneParticle gl = random_one_particle(sp, rng, 1, t1, T);
        vanishes(rep, "m(f)m(g) v = 0" + n, sp, sp.multiply(fe, sp.multiply(gl, v)), v, tol);
        vanishes(rep, "m(g)m(f) v = 0" + n, sp, sp.multiply(gl, sp.multiply(fe, v)), v, tol);
        vanishes(rep, "m(f)l(g) v = 0" + n, sp, sp.multiply(fe, sp.create(gl, v)), v, tol);
        vanishes(rep, "m(g)l(f) v = 0" + n, sp, sp.multiply(gl, sp.create(fe, v)), v, tol);
        vanishes(rep, "l(f)*m(g) v = 0" + n, sp, sp.annihilate(fe, sp.multiply(gl, v)), v, tol);
        vanishes(rep, "l(g)*m(f) v = 0" + n, sp, sp.annihilate(gl, sp.multiply(fe, v)), v, tol);
        vanishes(rep, "l(f)*l(g) v = 0" + n, sp, sp.annihilate(fe, sp.create(gl, v)), v, tol);
        vanishes(rep, "l(g)*l(f) v = 0" + n, sp, sp.annihilate(gl, sp.create(fe, v)), v, tol);
        vanishes(rep, "l(f)l(g) v = 0" + n, sp, sp.create(fe, sp.create(gl, v)), v, tol);
        vanishes(rep, "l(f)m(g) v = 0" + n, sp, sp.create(fe, sp.multiply(gl, v)), v, tol);
        vanishes(rep, "m(g)l(f)* v = 0" + n, sp, sp.multiply(gl, sp.annihilate(fe, v)), v, tol);

        // Gram positivity of a small family
        std::vector<FockVector> fam = {v, w, sp.create(f, w), sp.annihilate(g, v)};
        const int m = static_cast<int>(fam.size());
        Mat gram(m * d, m * d);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) gram.block(i * d, j * d, d, d) = sp.inner(fam[i], fam[j]);
        const Mat herm = (gram + gram.adjoint()) / 2.0;
        rep.add("Gram PSD" + n, -min_eig_herm(herm), tol * std::max(1.0, op_norm(herm)));

        // additivity of Y
        const FockVector sum = sp.apply(Process{Process::Kind::Y, 0.0, t1}, v) + sp.apply(Process{Process::Kind::Y, t1, T}, v);
        relation(rep, "Y(0,t1) + Y(t1,T) = Y(0,T)" + n, sp, sum, sp.apply(Process{Process::Kind::Y, 0.0, T}, v), tol);
    }

    // monotone independence: the later interval sits in the middle
    for (int i = 0; i < 5; ++i) {
        const auto b1 = random_word(rng, d, 0.0, t1, 1 + i % 2);
        const auto b2 = random_word(rng, d, t1, T, 1 + (i + 1) % 3);
        const auto b3 = random_word(rng, d, 0.0, t1, 1 + (i / 2) % 2);
        std::vector<WordItem> whole(b1);
        whole.insert(whole.end(), b2.begin(), b2.end());
        whole.insert(whole.end(), b3.begin(), b3.end());
        std::vector<WordItem> fact(b1);
        fact.emplace_back(expectation_of_word(sp.driving(), b2));
        fact.insert(fact.end(), b3.begin(), b3.end());
        const Mat lhs = expectation_of_word(sp.driving(), whole);
        const Mat rhs = expectation_of_word(sp.driving(), fact);
        rep.add("monotone independence #" + std::to_string(i), max_abs_diff(lhs, rhs),
                tol * std::max(1.0, op_norm(lhs)));
    }

    // coupling: ||(Y - Z) v|| <= M ||v|| as quadratic forms
    std::vector<FockVector> vs;
    for (int i = 0; i < 20; ++i) vs.push_back(random_fock_vector(sp, rng));
    for (auto [s, t] : ranges) {
        const CouplingReport cr = coupling_defect(sp, s, t, vs, 0.0);
        for (std::size_t i = 0; i < cr.rows.size(); ++i)
            rep.add(tag("coupling", s, t) + " #" + std::to_string(i), cr.rows[i].lhs,
                    cr.rows[i].rhs + tol * std::max(1.0, cr.rows[i].rhs));
    }
    return rep;
}

}  // namespace opchain
