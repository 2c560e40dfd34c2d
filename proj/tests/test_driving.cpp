#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>

#include "opchain/driving.hpp"
#include "opchain/gen.hpp"

using namespace opchain;

namespace {

MPoly random_poly(SplitMix64& rng, int n, int degree) {
    MPoly p;
    for (int q = 0; q <= degree; ++q) p.push_back(random_matrix(rng, n, n));
    return p;
}

// Entrywise Gauss-Legendre quadrature of h over [a, b], split at the grid points of h.
Mat quad(const PiecewisePoly& h, double a, double b) {
    const int n = h.dims()[0];
    Mat acc = Mat::Zero(n, n);
    const auto& g = h.grid();
    for (std::size_t j = 0; j + 1 < g.size(); ++j) {
        const double lo = std::max(a, g[j]), hi = std::min(b, g[j + 1]);
        if (!(lo < hi)) continue;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                auto re = [&](double s) { return h.eval_in(int(j), s)(r, c).real(); };
                auto im = [&](double s) { return h.eval_in(int(j), s)(r, c).imag(); };
                using G = boost::math::quadrature::gauss<double, 10>;
                acc(r, c) += cplx(G::integrate(re, lo, hi), G::integrate(im, lo, hi));
            }
    }
    return acc;
}

}  // namespace

TEST_CASE("polynomial arithmetic commutes with evaluation") {
    SplitMix64 rng(1);
    const MPoly a = random_poly(rng, 3, 2), b = random_poly(rng, 3, 3);
    for (double tau : {0.0, 0.3, -1.2, 2.0}) {
        const Mat ea = poly_eval(a, tau, 3, 3), eb = poly_eval(b, tau, 3, 3);
        CHECK(max_abs_diff(poly_eval(poly_mul(a, b), tau, 3, 3), ea * eb) < 1e-12);
        CHECK(max_abs_diff(poly_eval(poly_add(a, b), tau, 3, 3), ea + eb) < 1e-12);
        CHECK(max_abs_diff(poly_eval(poly_sub(a, b), tau, 3, 3), ea - eb) < 1e-12);
        CHECK(max_abs_diff(poly_eval(poly_adjoint(a), tau, 3, 3), ea.adjoint()) < 1e-12);
    }
}

TEST_CASE("tail integrals against quadrature") {
    SplitMix64 rng(2);
    const std::vector<double> grid{0.0, 0.4, 1.0, 1.7};
    PiecewisePoly h(grid, {2, 2, 2});
    for (int j = 0; j < 3; ++j) h.set_piece(j, random_poly(rng, 2, 3));
    const PiecewisePoly tail = integrate_tail(h, 0.0, 1.7);
    for (double t : {0.0, 0.1, 0.4, 0.77, 1.0, 1.5, 1.7}) CHECK(max_abs_diff(tail.eval(t), quad(h, t, 1.7)) < 1e-12);

    // cut off at t_hi = 1.0 and held constant below t_lo = 0.4
    const PiecewisePoly cut = integrate_tail(h, 0.4, 1.0);
    for (double t : {0.4, 0.6, 0.99}) CHECK(max_abs_diff(cut.eval(t), quad(h, t, 1.0)) < 1e-12);
    CHECK(max_abs_diff(cut.eval(0.1), quad(h, 0.4, 1.0)) < 1e-12);
    CHECK(cut.eval(1.3).norm() == 0.0);
    CHECK_THROWS_AS(integrate_tail(h, 0.5, 1.0), DomainError);
}

TEST_CASE("driving constants") {
    Mat x1 = Mat::Zero(2, 2), x2 = Mat::Zero(2, 2);
    x1(0, 0) = 0.5;
    x1(1, 1) = -1.5;
    x2(0, 1) = x2(1, 0) = 1.0;
    Mat w1(2, 1), w2(2, 1);
    w1 << 1.0, 1.0;
    w2 << 0.5, 0.0;
    const StepDriving dr({0.0, 1.0, 3.0}, {GeneralizedLaw(1, 2, x1, w1), GeneralizedLaw(1, 2, x2, w2)});
    CHECK(dr.M() == doctest::Approx(1.5));
    CHECK(dr.C() == doctest::Approx(2.0));
    CHECK(dr.C2() == doctest::Approx(2.25 * 2.0));
    CHECK(dr.interval_of(0.5) == 0);
    CHECK(dr.interval_of(1.0) == 1);
    CHECK(dr.interval_of(3.0) == 1);

    const double cut[] = {2.0, 0.25};
    const StepDriving fine = dr.refined(cut);
    CHECK(fine.grid == std::vector<double>{0.0, 0.25, 1.0, 2.0, 3.0});
    CHECK(max_abs_diff(fine.pieces[1].X, x1) == 0.0);
    CHECK(max_abs_diff(fine.pieces[3].X, x2) == 0.0);
    CHECK(fine.M() == dr.M());
    CHECK(fine.C() == dr.C());
}

TEST_CASE("integrate_nu sandwiches with W") {
    const StepDriving dr = random_driving(3, 2, 2, 2, 1.0);
    SplitMix64 rng(4);
    PiecewisePoly f(dr.grid, dr.realized_dims());
    for (int j = 0; j < dr.J(); ++j) f.set_piece(j, random_poly(rng, 4, 1));
    const PiecewisePoly got = integrate_nu(dr, f, 0.0, 1.0);
    PiecewisePoly h(dr.grid, dr.a_dims());
    for (int j = 0; j < dr.J(); ++j) {
        MPoly p;
        for (const Mat& c : f.piece(j)) p.push_back(dr.pieces[j].W.adjoint() * c * dr.pieces[j].W);
        h.set_piece(j, p);
    }
    for (double t : {0.0, 0.3, 0.5, 0.9}) CHECK(max_abs_diff(got.eval(t), quad(h, t, 1.0)) < 1e-12);
}

TEST_CASE("indicators and lifts") {
    const StepDriving dr = random_driving(5, 2, 3, 3, 3.0);
    const PiecewisePoly chi = indicator(dr, 1.0, 3.0);
    CHECK(chi.eval(0.5).norm() == 0.0);
    CHECK(max_abs_diff(chi.eval(2.5), Mat::Identity(6, 6)) == 0.0);
    const PiecewisePoly tx = lift(dr, a_time(dr));
    CHECK(max_abs_diff(tx.eval(1.5), 1.5 * Mat::Identity(6, 6)) < 1e-15);
    CHECK(max_abs_diff(indicator_x(dr, 0.0, 1.0).eval(0.2), dr.pieces[0].X) == 0.0);
    CHECK_THROWS_AS(indicator(dr, 0.5, 1.0), DomainError);
}

TEST_CASE("the Herglotz field is minus the Cauchy transform") {
    const StepDriving dr = random_driving(6, 2, 2, 2, 1.0);
    const BlockMatrix z = scalar_point(cplx(0.2, 1.0), 2, 2);
    const BlockMatrix v = herglotz_field(dr, z, 1);
    CHECK(max_abs_diff(v.data(), -cauchy_transform(dr.pieces[1], z).data()) == 0.0);
    // -G maps the upper half-plane to itself
    CHECK(min_eig_herm(imag_part(v.data())) >= -1e-14);
}

TEST_CASE("invalid drivings") {
    const GeneralizedLaw law(1, 1, Mat::Identity(1, 1), Mat::Identity(1, 1));
    CHECK_THROWS_AS(StepDriving({0.0, 1.0}, {}), DimensionError);
    CHECK_THROWS_AS(StepDriving({0.5, 1.0}, {law}), DimensionError);
    CHECK_THROWS_AS(StepDriving({0.0, 1.0, 1.0}, {law, law}), DimensionError);
    CHECK_THROWS_AS(grid_index({0.0, 1.0}, 0.5), DomainError);
    CHECK(grid_index({0.0, 0.1 + 0.2, 1.0}, 0.3) == 1);
}
