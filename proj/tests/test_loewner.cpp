#include <doctest.h>

#include <cmath>

#include "opchain/gen.hpp"
#include "opchain/loewner.hpp"

using namespace opchain;

namespace {

// nu_t = C delta_M for all t, realized with one 1x1 block.
StepDriving slit(double C, double M, double T) {
    Mat x(1, 1), w(1, 1);
    x(0, 0) = M;
    w(0, 0) = std::sqrt(C);
    return StepDriving::constant(GeneralizedLaw(1, 1, x, w), T);
}

// The root with positive imaginary part.
cplx upper_sqrt(cplx w) {
    cplx r = std::sqrt(w);
    return r.imag() < 0 ? -r : r;
}

BlockMatrix random_upper(SplitMix64& rng, int d, double eps) {
    Mat a = random_hermitian(rng, d);
    Mat b = random_matrix(rng, d, d) * 0.5;
    Mat z = a + cplx(0.0, 1.0) * (eps * Mat::Identity(d, d) + b * b.adjoint());
    return BlockMatrix(z, Dims{1, 1, d});
}

}  // namespace

TEST_CASE("slit map in closed form") {
    const double C = 1.0, M = 0.5;
    const StepDriving dr = slit(C, M, 1.0);
    for (cplx zeta : {cplx(0, 3), cplx(1, 2), cplx(-2, 4)}) {
        const cplx want = M + upper_sqrt((zeta - M) * (zeta - M) - 2.0 * C);
        for (FlowMethod m : {FlowMethod::RK4, FlowMethod::Picard}) {
            FlowOptions opt;
            opt.method = m;
            const FlowResult r = subordination(dr, 0.0, 1.0, scalar_point(zeta, 1, 1), opt);
            CHECK(std::abs(r.value.data()(0, 0) - want) < 1e-9);
        }
    }
}

TEST_CASE("arcsine flow") {
    const StepDriving dr = slit(1.0, 0.0, 2.0);
    for (double t : {0.5, 1.0, 2.0}) {
        const FlowResult r = subordination(dr, 0.0, t, scalar_point(cplx(0, 2), 1, 1));
        CHECK(std::abs(r.value.data()(0, 0) - upper_sqrt(cplx(-4.0 - 2.0 * t, 0.0))) < 1e-9);
    }
}

TEST_CASE("a step driving composes its pieces") {
    // two slits with different tips: flow the later piece first
    Mat x1(1, 1), x2(1, 1), w(1, 1);
    x1(0, 0) = 0.5;
    x2(0, 0) = -1.0;
    w(0, 0) = 1.0;
    const StepDriving dr({0.0, 0.4, 1.0}, {GeneralizedLaw(1, 1, x1, w), GeneralizedLaw(1, 1, x2, w)});
    const cplx zeta(0.3, 1.5);
    const cplx mid = -1.0 + upper_sqrt((zeta + 1.0) * (zeta + 1.0) - 2.0 * 0.6);
    const cplx want = 0.5 + upper_sqrt((mid - 0.5) * (mid - 0.5) - 2.0 * 0.4);
    CHECK(std::abs(subordination(dr, 0.0, 1.0, scalar_point(zeta, 1, 1)).value.data()(0, 0) - want) < 1e-9);
}

TEST_CASE("chain law on random drivings") {
    SplitMix64 rng(101);
    for (int rep = 0; rep < 4; ++rep) {
        const StepDriving dr = random_driving(200 + rep, 2, 2, 3, 1.5);
        double s = 1.5 * rng.uniform(), t = 1.5 * rng.uniform(), u = 1.5 * rng.uniform();
        if (s > t) std::swap(s, t);
        if (t > u) std::swap(t, u);
        if (s > t) std::swap(s, t);
        const ChainReport r = chain_check(dr, s, t, u, random_upper(rng, 2, 0.7));
        CHECK(r.ok);
        CHECK(r.defect < 1e-8);
    }
}

TEST_CASE("the flow moves up by at most C(t-s)/eps") {
    SplitMix64 rng(111);
    const StepDriving dr = random_driving(112, 2, 3, 2, 1.0);
    for (int rep = 0; rep < 8; ++rep) {
        const BlockMatrix z = random_upper(rng, 2, 0.5 + rng.uniform());
        const double s = 0.5 * rng.uniform(), t = 0.5 + 0.5 * rng.uniform();
        const FlowResult r = subordination(dr, s, t, z);
        CHECK(min_eig_herm(imag_part(r.value.data()) - imag_part(z.data())) >= -1e-10);
        CHECK(op_norm(r.value.data() - z.data()) <= dr.C() * (t - s) / r.eps + 1e-10);
    }
}

TEST_CASE("rk4 and picard agree on a random driving") {
    SplitMix64 rng(121);
    const StepDriving dr = random_driving(122, 2, 2, 2, 1.0);
    const BlockMatrix z = random_upper(rng, 2, 1.0);
    FlowOptions pic;
    pic.method = FlowMethod::Picard;
    const FlowResult a = subordination(dr, 0.0, 1.0, z);
    const FlowResult b = subordination(dr, 0.0, 1.0, z, pic);
    CHECK(op_norm(a.value.data() - b.value.data()) < 1e-9);
}

TEST_CASE("constant driving matches the autonomous flow") {
    SplitMix64 rng(131);
    Mat x = random_hermitian(rng, 4);
    Mat w = random_matrix(rng, 4, 2) * 0.5;
    const GeneralizedLaw law(2, 2, x, w);
    const BlockMatrix z = random_upper(rng, 2, 0.8);
    const FlowResult r = subordination(StepDriving::constant(law, 1.0), 0.0, 0.7, z);
    CHECK(op_norm(semigroup_flow(law, 0.7, z) - r.value) < 1e-8);
}

TEST_CASE("inverse radius estimate") {
    const StepDriving dr = random_driving(141, 2, 2, 2, 1.0);
    SplitMix64 rng(142);
    std::vector<RadiusSample> samples;
    for (int i = 0; i < 6; ++i) {
        // small points near infinity: w = (big z)
        const BlockMatrix z = random_upper(rng, 2, 1.0);
        const double scale = 6.0 + 4.0 * rng.uniform();
        samples.push_back({BlockMatrix(z.data() * scale, z.dims())});
    }
    const RadiusReport rep = radius_certificate(dr, 0.3, samples);
    CHECK(rep.violations == 0);
    int active = 0;
    for (const RadiusRow& row : rep.rows) active += row.precondition;
    CHECK(active > 0);
}

TEST_CASE("lower Lipschitz constant") {
    const StepDriving dr = slit(1.0, 0.0, 1.0);
    CHECK(injectivity_delta(dr, 0.0, 1.0, 1.0) == 0.125);
    SplitMix64 rng(151);
    const double delta = injectivity_delta(dr, 0.0, 1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        const cplx a(4 * rng.uniform() - 2, 1 + rng.uniform()), b(4 * rng.uniform() - 2, 1 + rng.uniform());
        const cplx fa = upper_sqrt(a * a - 2.0), fb = upper_sqrt(b * b - 2.0);
        CHECK(std::abs(fa - fb) >= delta * std::abs(a - b));
    }
}

TEST_CASE("picard gaps stay under the certified bound") {
    const StepDriving dr = slit(1.0, 0.5, 1.0);
    FlowOptions opt;
    opt.method = FlowMethod::Picard;
    const FlowResult r = subordination(dr, 0.0, 1.0, scalar_point(cplx(0, 1), 1, 1), opt);
    REQUIRE(!r.picard.empty());
    for (const PicardRecord& p : r.picard) {
        CHECK(p.certified_bound >= p.paper_bound);
        CHECK(p.gap <= p.certified_bound * (1 + 1e-9));
    }
    CHECK(r.certified);
}

TEST_CASE("bad arguments") {
    const StepDriving dr = slit(1.0, 0.0, 1.0);
    CHECK_THROWS_AS(subordination(dr, 0.0, 1.0, scalar_point(cplx(1, 0), 1, 1)), DomainError);
    CHECK_THROWS_AS(subordination(dr, 0.6, 0.2, scalar_point(cplx(0, 1), 1, 1)), DomainError);
    CHECK_THROWS_AS(subordination(dr, 0.0, 2.0, scalar_point(cplx(0, 1), 1, 1)), DomainError);
    CHECK_THROWS_AS(subordination(dr, 0.0, 1.0, scalar_point(cplx(0, 1), 1, 2)), DimensionError);
    CHECK_THROWS_AS(parse_flow_method("euler"), std::invalid_argument);
}
