#pragma once

#include <string>
#include <vector>

#include "opchain/driving.hpp"
#include "opchain/loewner.hpp"

namespace opchain {

// Same grid and W's, every X set to zero.
StepDriving arcsine_of(const StepDriving& dr);

// Rescaled difference at one (t, z). The F-based quantity is compared against the first bound, the
// resolvent quantity t^{1/2}(G_mu - G_as)(t^{1/2} z) against the other two.
struct CltRow {
    double t = 0.0;
    int z_index = 0;
    double lhs_f = 0.0;
    double lhs_g = 0.0;
    double rhs_clt1 = 0.0;
    double rhs_clt2 = 0.0;
    double rhs_coupling = 0.0;
    double budget_f = 0.0;  // ODE error allowance added to the F-based bound
    double budget_g = 0.0;
    bool ok_clt1 = true, ok_clt2 = true, ok_coupling = true;
};

struct CltReport {
    double eps = 0.0;
    double C1 = 0.0, C2 = 0.0, M = 0.0;
    std::vector<CltRow> rows;
    int violations = 0;
};

CltReport clt_report(const StepDriving& dr, const std::vector<double>& times, const std::vector<BlockMatrix>& zs,
                     double eps, const FlowOptions& opt = {});

std::string clt_csv(const CltReport& rep);

struct FieldGuardRow {
    int piece = 0;
    int z_index = 0;
    double lhs = 0.0;  // ||-G_{sigma_j}(z) + eta_j(z^{-1})||
    double rhs = 0.0;  // (C1 C2)^{1/2} / eps^2
    bool ok = true;
};

struct FieldGuardReport {
    std::vector<FieldGuardRow> rows;
    int violations = 0;
};

// eta_j(b) = (I (x) W_j)* rho(b) (I (x) W_j), the X-free part of sigma_j.
BlockMatrix eta(const GeneralizedLaw& law, const BlockMatrix& b);

FieldGuardReport field_difference_guard(const StepDriving& dr, const std::vector<BlockMatrix>& zs, double eps);

}  // namespace opchain
