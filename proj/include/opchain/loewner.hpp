#pragma once

#include <string>
#include <vector>

#include "opchain/driving.hpp"

namespace opchain {

enum class FlowMethod { RK4, Picard };

const char* to_string(FlowMethod m);
FlowMethod parse_flow_method(const std::string& s);

struct FlowOptions {
    FlowMethod method = FlowMethod::RK4;
    double tol = 1e-10;
    int max_doublings = 14;
    int picard_nodes = 24;
    int picard_max_iter = 600;
};

// One Picard sweep: the sup over the time nodes of ||W_m - W_{m-1}|| next to the a-priori bound
// C^{m+1} t^m / (m! eps^{2m+1}) and the bound actually used for stopping.
struct PicardRecord {
    int m = 0;
    double gap = 0.0;
    double paper_bound = 0.0;
    double certified_bound = 0.0;
};

struct FlowResult {
    double s = 0.0, t = 0.0;
    BlockMatrix z0;
    BlockMatrix value;
    FlowMethod method = FlowMethod::RK4;
    long steps = 0;
    double err = 0.0;
    double M = 0.0, C = 0.0, eps = 0.0;
    bool certified = true;  // false when Picard stopped on the observed gap instead of its bound
    std::vector<PicardRecord> picard;
};

// F_{s,t}(z), from -d/ds F_{s,t} = V(F_{s,t}, s), F_{t,t} = id.
FlowResult subordination(const StepDriving& dr, double s, double t, const BlockMatrix& z, const FlowOptions& opt = {});

struct ChainReport {
    double defect = 0.0;
    double tol = 0.0;
    double solver_err = 0.0;
    bool ok = false;
};

// || F_{s,u}(z) - F_{s,t}(F_{t,u}(z)) ||
ChainReport chain_check(const StepDriving& dr, double s, double t, double u, const BlockMatrix& z, double tol = 1e-7);

struct RadiusSample {
    BlockMatrix w;
    double u = -1.0;  // negative: use the largest admissible u
};

struct RadiusRow {
    double u = 0.0;
    double lhs = 0.0;  // ||F_{0,t}(w)^{-1}||
    double rhs = 0.0;  // 1 / (M + sqrt(2C(u - t)))
    double psd_margin = 0.0;  // min eigenvalue of Im F - Im w
    bool precondition = true;
    bool ok = true;
};

struct RadiusReport {
    std::vector<RadiusRow> rows;
    int violations = 0;
};

RadiusReport radius_certificate(const StepDriving& dr, double t, const std::vector<RadiusSample>& samples);

// dF/dt = -G_sigma(F), F(0) = z, by an adaptive Dormand-Prince integrator.
BlockMatrix semigroup_flow(const GeneralizedLaw& sigma, double t, const BlockMatrix& z, double tol = 1e-12);

// Lower Lipschitz constant 2^{-m} for F_{s,t} on the eps-half-plane, from a partition of [s,t] into
// m pieces on which ||sigma(1)|| stays below eps^2/2.
double injectivity_delta(const StepDriving& dr, double s, double t, double eps);

}  // namespace opchain
