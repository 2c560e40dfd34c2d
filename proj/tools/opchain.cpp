#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "opchain/clt.hpp"
#include "opchain/fock.hpp"
#include "opchain/gen.hpp"
#include "opchain/io.hpp"
#include "opchain/loewner.hpp"
#include "opchain/ncpart.hpp"
#include "opchain/qmoments.hpp"
#include "opchain/suites.hpp"

using namespace opchain;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitParse = 2;

// JSON config: top-level keys are global options, nested objects are subcommand sections.
class ConfigJSON : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::stringstream ss;
        ss << input.rdbuf();
        json j;
        try {
            j = parse_json_text(ss.str());
        } catch (const InputError& e) {
            throw CLI::ParseError(std::string("config: ") + e.what(), kExitParse);
        }
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

    static void flatten(const json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
        if (!j.is_object()) throw CLI::ParseError("config: expected an object", kExitParse);
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_object()) {
                auto p = parents;
                p.push_back(it.key());
                flatten(*it, p, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = it.key();
            if (it->is_array())
                for (const json& e : *it) item.inputs.push_back(scalar(e));
            else
                item.inputs.push_back(scalar(*it));
            out.push_back(std::move(item));
        }
    }
};

struct Global {
    std::string out;
    std::uint64_t seed = 0;
    double tol = -1.0;  // negative: per-command default
    int jobs = 1;

    double tol_or(double fallback) const { return tol > 0.0 ? tol : fallback; }
};

// Writes to <out>/<name> when --out is set, otherwise to stdout.
void emit(const Global& g, const std::string& name, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::filesystem::create_directories(g.out);
    write_text((std::filesystem::path(g.out) / name).string(), text);
}

json check_json(const Check& c) {
    return json{{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"margin", c.margin()}, {"ok", c.ok}};
}

// Scalar k = 1 pieces compose slit maps: F = M_j + sqrt((zeta - M_j)^2 - 2 C_j len), branch with Im F > 0.
bool scalar_closed_form(const StepDriving& dr, double s, double t, cplx zeta, cplx& out) {
    for (const auto& p : dr.pieces)
        if (p.d != 1 || p.k != 1) return false;
    const double times[] = {s, t};
    const StepDriving fine = dr.refined(times);
    const int js = grid_index(fine.grid, s), jt = grid_index(fine.grid, t);
    cplx w = zeta;
    for (int j = jt - 1; j >= js; --j) {
        const cplx m = fine.pieces[j].X(0, 0);
        const double c = std::norm(fine.pieces[j].W(0, 0));
        const double len = fine.grid[j + 1] - fine.grid[j];
        const cplx r = std::sqrt((w - m) * (w - m) - 2.0 * c * len);
        w = (m + r).imag() >= (m - r).imag() ? m + r : m - r;
    }
    out = w;
    return true;
}

std::vector<Mat> word_coefficients(const std::string& word, const std::map<std::string, Mat>& named, int d) {
    std::vector<std::string> tokens;
    std::stringstream ss(word);
    for (std::string tok; std::getline(ss, tok, ',');) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        tokens.push_back(tok);
    }
    std::vector<Mat> coeffs;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const bool want_x = i % 2 == 1;
        if (want_x) {
            if (tokens[i] != "X") throw InputError("expected X between coefficients", "word token " + std::to_string(i));
            continue;
        }
        if (tokens[i] == "I") {
            coeffs.push_back(Mat::Identity(d, d));
            continue;
        }
        auto it = named.find(tokens[i]);
        if (it == named.end()) throw InputError("unknown coefficient '" + tokens[i] + "'", "word token " + std::to_string(i));
        if (it->second.rows() != d || it->second.cols() != d)
            throw InputError("coefficient '" + tokens[i] + "' is not d x d", "word token " + std::to_string(i));
        coeffs.push_back(it->second);
    }
    if (tokens.empty() || tokens.size() % 2 == 0) throw InputError("word must read a0,X,a1,...,X,ak", "word");
    return coeffs;
}

Family parse_family(const std::string& s) {
    if (s == "nc") return Family::NC;
    if (s == "ncge2") return Family::NCge2;
    if (s == "ncpair") return Family::NCpair;
    throw InputError("unknown family '" + s + "' (nc, ncge2, ncpair)", "--family");
}

std::vector<BlockMatrix> clt_points(const StepDriving& dr, double eps, std::uint64_t seed) {
    const int d = dr.d;
    std::vector<BlockMatrix> zs;
    for (cplx zeta : {cplx(0.0, eps), cplx(1.0, eps), cplx(-0.5, 2.0 * eps)}) zs.push_back(scalar_point(zeta, 1, d));
    SplitMix64 rng(seed);
    Mat h = random_hermitian(rng, d);
    h /= std::max(1.0, op_norm(h));
    zs.emplace_back(h + cplx(0.0, eps) * Mat::Identity(d, d), Dims{1, 1, d});
    return zs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-valued chordal Loewner chains: flows, moments, Fock space checks, CLT reports"};
    app.config_formatter(std::make_shared<ConfigJSON>());
    app.set_config("--config", "", "JSON file with option values");
    app.require_subcommand(1);

    Global g;
    app.add_option("--out", g.out, "Output directory (default: stdout)");
    app.add_option("--seed", g.seed, "Seed for every random object");
    app.add_option("--tol", g.tol, "Tolerance override");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);

    // flow
    std::string driving_path, z_path, method = "rk4";
    double s = 0.0, t = -1.0;
    std::vector<double> zeta_parts;
    auto* flow = app.add_subcommand("flow", "F_{s,t}(z) by the Loewner ODE");
    flow->add_option("--driving", driving_path)->required();
    flow->add_option("--s", s);
    flow->add_option("--t", t, "Default: T");
    flow->add_option("--z", z_path, "Matrix file for z (n*d x n*d)");
    flow->add_option("--zeta", zeta_parts, "Scalar point re,im (used when --z is absent)")->delimiter(',')->expected(2);
    flow->add_option("--method", method)->check(CLI::IsMember({"rk4", "picard"}));

    // moments
    std::string word, coeff_path;
    auto* moments = app.add_subcommand("moments", "mu_{s,t}(a0 X a1 ... X ak) by partitions and by the Fock space");
    moments->add_option("--driving", driving_path)->required();
    moments->add_option("--s", s);
    moments->add_option("--t", t, "Default: T");
    moments->add_option("--word", word, "e.g. a0,X,a1,X,a2")->required();
    moments->add_option("--coeffs", coeff_path, "JSON object of named d x d matrices; I is built in");

    // fock-verify
    int max_order = 6;
    auto* fockv = app.add_subcommand("fock-verify", "Fock space relation, moment and independence checks");
    fockv->add_option("--driving", driving_path)->required();
    fockv->add_option("--max-order", max_order)->check(CLI::Range(0, kMaxMuOrder));

    // clt-report
    std::vector<double> times;
    double eps = 1.0;
    auto* cltr = app.add_subcommand("clt-report", "CLT inequalities along a list of times");
    cltr->add_option("--driving", driving_path)->required();
    cltr->add_option("--times", times)->delimiter(',')->required();
    cltr->add_option("--eps", eps)->check(CLI::PositiveNumber);

    // nc-tools
    std::string alpha_of, ext_of, family = "nc";
    int count_k = -1, enum_k = -1, free_n = -1;
    std::vector<double> kappa;
    auto* nct = app.add_subcommand("nc-tools", "Non-crossing partition utilities");
    nct->add_option("--alpha", alpha_of, "alpha of a partition such as {1,4}{2,3}");
    nct->add_option("--extensions", ext_of, "alpha via linear extensions");
    nct->add_option("--count", count_k, "count partitions of {1..k}");
    nct->add_option("--enumerate", enum_k, "list partitions of {1..k}");
    nct->add_option("--family", family)->check(CLI::IsMember({"nc", "ncge2", "ncpair"}));
    nct->add_option("--free-moment", free_n, "moment of order n from free cumulants");
    nct->add_option("--kappa", kappa, "kappa_1,kappa_2,...")->delimiter(',');

    // gen
    int gd = 2, gk = 2, gJ = 2;
    double gT = 1.0;
    auto* gen = app.add_subcommand("gen", "Seeded random driving");
    gen->add_option("--d", gd);
    gen->add_option("--k", gk);
    gen->add_option("--pieces", gJ);
    gen->add_option("--T", gT);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (*flow) {
            const StepDriving dr = load_driving(driving_path);
            if (t < 0.0) t = dr.T();
            BlockMatrix z;
            if (!z_path.empty()) {
                const Mat m = load_matrix(z_path);
                if (m.rows() != m.cols() || m.rows() % dr.d != 0) throw InputError("z must be n*d x n*d", z_path);
                z = BlockMatrix(m, Dims{int(m.rows() / dr.d), 1, dr.d});
            } else {
                const cplx zeta = zeta_parts.size() == 2 ? cplx(zeta_parts[0], zeta_parts[1]) : cplx(0.0, 1.0);
                z = scalar_point(zeta, 1, dr.d);
            }
            FlowOptions opt;
            opt.method = parse_flow_method(method);
            opt.tol = g.tol_or(opt.tol);
            const FlowResult r = subordination(dr, s, t, z, opt);
            json out{{"s", s},
                     {"t", t},
                     {"method", to_string(r.method)},
                     {"value", matrix_to_json(r.value.data())},
                     {"error_estimate", r.err},
                     {"steps", r.steps},
                     {"certified", r.certified}};
            if (!r.picard.empty()) {
                json rows = json::array();
                for (const PicardRecord& p : r.picard)
                    rows.push_back({{"m", p.m}, {"gap", p.gap}, {"bound", p.paper_bound}, {"certified_bound", p.certified_bound}});
                out["picard"] = rows;
            }
            int code = kExitOk;
            cplx exact;
            if (z.data().rows() == 1 && scalar_closed_form(dr, s, t, z.data()(0, 0), exact)) {
                const double err = std::abs(r.value.data()(0, 0) - exact);
                const Check c{"closed form", err, 1e-8, err <= 1e-8};
                out["closed_form"] = {{"re", exact.real()}, {"im", exact.imag()}};
                out["checks"] = json::array({check_json(c)});
                if (!c.ok) code = kExitCheck;
            }
            emit(g, "flow.json", out.dump(2));
            return code;
        }

        if (*moments) {
            const StepDriving dr = load_driving(driving_path);
            if (t < 0.0) t = dr.T();
            std::map<std::string, Mat> named;
            if (!coeff_path.empty()) named = load_named_matrices(coeff_path);
            const std::vector<Mat> a = word_coefficients(word, named, dr.d);
            const Mat nc = mu_moment(dr, s, t, a);
            const Mat fk = fock_moment_oracle(dr, s, t)(a);
            const double diff = max_abs_diff(nc, fk);
            const double tol = g.tol_or(1e-10) * std::max(1.0, op_norm(nc));
            std::ostringstream csv;
            csv.precision(17);
            csv << "word,path,row,col,re,im\n";
            for (auto [name, m] : {std::pair<const char*, const Mat*>{"nc", &nc}, {"fock", &fk}})
                for (Eigen::Index i = 0; i < m->rows(); ++i)
                    for (Eigen::Index j = 0; j < m->cols(); ++j)
                        csv << '"' << word << "\"," << name << ',' << i << ',' << j << ',' << (*m)(i, j).real() << ','
                            << (*m)(i, j).imag() << '\n';
            emit(g, "moments.csv", csv.str());
            if (diff > tol) {
                std::cerr << "check failed: partition and Fock moments differ by " << diff << " (tolerance " << tol
                          << ")\n";
                return kExitCheck;
            }
            return kExitOk;
        }

        if (*fockv) {
            const StepDriving dr = load_driving(driving_path);
            const SuiteReport rep = fock_suite(dr, max_order, g.seed, g.tol_or(1e-10));
            json checks = json::array();
            for (const Check& c : rep.checks) checks.push_back(check_json(c));
            json out{{"max_order", max_order}, {"seed", g.seed}, {"failures", rep.failures()}, {"checks", checks}};
            emit(g, "fock-verify.json", out.dump(2));
            for (const Check& c : rep.checks)
                if (!c.ok) std::cerr << "check failed: " << c.name << " (lhs " << c.lhs << ", rhs " << c.rhs << ")\n";
            return rep.failures() == 0 ? kExitOk : kExitCheck;
        }

        if (*cltr) {
            const StepDriving dr = load_driving(driving_path);
            const auto zs = clt_points(dr, eps, g.seed);
            FlowOptions opt;
            opt.tol = g.tol_or(opt.tol);
            // one report per time; rows are merged in input order so the output does not depend on --jobs
            std::vector<CltReport> parts(times.size());
            std::vector<std::exception_ptr> errors(times.size());
            auto work = [&](std::size_t first, std::size_t stride) {
                for (std::size_t i = first; i < times.size(); i += stride) {
                    try {
                        parts[i] = clt_report(dr, {times[i]}, zs, eps, opt);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            };
            const std::size_t nthreads = std::min<std::size_t>(std::max(1, g.jobs), std::max<std::size_t>(1, times.size()));
            std::vector<std::thread> pool;
            for (std::size_t w = 1; w < nthreads; ++w) pool.emplace_back(work, w, nthreads);
            work(0, nthreads);
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);

            CltReport rep;
            rep.eps = eps;
            rep.C1 = dr.C();
            rep.C2 = dr.C2();
            rep.M = dr.M();
            for (const CltReport& p : parts) {
                rep.rows.insert(rep.rows.end(), p.rows.begin(), p.rows.end());
                rep.violations += p.violations;
            }
            const FieldGuardReport guard = field_difference_guard(dr, zs, eps);

            json checks = json::array();
            for (const CltRow& r : rep.rows) {
                std::ostringstream at;
                at << " t=" << r.t << " z#" << r.z_index;
                checks.push_back(check_json({"CLT1" + at.str(), r.lhs_f, r.rhs_clt1 + r.budget_f, r.ok_clt1}));
                checks.push_back(check_json({"CLT2" + at.str(), r.lhs_g, r.rhs_clt2 + r.budget_g, r.ok_clt2}));
                checks.push_back(check_json({"coupling" + at.str(), r.lhs_g, r.rhs_coupling + r.budget_g, r.ok_coupling}));
            }
            for (const FieldGuardRow& r : guard.rows) {
                std::ostringstream name;
                name << "field guard piece " << r.piece << " z#" << r.z_index;
                checks.push_back(check_json({name.str(), r.lhs, r.rhs, r.ok}));
            }
            const int failures = rep.violations + guard.violations;
            json out{{"eps", eps}, {"C1", rep.C1}, {"C2", rep.C2}, {"M", rep.M}, {"failures", failures}, {"checks", checks}};
            emit(g, "report.json", out.dump(2));
            if (!g.out.empty()) emit(g, "clt.csv", clt_csv(rep));
            return failures == 0 ? kExitOk : kExitCheck;
        }

        if (*nct) {
            const Family fam = parse_family(family);
            bool did = false;
            if (!alpha_of.empty()) {
                std::cout << to_string(alpha(parse_partition(alpha_of))) << '\n';
                did = true;
            }
            if (!ext_of.empty()) {
                std::cout << to_string(alpha_by_extensions(parse_partition(ext_of))) << '\n';
                did = true;
            }
            if (count_k >= 0) {
                long n = 0;
                for_each_partition(count_k, fam, [&](const Partition&) { ++n; });
                std::cout << n << '\n';
                did = true;
            }
            if (enum_k >= 0) {
                for (const Partition& p : enumerate(enum_k, fam)) std::cout << p.str() << '\n';
                did = true;
            }
            if (free_n >= 0) {
                std::cout << free_moment_from_cumulants(kappa, free_n) << '\n';
                did = true;
            }
            if (!did) throw InputError("nc-tools needs one of --alpha, --extensions, --count, --enumerate, --free-moment", "arguments");
            return kExitOk;
        }

        if (*gen) {
            const StepDriving dr = random_driving(g.seed, gd, gk, gJ, gT);
            emit(g, "driving.json", driving_to_json(dr).dump(2) + "\n");
            return kExitOk;
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitParse;
    } catch (const ParseError& e) {
        std::cerr << "parse error at position " << e.position << ": " << e.what() << '\n';
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return kExitCheck;
    }
    return kExitOk;
}
