#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "udgfl/baseline.hpp"
#include "udgfl/box_ptas.hpp"
#include "udgfl/chopping.hpp"
#include "udgfl/io.hpp"
#include "udgfl/portal_dp.hpp"
#include "udgfl/reduction.hpp"
#include "udgfl/rng.hpp"

// End-to-end orchestration: instance generation, the four solvers (exact
// oracle, primal-dual baseline, bounded-box PTAS, full quasi-PTAS chain),
// invariant audits over the run's own artifacts, and JSON reporting.

namespace udgfl {

struct RunConfig {
    std::string solver = "qptas";  // exact | baseline | boxptas | qptas
    double eps = 0.5;
    double epsPrime = 0.0;  // 0 -> eps / 16
    std::uint64_t seed = 1;

    // Generator.
    std::string family = "uniform";  // uniform | clustered | corridor
    int n = 60;
    double boxW = 6.0, boxH = 6.0;
    double facilityFrac = 0.3;
    int clusterCount = 3;
    double costLo = 0.2, costHi = 3.0;
    bool largestComponent = true;

    // Caps.
    double boxL = 0.0;  // declared box side for the boxptas solver; 0 = auto
    int oracleCap = 24;
    std::uint64_t vectorCap = 1000000;
    std::uint64_t netEnumCap = 200000;
    int gridTrials = 32;

    double eps_prime() const { return epsPrime > 0 ? epsPrime : eps / 16.0; }

    void validate() const {
        if (eps <= 0 || eps >= 1) throw std::invalid_argument("RunConfig: eps outside (0, 1)");
        if (epsPrime < 0 || epsPrime >= 1) throw std::invalid_argument("RunConfig: bad epsPrime");
        if (n <= 0) throw std::invalid_argument("RunConfig: n must be positive");
        if (oracleCap <= 0 || vectorCap == 0 || netEnumCap == 0 || gridTrials <= 0)
            throw std::invalid_argument("RunConfig: caps must be positive");
        if (solver != "exact" && solver != "baseline" && solver != "boxptas" &&
            solver != "qptas")
            throw std::invalid_argument("RunConfig: unknown solver '" + solver + "'");
        if (family != "uniform" && family != "clustered" && family != "corridor")
            throw std::invalid_argument("RunConfig: unknown family '" + family + "'");
    }
};

struct AuditResult {
    std::string name;
    bool pass = true;
    std::string witness;  // first failure, empty when passing
};

struct RunReport {
    FLSolution solution;
    std::vector<AuditResult> audits;
    Json json;

    bool all_audits_pass() const {
        for (const auto& a : audits)
            if (!a.pass) return false;
        return true;
    }
};

inline FLInstance generate_instance(const RunConfig& cfg) {
    cfg.validate();
    Rng rng = make_rng(cfg.seed, 17);
    std::vector<Point> pts;
    auto add = [&](double x, double y) {
        pts.push_back({static_cast<VertexId>(pts.size()), x, y});
    };
    if (cfg.family == "uniform") {
        for (int i = 0; i < cfg.n; ++i)
            add(rng_real(rng, 0.0, cfg.boxW), rng_real(rng, 0.0, cfg.boxH));
    } else if (cfg.family == "clustered") {
        std::vector<std::pair<double, double>> centers;
        for (int c = 0; c < std::max(1, cfg.clusterCount); ++c)
            centers.push_back({rng_real(rng, 0.0, cfg.boxW), rng_real(rng, 0.0, cfg.boxH)});
        for (int i = 0; i < cfg.n; ++i) {
            const auto& [cx, cy] = centers[i % centers.size()];
            const double x = std::clamp(cx + 0.5 * rng_normal(rng), 0.0, cfg.boxW);
            const double y = std::clamp(cy + 0.5 * rng_normal(rng), 0.0, cfg.boxH);
            add(x, y);
        }
    } else {  // corridor: long thin strip, denser along x
        const double height = std::min(cfg.boxH, 1.5);
        for (int i = 0; i < cfg.n; ++i)
            add(rng_real(rng, 0.0, cfg.boxW), rng_real(rng, 0.0, height));
    }

    UnitDiskGraph g = build_udg(pts);
    if (cfg.largestComponent && g.numComponents > 1) {
        std::vector<int> sizes(g.numComponents, 0);
        for (VertexId v = 0; v < g.n(); ++v) ++sizes[g.componentId[v]];
        const int keep = static_cast<int>(
            std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
        std::vector<Point> kept;
        for (VertexId v = 0; v < g.n(); ++v)
            if (g.componentId[v] == keep)
                kept.push_back({static_cast<VertexId>(kept.size()), pts[v].x, pts[v].y});
        g = build_udg(kept);
    }

    FLInstance inst;
    inst.graph = std::make_shared<UnitDiskGraph>(std::move(g));
    for (VertexId v = 0; v < inst.g().n(); ++v) {
        inst.clients.push_back(v);
        if (rng_real(rng) < cfg.facilityFrac)
            inst.facilities[v] = rng_real(rng, cfg.costLo, cfg.costHi);
    }
    if (inst.facilities.empty())  // at least one facility, deterministically
        inst.facilities[0] = rng_real(rng, cfg.costLo, cfg.costHi);
    inst.validate();
    return inst;
}

namespace detail {

inline void audit(std::vector<AuditResult>& out, const std::string& name, bool pass,
                  const std::string& witness = "") {
    for (AuditResult& a : out)
        if (a.name == name) {  // aggregate repeats; keep the first failure witness
            if (!pass && a.pass) {
                a.pass = false;
                a.witness = witness;
            }
            return;
        }
    out.push_back({name, pass, pass ? "" : witness});
}

inline void audit_solution(std::vector<AuditResult>& out, const FLInstance& inst,
                           const FLSolution& sol) {
    bool assigned = true;
    std::string witness;
    std::set<VertexId> open(sol.open.begin(), sol.open.end());
    for (VertexId c : inst.clients) {
        auto it = sol.assignment.find(c);
        if (it == sol.assignment.end() || !open.count(it->second.facility)) {
            assigned = false;
            witness = "client " + std::to_string(c);
            break;
        }
    }
    audit(out, "every client served by an open facility", assigned, witness);
    double conn = 0.0, opening = 0.0;
    for (const auto& [c, a] : sol.assignment) conn += a.routeCost;
    for (VertexId f : sol.open) opening += inst.opening_cost(f);
    audit(out, "cost identity open+conn=total",
          std::abs(opening + conn - sol.totalCost) <= 1e-6,
          "total " + std::to_string(sol.totalCost));
    bool routesDominate = true;
    for (const auto& [c, a] : sol.assignment) {
        const double d = multi_source_dist(inst.g(), {a.facility})[c];
        if (a.routeCost < d - 1e-9) {
            routesDominate = false;
            witness = "client " + std::to_string(c);
            break;
        }
    }
    audit(out, "route costs at least graph distance", routesDominate, witness);
}

// Portal-DP solve of one bounded sub-instance with graceful degradation:
// the table-size guard and discretization infeasibility fall back to the
// bounded-box solver, then to sampled nets, then to the baseline.
inline FLSolution solve_h_with_fallback(const SubInstanceH& h, const RunConfig& cfg, Rng& rng,
                                        Json& diag) {
    PortalDpConfig dpCfg;
    dpCfg.epsPrime = cfg.eps_prime();
    dpCfg.tableCap = cfg.vectorCap;
    try {
        HSolveResult r = solve_h(h, dpCfg);
        diag["method"] = "portal_dp";
        diag["dpRootCost"] = r.dpRootCost;
        diag["netSize"] = r.netSize;
        diag["treeNodes"] = r.treeNodes;
        diag["maxTableSize"] = r.maxTableSize;
        return r.solution;
    } catch (const std::runtime_error& e) {
        diag["portalDpError"] = e.what();
    }
    BoxPtasConfig boxCfg;
    boxCfg.gridTrials = cfg.gridTrials;
    boxCfg.netEnumCap = cfg.netEnumCap;
    try {
        BoxPtasResult r = solve_bounded(h.inst, cfg.eps, rng, boxCfg);
        diag["method"] = "boxptas";
        return r.solution;
    } catch (const std::runtime_error& e) {
        diag["boxPtasError"] = e.what();
    }
    boxCfg.sampleNets = true;
    try {
        BoxPtasResult r = solve_bounded(h.inst, cfg.eps, rng, boxCfg);
        diag["method"] = "boxptas_sampled";
        return r.solution;
    } catch (const std::runtime_error& e) {
        diag["sampledBoxError"] = e.what();
    }
    BaselineResult base = baseline_approx(h.inst, cfg.eps);
    diag["method"] = "baseline";
    return evaluate(h.inst, base.open);
}

inline FLSolution solve_qptas(const FLInstance& inst, const RunConfig& cfg, Rng& rng,
                              Json& stages, std::vector<AuditResult>& audits) {
    const double eps = cfg.eps;
    BaselineResult base = baseline_approx(inst, eps);
    stages["baseline"] = {{"open", base.open.size()}, {"alpha", base.alpha}};

    auto [iprime, ledger] = filter_clients(inst, base, eps);
    stages["filter"] = {{"kept", iprime.clients.size()}, {"ledgered", ledger.entries.size()}};
    audit(audits, "filter partitions the client set",
          iprime.clients.size() + ledger.entries.size() == inst.clients.size());

    std::vector<StructuredSubInstance> subs = partition_by_aspect(iprime, base, eps);
    Json subDiags = Json::array();
    std::vector<std::pair<const StructuredSubInstance*, FLSolution>> solved;
    const double smallN = 1.0 / (eps * eps);
    for (const StructuredSubInstance& sub : subs) {
        Json sd;
        sd["clients"] = sub.inst.clients.size();
        sd["facilities"] = sub.inst.facilities.size();
        sd["N"] = sub.N;
        audit(audits, "sub-instance aspect ratio within bound",
              sub.maxAvg <= sub.minAvg * sub.r * (1 + 1e-9) || subs.size() == 1,
              "N " + std::to_string(sub.N));
        if (sub.N > smallN) {
            LayerBundleResult lb = layer_and_bundle(sub, eps, rng);
            sd["route"] = "layered";
            sd["layers"] = lb.layerCount;
            sd["bundles"] = lb.bundleCount;
            sd["pieces"] = lb.instances.size();
            sd["openedRedCost"] = lb.openedRedCost;
            std::set<VertexId> open(lb.redOpened.begin(), lb.redOpened.end());
            Json pieces = Json::array();
            for (const SubInstanceH& h : lb.instances) {
                Json pd;
                pd["n"] = h.inst.g().n();
                pd["Gamma"] = h.Gamma;
                pd["recalibrations"] = h.recalibrations;
                audit(audits, "chopped piece diameter within budget",
                      h.recalibrations > 0 || h.Gamma <= 3.0 * h.B / (eps * eps) + 1e-9,
                      "Gamma " + std::to_string(h.Gamma));
                FLSolution hs = solve_h_with_fallback(h, cfg, rng, pd);
                for (VertexId f : hs.open) open.insert(h.induced.toHost[f]);
                pieces.push_back(std::move(pd));
            }
            sd["pieceDiags"] = std::move(pieces);
            solved.push_back({&sub, evaluate(sub.inst, {open.begin(), open.end()})});
        } else {
            sd["route"] = "bounded";
            SubInstanceH h;  // identity embedding of the whole sub-instance
            h.induced.graph = *sub.inst.graph;
            for (VertexId v = 0; v < sub.inst.g().n(); ++v) {
                h.induced.toHost.push_back(v);
                h.induced.toLocal[v] = v;
            }
            h.inst = sub.inst;
            Json pd;
            BoxPtasConfig boxCfg;
            boxCfg.gridTrials = cfg.gridTrials;
            boxCfg.netEnumCap = cfg.netEnumCap;
            FLSolution ss;
            try {
                ss = solve_bounded(sub.inst, eps, rng, boxCfg).solution;
                pd["method"] = "boxptas";
            } catch (const std::runtime_error& e) {
                pd["boxPtasError"] = e.what();
                boxCfg.sampleNets = true;
                try {
                    ss = solve_bounded(sub.inst, eps, rng, boxCfg).solution;
                    pd["method"] = "boxptas_sampled";
                } catch (const std::runtime_error& e2) {
                    pd["sampledBoxError"] = e2.what();
                    ss = evaluate(sub.inst, baseline_approx(sub.inst, eps).open);
                    pd["method"] = "baseline";
                }
            }
            sd["pieceDiags"] = Json::array({std::move(pd)});
            solved.push_back({&sub, std::move(ss)});
        }
        subDiags.push_back(std::move(sd));
    }
    stages["subInstances"] = std::move(subDiags);

    if (solved.empty()) {
        // Everything was ledgered: the anchors alone carry the solution.
        std::vector<VertexId> open(ledger.anchors.begin(), ledger.anchors.end());
        if (open.empty()) {
            for (VertexId f : inst.freeFacilities) open.push_back(f);
            if (open.empty() && !inst.clients.empty()) open.push_back(base.open.front());
        }
        if (open.empty()) return FLSolution{};
        return evaluate(inst, open);
    }
    return merge_solutions(solved, ledger, inst);
}

}  // namespace detail

inline RunReport run_pipeline(const RunConfig& cfg, const FLInstance& inst) {
    cfg.validate();
    inst.validate();
    Rng rng = make_rng(cfg.seed, 31);
    RunReport rep;
    rep.json["config"] = {{"solver", cfg.solver},   {"eps", cfg.eps},
                          {"epsPrime", cfg.eps_prime()}, {"seed", cfg.seed},
                          {"family", cfg.family},   {"n", cfg.n}};
    rep.json["instance"] = {{"n", inst.g().n()},
                            {"clients", inst.clients.size()},
                            {"facilities", inst.facilities.size()},
                            {"components", inst.g().numComponents}};
    Json stages;
    const auto t0 = std::chrono::steady_clock::now();

    if (inst.clients.empty()) {
        for (VertexId f : inst.freeFacilities) rep.solution.open.push_back(f);
        if (!rep.solution.open.empty()) rep.solution = evaluate(inst, rep.solution.open);
    } else if (cfg.solver == "exact") {
        rep.solution = exact_solve(inst, cfg.oracleCap);
    } else if (cfg.solver == "baseline") {
        BaselineResult base = baseline_approx(inst, cfg.eps);
        stages["baseline"] = {{"open", base.open.size()}, {"alpha", base.alpha}};
        rep.solution = evaluate(inst, base.open);
    } else if (cfg.solver == "boxptas") {
        BoxPtasConfig boxCfg;
        boxCfg.L = cfg.boxL;
        boxCfg.gridTrials = cfg.gridTrials;
        boxCfg.netEnumCap = cfg.netEnumCap;
        BoxPtasResult r = solve_bounded(inst, cfg.eps, rng, boxCfg);
        stages["box"] = {{"netsTried", r.netsTried},
                         {"netSizeCap", r.netSizeCap},
                         {"bestNetSize", r.bestNetSize},
                         {"sampled", r.sampled}};
        rep.solution = r.solution;
    } else {
        rep.solution = detail::solve_qptas(inst, cfg, rng, stages, rep.audits);
    }

    if (!inst.clients.empty()) detail::audit_solution(rep.audits, inst, rep.solution);

    // Oracle comparison whenever the instance is small enough.
    const std::size_t nonFree = inst.facilities.size() - inst.freeFacilities.size();
    if (!inst.clients.empty() && nonFree <= static_cast<std::size_t>(cfg.oracleCap) &&
        nonFree <= 16) {
        const double opt = exact_solve(inst, cfg.oracleCap).totalCost;
        rep.json["oracle"] = {{"opt", opt},
                              {"ratio", opt > 0 ? rep.solution.totalCost / opt : 1.0}};
        detail::audit(rep.audits, "solution cost at least the oracle optimum",
                      rep.solution.totalCost >= opt - 1e-9,
                      "cost " + std::to_string(rep.solution.totalCost));
    }

    rep.json["stages"] = std::move(stages);
    rep.json["solution"] = {{"open", rep.solution.open},
                            {"openCost", rep.solution.openCost},
                            {"connCost", rep.solution.connCost},
                            {"totalCost", rep.solution.totalCost}};
    Json audits = Json::array();
    for (const auto& a : rep.audits)
        audits.push_back({{"name", a.name}, {"pass", a.pass}, {"witness", a.witness}});
    rep.json["audits"] = std::move(audits);
    rep.json["auditsPass"] = rep.all_audits_pass();
    const auto t1 = std::chrono::steady_clock::now();
    rep.json["timings"] = {
        {"totalMs",
         std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}};
    return rep;
}

inline RunReport run_pipeline(const RunConfig& cfg) {
    return run_pipeline(cfg, generate_instance(cfg));
}

// Report JSON plus a one-line CSV ratio table for plotting.
inline void write_report(const RunReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << rep.json.dump(2) << '\n';
    const std::string csv = path + ".csv";
    std::ofstream c(csv);
    c << "solver,n,totalCost,opt,ratio,auditsPass\n";
    c << rep.json["config"]["solver"].get<std::string>() << ','
      << rep.json["instance"]["n"] << ',' << rep.solution.totalCost << ',';
    if (rep.json.contains("oracle"))
        c << rep.json["oracle"]["opt"] << ',' << rep.json["oracle"]["ratio"];
    else
        c << ',';
    c << ',' << (rep.all_audits_pass() ? 1 : 0) << '\n';
}

}  // namespace udgfl
