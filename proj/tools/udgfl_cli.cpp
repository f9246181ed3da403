#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "udgfl/pipeline.hpp"

using namespace udgfl;

int main(int argc, char** argv) {
    CLI::App app{"facility location on unit disk graphs"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string input, out, reportPath;

    CLI::App* solve = app.add_subcommand("solve", "solve an instance file and emit a report");
    solve->add_option("--input", input, "instance file (text or .json)")->required();
    solve->add_option("--solver", cfg.solver, "exact | baseline | boxptas | qptas");
    solve->add_option("--eps", cfg.eps, "error parameter in (0, 1)");
    solve->add_option("--eps-prime", cfg.epsPrime, "portal spacing parameter (0 = eps/16)");
    solve->add_option("--seed", cfg.seed, "rng seed");
    solve->add_option("--L", cfg.boxL, "declared bounding-box side for boxptas (0 = auto)");
    solve->add_option("--grid-trials", cfg.gridTrials, "random grid offsets per net");
    solve->add_option("--oracle-cap", cfg.oracleCap, "max facilities for exact enumeration");
    solve->add_option("--vector-cap", cfg.vectorCap, "portal table size cap");
    solve->add_option("--net-enum-cap", cfg.netEnumCap, "candidate net enumeration cap");
    solve->add_option("--out", out, "report path (stdout when omitted)");

    CLI::App* gen = app.add_subcommand("gen", "generate a seeded instance file");
    gen->add_option("--family", cfg.family, "uniform | clustered | corridor");
    gen->add_option("--n", cfg.n, "point count")->required();
    gen->add_option("--seed", cfg.seed, "rng seed");
    gen->add_option("--box-w", cfg.boxW, "box width");
    gen->add_option("--box-h", cfg.boxH, "box height");
    gen->add_option("--facility-frac", cfg.facilityFrac, "facility probability per point");
    gen->add_option("--cost-lo", cfg.costLo, "min opening cost");
    gen->add_option("--cost-hi", cfg.costHi, "max opening cost");
    gen->add_option("--clusters", cfg.clusterCount, "blob count for the clustered family");
    gen->add_option("--out", out, "instance path")->required();

    CLI::App* audit = app.add_subcommand("audit", "re-check the audit section of a report");
    audit->add_option("--report", reportPath, "report produced by solve")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            FLInstance inst = read_instance(input);
            RunReport rep = run_pipeline(cfg, inst);
            if (out.empty())
                std::cout << rep.json.dump(2) << std::endl;
            else
                write_report(rep, out);
            return rep.all_audits_pass() ? 0 : 2;
        }
        if (gen->parsed()) {
            write_instance(generate_instance(cfg), out);
            return 0;
        }
        std::ifstream in(reportPath);
        if (!in) throw std::runtime_error("cannot open report: " + reportPath);
        Json rep;
        in >> rep;
        bool pass = rep.at("auditsPass").get<bool>();
        for (const auto& a : rep.at("audits"))
            if (!a.at("pass").get<bool>()) {
                pass = false;
                std::cerr << "audit failed: " << a.at("name").get<std::string>() << " ("
                          << a.at("witness").get<std::string>() << ")\n";
            }
        std::cout << (pass ? "all audits pass" : "audit failures present") << std::endl;
        return pass ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
