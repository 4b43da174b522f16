#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "isoslope/report.hpp"

using namespace isoslope;

int main(int argc, char** argv) {
    CLI::App app{"isoslope: slope filtrations, descent and splitting certificates "
                 "for Frobenius modules over p-adic series rings"};
    app.require_subcommand(1);

    std::string file, report_out;
    int t_prec = 0;
    int jobs = 1;

    const std::vector<std::string> cmds = {"slopes",    "ascend",          "descend",
                                           "dwork",     "split",           "factorize",
                                           "descend-morphism", "descend-omega",
                                           "unipotent", "verify"};
    for (const auto& c : cmds) {
        auto* sub = app.add_subcommand(c);
        sub->add_option("file", file, "crystal file")->required();
        sub->add_option("--t-prec", t_prec, "t-adic working precision (dwork)");
        sub->add_option("--report", report_out, "write the report to this path");
    }
    auto* corpus = app.add_subcommand("corpus", "run verify over a directory of crystal files");
    corpus->add_option("dir", file, "directory of .crystal files")->required();
    corpus->add_option("--jobs", jobs, "parallel workers");
    corpus->add_option("--report", report_out, "write the aggregate report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (const char* cap = std::getenv("ISOSLOPE_MAX_ITER")) {
        int v = std::atoi(cap);
        if (v > 0) solver_config().max_iter_override = v;
    }

    auto emit = [&](const std::string& text) {
        if (!report_out.empty()) {
            std::ofstream f(report_out, std::ios::binary);
            f << text;
        }
        std::cout << text;
    };

    try {
        std::string cmd = app.get_subcommands()[0]->get_name();
        if (cmd == "corpus") {
            CorpusResult cr = run_corpus(file, jobs);
            emit(cr.render());
            return cr.ok ? 0 : 2;
        }
        std::ifstream f(file, std::ios::binary);
        if (!f) {
            std::cerr << "cannot open " << file << "\n";
            return 1;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        std::string bytes = ss.str();
        CrystalFile cf = parse_crystal(bytes);
        if (t_prec <= 0) t_prec = 2 + cf.prof.ring.p * cf.prof.ring.p;
        Report rep = run_command(cmd, cf, bytes, t_prec);
        emit(rep.render());
        return rep.ok ? 0 : 2;
    } catch (const Error& err) {
        std::cerr << error_code_name(err.code()) << ": " << err.what() << "\n";
        return err.code() == ErrorCode::ParseError ? 1 : 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
