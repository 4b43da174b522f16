#include "isoslope/report.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace isoslope {

std::string fnv1a_digest(const std::string& bytes) {
    unsigned long long h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", h);
    return buf;
}

std::string Report::render(bool with_walltime) const {
    std::ostringstream out;
    out << "command: " << command << "\n";
    out << "input: " << digest << "\n";
    out << "outcome: " << (ok ? "ok" : "diagnostic") << "\n";
    for (const auto& [k, v] : payload) out << k << ": " << v << "\n";
    if (with_walltime) out << "walltime-ms: " << walltime_ms << "\n";
    return out.str();
}

namespace {

std::string join_rats(const std::vector<Rat>& rs) {
    std::string out;
    for (size_t i = 0; i < rs.size(); ++i) {
        if (i) out += ", ";
        out += rs[i].str();
    }
    return out;
}

std::string join_vec(const SeriesVec& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i].str();
    }
    return out;
}

std::string witness_str(const std::optional<OvcWitness>& w) {
    if (!w) return "none";
    std::string s = "a=" + w->a.str() + " b=" + w->b.str();
    if (w->window_limited) s += " window-limited";
    return s;
}

void add_filtration(Report& rep, const Filtration& fil, bool descending) {
    for (size_t i = 0; i < fil.stages.size(); ++i) {
        const auto& st = fil.stages[i];
        std::string pre = "stage" + std::to_string(i);
        rep.add(pre + ".slope", st.slope.str());
        rep.add(pre + ".lambda", st.lambda.str());
        rep.add(pre + ".basis", join_vec(st.basis));
        rep.add(pre + ".residual-val", std::to_string(st.residual_val));
        rep.add(pre + ".certified-precision", std::to_string(st.certified_precision));
        rep.add(pre + ".provenance", st.prov.str());
        std::string wits;
        for (size_t j = 0; j < st.witnesses.size(); ++j) {
            if (j) wits += "; ";
            wits += witness_str(st.witnesses[j]);
        }
        rep.add(pre + ".ovc", wits);
        if (st.gamma_only) rep.add(pre + ".gamma-only", "true");
        if (descending && st.bound_checked) {
            rep.add(pre + ".bound-c", st.bound_c.str());
            rep.add(pre + ".bound-d", st.bound_d.str());
        }
    }
}

SeriesVec standard_vector(const PrecisionProfile& prof, int rank, int idx) {
    SeriesVec v(rank, Series::zero(prof, RingClaim::gamma_con));
    v[idx] = Series::constant(prof, Coeff::one(prof.ring));
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw Error(ErrorCode::ParseError, "expected true/false, got '" + s + "'");
}

std::vector<Rat> parse_rat_list(const std::string& s) {
    std::vector<Rat> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        size_t a = tok.find_first_not_of(" \t");
        size_t b = tok.find_last_not_of(" \t");
        tok = tok.substr(a, b - a + 1);
        size_t slash = tok.find('/');
        if (slash == std::string::npos)
            out.push_back(Rat(std::stoll(tok)));
        else
            out.push_back(Rat(std::stoll(tok.substr(0, slash)), std::stoll(tok.substr(slash + 1))));
    }
    return out;
}

void dispatch(Report& rep, const std::string& cmd, const CrystalFile& cf, int t_prec) {
    FModule M = cf.to_module();
    const int N = M.profile().ring.N;

    if (cmd == "slopes") {
        SlopeVector sv = newton_slopes(M);
        rep.add("slopes", join_rats(sv.slopes));
        return;
    }
    if (cmd == "ascend") {
        Filtration fil = ascending_filtration(M);
        rep.add("stages", std::to_string(fil.stages.size()));
        add_filtration(rep, fil, false);
        return;
    }
    if (cmd == "descend") {
        Filtration fil = descending_filtration(M);
        rep.add("stages", std::to_string(fil.stages.size()));
        add_filtration(rep, fil, true);
        return;
    }
    if (cmd == "dwork") {
        DworkResult dw = dwork_trick(M, t_prec);
        rep.add("t-prec", std::to_string(dw.t_prec));
        rep.add("max-denominator", std::to_string(dw.max_denom));
        int rv = dw.verify(M);
        rep.add("residual-val", std::to_string(rv));
        for (int i = 0; i < M.rank; ++i)
            for (int j = 0; j < M.rank; ++j)
                rep.add("u[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                        dw.entry_str(i, j, M.profile()));
        if (rv < N) rep.ok = false;
        return;
    }
    if (cmd == "split") {
        SplitResult sr = split_extension(M, standard_vector(M.profile(), M.rank, 0));
        rep.add("sub-slopes", join_rats(sr.sub_slopes.slopes));
        rep.add("quot-slopes", join_rats(sr.quot_slopes.slopes));
        rep.add("split", sr.split ? "true" : "false");
        rep.add("d", sr.d.str());
        rep.add("ovc", witness_str(sr.witness));
        if (sr.isogeny_power) rep.add("isogeny-power", std::to_string(sr.isogeny_power));
        if (!sr.split) {
            rep.ok = false;
            rep.add("diagnostic", sr.diagnostic);
        } else {
            rep.add("complement", join_vec(sr.complement));
        }
        return;
    }
    if (cmd == "factorize") {
        if (M.rank != 1)
            throw Error(ErrorCode::ParseError, "factorize expects a rank-1 file holding the series");
        EfFactorization ef = ef_factorize(M.A[0][0]);
        rep.add("e", ef.e.str());
        rep.add("f", ef.f.str());
        return;
    }
    if (cmd == "descend-morphism") {
        if (!cf.nabla)
            throw Error(ErrorCode::ParseError, "descend-morphism needs a nabla: block");
        MorphismCandidate mc;
        mc.source = M;
        mc.target = M;
        NablaStructure nb{*cf.nabla};
        TwoSlopeDescent td = descend_morphism_twoslope(mc, nb);
        rep.add("d", td.d.str());
        rep.add("b", td.b.str());
        rep.add("ovc-d", witness_str(td.witness_d));
        rep.add("ovc-b", witness_str(td.witness_b));
        if (!td.ok) {
            rep.ok = false;
            rep.add("diagnostic", td.diagnostic);
        }
        return;
    }
    if (cmd == "descend-omega") {
        if (!cf.vec || !cf.lambda)
            throw Error(ErrorCode::ParseError,
                        "descend-omega needs a vector: block and a lambda header");
        OmegaDescentReport od = descend_morphism_omega(M, *cf.vec, *cf.lambda);
        for (const auto& st : od.steps)
            rep.add("step." + st.name, std::string(st.ok ? "ok" : "failed") + " (" + st.detail + ")");
        if (od.isogeny_power) rep.add("isogeny-power", std::to_string(od.isogeny_power));
        if (od.ok)
            rep.add("descended", join_vec(od.descended));
        else
            rep.ok = false;
        return;
    }
    if (cmd == "unipotent") {
        UnipotenceResult ur = unipotence_test(M);
        rep.add("slopes", join_rats(ur.slopes.slopes));
        rep.add("unipotent", ur.unipotent ? "true" : "false");
        if (ur.unipotent) {
            for (int j = 0; j < M.rank; ++j) {
                SeriesVec col(M.rank);
                for (int i = 0; i < M.rank; ++i) col[i] = ur.flag_basis[i][j];
                rep.add("flag" + std::to_string(j), join_vec(col));
            }
        } else {
            rep.add("obstruction", ur.obstruction);
        }
        return;
    }
    if (cmd == "verify") {
        if (cf.expected.empty()) {
            rep.ok = false;
            rep.add("diagnostic", "no expected block to verify");
            return;
        }
        for (const auto& [key, want] : cf.expected) {
            bool pass = false;
            std::string got;
            if (key == "slopes") {
                SlopeVector sv = newton_slopes(M);
                got = join_rats(sv.slopes);
                pass = sv.slopes == parse_rat_list(want);
            } else if (key == "unipotent") {
                UnipotenceResult ur = unipotence_test(M);
                got = ur.unipotent ? "true" : "false";
                if (!ur.unipotent) got += " (" + ur.obstruction + ")";
                pass = ur.unipotent == parse_bool(want);
            } else if (key == "split") {
                bool split = false;
                try {
                    split = split_extension(M, standard_vector(M.profile(), M.rank, 0)).split;
                    got = split ? "true" : "false";
                } catch (const Error& err) {
                    got = std::string("error ") + error_code_name(err.code());
                }
                pass = got == (parse_bool(want) ? "true" : "false");
            } else if (key == "descend_ovc") {
                Filtration fil = descending_filtration(M);
                bool all = true;
                for (const auto& st : fil.stages)
                    if (st.gamma_only) all = false;
                got = all ? "true" : "false";
                pass = all == parse_bool(want);
            } else if (key == "ascend_gamma_only") {
                Filtration fil = ascending_filtration(M);
                bool any = false;
                for (const auto& st : fil.stages)
                    if (st.gamma_only) any = true;
                got = any ? "true" : "false";
                pass = any == parse_bool(want);
            } else if (key == "twoslope") {
                if (!cf.nabla) {
                    got = "missing nabla block";
                } else {
                    MorphismCandidate mc;
                    mc.source = M;
                    mc.target = M;
                    TwoSlopeDescent td = descend_morphism_twoslope(mc, NablaStructure{*cf.nabla});
                    got = td.ok ? "ok" : "gamma_only";
                }
                pass = got == want;
            } else if (key == "dwork_residual") {
                DworkResult dw = dwork_trick(M, t_prec);
                got = dw.verify(M) >= N ? "clean" : "dirty";
                pass = got == want;
            } else if (key == "compat") {
                if (!cf.nabla) {
                    got = "missing nabla block";
                    pass = false;
                } else {
                    int rv = check_fnabla_compat(M, NablaStructure{*cf.nabla});
                    got = rv >= N ? "true" : "false";
                    pass = got == (parse_bool(want) ? "true" : "false");
                }
            } else {
                throw Error(ErrorCode::ParseError, "unknown expected key '" + key + "'");
            }
            rep.add("check." + key, (pass ? "pass" : "FAIL") + std::string(" (want ") + want +
                                        ", got " + got + ")");
            if (!pass) rep.ok = false;
        }
        return;
    }
    throw Error(ErrorCode::ParseError, "unknown command '" + cmd + "'");
}

} // namespace

Report run_command(const std::string& cmd, const CrystalFile& cf, const std::string& input_bytes,
                   int t_prec) {
    Report rep;
    rep.command = cmd;
    rep.digest = fnv1a_digest(input_bytes);
    auto start = std::chrono::steady_clock::now();
    try {
        dispatch(rep, cmd, cf, t_prec);
    } catch (const Error& err) {
        if (err.code() == ErrorCode::ParseError) throw; // usage problem, not a diagnostic
        rep.ok = false;
        rep.add("error", error_code_name(err.code()));
        rep.add("detail", err.what());
    }
    rep.walltime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    return rep;
}

std::string CorpusResult::render() const {
    std::ostringstream out;
    int pass = 0;
    for (const auto& [name, rep] : reports) {
        out << "=== " << name << " ===\n";
        out << rep.render(false);
        if (rep.ok) ++pass;
    }
    out << "corpus: " << pass << "/" << reports.size() << " ok\n";
    return out.str();
}

CorpusResult run_corpus(const std::string& dir, int jobs) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    if (!fs::is_directory(dir))
        throw Error(ErrorCode::ParseError, dir + " is not a directory");
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".crystal") files.push_back(entry.path().string());
    if (files.empty())
        throw Error(ErrorCode::ParseError, "no .crystal files in " + dir);
    std::sort(files.begin(), files.end());

    CorpusResult out;
    out.reports.resize(files.size());
    if (jobs < 1) jobs = 1;

    auto worker = [&](int start) {
        for (size_t i = start; i < files.size(); i += jobs) {
            Report rep;
            try {
                std::ifstream f(files[i], std::ios::binary);
                std::ostringstream ss;
                ss << f.rdbuf();
                std::string bytes = ss.str();
                CrystalFile cf = parse_crystal(bytes);
                rep = run_command("verify", cf, bytes, 2 + cf.prof.ring.p * cf.prof.ring.p);
            } catch (const Error& err) {
                rep.command = "verify";
                rep.digest = "-";
                rep.ok = false;
                rep.add("error", error_code_name(err.code()));
                rep.add("detail", err.what());
            }
            out.reports[i] = {fs::path(files[i]).filename().string(), rep};
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> ts;
        for (int j = 0; j < jobs; ++j) ts.emplace_back(worker, j);
        for (auto& t : ts) t.join();
    }
    for (const auto& [name, rep] : out.reports)
        if (!rep.ok) out.ok = false;
    return out;
}

} // namespace isoslope
