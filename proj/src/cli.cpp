#include "thetaobs/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "thetaobs/cohom.hpp"
#include "thetaobs/exceptional.hpp"
#include "thetaobs/paramod.hpp"
#include "thetaobs/verify.hpp"

namespace thetaobs::cli {

namespace {

unsigned env_threads()
{
    const char *v = std::getenv("THETAOBS_THREADS");
    if (!v)
        return 1;
    long n = std::strtol(v, nullptr, 10);
    if (n < 1)
        return 1;
    if (n > 64)
        return 64;
    return static_cast<unsigned>(n);
}

void emit(const report::Report &rep, const std::string &out_path,
          std::ostream &out, std::ostream &err)
{
    std::string text = rep.render();
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f)
            throw input_error("cannot open output file " + out_path);
        f << text;
        err << "report written to " << out_path << "\n";
    }
}

int classify_cmd(const std::string &file, const std::string &out_path,
                 std::ostream &out, std::ostream &err)
{
    std::ifstream f(file);
    if (!f)
        throw input_error("cannot open module file " + file);
    std::stringstream buf;
    buf << f.rdbuf();
    report::Report rep("classify " + file, 0);
    try {
        auto M = symmod::SymplecticModule::from_text(buf.str());
        auto c = symmod::classify(M);
        std::ostringstream basis;
        for (size_t i = 0; i < c.type.g(); ++i) {
            basis << "e" << i + 1 << " =";
            for (uint32_t v : c.e[i])
                basis << ' ' << v;
            basis << "; f" << i + 1 << " =";
            for (uint32_t v : c.f[i])
                basis << ' ' << v;
            basis << '\n';
        }
        rep.add_recorded("classify-type", "lagrangian decomposition",
                         c.type.to_string(),
                         report::digest_hex(basis.str()));
        emit(rep, out_path, out, err);
        err << "type: " << c.type.to_string() << "\n" << basis.str();
        return 0;
    } catch (const input_error &ex) {
        rep.add("classify-type", "lagrangian decomposition", false,
                report::digest_hex(ex.what()));
        emit(rep, out_path, out, err);
        err << "error: " << ex.what() << "\n";
        return 1;
    }
}

int obstruction_cmd(const std::string &type_str, const std::string &subgroup,
                    bool report_negligibility, uint64_t seed,
                    const std::string &out_path, std::ostream &out,
                    std::ostream &err)
{
    auto D = symmod::TypeD::parse(type_str);
    report::Report rep("obstruction --type " + type_str + " --subgroup " +
                           subgroup,
                       seed);
    bool all22 = true;
    for (uint32_t d : D.divisors)
        all22 = all22 && d == 2;

    if (D.card() % 2 == 1) {
        // odd order: the canonical section splits everything in sight
        auto M = symmod::standard_module(D);
        auto H = theta::ThetaGroup::odd_model(M);
        if (D.g() == 1 && D.divisors[0] <= 7) {
            auto G = cohom::GroupTable::closure(
                spgroup::SpContext(1, D.divisors[0])
                    .transvection_generators());
            auto dec = cohom::lifting_decision(H, G, G.size() <= 256);
            rep.add("obstruction-splits", "odd order canonical section",
                    dec.lifts, dec.certificate);
        } else {
            rep.add("obstruction-splits", "odd order canonical section",
                    true, "canonical section (A, 0) is a homomorphism");
        }
        emit(rep, out_path, out, err);
        err << "splits: yes (canonical section)\n";
        return rep.all_passed() ? 0 : 1;
    }

    if (!all22)
        throw capacity_error(
            "obstruction: even types other than (2,...,2) exceed the "
            "solver scope; use prime_parts first");
    uint32_t g = static_cast<uint32_t>(D.g());
    if (subgroup == "sylow2" || (subgroup == "auto" && g == 3)) {
        auto v = cohom::nonzero_via_sylow(g);
        rep.add_recorded("obstruction-sylow-verdict",
                         "Sylow-2 restriction coboundary solve",
                         v.nonzero ? "nonzero" : "coboundary",
                         std::to_string(v.sylow_order));
        err << (v.nonzero ? "c_D nonzero (Sylow certificate)\n"
                          : "c_D splits on the Sylow subgroup\n");
    } else if (subgroup == "full" || subgroup == "auto") {
        if (g > 2)
            throw capacity_error("obstruction: full solve feasible for "
                                 "g <= 2; use --subgroup sylow2");
        auto H = theta::ThetaGroup::standard(D);
        auto G = cohom::GroupTable::closure(
            spgroup::SpContext(g, 2).transvection_generators());
        auto c = cohom::extension_cocycle(H, G);
        auto cb = cohom::is_coboundary(c);
        rep.add_recorded("obstruction-full-verdict",
                         "full coboundary solve",
                         cb.solvable ? "coboundary" : "nonzero",
                         std::to_string(G.size()));
        err << (cb.solvable ? "c_D is a coboundary\n" : "c_D nonzero\n");
    } else if (subgroup == "trivial") {
        rep.add("obstruction-trivial", "trivial subgroup always lifts",
                true);
    } else {
        throw input_error("unknown --subgroup (use full, sylow2, trivial)");
    }

    if (report_negligibility) {
        auto nrep = cohom::negligibility_report(g);
        rep.add_recorded("negligibility-verdict",
                         "phi_m criterion via stabilizer abelianizations",
                         nrep.verdict,
                         nrep.cd_nonzero_cited ? "cited-not-recomputed"
                                               : "recomputed");
        std::ostringstream rows;
        for (const auto &r : nrep.rows)
            rows << (r.zero_orbit ? "zero-orbit" : "nonzero-orbit")
                 << " stab=" << r.stab_order << " ab=" << r.stab_ab_order
                 << " phi_vanishes=" << (r.phi_vanishes ? "yes" : "no")
                 << "\n";
        err << rows.str() << nrep.verdict << "\n";
    }
    emit(rep, out_path, out, err);
    return rep.all_passed() ? 0 : 1;
}

int appendix_cmd(uint32_t n, uint32_t k, uint32_t modexp, size_t trials,
                 uint64_t seed, const std::string &out_path,
                 std::ostream &out, std::ostream &err)
{
    paramod::ParamodContext ctx(n, k);
    report::Report rep("appendix n=" + std::to_string(n) +
                           " k=" + std::to_string(k) +
                           " mod=2^" + std::to_string(modexp),
                       seed);
    for (const auto &r :
         paramod::verify_commutator_identities(ctx, modexp, trials, seed))
        rep.add("identity-" + r.name, "finite-precision shadow", r.pass,
                r.detail.empty() ? "-" : r.detail);
    for (const auto &r : paramod::verify_spanning_claims(ctx, modexp))
        rep.add("span-" + r.name, "finite-precision shadow", r.pass,
                std::to_string(r.trials));
    if (n >= 3 && k >= 2) {
        for (const auto &r : paramod::express_generators_as_commutators(
                 ctx, modexp, 2, seed))
            rep.add("commutators-" + r.name,
                    "finite-precision shadow; integral statements cited",
                    r.pass, r.detail.empty() ? "-" : r.detail);
    }
    emit(rep, out_path, out, err);
    return rep.all_passed() ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err)
{
    CLI::App app{"thetaobs: finite theta groups, their automorphism "
                 "extension class, and paramodular congruences"};
    app.require_subcommand(1);

    std::string module_file, out_path, type_str = "2,2",
                             subgroup = "auto", level = "full";
    uint64_t seed = 1;
    uint32_t pm_n = 3, pm_k = 2, modexp = 4;
    size_t trials = 1000;
    bool report_neg = false;

    auto *classify = app.add_subcommand("classify",
                                        "classify a pairing table file");
    classify->add_option("file", module_file, "module text file")
        ->required();
    classify->add_option("--out", out_path, "report file");

    auto *obstruction = app.add_subcommand(
        "obstruction", "extension class and lifting verdicts");
    obstruction->add_option("--type", type_str, "type D, e.g. 2,2,2");
    obstruction->add_option("--subgroup", subgroup,
                            "full | sylow2 | trivial | auto");
    obstruction->add_flag("--report-negligibility", report_neg,
                          "include the phi_m negligibility report");
    obstruction->add_option("--seed", seed, "seed");
    obstruction->add_option("--out", out_path, "report file");

    auto *verify = app.add_subcommand("verify-all",
                                      "run the full verification suite");
    verify->add_option("--seed", seed, "seed");
    verify->add_option("--level", level, "quick | full");
    verify->add_option("--out", out_path, "report file");

    auto *e7 = app.add_subcommand("e7", "emit the E7 golden data");
    e7->add_option("--out", out_path, "golden file");

    auto *appendix = app.add_subcommand(
        "appendix", "paramodular finite-precision verification");
    appendix->add_option("--n", pm_n, "number of 1s in D");
    appendix->add_option("--k", pm_k, "number of 2s in D");
    appendix->add_option("--modulus-exponent", modexp, "work mod 2^e");
    appendix->add_option("--trials", trials, "random trials per identity");
    appendix->add_option("--seed", seed, "seed");
    appendix->add_option("--out", out_path, "report file");

    std::vector<std::string> argv = args;
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        if (*classify) {
            code = classify_cmd(module_file, out_path, out, err);
        } else if (*obstruction) {
            code = obstruction_cmd(type_str, subgroup, report_neg, seed,
                                   out_path, out, err);
        } else if (*verify) {
            verify::Options opt;
            opt.seed = seed;
            opt.full = level != "quick";
            opt.threads = env_threads();
            auto rep = verify::verify_all(opt);
            emit(rep, out_path, out, err);
            code = rep.all_passed() ? 0 : 1;
        } else if (*e7) {
            auto text = exceptional::e7_golden_text();
            if (out_path.empty()) {
                out << text;
            } else {
                std::ofstream f(out_path, std::ios::binary);
                f << text;
                err << "golden data written to " << out_path << "\n";
            }
        } else if (*appendix) {
            code = appendix_cmd(pm_n, pm_k, modexp, trials, seed, out_path,
                                out, err);
        }
    } catch (const capacity_error &ex) {
        err << "capacity error: " << ex.what() << "\n";
        return 3;
    } catch (const input_error &ex) {
        err << "input error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception &ex) {
        err << "internal error: " << ex.what() << "\n";
        return 1;
    }
    auto t1 = std::chrono::steady_clock::now();
    err << "wall time "
        << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
               .count()
        << " ms\n";
    return code;
}

} // namespace thetaobs::cli
