// fkit: exact power-series-root and factor constructions for algebraic circuits
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fkit/pipeline.hpp"
#include "fkit/roots.hpp"
#include "fkit/ufactor.hpp"
#include "fkit/verify.hpp"

using namespace fkit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::parse_error, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("FKIT_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

std::map<std::string, FieldElement> parse_assignment(FieldSpec s, const std::string& text) {
    std::map<std::string, FieldElement> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) raise(errc::parse_error, "expected var=value in " + tok);
        std::string name = tok.substr(0, eq);
        name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
        out.emplace(name, parse_element(s, tok.substr(eq + 1)));
    }
    return out;
}

GeneratorSpec parse_generator(FieldSpec s, const std::string& text,
                              const std::vector<std::string>& xvars, std::uint64_t fallback_seed) {
    if (text.empty() || text == "affine") return GeneratorSpec::affine(s, xvars, 2, fallback_seed);
    if (text == "passthrough") return GeneratorSpec::passthrough();
    if (text.rfind("affine:", 0) == 0) {
        std::uint64_t seed = fallback_seed;
        unsigned w = 2;
        std::istringstream is(text.substr(7));
        std::string part;
        while (std::getline(is, part, ':')) {
            if (part.rfind("seed=", 0) == 0) seed = std::strtoull(part.c_str() + 5, nullptr, 10);
            if (part.rfind("w=", 0) == 0)
                w = static_cast<unsigned>(std::strtoul(part.c_str() + 2, nullptr, 10));
        }
        return GeneratorSpec::affine(s, xvars, w, seed);
    }
    raise(errc::parse_error, "unknown generator " + text);
}

TransformReport parse_report(const std::string& text) {
    TransformReport r;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "construction") r.construction = v;
        else if (k == "input_size") r.input_size = std::stoul(v);
        else if (k == "input_depth") r.input_depth = static_cast<unsigned>(std::stoul(v));
        else if (k == "output_size") r.output_size = std::stoul(v);
        else if (k == "output_depth") r.output_depth = static_cast<unsigned>(std::stoul(v));
        else if (k == "depth_increment") r.depth_increment = std::stoi(v);
        else r.note(k, v);
    }
    return r;
}

int run(int argc, char** argv) {
    CLI::App app{"exact power-series-root and factor constructions for algebraic circuits"};
    app.require_subcommand(1);
    app.fallthrough(); // global --field/--seed may follow the subcommand
    std::string field_desc = "Q";
    app.add_option("--field", field_desc,
                   "field descriptor: Q | Fp:<p> | Fq:<p>^<k>[:<mod>] | eps:<base>:<order>")
        ->capture_default_str();
    std::uint64_t seed = default_seed();
    app.add_option("--seed", seed, "seed for randomized steps (FKIT_SEED overrides the default)");

    auto* cexp = app.add_subcommand("expand", "expand a circuit to its polynomial");
    std::string in_file;
    unsigned cap = 64;
    bool truncated = false;
    std::size_t term_limit = 1u << 21;
    cexp->add_option("file", in_file, "circuit file (.circ)")->required();
    cexp->add_option("--cap", cap, "degree cap");
    cexp->add_flag("--truncated", truncated, "truncate to the cap instead of failing");
    cexp->add_option("--term-limit", term_limit, "blow-up guard");

    auto* cev = app.add_subcommand("eval", "evaluate a circuit at a point");
    std::string at;
    cev->add_option("file", in_file, "circuit file")->required();
    cev->add_option("--at", at, "comma-separated var=value list")->required();

    auto* cme = app.add_subcommand("metrics", "size, depth and syntactic degree bound");
    cme->add_option("file", in_file, "circuit file")->required();

    auto* cco = app.add_subcommand("coeff", "coefficient-extraction circuit");
    std::string var = "y";
    unsigned index = 0, degree = 1;
    bool border = false;
    cco->add_option("file", in_file, "circuit file")->required();
    cco->add_option("--var", var, "variable");
    cco->add_option("--index", index, "coefficient index")->required();
    cco->add_option("--degree", degree, "degree bound in the variable");
    cco->add_flag("--border", border, "border extraction over an eps-jet field");

    auto* crs = app.add_subcommand("root-series", "truncated power series root of P(..., y)");
    std::string variant = "newton";
    unsigned precision = 5, e_mult = 1, ell = 0;
    std::string alpha_txt = "0";
    crs->add_option("file", in_file, "polynomial file (.poly)")->required();
    crs->add_option("--variant", variant, "newton | diagonal | closed0 | closedp")
        ->check(CLI::IsMember({"newton", "diagonal", "closed0", "closedp"}));
    crs->add_option("--precision", precision, "truncation order");
    crs->add_option("--e", e_mult, "root multiplicity (prime to the characteristic)");
    crs->add_option("--ell", ell, "p-adic multiplicity exponent (closedp)");
    crs->add_option("--alpha", alpha_txt, "constant term of the root");

    auto* cfc = app.add_subcommand("factor-circuit", "constant-depth-increment factor circuit");
    std::string boundary_txt, map_txt;
    unsigned degree_cap = 16;
    cfc->add_option("file", in_file, "circuit file computing P(x)")->required();
    cfc->add_option("--boundary", boundary_txt, "monic boundary polynomial in y")->required();
    cfc->add_option("--precision", precision, "t-truncation order (factor degree)");
    cfc->add_option("--map", map_txt,
                    "pre-processing map 'a=c1,c2;b=c3,c4' (searched from the seed when absent)");

    auto* cfa = app.add_subcommand("factorize", "full factorization with certificates");
    std::string emit_dir, generator_txt = "affine", planted_txt;
    cfa->add_option("file", in_file, "circuit file")->required();
    cfa->add_option("--generator", generator_txt, "affine[:seed=S:w=W] | passthrough");
    cfa->add_option("--emit-circuits", emit_dir, "directory for factor circuits and reports");
    cfa->add_option("--degree-cap", degree_cap, "dense expansion guard");
    cfa->add_option("--planted", planted_txt,
                    "semicolon-separated factor list (rational-mode boundaries)");

    auto* cve = app.add_subcommand("verify", "run a module's invariant suite");
    std::string module;
    unsigned instances = 0;
    bool field_given = false;
    cve->add_option("module", module, "field | poly | circuit | roots | factor | pipeline")
        ->required();
    cve->add_option("--instances", instances, "instances per check (0 = suite default)");
    cve->add_flag("--use-field", field_given, "restrict the suite to --field");

    auto* crp = app.add_subcommand("report", "render stored transform reports as a table");
    std::string report_dir;
    crp->add_option("dir", report_dir, "directory with .report files")->required();

    CLI11_PARSE(app, argc, argv);
    Rng seed_rng(seed);
    FieldSpec fld = make_field(field_desc, &seed_rng);

    if (cexp->parsed()) {
        Circuit c = parse_circuit(fld, slurp(in_file));
        ExpandOptions o;
        o.degree_cap = cap;
        o.truncated = truncated;
        o.term_limit = term_limit;
        std::cout << expand(c, o).str() << "\n";
        return 0;
    }
    if (cev->parsed()) {
        Circuit c = parse_circuit(fld, slurp(in_file));
        std::cout << eval_circuit(c, parse_assignment(fld, at)).str() << "\n";
        return 0;
    }
    if (cme->parsed()) {
        Circuit c = parse_circuit(fld, slurp(in_file));
        std::cout << "size=" << c.size() << "\n"
                  << "depth=" << c.depth() << "\n"
                  << "degree_bound=" << c.degree_bound().get_str() << "\n";
        return 0;
    }
    if (cco->parsed()) {
        Circuit c = parse_circuit(fld, slurp(in_file));
        CircuitTransform t = border ? border_coeff_extract(c, var, index)
                                    : coeff_extract_circuit(c, var, index, degree);
        std::istringstream rep(t.report.render());
        std::string line;
        while (std::getline(rep, line)) std::cout << "# " << line << "\n";
        std::cout << serialize(t.circuit);
        return 0;
    }
    if (crs->parsed()) {
        Poly P = parse_poly(fld, slurp(in_file));
        RootSpec rs{parse_element(fld, alpha_txt), e_mult, ell};
        Series out(Poly(fld), precision);
        if (variant == "newton") {
            out = newton_root_oracle(P, "y", rs.alpha, precision);
        } else if (variant == "diagonal") {
            out = furstenberg_series(P, "y", rs, precision, FurstenbergVariant::diagonal);
        } else if (variant == "closed0") {
            out = furstenberg_series(P, "y", rs, precision, FurstenbergVariant::char0_closed_form);
        } else {
            out = rs.ell == 0 ? furstenberg_series(P, "y", rs, precision,
                                                   FurstenbergVariant::hasse_closed_form)
                              : charp_root_power(P, "y", rs, precision);
        }
        std::cout << out.str() << "\n";
        std::cout << "variant=" << variant << "\n"
                  << "precision=" << precision << "\n"
                  << "field=" << fld.descriptor() << "\n"
                  << "e=" << e_mult << "\n"
                  << "ell=" << ell << "\n";
        return 0;
    }
    if (cfc->parsed()) {
        Circuit c = parse_circuit(fld, slurp(in_file));
        Poly boundary = parse_poly(fld, boundary_txt);
        ExpandOptions o;
        o.degree_cap = degree_cap;
        Poly P = expand(c, o);
        PreprocessMap psi;
        if (!map_txt.empty()) {
            for (const auto& v : P.vars())
                if (P.degree_in(v) > 0) psi.xvars.push_back(v);
            psi.degree = static_cast<unsigned>(std::max(P.total_degree(), 0));
            auto semi = map_txt.find(';');
            if (semi == std::string::npos) raise(errc::parse_error, "map needs 'a=...;b=...'");
            auto parse_vec = [&](const std::string& txt, const std::string& tag) {
                std::vector<FieldElement> out;
                if (txt.rfind(tag + "=", 0) != 0) raise(errc::parse_error, "map needs " + tag + "=");
                std::istringstream is(txt.substr(tag.size() + 1));
                std::string tok;
                while (std::getline(is, tok, ',')) out.push_back(parse_element(fld, tok));
                return out;
            };
            psi.a = parse_vec(map_txt.substr(0, semi), "a");
            psi.b = parse_vec(map_txt.substr(semi + 1), "b");
            std::string why;
            if (!preprocessing_valid(P, psi, "y", &why)) raise(errc::invalid_map, why);
        } else {
            Rng rng(seed);
            psi = find_preprocessing(P, "y", 400, rng);
        }
        auto t = factor_circuit(c, psi, boundary, "t", "y", precision);
        std::istringstream rep(t.report.render());
        std::string line;
        while (std::getline(rep, line)) std::cout << "# " << line << "\n";
        std::cout << serialize(t.circuit);
        return 0;
    }
    if (cfa->parsed()) {
        Circuit c = parse_circuit(fld, slurp(in_file));
        PipelineConfig cfg;
        cfg.seed = seed;
        cfg.degree_cap = degree_cap;
        cfg.emit_circuits = true;
        cfg.generator.name = "affine";
        cfg.generator.images.clear();
        if (!generator_txt.empty() && generator_txt != "affine")
            cfg.generator = parse_generator(fld, generator_txt, c.input_vars(), seed);
        if (!planted_txt.empty()) {
            std::istringstream is(planted_txt);
            std::string tok;
            while (std::getline(is, tok, ';')) cfg.planted_factors.push_back(parse_poly(fld, tok));
        }
        FactorizationResult res;
        try {
            res = factorize_full(c, cfg);
        } catch (const Error& e) {
            if (e.code() == errc::certificate_failed) {
                std::cerr << "error: " << e.what() << "\n";
                return 3;
            }
            throw;
        }
        std::ostringstream out;
        out << "input=" << res.input_expansion.str() << "\n";
        out << "unit=" << res.unit.str() << "\n";
        out << "certificate=" << (res.certificate_ok ? "ok" : "FAILED") << "\n";
        out << "pit_samples=" << res.pit_samples << "\n";
        for (size_t i = 0; i < res.factors.size(); ++i) {
            out << "factor" << i << "=" << res.factors[i].expansion.str() << "\n";
            out << "multiplicity" << i << "=" << res.factors[i].multiplicity << "\n";
        }
        std::cout << out.str();
        if (!emit_dir.empty()) {
            fs::create_directories(emit_dir);
            std::ofstream rt(fs::path(emit_dir) / "result.txt");
            rt << out.str();
            for (size_t i = 0; i < res.factors.size(); ++i) {
                if (!res.factors[i].has_circuit) continue;
                std::ofstream cf(fs::path(emit_dir) / ("factor" + std::to_string(i) + ".circ"));
                cf << "# field " << res.factors[i].circuit.spec().descriptor() << "\n";
                cf << serialize(res.factors[i].circuit);
                std::ofstream rf(fs::path(emit_dir) / ("factor" + std::to_string(i) + ".report"));
                rf << res.factors[i].report.render();
            }
        }
        return res.certificate_ok ? 0 : 3;
    }
    if (cve->parsed()) {
        SuiteOptions o;
        o.instances = instances;
        o.seed = seed;
        if (field_given) o.field = fld;
        auto results = verify_module(module, o);
        unsigned passed = 0, failed = 0;
        for (const auto& r : results) {
            std::cout << (r.failed ? "[FAIL] " : "[ok]   ") << r.name << ": " << r.passed
                      << " passed, " << r.failed << " failed";
            if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
            std::cout << "\n";
            passed += r.passed;
            failed += r.failed;
        }
        std::cout << "total: " << passed << " passed, " << failed << " failed\n";
        return failed ? 1 : 0;
    }
    if (crp->parsed()) {
        std::vector<TransformReport> reports;
        for (const auto& entry : fs::directory_iterator(report_dir)) {
            if (entry.path().extension() != ".report") continue;
            reports.push_back(parse_report(slurp(entry.path().string())));
        }
        std::sort(reports.begin(), reports.end(),
                  [](const TransformReport& a, const TransformReport& b) {
                      return std::tie(a.construction, a.input_size) <
                             std::tie(b.construction, b.input_size);
                  });
        std::cout << render_report_table(reports);
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == errc::certificate_failed ? 3 : 1;
    } catch (const CLI::ParseError&) {
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
