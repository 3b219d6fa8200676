#include "locmat/cli.hpp"

#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

namespace locmat {

namespace {

FieldSpec parse_field_flag(const std::string& s) {
    if (s == "q") return FieldSpec::rationals();
    if (s.rfind("gf:", 0) == 0) {
        long p = std::stol(s.substr(3));
        return FieldSpec::gf(p);
    }
    fail(Errc::SyntaxError, "bad --field value '" + s + "' (expected q or gf:<p>)");
}

SiteShape parse_shape_flag(const std::string& s) {
    std::map<int, int> exceptions;
    int default_size = -1;
    std::stringstream ss(s);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        auto eq = piece.find('=');
        if (eq == std::string::npos) fail(Errc::SyntaxError, "bad --shape piece '" + piece + "'");
        std::string key = piece.substr(0, eq);
        int value = std::stoi(piece.substr(eq + 1));
        if (key == "default")
            default_size = value;
        else
            exceptions[std::stoi(key)] = value;
    }
    if (default_size < 0) fail(Errc::SyntaxError, "--shape must start with default=<n>");
    return SiteShape(default_size, std::move(exceptions));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::SyntaxError, "cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

SiteSet parse_siteset(const std::string& s) {
    SiteSet sites;
    std::stringstream ss(s);
    std::string piece;
    while (std::getline(ss, piece, ',')) sites.insert(std::stoi(piece));
    if (sites.empty()) fail(Errc::SyntaxError, "empty site set");
    return sites;
}

} // namespace

SparseSystem parse_derivation_text(const std::string& text, const SessionConfig& config) {
    SparseSystem sys(config.field, config.shape);
    for (const std::string& raw_line : split_lines(text)) {
        std::string line = strip_comment(raw_line);
        std::stringstream ss(line);
        std::string keyword;
        if (!(ss >> keyword)) continue;
        if (keyword == "member") {
            std::string siteset;
            ss >> siteset;
            std::string expr;
            std::getline(ss, expr);
            sys.add_member(parse_siteset(siteset), parse_eval(expr, config));
        } else if (keyword == "family") {
            std::string rest;
            std::getline(ss, rest);
            auto pos = rest.rfind("start=");
            if (pos == std::string::npos) fail(Errc::SyntaxError, "family line needs start=<n>");
            int start = std::stoi(rest.substr(pos + 6));
            sys.add_family(parse_eval(rest.substr(0, pos), config), start);
        } else {
            fail(Errc::SyntaxError, "unexpected line in derivation file: " + keyword);
        }
    }
    return sys;
}

UnitalEndo parse_endo_text(const std::string& text, const SessionConfig& config) {
    std::map<GeneratorKey, Element> images;
    int level = 0;
    for (const std::string& raw_line : split_lines(text)) {
        std::string line = strip_comment(raw_line);
        std::stringstream ss(line);
        std::string keyword;
        if (!(ss >> keyword)) continue;
        if (keyword != "image") fail(Errc::SyntaxError, "unexpected line in endomorphism file: " + keyword);
        int site, p, q;
        if (!(ss >> site >> p >> q)) fail(Errc::SyntaxError, "image line needs <site> <p> <q> <expr>");
        std::string expr;
        std::getline(ss, expr);
        images.emplace(GeneratorKey{site, p, q}, parse_eval(expr, config));
        level = std::max(level, site);
    }
    if (level == 0) fail(Errc::SyntaxError, "endomorphism file has no image lines");
    return UnitalEndo(config.field, config.shape, level, std::move(images));
}

ConjugatorSeq parse_seq_text(const std::string& text, const SessionConfig& config) {
    std::vector<Element> elements;
    for (const std::string& raw_line : split_lines(text)) {
        std::string line = strip_comment(raw_line);
        std::stringstream ss(line);
        std::string keyword;
        if (!(ss >> keyword)) continue;
        if (keyword != "conjugator") fail(Errc::SyntaxError, "unexpected line in sequence file: " + keyword);
        std::string expr;
        std::getline(ss, expr);
        elements.push_back(parse_eval(expr, config));
    }
    if (elements.empty()) fail(Errc::SyntaxError, "sequence file has no conjugator lines");
    return ConjugatorSeq(std::move(elements), ConjugatorSeq::Direction::Forward);
}

std::string format_system(const SparseSystem& s) {
    std::ostringstream os;
    for (const auto& m : s.finite_members()) {
        os << "member ";
        bool first = true;
        for (int i : m.sites) {
            if (!first) os << ",";
            first = false;
            os << i;
        }
        os << " " << m.coeff.str() << "\n";
    }
    for (const auto& f : s.families()) os << "family " << f.templ.str() << " start=" << f.start << "\n";
    if (s.empty()) os << "# zero derivation\n";
    return os.str();
}

std::string format_expansion(const BasisExpansion& e) {
    std::ostringstream os;
    for (const auto& [m, c] : e.finite) {
        os << "basis";
        for (const auto& en : m.entries()) os << " e[" << en.site << "](" << en.row << "," << en.col << ")";
        os << " = " << c.str() << "\n";
    }
    for (const auto& f : e.families) {
        os << "family start=" << f.start << "\n";
        for (const auto& [m, c] : f.templ) {
            os << "  basis";
            for (const auto& en : m.entries()) os << " e[" << en.site << "](" << en.row << "," << en.col << ")";
            os << " = " << c.str() << "\n";
        }
    }
    if (e.finite.empty() && e.families.empty()) os << "# empty expansion\n";
    return os.str();
}

std::string format_pattern(const PatternMatrix& m) { return m.str() + "\n"; }

PatternMatrix parse_pattern_spec(const std::string& spec, const SessionConfig& config) {
    const FieldSpec field = config.field;
    if (spec == "z") return build_z_minf(field);
    if (spec == "id") return PatternMatrix::identity(field);
    if (spec.size() > 1 && spec[0] == 'y') return build_yk_minf(field, std::stoi(spec.substr(1)));
    auto parse_coeffs = [&](const std::string& csv) {
        std::vector<Scalar> f;
        std::stringstream ss(csv);
        std::string piece;
        while (std::getline(ss, piece, ',')) f.push_back(Scalar::from_string(field, piece));
        return f;
    };
    if (spec.rfind("df:", 0) == 0) return build_df(field, parse_coeffs(spec.substr(3)));
    if (spec.rfind("af:", 0) == 0) return build_af(field, parse_coeffs(spec.substr(3)));
    if (spec.rfind("e:", 0) == 0) {
        // format e:<row>,<col>[:coeff]
        std::string body = spec.substr(2);
        auto comma = body.find(',');
        if (comma == std::string::npos) fail(Errc::SyntaxError, "bad finitary spec: " + spec);
        auto colon = body.find(':', comma);
        long row = std::stol(body.substr(0, comma));
        long col = std::stol(colon == std::string::npos ? body.substr(comma + 1)
                                                        : body.substr(comma + 1, colon - comma - 1));
        Scalar c = colon == std::string::npos ? Scalar::one(field)
                                              : Scalar::from_string(field, body.substr(colon + 1));
        PatternMatrix p(field);
        p.add_finitary(row, col, c);
        p.normalize();
        return p;
    }
    fail(Errc::SyntaxError, "bad pattern spec '" + spec + "' (expected z, y<k>, id, df:..., af:..., e:r,c[:v])");
}

namespace {

int verify_example2(const SessionConfig& config, int n, std::ostream& out) {
    ConjugatorSeq seq = example2_sequence(config.field, config.shape, n);
    Element v = Element::matrix_unit(config.field, config.shape, 1, 1, 2);
    bool ok = true;
    for (int i = 1; i <= n; ++i) {
        v = conjugate(seq.element(i), v); // (1 + a_i) v (1 - a_i)
        if (!(v == example2_closed_form(config.field, config.shape, i))) {
            out << "closed form mismatch at step " << i << "\n";
            ok = false;
        }
    }
    std::vector<int> profile =
        integrability_profile(seq.inverse(), Element::matrix_unit(config.field, config.shape, 1, 1, 2), n);
    out << "profile: ";
    for (size_t i = 0; i < profile.size(); ++i) out << (i ? "," : "") << profile[i];
    out << "\n";
    for (int i = 1; i <= n; ++i)
        if (profile[static_cast<size_t>(i) - 1] != i + 1) {
            out << "profile entry " << i << " is not " << i + 1 << "\n";
            ok = false;
        }
    out << (ok ? "OK" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

int verify_example1(const SessionConfig& config, int n, std::ostream& out) {
    std::mt19937_64 rng(config.seed);
    bool ok = true;
    const Element one = Element::one(config.field, config.shape);
    for (int trial = 0; trial < 5 && ok; ++trial) {
        std::vector<Element> units;
        for (int k = 1; k <= n; ++k) {
            // random invertible element supported on site k
            while (true) {
                Element u(config.field, config.shape);
                const int sz = config.shape.size(k);
                for (int p = 1; p <= sz; ++p)
                    for (int q = 1; q <= sz; ++q) {
                        Scalar c = random_scalar(config.field, rng);
                        if (!c.is_zero())
                            u = u.add(Element::matrix_unit(config.field, config.shape, k, p, q).scale(c));
                    }
                if (u.try_invert()) {
                    units.push_back(std::move(u));
                    break;
                }
            }
        }
        ConjugatorSeq seq = example1_sequence(units);
        std::vector<Element> tests{Element::matrix_unit(config.field, config.shape, 1, 1, 2),
                                   Element::matrix_unit(config.field, config.shape, 1, 2, 1)
                                       .mul(Element::matrix_unit(config.field, config.shape, 2, 1, 2)),
                                   one.add(Element::matrix_unit(config.field, config.shape, 2, 2, 2))};
        for (const auto& a : tests) {
            std::vector<int> profile = integrability_profile(seq.inverse(), a, n);
            int dim2 = profile[std::min<size_t>(1, profile.size() - 1)];
            for (size_t i = 1; i < profile.size(); ++i)
                if (profile[i] != dim2) ok = false; // must stabilize after n = 2
            int bound = config.shape.size(1) * config.shape.size(1) * config.shape.size(2) * config.shape.size(2);
            if (profile.back() > bound) ok = false;
        }
    }
    out << (ok ? "OK" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

int verify_ladder(const SessionConfig& config, int kmax, std::ostream& out) {
    Derivation z = build_z(config.field, config.shape);
    Derivation cur = build_yk(config.field, config.shape, 1);
    bool ok = true;
    for (int k = 1; k <= kmax; ++k) {
        Derivation next = derivation_commutator(z, cur);
        Derivation expected = build_yk(config.field, config.shape, k + 1);
        if (!(next.as_system() == expected.as_system())) {
            out << "syntactic mismatch at k=" << k << "\n";
            ok = false;
        }
        if (!equal_on_truncation(next, expected, 8)) {
            out << "action mismatch at k=" << k << "\n";
            ok = false;
        }
        cur = std::move(next);
    }
    out << (ok ? "OK" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

int verify_minf_ladder(const SessionConfig& config, int kmax, std::ostream& out) {
    PatternMatrix z = build_z_minf(config.field);
    bool ok = true;
    for (int k = 1; k <= kmax; ++k) {
        PatternMatrix lhs = pattern_commutator(z, build_yk_minf(config.field, k));
        PatternMatrix rhs = build_yk_minf(config.field, k + 1);
        if (!(lhs == rhs)) {
            out << "pattern mismatch at k=" << k << "\n";
            ok = false;
        }
        if (!(lhs.window_eval(40) == rhs.window_eval(40))) {
            out << "window mismatch at k=" << k << "\n";
            ok = false;
        }
    }
    out << (ok ? "OK" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

int verify_af_action(const SessionConfig& config, std::ostream& out) {
    std::mt19937_64 rng(config.seed);
    const FieldSpec field = config.field;
    bool ok = true;
    std::vector<Scalar> f;
    for (int i = 0; i < 10; ++i) f.push_back(random_scalar(field, rng));
    for (long i = 1; i <= 10; ++i) {
        FinitaryMatrix x = FinitaryMatrix::unit(field, 1, 2 * i - 1);
        FinitaryMatrix expected = x;
        if (i <= static_cast<long>(f.size())) expected.add_entry(1, 2 * i, f[static_cast<size_t>(i) - 1]);
        if (!(conjugate_by_af(f, x) == expected)) {
            out << "conjugation identity fails at i=" << i << "\n";
            ok = false;
        }
    }
    PatternMatrix df = build_df(field, f);
    for (int trial = 0; trial < 20; ++trial) {
        FinitaryMatrix x(field);
        for (int t = 0; t < 4; ++t)
            x.add_entry(static_cast<long>(rng() % 12) + 1, static_cast<long>(rng() % 12) + 1,
                        random_scalar(field, rng));
        ad_apply(df, x); // NotFinitaryResult would throw
    }
    out << (ok ? "OK" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact kernel for tensor products of matrix algebras"};
    app.require_subcommand(1);
    app.fallthrough(); // session flags may follow the subcommand

    std::string field_flag = "q";
    std::string shape_flag = "default=2";
    std::uint64_t seed = 0;
    app.add_option("--field", field_flag, "ground field: q or gf:<p>")->capture_default_str();
    app.add_option("--shape", shape_flag, "site sizes: default=<n>[,<i>=<n_i>...]")->capture_default_str();
    app.add_option("--seed", seed, "seed for the deterministic random stage")->capture_default_str();

    std::vector<std::string> exprs;
    std::vector<std::string> files;
    int n_flag = -1;
    int k_flag = -1;
    std::string suite;
    std::vector<std::string> patterns;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--expr", exprs, "element expression (repeatable)");
        sub->add_option("--file", files, "input file (repeatable)");
        sub->add_option("--n", n_flag, "truncation level / length");
        sub->add_option("--k", k_flag, "ladder index");
        return sub;
    };

    CLI::App* c_eval = add_common(app.add_subcommand("eval", "evaluate an element expression"));
    CLI::App* c_apply = add_common(app.add_subcommand("apply-derivation", "apply a derivation to an element"));
    CLI::App* c_comm = add_common(app.add_subcommand("commutator", "bracket of two elements or two derivations"));
    CLI::App* c_solve = add_common(app.add_subcommand("inner-solve", "inner witness of a derivation on sites 1..n"));
    CLI::App* c_peel = add_common(app.add_subcommand("peel", "peel a derivation given by generator images"));
    CLI::App* c_expand = add_common(app.add_subcommand("expand-basis", "basis expansion of a derivation"));
    CLI::App* c_sn = add_common(app.add_subcommand("skolem-noether", "conjugator implementing an endomorphism"));
    CLI::App* c_fact = add_common(app.add_subcommand("factorize", "factor an endomorphism into conjugations"));
    CLI::App* c_integr = add_common(app.add_subcommand("integrability", "orbit dimension profile of a sequence"));
    CLI::App* c_mmul = add_common(app.add_subcommand("minf-mul", "product of two pattern matrices"));
    CLI::App* c_mcomm = add_common(app.add_subcommand("minf-commutator", "bracket of two pattern matrices"));
    CLI::App* c_verify = add_common(app.add_subcommand("verify", "run a named verification suite"));
    c_mmul->add_option("patterns", patterns, "two pattern specs");
    c_mcomm->add_option("patterns", patterns, "two pattern specs");
    c_verify->add_option("--suite", suite, "example1|example2|ladder|minf-ladder|af-action")->required();

    std::vector<const char*> argv;
    argv.push_back("locmat");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        SessionConfig config{parse_field_flag(field_flag), parse_shape_flag(shape_flag), seed};

        if (c_eval->parsed()) {
            if (exprs.size() != 1) fail(Errc::SyntaxError, "eval needs exactly one --expr");
            out << parse_eval(exprs[0], config).str() << "\n";
            return 0;
        }
        if (c_apply->parsed()) {
            if (files.size() != 1 || exprs.size() != 1)
                fail(Errc::SyntaxError, "apply-derivation needs one --file and one --expr");
            Derivation d = Derivation::sparse(parse_derivation_text(read_file(files[0]), config));
            out << d.apply(parse_eval(exprs[0], config)).str() << "\n";
            return 0;
        }
        if (c_comm->parsed()) {
            if (exprs.size() == 2 && files.empty()) {
                out << commutator(parse_eval(exprs[0], config), parse_eval(exprs[1], config)).str() << "\n";
                return 0;
            }
            if (files.size() == 2 && exprs.empty()) {
                Derivation d1 = Derivation::sparse(parse_derivation_text(read_file(files[0]), config));
                Derivation d2 = Derivation::sparse(parse_derivation_text(read_file(files[1]), config));
                out << format_system(derivation_commutator(d1, d2).as_system());
                return 0;
            }
            fail(Errc::SyntaxError, "commutator needs two --expr or two --file");
        }
        if (c_solve->parsed()) {
            if (files.size() != 1 || n_flag < 1) fail(Errc::SyntaxError, "inner-solve needs one --file and --n");
            Derivation d = Derivation::sparse(parse_derivation_text(read_file(files[0]), config));
            SiteSet sites;
            for (int i = 1; i <= n_flag; ++i) sites.insert(i);
            out << inner_solve_local(d, sites).str() << "\n";
            return 0;
        }
        if (c_peel->parsed()) {
            if (files.size() != 1 || n_flag < 1) fail(Errc::SyntaxError, "peel needs one --file and --n");
            UnitalEndo tmp = parse_endo_text(read_file(files[0]), config); // reuse image parsing
            std::map<GeneratorKey, Element> images;
            for (int i = 1; i <= tmp.source_level(); ++i)
                for (int p = 1; p <= config.shape.size(i); ++p)
                    for (int q = 1; q <= config.shape.size(i); ++q) {
                        if (p == 1 && q == 1) continue;
                        images.emplace(GeneratorKey{i, p, q}, tmp.image(i, p, q));
                    }
            auto peeled = peel_derivation(config.field, config.shape, images, n_flag);
            int k = 1;
            for (const auto& [sites, a] : peeled) {
                out << "a[" << k++ << "] sites=";
                bool first = true;
                for (int i : sites) {
                    out << (first ? "" : ",") << i;
                    first = false;
                }
                out << ": " << a.str() << "\n";
            }
            if (peeled.empty()) out << "# zero derivation\n";
            return 0;
        }
        if (c_expand->parsed()) {
            if (files.size() != 1) fail(Errc::SyntaxError, "expand-basis needs one --file");
            Derivation d = Derivation::sparse(parse_derivation_text(read_file(files[0]), config));
            out << format_expansion(expand_basis(d));
            return 0;
        }
        if (c_sn->parsed()) {
            if (files.size() != 1) fail(Errc::SyntaxError, "skolem-noether needs one --file");
            UnitalEndo phi = parse_endo_text(read_file(files[0]), config);
            std::vector<int> S, T;
            for (int i = 1; i <= phi.source_level(); ++i) S.push_back(i);
            int hi = std::max(phi.target_level(), n_flag > 0 ? n_flag : 0);
            for (int i = 1; i <= hi; ++i) T.push_back(i);
            out << skolem_noether(phi, S, T, config.seed).str() << "\n";
            return 0;
        }
        if (c_fact->parsed()) {
            if (files.size() != 1) fail(Errc::SyntaxError, "factorize needs one --file");
            UnitalEndo phi = parse_endo_text(read_file(files[0]), config);
            ConjugatorSeq seq = factorize(phi, config.seed);
            for (int k = 1; k <= seq.size(); ++k) out << "a[" << k << "] = " << seq.element(k).str() << "\n";
            return 0;
        }
        if (c_integr->parsed()) {
            if (files.size() != 1 || exprs.size() != 1 || n_flag < 1)
                fail(Errc::SyntaxError, "integrability needs one --file, one --expr and --n");
            ConjugatorSeq seq = parse_seq_text(read_file(files[0]), config);
            std::vector<int> profile = integrability_profile(seq, parse_eval(exprs[0], config), n_flag);
            out << "profile: ";
            for (size_t i = 0; i < profile.size(); ++i) out << (i ? "," : "") << profile[i];
            out << "\n";
            return 0;
        }
        if (c_mmul->parsed() || c_mcomm->parsed()) {
            if (patterns.size() != 2) fail(Errc::SyntaxError, "need exactly two pattern specs");
            PatternMatrix x = parse_pattern_spec(patterns[0], config);
            PatternMatrix y = parse_pattern_spec(patterns[1], config);
            out << format_pattern(c_mmul->parsed() ? pattern_mul(x, y) : pattern_commutator(x, y));
            return 0;
        }
        if (c_verify->parsed()) {
            const int n = n_flag > 0 ? n_flag : 10;
            if (suite == "example2") return verify_example2(config, n, out);
            if (suite == "example1") return verify_example1(config, n, out);
            if (suite == "ladder") return verify_ladder(config, k_flag > 0 ? k_flag : 5, out);
            if (suite == "minf-ladder") return verify_minf_ladder(config, k_flag > 0 ? k_flag : 6, out);
            if (suite == "af-action") return verify_af_action(config, out);
            fail(Errc::SyntaxError, "unknown suite '" + suite + "'");
        }
        err << "usage error: no subcommand\n";
        return 2;
    } catch (const Error& e) {
        if (e.code() == Errc::SyntaxError || e.code() == Errc::IndexOutOfRange) {
            err << "usage error: " << e.what() << "\n";
            return 2;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace locmat
