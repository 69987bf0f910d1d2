// Command-line front end: propagate fields through first-order systems, build
// Wigner tables, take Radon strips, and run the built-in consistency checks.
//
// Exit codes: 0 success, 2 config error, 3 numeric precondition, 4 file I/O,
// 5 size cap. All data files are deterministic; --no-timestamp makes the
// console log deterministic too.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "efresnel/collins_cyl.hpp"
#include "efresnel/io.hpp"
#include "efresnel/radon.hpp"

using nlohmann::json;
using namespace efresnel;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

std::string g17(double v) { return detail::fmt_g17(v); }

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(path + ": config must be a JSON object");
    return j;
}

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

const json& need(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("missing key '") + key + "' in " + where);
    return *it;
}

cd parse_complex(const json& j, const char* where) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(std::string(where) + " must be a two-element array [re, im]");
    return cd(j[0].get<double>(), j[1].get<double>());
}

GridSpec parse_grid(const json& j, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object {n, L}");
    check_keys(j, where, {"n", "L"});
    return GridSpec(need(j, "n", where).get<int>(), need(j, "L", where).get<double>());
}

ABCDMatrix parse_matrix(const json& j) {
    if (!j.is_object()) throw ConfigError("matrix must be an object {a, b, c, d}");
    check_keys(j, "matrix", {"a", "b", "c", "d"});
    ABCDMatrix m{need(j, "a", "matrix").get<double>(), need(j, "b", "matrix").get<double>(),
                 need(j, "c", "matrix").get<double>(), need(j, "d", "matrix").get<double>()};
    m.validate();
    return m;
}

AnalyticBeam parse_beam(const json& j) {
    if (!j.is_object()) throw ConfigError("beam must be an object with a 'type'");
    std::string type = need(j, "type", "beam").get<std::string>();
    if (type == "gaussian") {
        check_keys(j, "beam", {"type", "center", "width"});
        cd center = j.contains("center") ? parse_complex(j["center"], "beam.center") : cd(0, 0);
        return AnalyticBeam::gaussian(center, j.value("width", 1.0));
    }
    if (type == "angular_mode") {
        check_keys(j, "beam", {"type", "s", "width"});
        return AnalyticBeam::angular_mode(need(j, "s", "beam").get<int>(), j.value("width", 1.0));
    }
    if (type == "superposition") {
        check_keys(j, "beam", {"type", "parts"});
        const json& parts = need(j, "parts", "beam");
        if (!parts.is_array() || parts.empty())
            throw ConfigError("beam.parts must be a non-empty array");
        std::vector<std::pair<cd, AnalyticBeam>> out;
        for (const json& p : parts) {
            check_keys(p, "beam.parts[]", {"coeff", "beam"});
            out.emplace_back(parse_complex(need(p, "coeff", "beam.parts[]"), "coeff"),
                             parse_beam(need(p, "beam", "beam.parts[]")));
        }
        return AnalyticBeam::superposition(std::move(out));
    }
    throw ConfigError("unknown beam type '" + type + "' (want gaussian|angular_mode|superposition)");
}

// exactly one of beam+grid or input:<cf64 path>
ComplexField load_field(const json& cfg, const char* cmd) {
    bool has_beam = cfg.contains("beam"), has_input = cfg.contains("input");
    if (has_beam == has_input)
        throw ConfigError(std::string(cmd) + ": provide exactly one of 'beam' (with 'grid') or 'input'");
    if (has_input) return read_cf64(cfg["input"].get<std::string>()).as_complex();
    return sample_beam(parse_beam(cfg["beam"]), parse_grid(need(cfg, "grid", cmd), "grid"));
}

KernelVariant parse_variant(const json& cfg) {
    std::string v = cfg.value("variant", "spatial");
    if (v == "spatial") return KernelVariant::Spatial;
    if (v == "spatial_swapped") return KernelVariant::SpatialSwapped;
    if (v == "frequency") return KernelVariant::Frequency;
    throw ConfigError("unknown variant '" + v + "' (want spatial|spatial_swapped|frequency)");
}

std::string resolve_out(const std::string& output_dir, const std::string& name) {
    fs::path p = fs::path(output_dir) / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
}

void print_warnings(const std::vector<Warning>& ws) {
    for (const Warning& w : ws)
        std::cout << "warning " << warning_name(w.code) << ": " << w.message << "\n";
}

// doubles held by an ns x ns x ng x ng table; the CLI refuses to materialize
// more than 2,000,000 without --override-size-cap
constexpr double cli_table_cap = 2e6;

void check_cli_cap(const GridSpec& sg, const GridSpec& gg, bool override_cap) {
    double doubles = double(sg.n) * sg.n * double(gg.n) * gg.n;
    if (doubles > cli_table_cap && !override_cap)
        throw SizeCapExceeded("table would hold " + std::to_string((long long)doubles) +
                              " doubles, over the 2000000 cap; pass --override-size-cap to proceed");
}

int cmd_propagate(const json& cfg, const std::string& output_dir) {
    check_keys(cfg, "propagate config",
               {"beam", "grid", "input", "matrix", "variant", "output_grid", "output"});
    ABCDMatrix m = parse_matrix(need(cfg, "matrix", "propagate config"));
    KernelVariant variant = parse_variant(cfg);
    ComplexField in = load_field(cfg, "propagate");
    GridSpec out_spec =
        cfg.contains("output_grid") ? parse_grid(cfg["output_grid"], "output_grid") : in.spec;
    print_warnings(sampling_diagnostics(m, in.spec, out_spec, variant));
    ComplexField out = propagate(in, m, variant, out_spec);
    std::string path =
        resolve_out(output_dir, need(cfg, "output", "propagate config").get<std::string>());
    write_cf64(path, out);
    std::cout << "norm_sq " << g17(field_norm_sq(out)) << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_wigner(const json& cfg, const std::string& output_dir, bool override_cap) {
    check_keys(cfg, "wigner config", {"beam", "grid", "input", "sigma_grid", "gamma_grid", "output"});
    GridSpec sg = parse_grid(need(cfg, "sigma_grid", "wigner config"), "sigma_grid");
    GridSpec gg = parse_grid(need(cfg, "gamma_grid", "wigner config"), "gamma_grid");
    check_cli_cap(sg, gg, override_cap);
    WignerTable tab = wigner(load_field(cfg, "wigner"), sg, gg, override_cap);
    std::string path = resolve_out(output_dir, need(cfg, "output", "wigner config").get<std::string>());
    write_wf64(path, tab);
    std::cout << "mass " << g17(table_mass(tab)) << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_radon(const json& cfg, const std::string& output_dir, bool override_cap) {
    check_keys(cfg, "radon config", {"table", "beam", "grid", "input", "sigma_grid", "gamma_grid",
                                     "strip", "matrix", "check", "output_grid", "policy", "output"});
    WignerTable tab;
    if (cfg.contains("table")) {
        if (cfg.contains("beam") || cfg.contains("input"))
            throw ConfigError("radon: provide either 'table' or a field source, not both");
        tab = read_wf64(cfg["table"].get<std::string>());
    } else {
        GridSpec sg = parse_grid(need(cfg, "sigma_grid", "radon config"), "sigma_grid");
        GridSpec gg = parse_grid(need(cfg, "gamma_grid", "radon config"), "gamma_grid");
        check_cli_cap(sg, gg, override_cap);
        tab = wigner(load_field(cfg, "radon"), sg, gg, override_cap);
    }

    StripParams strip{0, 0};
    if (cfg.contains("strip")) {
        if (cfg.contains("matrix")) throw ConfigError("radon: provide either 'strip' or 'matrix'+'check'");
        const json& s = cfg["strip"];
        check_keys(s, "strip", {"p", "q"});
        strip = {need(s, "p", "strip").get<double>(), need(s, "q", "strip").get<double>()};
    } else {
        ABCDMatrix m = parse_matrix(need(cfg, "matrix", "radon config"));
        std::string check = need(cfg, "check", "radon config").get<std::string>();
        if (check == "spatial")
            strip = strip_spatial(m);
        else if (check == "frequency")
            strip = strip_frequency(m);
        else
            throw ConfigError("unknown check '" + check + "' (want spatial|frequency)");
    }

    std::string pol = cfg.value("policy", "strict");
    if (pol != "strict" && pol != "lenient")
        throw ConfigError("unknown policy '" + pol + "' (want strict|lenient)");
    ExtrapolationPolicy policy =
        pol == "strict" ? ExtrapolationPolicy::Strict : ExtrapolationPolicy::Lenient;

    GridSpec og = parse_grid(need(cfg, "output_grid", "radon config"), "output_grid");
    RadonResult res = radon_from_table(tab, strip, og, policy);
    print_warnings(res.warnings);
    std::cout << "extrapolated_fraction " << g17(res.extrapolated_fraction) << "\n";
    std::string path = resolve_out(output_dir, need(cfg, "output", "radon config").get<std::string>());
    write_cf64(path, res.values);
    std::cout << "wrote " << path << "\n";
    return 0;
}

void print_report(const IdentityReport& rep, bool with_fraction) {
    std::cout << "check " << rep.check << "\n";
    std::cout << "matrix a=" << g17(rep.matrix.a) << " b=" << g17(rep.matrix.b)
              << " c=" << g17(rep.matrix.c) << " d=" << g17(rep.matrix.d) << "\n";
    print_warnings(rep.warnings);
    for (const auto& pm : rep.per_mode)
        std::cout << "mode " << pm.first << " rel_err=" << g17(pm.second) << "\n";
    if (with_fraction) std::cout << "extrapolated_fraction " << g17(rep.extrapolated_fraction) << "\n";
    std::cout << "lhs_mass " << g17(rep.lhs_norm) << " rhs_mass " << g17(rep.rhs_norm) << "\n";
    if (!rep.notes.empty()) std::cout << "note " << rep.notes << "\n";
    std::cout << "VERDICT " << (rep.pass ? "pass" : "fail") << " rel_l2=" << g17(rep.rel_l2_error)
              << " rel_linf=" << g17(rep.rel_linf_error) << "\n";
}

int cmd_verify(const json& cfg, bool override_cap) {
    std::string check = need(cfg, "check", "verify config").get<std::string>();
    AnalyticBeam beam = parse_beam(need(cfg, "beam", "verify config"));
    ABCDMatrix m = parse_matrix(need(cfg, "matrix", "verify config"));

    if (check == "hankel") {
        check_keys(cfg, "verify config",
                   {"check", "beam", "matrix", "field_grid", "n_r", "R", "s_max", "n_theta", "tolerance"});
        HankelConfig hc;
        hc.field = parse_grid(need(cfg, "field_grid", "verify config"), "field_grid");
        hc.n_r = cfg.value("n_r", 128);
        hc.R = cfg.value("R", 0.0);
        hc.s_max = cfg.value("s_max", 2);
        hc.n_theta = cfg.value("n_theta", 0);
        hc.tolerance = cfg.value("tolerance", 2e-3);
        print_report(verify_hankel_consistency(beam, m, hc), false);
        return 0;
    }
    if (check != "spatial" && check != "frequency")
        throw ConfigError("unknown check '" + check + "' (want spatial|frequency|hankel)");

    check_keys(cfg, "verify config", {"check", "beam", "matrix", "field_grid", "sigma_grid",
                                      "gamma_grid", "output_grid", "tolerance"});
    VerifyConfig vc;
    vc.field = parse_grid(need(cfg, "field_grid", "verify config"), "field_grid");
    vc.sigma = parse_grid(need(cfg, "sigma_grid", "verify config"), "sigma_grid");
    vc.gamma = parse_grid(need(cfg, "gamma_grid", "verify config"), "gamma_grid");
    vc.output = parse_grid(need(cfg, "output_grid", "verify config"), "output_grid");
    vc.tolerance = cfg.value("tolerance", 5e-3);
    vc.override_size_cap = override_cap;
    check_cli_cap(vc.sigma, vc.gamma, override_cap);
    IdentityReport rep = check == "spatial" ? verify_identity_spatial(beam, m, vc)
                                            : verify_identity_frequency(beam, m, vc);
    print_report(rep, true);
    return 0;
}

int cmd_import_check(const json& cfg) {
    check_keys(cfg, "import-check config", {"file", "expect"});
    std::string file = need(cfg, "file", "import-check config").get<std::string>();
    std::string expect = cfg.value("expect", "auto");
    if (expect == "auto") {
        std::ifstream is(file, std::ios::binary);
        if (!is) throw IoError("cannot open '" + file + "' for reading");
        char magic[4] = {0};
        is.read(magic, 4);
        std::string mg(magic, size_t(is.gcount()));
        expect = mg == "WF64" ? "wf64" : "cf64";  // cf64 reader reports precise magic errors
    }
    if (expect == "cf64") {
        LoadedField lf = read_cf64(file);
        std::cout << file << ": CF64 " << (lf.is_complex ? "complex" : "real") << " n=" << lf.spec().n
                  << " L=" << g17(lf.spec().L) << "\n";
    } else if (expect == "wf64") {
        WignerTable tab = read_wf64(file);
        std::cout << file << ": WF64 ns=" << tab.sigma_grid.n << " Ls=" << g17(tab.sigma_grid.L)
                  << " ng=" << tab.gamma_grid.n << " Lg=" << g17(tab.gamma_grid.L) << "\n";
    } else {
        throw ConfigError("unknown expect '" + expect + "' (want auto|cf64|wf64)");
    }
    std::cout << "ok\n";
    return 0;
}

int fail(const char* kind, const std::exception& e, int code) {
    std::cerr << "error " << kind << ": " << e.what() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entangled Fresnel transform toolkit"};
    app.require_subcommand(1);

    std::string config_path, output_dir = ".";
    bool override_cap = false, no_timestamp = false;
    app.add_flag("--override-size-cap", override_cap, "lift the 2,000,000-double table cap");
    app.add_flag("--no-timestamp", no_timestamp, "suppress the timestamp log line");
    app.add_option("--output-dir", output_dir, "directory for output files (default .)");

    CLI::App* sp = app.add_subcommand("propagate", "apply a first-order system to a field");
    CLI::App* sw = app.add_subcommand("wigner", "build a Wigner table from a field");
    CLI::App* sr = app.add_subcommand("radon", "strip transform of a Wigner table");
    CLI::App* sv = app.add_subcommand("verify", "run a built-in consistency check");
    CLI::App* si = app.add_subcommand("import-check", "validate a CF64/WF64 file");
    for (CLI::App* sub : {sp, sw, sr, sv, si}) {
        sub->add_option("config", config_path, "JSON config file")->required();
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (!no_timestamp) {
        std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        std::cout << "timestamp " << buf << "\n";
    }

    try {
        json cfg = load_config(config_path);
        if (sp->parsed()) return cmd_propagate(cfg, output_dir);
        if (sw->parsed()) return cmd_wigner(cfg, output_dir, override_cap);
        if (sr->parsed()) return cmd_radon(cfg, output_dir, override_cap);
        if (sv->parsed()) return cmd_verify(cfg, override_cap);
        return cmd_import_check(cfg);
    } catch (const SingularB& e) {
        return fail("SingularB", e, 3);
    } catch (const SingularC& e) {
        return fail("SingularC", e, 3);
    } catch (const ImaginaryResidue& e) {
        return fail("ImaginaryResidue", e, 3);
    } catch (const DegenerateStrip& e) {
        return fail("DegenerateStrip", e, 3);
    } catch (const ExcessiveExtrapolation& e) {
        return fail("ExcessiveExtrapolation", e, 3);
    } catch (const DomainError& e) {
        return fail("DomainError", e, 3);
    } catch (const SizeCapExceeded& e) {
        return fail("SizeCapExceeded", e, 5);
    } catch (const IoError& e) {
        return fail("IoError", e, 4);
    } catch (const InvalidMatrix& e) {
        return fail("InvalidMatrix", e, 2);
    } catch (const InvalidParams& e) {
        return fail("InvalidParams", e, 2);
    } catch (const InvalidGrid& e) {
        return fail("InvalidGrid", e, 2);
    } catch (const ConfigError& e) {
        return fail("config", e, 2);
    } catch (const json::exception& e) {
        return fail("config", e, 2);
    } catch (const std::exception& e) {
        return fail("internal", e, 1);
    }
}
