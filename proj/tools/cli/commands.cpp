#include "cli/commands.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <json.hpp>

#include "wcsense/coherence.hpp"
#include "wcsense/errors.hpp"
#include "wcsense/evolution.hpp"
#include "wcsense/optomech.hpp"
#include "wcsense/thermo.hpp"
#include "wcsense/version.hpp"

namespace wcsense::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---- formatting ------------------------------------------------------------

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_real(const std::string& s, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw UsageError(std::string(what) + ": '" + s + "' is not a finite number");
    return v;
}

int parse_count(const std::string& s, const char* what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
        throw UsageError(std::string(what) + ": count '" + s + "' must be a positive integer");
    return v;
}

struct GridSpec {
    double start, stop;
    int count;
};

GridSpec parse_grid_spec(std::string_view spec) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError("grid '" + std::string(spec) + "' must be start:stop:count");
    return {parse_real(parts[0], "grid start"), parse_real(parts[1], "grid stop"), parse_count(parts[2], "grid")};
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
    const auto g = parse_grid_spec(spec);
    std::vector<double> out(static_cast<std::size_t>(g.count));
    if (g.count == 1) {
        out[0] = g.start;
        return out;
    }
    const double step = (g.stop - g.start) / (g.count - 1);
    for (int i = 0; i < g.count; ++i) out[static_cast<std::size_t>(i)] = g.start + step * i;
    out.back() = g.stop;
    return out;
}

std::vector<double> parse_log_grid(std::string_view spec) {
    const auto g = parse_grid_spec(spec);
    if (!(g.start > 0.0) || !(g.stop > 0.0)) throw UsageError("log grid endpoints must be > 0");
    std::vector<double> out(static_cast<std::size_t>(g.count));
    if (g.count == 1) {
        out[0] = g.start;
        return out;
    }
    const double l0 = std::log(g.start);
    const double step = (std::log(g.stop) - l0) / (g.count - 1);
    for (int i = 0; i < g.count; ++i) out[static_cast<std::size_t>(i)] = std::exp(l0 + step * i);
    out.front() = g.start;
    out.back() = g.stop;
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string CsvTable::render() const {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) s += ',';
        s += header[i];
    }
    s += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) s += ',';
            if (row[i]) s += format_double(*row[i]);
        }
        s += '\n';
    }
    return s;
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

std::string manifest_path_for(const std::string& csv_path) {
    fs::path p(csv_path);
    p.replace_extension(".manifest.json");
    return p.string();
}

// ---- commands --------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

struct Common {
    std::string out;
    double tail = kDefaultTailTol;
    unsigned threads = 0;  // 0: library default
};

struct ProcessFlags {
    std::string process = "cross-kerr";
    int s = 1;
    double chi = 1.0;
    int k = 2;
    double g = 1.0;
    int max_order = kExchangeOrderGuard;
    std::vector<std::string> terms;  // hybrid: coef:cross-kerr:s or coef:exchange:k
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "Output CSV path (manifest is written next to it)")->required();
    sub->add_option("--tail", c.tail, "Thermal tail tolerance for the input cutoff")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
}

void add_process(CLI::App* sub, ProcessFlags& p) {
    sub->add_option("--process", p.process, "cross-kerr | exchange | hybrid")
        ->capture_default_str()
        ->check(CLI::IsMember({"cross-kerr", "exchange", "hybrid"}));
    sub->add_option("--s", p.s, "Cross-phase order")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--chi", p.chi, "Cross-phase strength")->capture_default_str();
    sub->add_option("--k", p.k, "Exchange order")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--g", p.g, "Exchange strength")->capture_default_str();
    sub->add_option("--max-order", p.max_order, "Exchange order guard")->capture_default_str();
    sub->add_option("--term", p.terms, "Hybrid term coef:cross-kerr:s or coef:exchange:k (repeatable)");
}

ProcessSpec build_process(const ProcessFlags& p) {
    if (p.process == "cross-kerr") return CrossPhase{p.s, p.chi};
    if (p.process == "exchange") return Exchange{p.k, p.g, p.max_order};
    if (p.terms.empty()) throw UsageError("--process hybrid needs at least one --term");
    Hybrid h;
    for (const auto& t : p.terms) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) throw UsageError("--term '" + t + "' must be coef:kind:order");
        const double coef = parse_real(parts[0], "--term coefficient");
        const int order = parse_count(parts[2], "--term order");
        if (parts[1] == "cross-kerr")
            h.terms.push_back({coef, CrossPhase{order, 1.0}});
        else if (parts[1] == "exchange")
            h.terms.push_back({coef, Exchange{order, 1.0, p.max_order}});
        else
            throw UsageError("--term kind must be cross-kerr or exchange");
    }
    return h;
}

json process_json(const ProcessFlags& p) {
    json j;
    j["process"] = p.process;
    if (p.process == "cross-kerr") {
        j["s"] = p.s;
        j["chi"] = p.chi;
    } else if (p.process == "exchange") {
        j["k"] = p.k;
        j["g"] = p.g;
        j["max_order"] = p.max_order;
    } else {
        j["terms"] = p.terms;
        j["max_order"] = p.max_order;
    }
    return j;
}

void check_nbar(double nbar) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw UsageError("--nbar must be a finite value >= 0");
}

struct Run {
    std::string command;
    json parameters = json::object();
    std::vector<int> cutoffs;
    std::vector<double> tail_masses;
    json results = json::object();
    CsvTable table;
};

void emit(const std::vector<std::string>& argv, const Common& common, const Run& run, Clock::time_point t0,
          std::ostream& out) {
    const std::string csv = run.table.render();
    const fs::path csv_path(common.out);
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    {
        std::ofstream f(csv_path, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigurationError("cannot open '" + common.out + "' for writing");
        f.write(csv.data(), static_cast<std::streamsize>(csv.size()));
        if (!f) throw ConfigurationError("write to '" + common.out + "' failed");
    }
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();

    json m;
    m["command"] = run.command;
    m["argv"] = argv;
    m["parameters"] = run.parameters;
    m["engine_version"] = kEngineVersion;
    m["cutoffs"] = run.cutoffs;
    m["tail_masses"] = run.tail_masses;
    if (!run.results.empty()) m["results"] = run.results;
    m["wall_time_s"] = wall;
    m["outputs"] = json::array({json{{"file", csv_path.filename().string()},
                                     {"bytes", csv.size()},
                                     {"sha256", sha256_hex(csv)}}});
    const std::string mpath = manifest_path_for(common.out);
    std::ofstream f(mpath, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigurationError("cannot open '" + mpath + "' for writing");
    f << m.dump(2) << '\n';
    out << "wrote " << common.out << " (" << run.table.rows.size() << " rows) and " << mpath << '\n';
}

// wc-sweep ---------------------------------------------------------------------

Run wc_sweep(const ProcessFlags& pf, double nbar, const std::string& grid, const Common& c) {
    check_nbar(nbar);
    const auto thetas = parse_grid(grid);
    const auto input = ThermalInput::from_tail(nbar, c.tail);
    MziEngine engine(build_process(pf), input);
    if (c.threads) engine.set_threads(c.threads);
    const auto outs = engine.evaluate(thetas);

    Run run;
    run.command = "wc-sweep";
    run.parameters = process_json(pf);
    run.parameters["nbar"] = nbar;
    run.parameters["theta"] = grid;
    run.parameters["tail"] = c.tail;
    run.cutoffs = {input.cutoff};
    run.tail_masses = {input.tail_mass()};
    run.table.header = {"theta", "W", "eta", "wc_dispersion", "mean_a", "mean_b", "parity_odd_mass"};
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const auto& o = outs[i];
        const auto rep = nbar > 0.0 ? ergotropy(o.a, nbar) : ergotropy(o.a);
        run.table.rows.push_back({thetas[i], rep.wc, rep.efficiency, rep.wc_dispersion, o.a.mean(), o.b.mean(),
                                  o.a.odd_mass()});
    }
    return run;
}

// max-efficiency ---------------------------------------------------------------

Run max_eff(const ProcessFlags& pf, const std::vector<double>& nbars, std::optional<double> theta_max, int grid,
            const Common& c) {
    if (nbars.empty()) throw UsageError("max-efficiency needs --nbar or --nbar-log");
    for (double n : nbars)
        if (!(n > 0.0) || !std::isfinite(n)) throw UsageError("max-efficiency: every nbar must be > 0");
    if (grid < 100) throw UsageError("--grid must be >= 100");
    const auto process = build_process(pf);
    const double tmax = theta_max.value_or(default_theta_max(process));
    if (!(tmax > 0.0)) throw UsageError("--theta-max must be > 0");

    Run run;
    run.command = "max-efficiency";
    run.parameters = process_json(pf);
    run.parameters["nbar"] = nbars;
    run.parameters["theta_max"] = tmax;
    run.parameters["grid"] = grid;
    run.parameters["tail"] = c.tail;
    run.table.header = {"nbar", "eta_max", "theta_star", "eta_max_times_nbar"};
    for (double n : nbars) {
        const auto r = max_efficiency(process, n, tmax, grid, c.tail);
        run.cutoffs.push_back(r.cutoff);
        run.tail_masses.push_back(ThermalInput{n, r.cutoff}.tail_mass());
        run.table.rows.push_back({n, r.eta_max, r.theta_star, r.eta_max * n});
    }
    return run;
}

// coherence --------------------------------------------------------------------

Run coherence(const ProcessFlags& pf, double nbar, const std::string& grid, const Common& c) {
    check_nbar(nbar);
    const auto thetas = parse_grid(grid);
    const auto input = ThermalInput::from_tail(nbar, c.tail);
    MziEngine engine(build_process(pf), input);
    if (c.threads) engine.set_threads(c.threads);
    const auto outs = engine.evaluate(thetas);

    Run run;
    run.command = "coherence";
    run.parameters = process_json(pf);
    run.parameters["nbar"] = nbar;
    run.parameters["theta"] = grid;
    run.parameters["tail"] = c.tail;
    run.cutoffs = {input.cutoff};
    run.tail_masses = {input.tail_mass()};
    run.table.header = {"theta", "W", "g2", "g3", "g4", "g2_norm", "g3_norm", "g4_norm", "g2_from_wc"};
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const auto rep = ergotropy(outs[i].a);
        const auto co = coherence_report(outs[i].a);
        run.table.rows.push_back({thetas[i], rep.wc, co.g2, co.g3, co.g4, co.g2_norm, co.g3_norm, co.g4_norm,
                                  g2_from_wc(rep)});
    }
    return run;
}

// optomech ---------------------------------------------------------------------

struct OscFlags {
    double G = 0.05;
    double Omega = 1.0;
    double alpha_re = 1.0;
    double alpha_im = 0.0;
    std::optional<double> nbar_o;  // thermal init when set
    std::string tau;               // default: 256 points over Omega tau in [0, 4 pi]
    int osc_cutoff = 0;            // 0: automatic
};

Run optomech(const ProcessFlags& pf, double nbar, double t, const OscFlags& of, const Common& c) {
    check_nbar(nbar);
    OscillatorConfig cfg;
    cfg.G = of.G;
    cfg.Omega = of.Omega;
    const cplx alpha(of.alpha_re, of.alpha_im);
    if (of.nbar_o)
        cfg.init = ThermalInit{*of.nbar_o};
    else
        cfg.init = CoherentInit{alpha};
    cfg.validate();
    const auto taus = of.tau.empty() ? oscillator_grid(cfg.Omega, 256, 2.0) : parse_grid(of.tau);

    const auto input = ThermalInput::from_tail(nbar, c.tail);
    const auto field_dist = mzi_output(build_process(pf), t, input).a;
    const auto field = FieldSummary::from_distribution(field_dist);

    OscillatorTrace closed;
    std::string form;
    if (!field.parity_filtered) {
        closed = moment_trace(field, cfg, taus);
        form = "moment";
    } else if (of.nbar_o) {
        closed = phonon_trace_thermal(field, cfg, taus);
        closed.xvar = position_variance(field, cfg, taus);
        form = "work-capacity-thermal";
    } else {
        closed = phonon_trace_coherent(field, cfg, taus);
        form = "work-capacity-coherent";
    }

    OscillatorTrace oracle;
    int used_cutoff = of.osc_cutoff;
    if (of.osc_cutoff > 0) {
        oracle = full_quantum_oracle(field_dist, cfg, of.osc_cutoff, taus);
    } else {
        for (used_cutoff = 32;; used_cutoff *= 2) {
            try {
                oracle = full_quantum_oracle(field_dist, cfg, used_cutoff, taus);
                break;
            } catch (const ConfigurationError&) {
                if (used_cutoff >= 2048) throw;
            }
        }
    }

    Run run;
    run.command = "optomech";
    run.parameters = process_json(pf);
    run.parameters["nbar"] = nbar;
    run.parameters["t"] = t;
    run.parameters["G"] = cfg.G;
    run.parameters["Omega"] = cfg.Omega;
    if (of.nbar_o) {
        run.parameters["init"] = "thermal";
        run.parameters["nbar_o"] = *of.nbar_o;
    } else {
        run.parameters["init"] = "coherent";
        run.parameters["alpha"] = {alpha.real(), alpha.imag()};
    }
    run.parameters["tau"] = of.tau.empty() ? std::string("default") : of.tau;
    run.parameters["tail"] = c.tail;
    run.cutoffs = {input.cutoff, used_cutoff};
    run.tail_masses = {input.tail_mass()};

    json res;
    res["closed_form"] = form;
    res["field_wc"] = field.wc;
    res["field_wc_dispersion"] = field.wc_dispersion;
    res["field_mean"] = field.mean;
    res["parity_filtered"] = field.parity_filtered;
    if (!of.nbar_o) {
        try {
            const auto est = infer_wc(closed, alpha, cfg.G, cfg.Omega);
            res["inferred_wc"] = est.wc;
            res["inferred_wc_exact"] = est.exact;
            if (est.wc_dispersion) res["inferred_wc_dispersion"] = *est.wc_dispersion;
        } catch (const FitError& e) {
            res["inferred_wc"] = nullptr;
            res["inferred_wc_error"] = e.what();
        }
    } else {
        res["inferred_wc"] = nullptr;
        res["inferred_wc_error"] = "inversion needs a coherent oscillator state";
    }
    run.results = res;

    run.table.header = {"tau", "phonon_closed_form", "phonon_oracle", "xvar"};
    for (std::size_t i = 0; i < taus.size(); ++i)
        run.table.rows.push_back({taus[i], closed.phonon[i], oracle.phonon[i], closed.xvar[i]});
    return run;
}

// pdc --------------------------------------------------------------------------

Run pdc(const std::string& variant, double g, double nbar, const std::string& grid, std::size_t guard,
        const Common& c) {
    check_nbar(nbar);
    const auto ts = parse_grid(grid);
    const auto pump = ThermalInput::from_tail(nbar, c.tail);
    ProcessSpec process;
    if (variant == "degenerate")
        process = DegeneratePdc{g};
    else
        process = NonDegeneratePdc{g};
    const auto sig = pdc_signal_output(process, pump, ts, guard);

    Run run;
    run.command = "pdc";
    run.parameters["variant"] = variant;
    run.parameters["g"] = g;
    run.parameters["nbar"] = nbar;
    run.parameters["gt"] = grid;
    run.parameters["dim_guard"] = guard;
    run.parameters["tail"] = c.tail;
    run.cutoffs = {pump.cutoff};
    run.tail_masses = {pump.tail_mass()};
    run.table.header = {"gt"};
    for (int n = 0; n <= 8; ++n) run.table.header.push_back("p" + std::to_string(n));
    run.table.header.push_back("W_signal");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::vector<std::optional<double>> row{ts[i]};
        for (std::size_t n = 0; n <= 8; ++n) row.push_back(sig[i][n]);
        row.push_back(ergotropy(sig[i]).wc);
        run.table.rows.push_back(std::move(row));
    }
    return run;
}

// replay -----------------------------------------------------------------------

int replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
    std::ifstream f(manifest_path, std::ios::binary);
    if (!f) throw UsageError("cannot read manifest '" + manifest_path + "'");
    json m;
    try {
        m = json::parse(f);
    } catch (const json::exception& e) {
        throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!m.contains("argv") || !m.contains("outputs") || m["outputs"].empty())
        throw UsageError("manifest lacks argv or outputs");
    auto argv = m["argv"].get<std::vector<std::string>>();
    const std::string expected = m["outputs"][0]["sha256"].get<std::string>();

    const fs::path dir = fs::temp_directory_path() /
                         ("wcsense-replay-" + sha256_hex(manifest_path + std::to_string(Clock::now().time_since_epoch().count())).substr(0, 16));
    fs::create_directories(dir);
    const std::string tmp_csv = (dir / "replay.csv").string();
    bool replaced = false;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == "--out" && i + 1 < argv.size()) {
            argv[i + 1] = tmp_csv;
            replaced = true;
        } else if (argv[i].rfind("--out=", 0) == 0) {
            argv[i] = "--out=" + tmp_csv;
            replaced = true;
        }
    }
    if (!replaced) throw UsageError("manifest argv has no --out");

    std::ostringstream sink;
    const int code = run(argv, sink, err);
    std::string produced;
    if (code == kExitOk) {
        std::ifstream in(tmp_csv, std::ios::binary);
        produced.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    if (code != kExitOk) {
        err << "replay: re-run exited with code " << code << '\n';
        return code;
    }
    const std::string got = sha256_hex(produced);
    if (got != expected) {
        err << "replay: digest mismatch (expected " << expected << ", got " << got << ")\n";
        return kExitNumeric;
    }
    out << "replay: identical output (" << got << ")\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Work-capacity sensing: interferometer sweeps, coherence, optomechanical readout"};
    app.require_subcommand(1);

    Common common;
    ProcessFlags pf;

    double nbar = 1.0;
    std::string theta = "0:6.283185307179586:400";

    auto* sweep = app.add_subcommand("wc-sweep", "Work capacity over an interaction-time grid");
    add_process(sweep, pf);
    add_common(sweep, common);
    sweep->add_option("--nbar", nbar, "Thermal input mean photon number")->capture_default_str();
    sweep->add_option("--theta", theta, "Grid start:stop:count (radians)")->capture_default_str();

    std::vector<double> nbar_list;
    std::string nbar_log;
    std::optional<double> theta_max;
    int grid = 400;
    auto* maxeff = app.add_subcommand("max-efficiency", "Maximal efficiency over theta for each nbar");
    add_process(maxeff, pf);
    add_common(maxeff, common);
    maxeff->add_option("--nbar", nbar_list, "Comma-separated nbar values")->delimiter(',');
    maxeff->add_option("--nbar-log", nbar_log, "Log-spaced nbar grid start:stop:count");
    maxeff->add_option("--theta-max", theta_max, "Scan window [0, theta-max] (default 2pi cross-kerr, 4pi else)");
    maxeff->add_option("--grid", grid, "Coarse scan points")->capture_default_str();

    auto* coh = app.add_subcommand("coherence", "g2, g3, g4 and the work-capacity route to g2");
    add_process(coh, pf);
    add_common(coh, common);
    coh->add_option("--nbar", nbar, "Thermal input mean photon number")->capture_default_str();
    coh->add_option("--theta", theta, "Grid start:stop:count (radians)")->capture_default_str();

    OscFlags of;
    double t = std::numbers::pi;
    auto* opt_cmd = app.add_subcommand("optomech", "Oscillator phonon trace driven by the output field");
    add_process(opt_cmd, pf);
    add_common(opt_cmd, common);
    opt_cmd->add_option("--nbar", nbar, "Thermal input mean photon number")->capture_default_str();
    opt_cmd->add_option("--t", t, "Interaction time of the nonlinear element")->capture_default_str();
    opt_cmd->add_option("--G", of.G, "Field-oscillator coupling")->capture_default_str();
    opt_cmd->add_option("--Omega", of.Omega, "Oscillator frequency")->capture_default_str();
    opt_cmd->add_option("--alpha", of.alpha_re, "Coherent amplitude, real part")->capture_default_str();
    opt_cmd->add_option("--alpha-im", of.alpha_im, "Coherent amplitude, imaginary part")->capture_default_str();
    opt_cmd->add_option("--nbar-o", of.nbar_o, "Thermal oscillator occupation (replaces the coherent state)");
    opt_cmd->add_option("--tau", of.tau, "Grid start:stop:count (default 256 points over Omega tau in [0, 4pi])");
    opt_cmd->add_option("--osc-cutoff", of.osc_cutoff, "Oscillator Fock cutoff for the oracle (0 = automatic)")
        ->capture_default_str();

    std::string variant = "degenerate";
    double pdc_g = 1.0;
    std::string gt = "0:3.141592653589793:64";
    std::size_t guard = kDefaultDimensionGuard;
    auto* pdc_cmd = app.add_subcommand("pdc", "Parametric down-conversion signal statistics");
    add_common(pdc_cmd, common);
    pdc_cmd->add_option("--variant", variant, "degenerate | non-degenerate")
        ->capture_default_str()
        ->check(CLI::IsMember({"degenerate", "non-degenerate"}));
    pdc_cmd->add_option("--g", pdc_g, "Coupling")->capture_default_str();
    pdc_cmd->add_option("--nbar", nbar, "Thermal pump mean photon number")->capture_default_str();
    pdc_cmd->add_option("--gt", gt, "Grid start:stop:count")->capture_default_str();
    pdc_cmd->add_option("--dim-guard", guard, "Maximum Hilbert-space dimension")->capture_default_str();

    std::string manifest;
    auto* rep = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
    rep->add_option("--manifest", manifest, "Manifest JSON path")->required();

    std::vector<std::string> owned{"wcsense"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<char*> cargv;
    for (auto& s : owned) cargv.push_back(s.data());

    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto t0 = Clock::now();
        Run r;
        if (sweep->parsed()) {
            r = wc_sweep(pf, nbar, theta, common);
        } else if (maxeff->parsed()) {
            auto nbars = nbar_list;
            if (!nbar_log.empty()) {
                const auto lg = parse_log_grid(nbar_log);
                nbars.insert(nbars.end(), lg.begin(), lg.end());
            }
            r = max_eff(pf, nbars, theta_max, grid, common);
        } else if (coh->parsed()) {
            r = coherence(pf, nbar, theta, common);
        } else if (opt_cmd->parsed()) {
            r = optomech(pf, nbar, t, of, common);
        } else if (pdc_cmd->parsed()) {
            r = pdc(variant, pdc_g, nbar, gt, guard, common);
        } else {
            return replay(manifest, out, err);
        }
        emit(args, common, r, t0, out);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace wcsense::cli
