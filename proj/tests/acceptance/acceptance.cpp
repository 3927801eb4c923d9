// Acceptance suite: one PASS/FAIL line per criterion, diagnostics indented.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "cli/commands.hpp"
#include "oracles.hpp"
#include "wcsense/coherence.hpp"
#include "wcsense/evolution.hpp"
#include "wcsense/operators.hpp"
#include "wcsense/optomech.hpp"
#include "wcsense/thermo.hpp"

using namespace wcsense;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class... A>
void info(const char* fmt, A... a) {
    std::printf("    ");
    std::printf(fmt, a...);
    std::printf("\n");
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

// ---------------------------------------------------------------------------

bool closed_form_wc() {
    const auto t0 = Clock::now();
    bool ok = true;
    const auto ts = linspace(0.0, 2 * pi, 100);
    for (double nbar : {0.1, 1.0, 5.0}) {
        const auto in = ThermalInput::from_tail(nbar);
        MziEngine eng(CrossPhase{1, 1.0}, in);
        const auto outs = eng.evaluate(ts);
        double worst = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i)
            worst = std::max(worst, std::abs(ergotropy(outs[i].a).wc - wc_cross_kerr_closed_form(nbar, ts[i])));
        const double tol = 1e-9 + in.tail_mass();
        info("nbar=%g cutoff=%d max|W - closed form|=%.3e (tol %.3e)", nbar, in.cutoff, worst, tol);
        ok = ok && worst < tol;
    }
    const double dt = seconds_since(t0);
    info("runtime %.2f s (limit 5 s)", dt);
    return ok && dt < 5.0;
}

struct ParityCase {
    const char* name;
    ProcessSpec process;
    bool filtering;
};

const std::vector<ParityCase>& parity_cases() {
    static const std::vector<ParityCase> cases{
        {"cross-Kerr chi t=pi", CrossPhase{1, 1.0}, true},
        {"exchange k=2 gt=pi", Exchange{2}, true},
        {"exchange k=4 gt=pi", Exchange{4}, true},
        {"exchange k=3 gt=pi", Exchange{3}, false},
        {"exchange k=5 gt=pi", Exchange{5, 1.0, 5}, false},
    };
    return cases;
}

bool parity_filtering() {
    bool ok = true;
    const auto in = ThermalInput::from_tail(1.0);
    for (const auto& c : parity_cases()) {
        const double odd = mzi_output(c.process, pi, in).a.odd_mass();
        const bool pass = c.filtering ? odd < 1e-12 : odd > 1e-3;
        info("%-22s odd mass %.3e (%s) %s", c.name, odd, c.filtering ? "< 1e-12" : "> 1e-3", pass ? "ok" : "FAIL");
        ok = ok && pass;
    }
    return ok;
}

bool half_mean_identity() {
    bool ok = true;
    const auto in = ThermalInput::from_tail(1.0);
    for (const auto& c : parity_cases()) {
        if (!c.filtering) continue;
        const auto a = mzi_output(c.process, pi, in).a;
        const double w = ergotropy(a).wc;
        const double dev = std::abs(w - a.mean() / 2);
        info("%-22s W=%.9f <n>/2=%.9f |diff|=%.3e %s", c.name, w, a.mean() / 2, dev, dev < 1e-12 ? "ok" : "FAIL");
        ok = ok && dev < 1e-12;
    }
    return ok;
}

bool efficiency_saturation() {
    const auto t0 = Clock::now();
    const auto ck = max_efficiency(CrossPhase{1, 1.0}, 100.0, default_theta_max(CrossPhase{}), 400, 1e-4);
    const bool ck_ok = std::abs(ck.eta_max - 0.25) / 0.25 < 0.03;
    info("cross-Kerr nbar=100: eta_max=%.5f at theta=%.4f (cutoff %d) target 0.25 +-3%% %s", ck.eta_max,
         ck.theta_star, ck.cutoff, ck_ok ? "ok" : "FAIL");

    bool ex_ok = true;
    const double nbar = 20.0;
    const std::pair<int, double> targets[] = {{2, 0.4}, {3, 0.2}};
    for (const auto& [k, target] : targets) {
        const auto m = max_efficiency(Exchange{k}, nbar, default_theta_max(Exchange{k}));
        const double v = m.eta_max * nbar;
        const bool pass = std::abs(v - target) / target < 0.15;
        info("exchange k=%d nbar=20: eta_max*nbar=%.5f at gt=%.4f (cutoff %d) target %.1f +-15%% %s", k, v,
             m.theta_star, m.cutoff, target, pass ? "ok" : "FAIL");
        ex_ok = ex_ok && pass;
    }
    const double dt = seconds_since(t0);
    info("runtime %.2f s (limit 60 s)", dt);

    // wider windows, not part of the verdict
    for (int k : {2, 3})
        for (double w : {8 * pi, 16 * pi}) {
            const auto m = max_efficiency(Exchange{k}, nbar, w);
            info("info: k=%d window [0, %.0f pi]: eta_max*nbar=%.5f at gt=%.4f", k, w / pi, m.eta_max * nbar,
                 m.theta_star);
        }
    return ck_ok && ex_ok && dt < 60.0;
}

bool g2_from_wc_relation() {
    struct Suite {
        const char* name;
        ProcessSpec process;
    };
    const Suite suites[] = {{"cross-Kerr", CrossPhase{1, 1.0}}, {"exchange k=2", Exchange{2}}};
    bool ok = true;
    for (const auto& s : suites) {
        const auto ts = linspace(0.0, default_theta_max(s.process), 100);
        double worst = 0.0;
        int skipped = 0, bad = 0;
        for (double nbar : {0.1, 1.0, 5.0}) {
            MziEngine eng(s.process, ThermalInput::from_tail(nbar));
            const auto outs = eng.evaluate(ts);
            for (const auto& o : outs) {
                const auto via_wc = g2_from_wc(ergotropy(o.a));
                const auto direct = g_m(o.a, 2);
                if (!via_wc || !direct) {
                    ++skipped;
                    continue;
                }
                const double dev = std::abs(*via_wc - *direct);
                worst = std::max(worst, dev);
                if (dev >= 1e-9) ++bad;
            }
        }
        info("%-13s nbar in {0.1, 1, 5}, 100 points each: max|dev|=%.3e, %d points >= 1e-9, %d skipped (W=0)", s.name,
             worst, bad, skipped);
        ok = ok && bad == 0;
    }
    return ok;
}

bool small_nbar_scalings_check() {
    const double nbar = 0.01;
    const CrossPhase ck{1, 1.0};
    MziEngine eng(ck, ThermalInput::from_tail(nbar));
    bool ok = true;
    ScalingCalibration cal;
    bool have_cal = false;
    for (double t : {pi / 2, pi, 3 * pi / 2}) {
        const auto d = eng.evaluate(t).a;
        const double w = ergotropy(d).wc;
        if (w < 1e-12) {
            info("theta=%.4f skipped (W < 1e-12)", t);
            continue;
        }
        const auto meas = coherence_report(d);
        const auto pred = small_nbar_scalings(ck, nbar, t, w);
        const std::optional<double> m[3] = {meas.g2_norm, meas.g3_norm, meas.g4_norm};
        for (int i = 0; i < 3; ++i) {
            const double rel = std::abs(*pred.g_norm[static_cast<std::size_t>(i)] / *m[i] - 1.0);
            info("theta=%.4f g%d/%d!: predicted %.6g measured %.6g rel %.3f%% %s", t, i + 2, i + 2,
                 *pred.g_norm[static_cast<std::size_t>(i)], *m[i], 100 * rel, rel < 0.02 ? "ok" : "FAIL");
            ok = ok && rel < 0.02;
        }
        if (!have_cal) {
            cal = calibrate_scalings(pred, meas);
            have_cal = true;
        }
    }
    info("info: calibration factors from theta=pi/2: %.4f %.4f %.4f", cal.factor[0], cal.factor[1], cal.factor[2]);
    return ok;
}

bool leading_probabilities() {
    const double nbar = 0.05;
    const auto in = ThermalInput::from_tail(nbar);
    MziEngine k2(Exchange{2}, in);
    MziEngine k3(Exchange{3}, in);
    double w2 = 0.0, w3 = 0.0;
    for (double gt : linspace(0.0, 2 * pi, 241)) {
        w2 = std::max(w2, std::abs(k2.evaluate(gt).a[2] - oracle::k2_p2(nbar, gt)));
        const auto a = k3.evaluate(gt).a;
        for (int n = 1; n <= 4; ++n) w3 = std::max(w3, std::abs(a[static_cast<std::size_t>(n)] - oracle::k3_p(n, nbar, gt)));
    }
    const double t2 = 5 * std::pow(nbar, 3), t3 = 5 * std::pow(nbar, 4);
    info("k=2 P2: max|err|=%.3e (tol %.3e) %s", w2, t2, w2 < t2 ? "ok" : "FAIL");
    info("k=3 P1..P4: max|err|=%.3e (tol %.3e) %s", w3, t3, w3 < t3 ? "ok" : "FAIL");
    return w2 < t2 && w3 < t3;
}

bool oscillator_oracle() {
    const auto t0 = Clock::now();
    const PhotonDistribution field({0.5, 0.0, 0.5});
    OscillatorConfig cfg;
    cfg.G = 0.05;
    cfg.Omega = 1.0;
    cfg.init = CoherentInit{1.0};
    const auto taus = oscillator_grid(cfg.Omega);
    const auto cf = phonon_trace_coherent(FieldSummary::from_distribution(field), cfg, taus);
    const auto orc = full_quantum_oracle(field, cfg, 40, taus);
    const double dev = oracle::max_abs(cf.phonon, orc.phonon);
    const double dt = seconds_since(t0);
    info("%zu points over Omega tau in [0, 4pi], cutoff 40: max|phonon diff|=%.3e", taus.size(), dev);
    info("info: max|xvar diff|=%.3e", oracle::max_abs(cf.xvar, orc.xvar));
    info("runtime %.2f s (limit 10 s)", dt);
    return dev < 1e-8 && dt < 10.0;
}

bool inference_round_trip() {
    const auto d = mzi_output(CrossPhase{1, 1.0}, pi, ThermalInput::from_tail(1.0, 1e-15)).a;
    auto field = FieldSummary::from_distribution(d);
    field.wc = 2.0 / 9.0;
    field.mean = 4.0 / 9.0;
    OscillatorConfig cfg;
    cfg.G = 0.01;
    cfg.Omega = 1.0;
    cfg.init = CoherentInit{10.0};
    const auto taus = oscillator_grid(cfg.Omega);
    const auto tr = phonon_trace_coherent(field, cfg, taus);
    const double exact_err = std::abs(infer_wc(tr, 10.0, cfg.G, cfg.Omega).wc - 2.0 / 9.0);
    info("noiseless: |W_hat - 2/9|=%.3e (tol 1e-8) %s", exact_err, exact_err < 1e-8 ? "ok" : "FAIL");

    std::mt19937_64 rng(20240607);
    std::normal_distribution<double> noise(0.0, 1e-3);
    double worst = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
        auto ph = tr.phonon;
        for (auto& p : ph) p += noise(rng);
        const auto est = infer_wc(taus, ph, {}, 10.0, cfg.G, cfg.Omega);
        worst = std::max(worst, std::abs(est.wc / (2.0 / 9.0) - 1.0));
    }
    info("sigma=1e-3, |alpha|=10, 100 seeds: max relative error %.3f%% (tol 1%%) %s", 100 * worst,
         worst < 0.01 ? "ok" : "FAIL");
    return exact_err < 1e-8 && worst < 0.01;
}

bool pdc_discrimination() {
    const auto in = ThermalInput::from_tail(1.0);
    const double tdeg[] = {pi / 2};
    const auto s = pdc_signal_output(DegeneratePdc{1.0}, in, tdeg).front();
    const double w = ergotropy(s).wc;
    double rise = 0.0;
    for (std::size_t n = 0; n + 1 < s.size(); ++n) rise = std::max(rise, s[n + 1] - s[n]);
    const bool deg_ok = w > 0.0 && rise > 1e-6;
    info("degenerate gt=pi/2: W_signal=%.6f, largest rise P(n+1)-P(n)=%.3e %s", w, rise, deg_ok ? "ok" : "FAIL");

    bool nd_ok = true;
    for (double gt : {pi / 4, pi}) {
        const double t[] = {gt};
        const auto nd = pdc_signal_output(NonDegeneratePdc{1.0}, in, t, std::size_t{1} << 20).front();
        const double wn = ergotropy(nd).wc;
        info("non-degenerate gt=%.4f: W_signal=%.3e (tol 1e-10) %s", gt, wn, wn < 1e-10 ? "ok" : "FAIL");
        nd_ok = nd_ok && wn < 1e-10;
    }
    return deg_ok && nd_ok;
}

bool property_suites() {
    using oracle::max_abs;
    const cplx I(0.0, 1.0);
    const oracle::TwoModeSpace sp(6);
    auto mpow = [](const Eigen::MatrixXcd& m, int k) { return oracle::TwoModeSpace::power(m, k); };
    auto mono = [&](int N, int p, int q, int r, int s) {
        return Eigen::MatrixXcd(sp.block(mpow(sp.ad(), p) * mpow(sp.a, q) * mpow(sp.bd(), r) * mpow(sp.b, s), N));
    };

    double algebra = 0.0, casimir = 0.0, cross = 0.0, stokes_ex = 0.0, ck_conj = 0.0, k2_conj = 0.0, k3_m6 = 0.0,
           k3_m3 = 0.0;
    for (int N = 0; N <= 6; ++N) {
        const auto x = stokes(N, Axis::X).matrix(), y = stokes(N, Axis::Y).matrix(), z = stokes(N, Axis::Z).matrix();
        const auto id = Eigen::MatrixXcd::Identity(N + 1, N + 1);
        algebra = std::max({algebra, max_abs(x * y - y * x - I * z), max_abs(y * z - z * y - I * x),
                            max_abs(z * x - x * z - I * y)});
        const double j = N / 2.0;
        casimir = std::max(casimir, max_abs(x * x + y * y + z * z - j * (j + 1) * id));
        cross = std::max(cross, max_abs(cross_phase_generator(N, 1).matrix() - ((N * N / 4.0) * id - z * z)));
        const Eigen::MatrixXcd jp = x + I * y, jm = x - I * y;
        for (int k = 1; k <= 4; ++k)
            stokes_ex = std::max(stokes_ex, max_abs(exchange_generator(N, k).matrix() - (mpow(jp, k) + mpow(jm, k))));

        const auto u = beam_splitter_unitary(N).matrix();
        const Eigen::MatrixXcd c1 = u * cross_phase_generator(N, 1).matrix() * u.adjoint();
        ck_conj = std::max(ck_conj, max_abs(c1 - 0.25 * (mono(N, 2, 2, 0, 0) + mono(N, 0, 0, 2, 2) +
                                                         mono(N, 2, 0, 0, 2) + mono(N, 0, 2, 2, 0))));
        const Eigen::MatrixXcd c2 = u * exchange_generator(N, 2).matrix() * u.adjoint();
        k2_conj = std::max(k2_conj, max_abs(c2 - 0.5 * (-mono(N, 2, 2, 0, 0) - mono(N, 0, 0, 2, 2) +
                                                        mono(N, 2, 0, 0, 2) + mono(N, 0, 2, 2, 0) +
                                                        4.0 * mono(N, 1, 1, 1, 1))));
        const Eigen::MatrixXcd c3 = u * exchange_generator(N, 3).matrix() * u.adjoint();
        auto k3_rhs = [&](double c) {
            return Eigen::MatrixXcd(
                0.25 * (mono(N, 3, 0, 0, 3) + mono(N, 0, 3, 3, 0) + 9.0 * (mono(N, 2, 1, 1, 2) + mono(N, 1, 2, 2, 1)) +
                        c * (mono(N, 3, 2, 0, 1) + mono(N, 2, 3, 1, 0) + mono(N, 1, 0, 2, 3) + mono(N, 0, 1, 3, 2))));
        };
        k3_m6 = std::max(k3_m6, max_abs(c3 - k3_rhs(-6.0)));
        k3_m3 = std::max(k3_m3, max_abs(c3 - k3_rhs(-3.0)));
    }

    bool ok = true;
    auto line = [&](const char* name, double v, double tol, bool counts = true) {
        const bool pass = v < tol;
        info("%s%-48s max|dev|=%.3e %s", counts ? "" : "info: ", name, v, pass ? "ok" : "FAIL");
        if (counts) ok = ok && pass;
    };
    line("Stokes commutators, N <= 6", algebra, 1e-12);
    line("Casimir j(j+1), N <= 6", casimir, 1e-12);
    line("n_a n_b = N^2/4 - Jz^2, N <= 6", cross, 1e-12);
    line("exchange = J+^k + J-^k, k <= 4, N <= 6", stokes_ex, 1e-12);
    line("beam-splitter conjugation, cross-Kerr", ck_conj, 1e-12);
    line("beam-splitter conjugation, k=2 exchange", k2_conj, 1e-12);
    line("beam-splitter conjugation, k=3, hopping coefficient -6", k3_m6, 1e-12);
    line("beam-splitter conjugation, k=3, hopping coefficient -3", k3_m3, 1e-12, false);

    // full-tensor evolution
    struct Case {
        ProcessSpec process;
        Eigen::MatrixXcd h;
    };
    const std::vector<Case> cases{
        {CrossPhase{1, 1.0}, sp.cross_phase(1)},       {CrossPhase{2, 0.5}, 0.5 * sp.cross_phase(2)},
        {Exchange{1}, sp.exchange(1)},                 {Exchange{2, 0.8}, 0.8 * sp.exchange(2)},
        {Exchange{3}, sp.exchange(3)},                 {Exchange{4}, sp.exchange(4)},
        {Hybrid{{{1.0, Exchange{2}}, {0.2, Exchange{3}}}}, sp.exchange(2) + 0.2 * sp.exchange(3)},
    };
    double evo = 0.0;
    for (const auto& c : cases)
        for (double nbar : {0.3, 2.0})
            for (double t : {0.7, pi, 4.2}) {
                const auto ref = oracle::full_space_mzi(sp, c.h, t, nbar);
                const auto out = mzi_output(c.process, t, ThermalInput{nbar, 6});
                for (std::size_t n = 0; n <= 6; ++n)
                    evo = std::max({evo, std::abs(out.a[n] - ref.a[n]), std::abs(out.b[n] - ref.b[n])});
            }
    line("block engine vs full tensor product, N_max = 6", evo, 1e-10);

    // passive-state optimality
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double passive = 0.0;
    for (int len = 1; len <= 8; ++len)
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> p(static_cast<std::size_t>(len));
            double s = 0.0;
            for (auto& v : p) s += (v = uni(rng));
            for (auto& v : p) v /= s;
            std::vector<int> perm(p.size());
            for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
            double mean = 0.0, best = 0.0;
            for (std::size_t n = 0; n < p.size(); ++n) mean += static_cast<double>(n) * p[n];
            do {
                double m = 0.0;
                for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[static_cast<std::size_t>(perm[n])];
                best = std::max(best, mean - m);
            } while (std::next_permutation(perm.begin(), perm.end()));
            passive = std::max(passive, std::abs(ergotropy(PhotonDistribution(p)).wc - best));
        }
    line("passive state vs exhaustive permutations, len <= 8", passive, 1e-12);
    return ok;
}

bool manifest_replay() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("wcsense_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto file = [&](const char* n) { return (dir / n).string(); };
    const std::vector<std::vector<std::string>> runs{
        {"wc-sweep", "--process", "cross-kerr", "--nbar", "1", "--theta", "0:6.283185307179586:400", "--out",
         file("ck.csv")},
        {"wc-sweep", "--process", "exchange", "--k", "2", "--nbar", "1", "--theta", "0:12.566370614359172:400",
         "--out", file("k2.csv")},
        {"coherence", "--process", "cross-kerr", "--nbar", "1", "--theta", "0:6.283185307179586:200", "--out",
         file("coh.csv")},
        {"max-efficiency", "--process", "cross-kerr", "--nbar", "0.5,1,2", "--out", file("eff.csv")},
        {"optomech", "--process", "cross-kerr", "--nbar", "1", "--t", "3.141592653589793", "--G", "0.01", "--alpha",
         "10", "--out", file("opt.csv")},
        {"pdc", "--variant", "degenerate", "--nbar", "1", "--gt", "0:3.141592653589793:20", "--out", file("pdc.csv")},
    };
    bool ok = true;
    for (const auto& args : runs) {
        std::ostringstream out, err;
        const int rc = cli::run(args, out, err);
        const std::string manifest = cli::manifest_path_for(args.back());
        std::ostringstream rout, rerr;
        const int rr = rc == 0 ? cli::run({"replay", "--manifest", manifest}, rout, rerr) : -1;
        const bool pass = rc == 0 && rr == 0;
        info("%-15s run exit %d, replay exit %d %s", args.front().c_str(), rc, rr, pass ? "ok" : "FAIL");
        if (!pass) info("%s%s", err.str().c_str(), rerr.str().c_str());
        ok = ok && pass;
    }
    fs::remove_all(dir);
    return ok;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<bool()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "closed-form cross-Kerr work capacity", closed_form_wc},
        {2, "parity filtering", parity_filtering},
        {3, "W = <n>/2 on parity-filtered outputs", half_mean_identity},
        {4, "maximal efficiency saturation", efficiency_saturation},
        {5, "g2 from the work capacity", g2_from_wc_relation},
        {6, "small-nbar coherence scalings", small_nbar_scalings_check},
        {7, "leading-probability oracles", leading_probabilities},
        {8, "oscillator closed form vs quantum oracle", oscillator_oracle},
        {9, "work-capacity inference round trip", inference_round_trip},
        {10, "down-conversion discrimination", pdc_discrimination},
        {11, "property suites", property_suites},
        {12, "manifest replay determinism", manifest_replay},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        std::printf("criterion %d: %s\n", c.id, c.title);
        std::fflush(stdout);
        bool pass = false;
        try {
            pass = c.run();
        } catch (const std::exception& e) {
            info("exception: %s", e.what());
        }
        std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", c.id, c.title);
        std::fflush(stdout);
        failed += pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
