#include "wcsense/optomech.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "wcsense/errors.hpp"
#include "wcsense/linalg.hpp"

namespace wcsense {

using std::numbers::pi;

double OscillatorConfig::nbar_o() const {
    if (const auto* c = std::get_if<CoherentInit>(&init)) return std::norm(c->alpha);
    return std::get<ThermalInit>(init).nbar_o;
}

void OscillatorConfig::validate() const {
    if (!(Omega > 0.0) || !std::isfinite(Omega)) throw DomainError("OscillatorConfig: Omega must be > 0");
    if (!std::isfinite(G)) throw DomainError("OscillatorConfig: G must be finite");
    if (const auto* t = std::get_if<ThermalInit>(&init); t && !(t->nbar_o >= 0.0))
        throw DomainError("OscillatorConfig: thermal occupation must be >= 0");
}

FieldSummary FieldSummary::from_distribution(const PhotonDistribution& dist) {
    const auto rep = ergotropy(dist);
    FieldSummary f;
    f.wc = rep.wc;
    f.wc_dispersion = rep.wc_dispersion;
    f.mean = dist.mean();
    f.second_moment = dist.second_moment();
    f.parity_filtered = dist.odd_mass() < 1e-12 && std::abs(f.wc - f.mean / 2.0) <= 1e-12 * std::max(1.0, f.mean);
    return f;
}

namespace {

void require_parity(const FieldSummary& field, const char* who) {
    if (!field.parity_filtered)
        throw DomainError(std::string(who) +
                          ": field is not parity-filtered (odd population or W != <n>/2); "
                          "use moment_trace or full_quantum_oracle instead");
}

// <X(0)>, <P(0)>
std::pair<double, double> initial_quadratures(const OscillatorConfig& cfg) {
    if (const auto* c = std::get_if<CoherentInit>(&cfg.init))
        return {std::sqrt(2.0) * c->alpha.real(), std::sqrt(2.0) * c->alpha.imag()};
    return {0.0, 0.0};
}

double baseline_xvar(const OscillatorConfig& cfg) {
    if (std::holds_alternative<CoherentInit>(cfg.init)) return 0.5;
    return (1.0 + 2.0 * std::get<ThermalInit>(cfg.init).nbar_o) / 2.0;
}

OscillatorTrace make_trace(const FieldSummary& field, const OscillatorConfig& cfg, std::span<const double> taus) {
    cfg.validate();
    OscillatorTrace tr;
    tr.taus.assign(taus.begin(), taus.end());
    tr.config = cfg;
    tr.field = field;
    return tr;
}

}  // namespace

std::vector<double> position_variance(const FieldSummary& field, const OscillatorConfig& cfg,
                                      std::span<const double> taus) {
    require_parity(field, "position_variance");
    cfg.validate();
    const double k = 32.0 * cfg.G * cfg.G / (3.0 * cfg.Omega * cfg.Omega) * field.wc_dispersion;
    std::vector<double> out;
    out.reserve(taus.size());
    for (double tau : taus) out.push_back(baseline_xvar(cfg) + k * std::pow(std::sin(cfg.Omega * tau / 2.0), 4));
    return out;
}

OscillatorTrace phonon_trace_coherent(const FieldSummary& field, const OscillatorConfig& cfg,
                                      std::span<const double> taus) {
    require_parity(field, "phonon_trace_coherent");
    if (!std::holds_alternative<CoherentInit>(cfg.init))
        throw DomainError("phonon_trace_coherent: oscillator config must use a coherent init");
    OscillatorTrace tr = make_trace(field, cfg, taus);
    const cplx alpha = std::get<CoherentInit>(cfg.init).alpha;
    const double g_over = cfg.G / cfg.Omega;
    const double quad = (field.wc_dispersion / 3.0 + field.wc * field.wc) * 16.0 * g_over * g_over;
    // (alpha + alpha*)/sqrt2 and (alpha - alpha*)/(sqrt2 i)
    const double xr = std::sqrt(2.0) * alpha.real();
    const double pr = std::sqrt(2.0) * alpha.imag();
    for (double tau : taus) {
        const double x = cfg.Omega * tau;
        const double s = std::sin(x / 2.0);
        tr.phonon.push_back(cfg.nbar_o() +
                            2.0 * std::sqrt(2.0) * g_over * field.wc * (xr * (1.0 - std::cos(x)) - pr * std::sin(x)) +
                            quad * s * s);
    }
    tr.xvar = position_variance(field, cfg, taus);
    return tr;
}

OscillatorTrace phonon_trace_thermal(const FieldSummary& field, const OscillatorConfig& cfg,
                                     std::span<const double> taus, ThermalTraceForm form) {
    require_parity(field, "phonon_trace_thermal");
    if (!std::holds_alternative<ThermalInit>(cfg.init))
        throw DomainError("phonon_trace_thermal: oscillator config must use a thermal init");
    OscillatorTrace tr = make_trace(field, cfg, taus);
    const double g_over = cfg.G / cfg.Omega;
    const double amp = form == ThermalTraceForm::Exact ? (field.wc_dispersion / 3.0 + field.wc * field.wc) : field.wc;
    for (double tau : taus) {
        const double s = std::sin(cfg.Omega * tau / 2.0);
        tr.phonon.push_back(cfg.nbar_o() + amp * 16.0 * g_over * g_over * s * s);
    }
    tr.xvar = position_variance(field, cfg, taus);
    return tr;
}

OscillatorTrace moment_trace(const FieldSummary& field, const OscillatorConfig& cfg, std::span<const double> taus) {
    OscillatorTrace tr = make_trace(field, cfg, taus);
    const auto [x0, p0] = initial_quadratures(cfg);
    const double g_over = cfg.G / cfg.Omega;
    for (double tau : taus) {
        const double x = cfg.Omega * tau;
        const double s = std::sin(x / 2.0);
        tr.phonon.push_back(cfg.nbar_o() + std::sqrt(2.0) * g_over * field.mean * (x0 * (1.0 - std::cos(x)) - p0 * std::sin(x)) +
                            field.second_moment * 4.0 * g_over * g_over * s * s);
        tr.xvar.push_back(baseline_xvar(cfg) + 8.0 * g_over * g_over * std::pow(s, 4) * field.variance());
    }
    return tr;
}

namespace {

Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const char* what) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < a.cols()) throw FitError(std::string("infer_wc: degenerate design matrix for the ") + what + " fit");
    return qr.solve(y);
}

}  // namespace

WcEstimate infer_wc(std::span<const double> taus, std::span<const double> phonon, std::span<const double> xvar,
                    cplx alpha, double G, double Omega) {
    if (taus.size() != phonon.size()) throw DomainError("infer_wc: taus and phonon lengths differ");
    if (!xvar.empty() && xvar.size() != taus.size()) throw DomainError("infer_wc: taus and xvar lengths differ");
    if (!(Omega > 0.0)) throw DomainError("infer_wc: Omega must be > 0");
    if (G == 0.0) throw FitError("infer_wc: G = 0 carries no information about the field");
    if (taus.size() < 3) throw FitError("infer_wc: need at least three samples");
    double tmin = taus[0], tmax = taus[0];
    for (double t : taus) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    if ((tmax - tmin) * Omega < 2.0 * pi - 1e-9) throw FitError("infer_wc: grid must span at least one oscillator period");

    const auto n = static_cast<Eigen::Index>(taus.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = Omega * taus[static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        a(i, 1) = 1.0 - std::cos(x);
        a(i, 2) = std::sin(x);
        y(i) = phonon[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = least_squares(a, y, "phonon");
    WcEstimate est;
    est.baseline = c(0);
    est.residual_norm = (a * c - y).norm();

    const double g_over = G / Omega;
    const double qa = 8.0 * g_over * g_over;            // W^2 and |dW^2|/3 coefficient
    const double b_re = 4.0 * g_over * alpha.real();    // (1 - cos) beating
    const double b_im = -4.0 * g_over * alpha.imag();   // sin beating
    const double c1 = c(1);
    const double c2 = c(2);

    if (!xvar.empty()) {
        Eigen::MatrixXd av(n, 2);
        Eigen::VectorXd yv(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            av(i, 0) = 1.0;
            av(i, 1) = std::pow(std::sin(Omega * taus[static_cast<std::size_t>(i)] / 2.0), 4);
            yv(i) = xvar[static_cast<std::size_t>(i)];
        }
        const Eigen::VectorXd cv = least_squares(av, yv, "variance");
        est.wc_dispersion = std::max(0.0, cv(1) * 3.0 / (32.0 * g_over * g_over));
        est.exact = true;
        const double r = c1 - qa * *est.wc_dispersion / 3.0;

        double w;
        if (b_re != 0.0) {
            const double disc = std::max(0.0, b_re * b_re + 4.0 * qa * r);
            w = 2.0 * r / (b_re + std::copysign(std::sqrt(disc), b_re));
        } else if (b_im != 0.0) {
            w = c2 / b_im;
        } else {
            w = std::sqrt(std::max(0.0, r / qa));
        }
        if (b_im != 0.0) {
            // both beating coefficients constrain W: Gauss-Newton on the pair
            for (int it = 0; it < 50; ++it) {
                const double f1 = qa * w * w + b_re * w - r;
                const double f2 = b_im * w - c2;
                const double j1 = 2.0 * qa * w + b_re;
                const double jj = j1 * j1 + b_im * b_im;
                if (jj == 0.0) break;
                const double step = (j1 * f1 + b_im * f2) / jj;
                w -= step;
                if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
            }
        }
        est.wc = std::max(0.0, w);
        return est;
    }

    // No variance trace: beating term only.
    const double bb = b_re * b_re + b_im * b_im;
    if (bb == 0.0) throw FitError("infer_wc: alpha = 0 needs a variance trace to separate W from its dispersion");
    est.wc = std::max(0.0, (b_re * c1 + b_im * c2) / bb);
    est.exact = false;
    return est;
}

WcEstimate infer_wc(const OscillatorTrace& trace, cplx alpha, double G, double Omega) {
    return infer_wc(trace.taus, trace.phonon, trace.xvar, alpha, G, Omega);
}

OscillatorTrace full_quantum_oracle(const PhotonDistribution& dist_a, const OscillatorConfig& cfg, int osc_cutoff,
                                    std::span<const double> taus) {
    cfg.validate();
    if (osc_cutoff < 1) throw DomainError("full_quantum_oracle: osc_cutoff must be >= 1");
    const int d = osc_cutoff + 1;
    const double total = dist_a.total();
    if (!(total > 0.0)) throw DomainError("full_quantum_oracle: empty field distribution");

    // initial oscillator ensemble: (weight, state)
    std::vector<std::pair<double, Eigen::VectorXcd>> ensemble;
    if (const auto* c = std::get_if<CoherentInit>(&cfg.init)) {
        Eigen::VectorXcd psi(d);
        cplx amp = std::exp(-std::norm(c->alpha) / 2.0);
        for (int k = 0; k < d; ++k) {
            psi(k) = amp;
            amp *= c->alpha / std::sqrt(static_cast<double>(k + 1));
        }
        if (std::norm(psi(d - 1)) >= 1e-8)
            throw ConfigurationError("full_quantum_oracle: osc_cutoff " + std::to_string(osc_cutoff) +
                                     " truncates the initial coherent state; try " + std::to_string(2 * osc_cutoff));
        psi.normalize();
        ensemble.emplace_back(1.0, std::move(psi));
    } else {
        const double nb = std::get<ThermalInit>(cfg.init).nbar_o;
        double kept = 0.0;
        for (int k = 0; k < d; ++k) {
            const double w = thermal_probability(nb, k);
            if (w < 1e-16) continue;
            Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
            psi(k) = 1.0;
            ensemble.emplace_back(w, std::move(psi));
            kept += w;
        }
        if (1.0 - kept >= 1e-8)
            throw ConfigurationError("full_quantum_oracle: osc_cutoff " + std::to_string(osc_cutoff) +
                                     " truncates the initial thermal state; try " + std::to_string(2 * osc_cutoff));
        for (auto& e : ensemble) e.first /= kept;
    }

    const std::size_t T = taus.size();
    std::vector<double> phonon(T, 0.0), xm(T, 0.0), x2(T, 0.0);
    double worst_top = 0.0;
    const auto& probs = dist_a.probs();
    for (std::size_t n = 0; n < probs.size(); ++n) {
        const double pn = probs[n] / total;
        if (pn == 0.0) continue;
        Eigen::VectorXd diag(d);
        Eigen::VectorXd off(d - 1);
        for (int k = 0; k < d; ++k) diag(k) = cfg.Omega * k;
        for (int k = 0; k + 1 < d; ++k) off(k) = cfg.G * static_cast<double>(n) * std::sqrt(static_cast<double>(k + 1));
        const auto eig = linalg::symmetric_tridiagonal_eig(diag, off);
        for (const auto& [w0, psi0] : ensemble) {
            const Eigen::VectorXcd coeff = eig.vectors.transpose() * psi0;
            for (std::size_t t = 0; t < T; ++t) {
                Eigen::VectorXcd ph(d);
                for (int l = 0; l < d; ++l) ph(l) = std::polar(1.0, -eig.values(l) * taus[t]) * coeff(l);
                const Eigen::VectorXcd psi = eig.vectors * ph;
                double num = 0.0;
                cplx o1 = 0.0, o2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    num += k * std::norm(psi(k));
                    if (k + 1 < d) o1 += std::conj(psi(k)) * std::sqrt(static_cast<double>(k + 1)) * psi(k + 1);
                    if (k + 2 < d)
                        o2 += std::conj(psi(k)) * std::sqrt(static_cast<double>((k + 1) * (k + 2))) * psi(k + 2);
                }
                worst_top = std::max(worst_top, std::norm(psi(d - 1)));
                const double w = pn * w0;
                phonon[t] += w * num;
                xm[t] += w * std::sqrt(2.0) * o1.real();
                x2[t] += w * (o2.real() + num + 0.5);
            }
        }
    }
    if (worst_top >= 1e-8)
        throw ConfigurationError("full_quantum_oracle: top oscillator level population " + std::to_string(worst_top) +
                                 " exceeds 1e-8; increase osc_cutoff (try " + std::to_string(2 * osc_cutoff) + ")");

    OscillatorTrace tr;
    tr.taus.assign(taus.begin(), taus.end());
    tr.config = cfg;
    tr.field = FieldSummary::from_distribution(dist_a);
    tr.phonon = std::move(phonon);
    tr.xvar.resize(T);
    for (std::size_t t = 0; t < T; ++t) tr.xvar[t] = x2[t] - xm[t] * xm[t];
    return tr;
}

double beating_to_quadratic_ratio(const FieldSummary& field, const OscillatorConfig& cfg) {
    const auto [x0, p0] = initial_quadratures(cfg);
    (void)p0;
    // at Omega tau = pi: beating = (sqrt2 G/Omega) <n> x0 * 2, quadratic = 4 G^2/Omega^2 <n^2>
    const double beat = 2.0 * std::sqrt(2.0) * cfg.G / cfg.Omega * field.mean * x0;
    const double quad = 4.0 * cfg.G * cfg.G / (cfg.Omega * cfg.Omega) * field.second_moment;
    if (quad == 0.0) throw DomainError("beating_to_quadratic_ratio: quadratic term vanishes");
    return beat / quad;
}

std::vector<double> oscillator_grid(double Omega, int n, double periods) {
    if (n < 2) throw DomainError("oscillator_grid: need at least two points");
    std::vector<double> t(static_cast<std::size_t>(n));
    const double span = periods * 2.0 * pi / Omega;
    for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = span * i / (n - 1);
    return t;
}

}  // namespace wcsense
