#include "wcsense/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wcsense/errors.hpp"
#include "wcsense/evolution.hpp"

namespace wcsense {

using std::numbers::pi;

PhotonDistribution passive_distribution(const PhotonDistribution& dist) {
    std::vector<double> p = dist.probs();
    std::stable_sort(p.begin(), p.end(), std::greater<double>());
    return PhotonDistribution(std::move(p));
}

namespace {

struct Moments {
    double mean = 0.0;
    double second = 0.0;
};

Moments moments(const std::vector<double>& p) {
    Moments m;
    for (std::size_t n = 0; n < p.size(); ++n) {
        m.mean += static_cast<double>(n) * p[n];
        m.second += static_cast<double>(n * n) * p[n];
    }
    return m;
}

}  // namespace

ErgotropyReport ergotropy(const PhotonDistribution& dist, std::optional<double> input_nbar) {
    const auto& p = dist.probs();
    std::vector<double> s = p;
    std::stable_sort(s.begin(), s.end(), std::greater<double>());
    const Moments act = moments(p);
    const Moments pas = moments(s);

    double w = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) w += static_cast<double>(n) * (p[n] - s[n]);

    ErgotropyReport r;
    r.mean_energy = act.mean;
    r.passive_energy = pas.mean;
    r.wc = std::max(0.0, w);
    r.wc_dispersion = std::abs((act.second - act.mean * act.mean) - (pas.second - pas.mean * pas.mean));
    if (input_nbar) {
        if (*input_nbar < 0.0) throw DomainError("ergotropy: input nbar must be >= 0");
        if (*input_nbar > 0.0) r.efficiency = r.wc / *input_nbar;
    }
    return r;
}

double wc_dispersion(const PhotonDistribution& dist) { return ergotropy(dist).wc_dispersion; }

double wc_cross_kerr_closed_form(double nbar, double theta) {
    if (nbar < 0.0) throw DomainError("wc_cross_kerr_closed_form: nbar must be >= 0");
    const double d = 1.0 + nbar - nbar * std::cos(theta);
    return nbar / 4.0 * (1.0 - 1.0 / (d * d));
}

std::optional<double> wc_table_oracle(const ProcessSpec& process, double nbar, double theta) {
    if (nbar < 0.0) throw DomainError("wc_table_oracle: nbar must be >= 0");
    const double pre = nbar * nbar / std::pow(1.0 + nbar, 3);
    if (const auto* c = std::get_if<CrossPhase>(&process); c && c->s == 1) {
        const double s = std::sin(theta / 2.0);
        return pre * s * s;
    }
    if (const auto* e = std::get_if<Exchange>(&process); e && e->k == 2) {
        const double s1 = std::sin(theta);
        const double s2 = std::sin(2.0 * std::sqrt(3.0) * theta);
        return pre * (s1 * s1 + nbar / (4.0 * (1.0 + nbar)) * s2 * s2);
    }
    return std::nullopt;
}

K3Window k3_window(double gt) {
    if (gt <= 0.0) return K3Window::None;
    // Both window families repeat with period pi/3.
    const double period = pi / 3.0;
    const double x = gt - std::floor(gt / period) * period;
    if (x > pi / 12.0 && x < 3.0 * pi / 12.0) return K3Window::TwoOverOne;
    if (x > 5.0 * pi / 18.0 && x < 7.0 * pi / 18.0) return K3Window::ThreeOverTwo;
    // the (6j+5)pi/18 windows straddle multiples of pi/3
    if (x < pi / 18.0 && gt > 5.0 * pi / 18.0) return K3Window::ThreeOverTwo;
    return K3Window::None;
}

std::optional<double> wc_k3_piecewise(double nbar, double gt) {
    const double p3 = thermal_probability(nbar, 3);
    const double s3 = std::sin(3.0 * gt);
    const double s6 = std::sin(6.0 * gt);
    switch (k3_window(gt)) {
        case K3Window::TwoOverOne: return p3 * (0.75 * std::pow(s3, 4) - 3.0 / 16.0 * s6 * s6);
        case K3Window::ThreeOverTwo: return p3 * (s6 * s6 / 16.0 - 0.75 * std::pow(s3, 4));
        case K3Window::None: break;
    }
    return std::nullopt;
}

double golden_section_maximize(const std::function<double(double)>& f, double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? c : d;
}

double default_theta_max(const ProcessSpec& process) {
    return std::holds_alternative<CrossPhase>(process) ? 2.0 * pi : 4.0 * pi;
}

EfficiencyMax max_efficiency(const ProcessSpec& process, double nbar, double theta_max, int grid, double tail_tol) {
    if (grid < 100) throw DomainError("max_efficiency: grid must be >= 100");
    if (!(nbar > 0.0)) throw DomainError("max_efficiency: nbar must be > 0");
    if (!(theta_max > 0.0) || !std::isfinite(theta_max)) throw DomainError("max_efficiency: theta_max must be > 0");
    const ThermalInput input = ThermalInput::from_tail(nbar, tail_tol);
    const MziEngine engine(process, input);

    std::vector<double> thetas(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) thetas[static_cast<std::size_t>(i)] = theta_max * i / (grid - 1);
    const auto outs = engine.evaluate(thetas);
    std::size_t best = 0;
    double best_w = -1.0;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        const double w = ergotropy(outs[i].a).wc;
        if (w > best_w) {
            best_w = w;
            best = i;
        }
    }
    // Bracket refinement around the best grid point. Each pass evaluates a
    // batch of points in one engine call, so the ladder is rebuilt once per pass.
    double lo = thetas[best == 0 ? 0 : best - 1];
    double hi = thetas[std::min(best + 1, thetas.size() - 1)];
    double best_t = thetas[best];
    constexpr int kRefine = 17;
    while (hi - lo > 1e-6) {
        std::vector<double> pts(kRefine);
        for (int i = 0; i < kRefine; ++i) pts[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (kRefine - 1);
        const auto fine = engine.evaluate(pts);
        std::size_t k = 0;
        double kw = -1.0;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            const double w = ergotropy(fine[i].a).wc;
            if (w > kw) {
                kw = w;
                k = i;
            }
        }
        if (kw > best_w) {
            best_w = kw;
            best_t = pts[k];
        }
        lo = pts[k == 0 ? 0 : k - 1];
        hi = pts[std::min<std::size_t>(k + 1, pts.size() - 1)];
    }

    EfficiencyMax r;
    r.cutoff = input.cutoff;
    r.wc_max = best_w;
    r.theta_star = best_t;
    r.eta_max = r.wc_max / nbar;
    return r;
}

}  // namespace wcsense
