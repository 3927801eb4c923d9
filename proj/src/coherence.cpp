#include "wcsense/coherence.hpp"

#include <cmath>

#include "wcsense/errors.hpp"

namespace wcsense {

std::optional<double> g_m(const PhotonDistribution& dist, int m, double floor) {
    if (m < 2 || m > 4) throw DomainError("g_m: order must satisfy 2 <= m <= 4");
    const double mean = dist.mean();
    if (!(mean > floor)) return std::nullopt;
    return factorial_moment(dist, m) / std::pow(mean, m);
}

CoherenceReport coherence_report(const PhotonDistribution& dist, double floor) {
    CoherenceReport r;
    r.g2 = g_m(dist, 2, floor);
    r.g3 = g_m(dist, 3, floor);
    r.g4 = g_m(dist, 4, floor);
    if (r.g2) r.g2_norm = *r.g2 / 2.0;
    if (r.g3) r.g3_norm = *r.g3 / 6.0;
    if (r.g4) r.g4_norm = *r.g4 / 24.0;
    return r;
}

std::optional<double> g2_from_wc(const ErgotropyReport& report, double floor) {
    const double w = report.wc;
    if (!(w > floor)) return std::nullopt;
    return 1.0 - 1.0 / (2.0 * w) + report.wc_dispersion / (3.0 * w * w);
}

double cross_kerr_f(double theta) { return 7.0 + 8.0 * std::cos(theta) + 3.0 * std::cos(2.0 * theta); }

double exchange2_f(double gt) {
    const double r3 = std::sqrt(3.0);
    const double s = std::sin(gt);
    const double num = 15.0 + std::cos(8.0 * r3 * gt) - 16.0 * std::cos(6.0 * gt) * std::cos(4.0 * r3 * gt) -
                       8.0 * r3 * std::sin(6.0 * gt) * std::sin(4.0 * r3 * gt);
    return num / (16.0 * std::pow(s, 4));
}

std::optional<K3Shape> exchange3_q(double nbar, double gt) {
    const K3Window win = k3_window(gt);
    if (win == K3Window::None) return std::nullopt;
    const double s3 = std::sin(3.0 * gt);
    const double s6 = std::sin(6.0 * gt);
    const double s3_4 = std::pow(s3, 4);
    const double s6_2 = s6 * s6;
    const double s6_4 = s6_2 * s6_2;
    const double w = win == K3Window::TwoOverOne ? 0.75 * s3_4 - 3.0 / 16.0 * s6_2 : s6_2 / 16.0 - 0.75 * s3_4;
    const double ratio = nbar / (1.0 + nbar);  // P_4 / P_3
    const double base = 3.0 / 16.0 * s6_2 + 1.5 * s3_4 + 3.0 / 16.0 * s6_2;
    const double den4 = ratio * 9.0 / 4.0 * s6_4 + base;
    K3Shape q;
    q.window = win;
    q.q1 = (1.5 * s3_4 + 6.0 / 16.0 * s6_2) * w / (base * base);
    q.q2 = (ratio * 13.5 * s6_4 + 6.0 / 16.0 * s6_2) * w * w / std::pow(den4, 3);
    q.q3 = (ratio * 13.5 * s6_4) * std::pow(w, 3) / std::pow(den4, 4);
    return q;
}

ScalingPrediction small_nbar_scalings(const ProcessSpec& process, double nbar, double theta, double wc) {
    if (nbar < 0.0) throw DomainError("small_nbar_scalings: nbar must be >= 0");
    ScalingPrediction p;
    p.regime_warning = nbar > 0.1;
    if (!(wc > 0.0)) {
        p.note = "work capacity is zero; scalings undefined";
        return p;
    }
    const bool ck = std::holds_alternative<CrossPhase>(process) && std::get<CrossPhase>(process).s == 1;
    const auto* ex = std::get_if<Exchange>(&process);
    if (ck || (ex && ex->k == 2)) {
        const double f = ck ? cross_kerr_f(theta) : exchange2_f(theta);
        p.g_norm[0] = 1.0 / (2.0 * wc) / 2.0;
        p.g_norm[1] = 3.0 * f / (2.0 * wc) / 6.0;
        p.g_norm[2] = 3.0 * f / (4.0 * wc * wc) / 24.0;
        return p;
    }
    if (ex && ex->k == 3) {
        const auto q = exchange3_q(nbar, theta);
        if (!q) {
            p.note = "g t outside the leading-order windows";
            return p;
        }
        p.g_norm[0] = q->q1 / wc / 2.0;
        p.g_norm[1] = q->q2 / (wc * wc) / 6.0;
        p.g_norm[2] = q->q3 / std::pow(wc, 3) / 24.0;
        p.g_norm_alt_exponent[0] = q->q1 / (wc * wc) / 2.0;
        p.g_norm_alt_exponent[1] = q->q2 / std::pow(wc, 3) / 6.0;
        p.g_norm_alt_exponent[2] = q->q3 / std::pow(wc, 4) / 24.0;
        return p;
    }
    p.note = "no small-nbar scaling available for this process";
    return p;
}

ScalingCalibration calibrate_scalings(const ScalingPrediction& at_reference, const CoherenceReport& measured) {
    ScalingCalibration c;
    const std::array<std::optional<double>, 3> m{measured.g2_norm, measured.g3_norm, measured.g4_norm};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!at_reference.g_norm[i] || !m[i] || *at_reference.g_norm[i] == 0.0)
            throw DomainError("calibrate_scalings: reference point has undefined values");
        c.factor[i] = *m[i] / *at_reference.g_norm[i];
    }
    return c;
}

ScalingPrediction apply_calibration(ScalingPrediction p, const ScalingCalibration& c) {
    for (std::size_t i = 0; i < 3; ++i) {
        if (p.g_norm[i]) *p.g_norm[i] *= c.factor[i];
        if (p.g_norm_alt_exponent[i]) *p.g_norm_alt_exponent[i] *= c.factor[i];
    }
    return p;
}

}  // namespace wcsense
