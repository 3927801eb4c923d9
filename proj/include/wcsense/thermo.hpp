#pragma once

#include <functional>
#include <optional>

#include "wcsense/fock.hpp"
#include "wcsense/operators.hpp"

namespace wcsense {

struct ErgotropyReport {
    double mean_energy = 0.0;     // <n>
    double passive_energy = 0.0;  // <n>_pas
    double wc = 0.0;              // W = <n> - <n>_pas
    double wc_dispersion = 0.0;   // |Var(n) - Var_pas(n)|
    std::optional<double> efficiency;  // W / nbar_in when an input nbar > 0 is supplied
};

// Probabilities sorted in descending order (stable: ties keep index order).
PhotonDistribution passive_distribution(const PhotonDistribution& dist);

ErgotropyReport ergotropy(const PhotonDistribution& dist, std::optional<double> input_nbar = std::nullopt);

double wc_dispersion(const PhotonDistribution& dist);

// (nbar/4)(1 - 1/(1 + nbar - nbar cos theta)^2)
double wc_cross_kerr_closed_form(double nbar, double theta);

// Small-nbar work capacity for cross-phase s=1 and exchange k=2; nullopt otherwise.
std::optional<double> wc_table_oracle(const ProcessSpec& process, double nbar, double theta);

// Three-photon exchange: which leading-order regime gt falls in.
enum class K3Window {
    None,
    TwoOverOne,    // (4j+1)pi/12 < gt < (4j+3)pi/12: P~2 > P~1
    ThreeOverTwo,  // (6j+5)pi/18 < gt < (6j+7)pi/18: P~3 > P~2
};
K3Window k3_window(double gt);

// Leading-order k=3 work capacity inside the windows above; nullopt outside.
std::optional<double> wc_k3_piecewise(double nbar, double gt);

// Golden-section search for a maximum of f on [a, b].
double golden_section_maximize(const std::function<double(double)>& f, double a, double b, double tol);

struct EfficiencyMax {
    double eta_max = 0.0;
    double theta_star = 0.0;
    double wc_max = 0.0;
    int cutoff = 0;
};

// theta is the interaction time t; with unit strength it is chi t or g t.
EfficiencyMax max_efficiency(const ProcessSpec& process, double nbar, double theta_max, int grid = 400,
                             double tail_tol = kDefaultTailTol);

// Default scan window: 2 pi for cross-phase, 4 pi otherwise.
double default_theta_max(const ProcessSpec& process);

}  // namespace wcsense
