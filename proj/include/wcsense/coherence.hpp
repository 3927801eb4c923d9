#pragma once

#include <array>
#include <optional>
#include <string>

#include "wcsense/fock.hpp"
#include "wcsense/operators.hpp"
#include "wcsense/thermo.hpp"

namespace wcsense {

inline constexpr double kMeanFloor = 1e-10;

// Factorial moment over mean^m; nullopt when the mean is below floor.
std::optional<double> g_m(const PhotonDistribution& dist, int m, double floor = kMeanFloor);

struct CoherenceReport {
    std::optional<double> g2, g3, g4;
    // divided by m! (thermal value)
    std::optional<double> g2_norm, g3_norm, g4_norm;
};

CoherenceReport coherence_report(const PhotonDistribution& dist, double floor = kMeanFloor);

// 1 - 1/(2W) + |dW^2|/(3W^2); nullopt when W is below floor.
std::optional<double> g2_from_wc(const ErgotropyReport& report, double floor = kMeanFloor);

// Time-dependence factors of the small-nbar g3/g4 scalings.
double cross_kerr_f(double theta);
double exchange2_f(double gt);

struct K3Shape {
    K3Window window = K3Window::None;
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;
};
std::optional<K3Shape> exchange3_q(double nbar, double gt);

struct ScalingPrediction {
    // predicted g~(m) = g(m)/m! for m = 2, 3, 4
    std::array<std::optional<double>, 3> g_norm;
    // k=3 only: same q_m divided by W^m instead of W^(m-1)
    std::array<std::optional<double>, 3> g_norm_alt_exponent;
    bool regime_warning = false;  // nbar > 0.1
    std::string note;
};

// Leading-order predictions from the measured work capacity wc at interaction
// time theta (chi t or g t).
ScalingPrediction small_nbar_scalings(const ProcessSpec& process, double nbar, double theta, double wc);

// Multiplicative constants mapping the predictions onto measured values at a
// reference point.
struct ScalingCalibration {
    std::array<double, 3> factor{1.0, 1.0, 1.0};
};
ScalingCalibration calibrate_scalings(const ScalingPrediction& at_reference, const CoherenceReport& measured);
ScalingPrediction apply_calibration(ScalingPrediction p, const ScalingCalibration& c);

}  // namespace wcsense
