#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "wcsense/fock.hpp"
#include "wcsense/thermo.hpp"

namespace wcsense {

struct CoherentInit {
    cplx alpha{0.0, 0.0};
};

struct ThermalInit {
    double nbar_o = 0.0;
};

struct OscillatorConfig {
    double G = 0.0;
    double Omega = 1.0;
    std::variant<CoherentInit, ThermalInit> init = CoherentInit{};

    double nbar_o() const;  // |alpha|^2 or the thermal occupation
    void validate() const;
};

// Field quantities that enter the oscillator dynamics.
struct FieldSummary {
    double wc = 0.0;
    double wc_dispersion = 0.0;
    double mean = 0.0;
    double second_moment = 0.0;
    // True when the distribution has no odd population and W = <n>/2, so the
    // work-capacity form of the phonon trace is valid.
    bool parity_filtered = false;

    static FieldSummary from_distribution(const PhotonDistribution& dist);
    double variance() const { return second_moment - mean * mean; }
};

struct OscillatorTrace {
    std::vector<double> taus;
    std::vector<double> phonon;
    std::vector<double> xvar;
    OscillatorConfig config;
    FieldSummary field;
};

// Work-capacity form of the phonon trace; coherent init.
OscillatorTrace phonon_trace_coherent(const FieldSummary& field, const OscillatorConfig& cfg,
                                      std::span<const double> taus);

enum class ThermalTraceForm {
    Exact,
    SmallNbar,  // W (16 G^2/Omega^2) sin^2(Omega tau / 2) excess
};

OscillatorTrace phonon_trace_thermal(const FieldSummary& field, const OscillatorConfig& cfg,
                                     std::span<const double> taus, ThermalTraceForm form = ThermalTraceForm::Exact);

// Work-capacity form of <dX^2>(tau) (either init).
std::vector<double> position_variance(const FieldSummary& field, const OscillatorConfig& cfg,
                                      std::span<const double> taus);

// Moment form valid for any diagonal field (uses <n>, <n^2> directly).
OscillatorTrace moment_trace(const FieldSummary& field, const OscillatorConfig& cfg, std::span<const double> taus);

struct WcEstimate {
    double wc = 0.0;
    std::optional<double> wc_dispersion;  // from the variance trace when available
    double baseline = 0.0;                // fitted constant (n_O plus any background)
    double residual_norm = 0.0;           // phonon fit residual
    bool exact = false;                   // false: beating-term-only approximation
};

// Inverts the coherent-init phonon trace. With a variance trace the
// dispersion is fitted first and W follows exactly; without it the quadratic
// term is neglected (valid when |alpha| dominates).
WcEstimate infer_wc(std::span<const double> taus, std::span<const double> phonon, std::span<const double> xvar,
                    cplx alpha, double G, double Omega);
WcEstimate infer_wc(const OscillatorTrace& trace, cplx alpha, double G, double Omega);

// Per-level dense evolution of Omega O^+O + G n (O + O^+).
OscillatorTrace full_quantum_oracle(const PhotonDistribution& dist_a, const OscillatorConfig& cfg, int osc_cutoff,
                                    std::span<const double> taus);

// Peak (Omega tau = pi) beating excess over peak quadratic excess.
double beating_to_quadratic_ratio(const FieldSummary& field, const OscillatorConfig& cfg);

// n points spanning [0, periods * 2 pi / Omega].
std::vector<double> oscillator_grid(double Omega, int n = 256, double periods = 2.0);

}  // namespace wcsense
