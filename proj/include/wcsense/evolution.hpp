#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wcsense/fock.hpp"
#include "wcsense/operators.hpp"

namespace wcsense {

struct EigenDecomposition {
    Eigen::VectorXd values;    // ascending
    Eigen::MatrixXcd vectors;  // H = V diag(values) V^+
};

enum class EigenMethod {
    Auto,           // split into coupled components; QL for real parts, Jacobi otherwise
    Jacobi,         // cyclic complex Jacobi on the full block
    HouseholderQl,  // real symmetric input only
};

EigenDecomposition hermitian_eig(const BlockOperator& op, EigenMethod method = EigenMethod::Auto);

// V diag(exp(-i theta lambda)) V^+
BlockUnitary unitary_of(const BlockOperator& op, double theta);

// U_BS exp(-i t strength G) U_BS on block N.
BlockUnitary mzi_unitary(const ProcessSpec& process, double t, int N);

struct SpectralComponent {
    std::vector<int> indices;
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

// Eigen-decomposition of a real symmetric matrix, one entry per coupled component.
std::vector<SpectralComponent> real_symmetric_components(const Eigen::MatrixXd& h);

struct MziOutput {
    PhotonDistribution a;
    PhotonDistribution b;
};

// Thermal input |n,0> mixture through the MZI. Block spectra are computed once
// at construction; evaluations over many t values reuse them.
class MziEngine {
public:
    MziEngine(ProcessSpec process, ThermalInput input);

    MziOutput evaluate(double t) const;
    // Results in the order of ts. Deterministic regardless of thread count.
    std::vector<MziOutput> evaluate(std::span<const double> ts) const;

    const ProcessSpec& process() const noexcept { return process_; }
    const ThermalInput& input() const noexcept { return input_; }

    // Worker threads used by evaluate (1 = serial). Defaults to hardware concurrency.
    void set_threads(unsigned n) noexcept { threads_ = n == 0 ? 1 : n; }

private:
    struct Component {
        std::vector<int> indices;
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        Eigen::VectorXcd weights;  // V^T U_BS |N,0>
        // Swap-symmetric components keep only the excited parity sector:
        // rows of vectors are indices[q], and amplitude N - indices[q] equals
        // mirror_sign times that of indices[q] (mirror[q] < 0: self-mirrored).
        std::vector<int> mirror;
        double mirror_sign = 1.0;
    };
    struct Block {
        bool diagonal = false;
        Eigen::VectorXd diag;    // generator diagonal when diagonal
        Eigen::VectorXd vacuum;  // real part of the first beam splitter column
        std::vector<Component> components;
    };

    static bool fold_mirrored(const Eigen::MatrixXd& h, const Eigen::VectorXcd& u, const std::vector<int>& idx, int N,
                              double scale, Component& out);
    void evaluate_range(std::span<const double> ts, std::vector<std::vector<double>>& pa,
                        std::vector<std::vector<double>>& pb) const;

    ProcessSpec process_;
    ThermalInput input_;
    std::vector<Block> blocks_;
    unsigned threads_;
};

MziOutput mzi_output(const ProcessSpec& process, double t, const ThermalInput& input);

// ---- generic multimode engine -------------------------------------------

inline constexpr std::size_t kDefaultDimensionGuard = 4096;

// coefficient * prod_m (a_m^+)^{creation[m]} (a_m)^{annihilation[m]}
struct LadderTerm {
    cplx coefficient;
    std::vector<int> creation;
    std::vector<int> annihilation;
};

struct GenericSystem {
    std::vector<int> cutoffs;
    std::vector<LadderTerm> hamiltonian;
    std::size_t dimension_guard = kDefaultDimensionGuard;

    std::size_t dimension() const;
};

// Incoherent mixture of Fock product states.
struct FockMixture {
    struct Entry {
        double weight;
        std::vector<int> occupation;
    };
    std::vector<Entry> entries;

    // Thermal populations on one mode, vacuum elsewhere.
    static FockMixture thermal_on_mode(std::size_t n_modes, std::size_t mode, const ThermalInput& input);
};

// H = g (a_p a_s^+2 + a_p^+ a_s^2); modes (pump, signal), signal cutoff = 2 * pump cutoff.
GenericSystem degenerate_pdc_system(double g, int pump_cutoff, std::size_t dimension_guard = kDefaultDimensionGuard);
// H = g (a_p a_s^+ a_i^+ + h.c.); modes (pump, signal, idler), all cutoffs = pump cutoff.
GenericSystem nondegenerate_pdc_system(double g, int pump_cutoff,
                                       std::size_t dimension_guard = kDefaultDimensionGuard);

// Per-mode reduced diagonals after evolution for time t.
std::vector<PhotonDistribution> generic_evolve(const GenericSystem& system, const FockMixture& initial, double t);
// Outer index follows ts.
std::vector<std::vector<PhotonDistribution>> generic_evolve(const GenericSystem& system, const FockMixture& initial,
                                                            std::span<const double> ts);

// Signal-mode distributions of a PDC process with thermal pump, one per t.
std::vector<PhotonDistribution> pdc_signal_output(const ProcessSpec& process, const ThermalInput& pump,
                                                  std::span<const double> ts,
                                                  std::size_t dimension_guard = kDefaultDimensionGuard);

}  // namespace wcsense
