#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wcsense/fock.hpp"

namespace wcsense {

inline constexpr int kExchangeOrderGuard = 4;

// Hermitian generator restricted to the total-number-N block.
class BlockOperator {
public:
    BlockOperator(int N, Eigen::MatrixXcd matrix);

    int N() const noexcept { return N_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    bool is_real() const;
    Eigen::MatrixXd real_matrix() const;

private:
    int N_;
    Eigen::MatrixXcd matrix_;
};

class BlockUnitary {
public:
    BlockUnitary(int N, Eigen::MatrixXcd matrix);

    int N() const noexcept { return N_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    double unitarity_error() const;  // max |U U^+ - I|

private:
    int N_;
    Eigen::MatrixXcd matrix_;
};

struct CrossPhase {
    int s = 1;
    double chi = 1.0;
};

struct Exchange {
    int k = 2;
    double g = 1.0;
    int max_order = kExchangeOrderGuard;
};

using GeneratorSpec = std::variant<CrossPhase, Exchange>;

// Contributes coefficient * strength * generator.
struct HybridTerm {
    double coefficient = 1.0;
    GeneratorSpec generator;
};

struct Hybrid {
    std::vector<HybridTerm> terms;
};

struct DegeneratePdc {
    double g = 1.0;
};

struct NonDegeneratePdc {
    double g = 1.0;
};

using ProcessSpec = std::variant<CrossPhase, Exchange, Hybrid, DegeneratePdc, NonDegeneratePdc>;

bool is_block_process(const ProcessSpec& p);
// Generators whose block output leaves mode a with no odd population
// (cross-phase of any order, exchange of even order).
bool is_parity_filtering(const ProcessSpec& p);

enum class Axis { X, Y, Z };

BlockOperator stokes(int N, Axis axis);
BlockOperator cross_phase_generator(int N, int s);
BlockOperator exchange_generator(int N, int k, int max_order = kExchangeOrderGuard);
BlockOperator hybrid_generator(int N, const std::vector<HybridTerm>& terms);
BlockUnitary beam_splitter_unitary(int N);

// Normal-ordered a^+^p a^q b^+^r b^s restricted to block N (requires p - q + r - s = 0).
Eigen::MatrixXd ladder_monomial(int N, int p, int q, int r, int s);

// strength * generator for block processes, as a real symmetric matrix.
// PDC variants throw UnsupportedVariantError.
Eigen::MatrixXd scaled_generator(const ProcessSpec& process, int N);
BlockOperator process_generator(const ProcessSpec& process, int N);

// exp(-i pi/2 Jx) = D R D^{-1} with D = diag((-i)^j) and R real orthogonal.
// Produces R for N = 0, 1, 2, ... by embedding block N into block N x one photon.
class BeamSplitterLadder {
public:
    BeamSplitterLadder();
    int N() const noexcept { return N_; }
    // Real orthogonal R of U_BS = D R D^-1 with D = diag((-i)^j). Valid until the next advance().
    Eigen::Map<const Eigen::MatrixXd> real_part() const noexcept {
        return {cur_.data(), N_ + 1, N_ + 1};
    }
    void advance();

private:
    int N_;
    std::vector<double> cur_, next_;  // column-major, reused across steps
    std::vector<double> sa_, sb_, zero_;
};

// (-i)^j
cplx bs_phase(int j);

}  // namespace wcsense
