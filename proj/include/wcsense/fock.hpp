#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wcsense {

using cplx = std::complex<double>;

inline constexpr double kDefaultTailTol = 1e-12;
// Negative round-off above this is clamped to zero; anything lower is rejected.
inline constexpr double kNegativeClamp = -1e-14;

// Diagonal single-mode state over Fock numbers 0..N_max.
class PhotonDistribution {
public:
    PhotonDistribution();  // vacuum
    explicit PhotonDistribution(std::vector<double> probs);

    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    int max_n() const noexcept { return static_cast<int>(probs_.size()) - 1; }
    // Zero beyond the stored range.
    double operator[](std::size_t n) const noexcept { return n < probs_.size() ? probs_[n] : 0.0; }

    double total() const;
    double mean() const;
    double second_moment() const;
    double variance() const;
    double odd_mass() const;

private:
    std::vector<double> probs_;
};

double thermal_probability(double nbar, int n);
// Smallest N_max with (nbar/(1+nbar))^(N_max+1) <= tail_tol.
int thermal_cutoff(double nbar, double tail_tol);

struct ThermalInput {
    double nbar = 0.0;
    int cutoff = 0;

    static ThermalInput from_tail(double nbar, double tail_tol = kDefaultTailTol);
    double probability(int n) const { return thermal_probability(nbar, n); }
    double tail_mass() const;
    PhotonDistribution distribution() const;
};

PhotonDistribution thermal_distribution(double nbar, double tail_tol = kDefaultTailTol);

// Index j = 0..N labels |n_a = N - j, n_b = j>.
struct BlockBasis {
    int N = 0;
    int dimension() const noexcept { return N + 1; }
    int n_a(int j) const noexcept { return N - j; }
    int n_b(int j) const noexcept { return j; }
};

class TwoModeBlockState {
public:
    TwoModeBlockState(int N, std::vector<cplx> amplitudes);

    int N() const noexcept { return N_; }
    const std::vector<cplx>& amplitudes() const noexcept { return amplitudes_; }

private:
    int N_;
    std::vector<cplx> amplitudes_;
};

struct WeightedBlock {
    double weight;
    TwoModeBlockState state;
};

PhotonDistribution reduce_mode_a(std::span<const WeightedBlock> blocks);
PhotonDistribution reduce_mode_b(std::span<const WeightedBlock> blocks);

// sum_n n(n-1)...(n-m+1) p_n
double factorial_moment(const PhotonDistribution& dist, int m);

}  // namespace wcsense
