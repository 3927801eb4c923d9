#include "wcsense/fock.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "wcsense/errors.hpp"

namespace wcsense {

namespace {

constexpr double kSumSlack = 1e-10;

std::vector<double> clamp_checked(std::vector<double> p) {
    if (p.empty()) throw DomainError("PhotonDistribution: empty probability list");
    double sum = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        if (!std::isfinite(p[n])) throw DomainError("PhotonDistribution: non-finite entry at n=" + std::to_string(n));
        if (p[n] < 0.0) {
            if (p[n] < kNegativeClamp)
                throw NumericError("PhotonDistribution: negative probability " + std::to_string(p[n]) +
                                   " at n=" + std::to_string(n));
            p[n] = 0.0;
        }
        sum += p[n];
    }
    if (sum > 1.0 + kSumSlack) throw NumericError("PhotonDistribution: total probability exceeds 1 (" + std::to_string(sum) + ")");
    return p;
}

}  // namespace

PhotonDistribution::PhotonDistribution() : probs_{1.0} {}

PhotonDistribution::PhotonDistribution(std::vector<double> probs) : probs_(clamp_checked(std::move(probs))) {}

double PhotonDistribution::total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

double PhotonDistribution::mean() const {
    double s = 0.0;
    for (std::size_t n = 0; n < probs_.size(); ++n) s += static_cast<double>(n) * probs_[n];
    return s;
}

double PhotonDistribution::second_moment() const {
    double s = 0.0;
    for (std::size_t n = 0; n < probs_.size(); ++n) s += static_cast<double>(n * n) * probs_[n];
    return s;
}

double PhotonDistribution::variance() const {
    const double m = mean();
    return second_moment() - m * m;
}

double PhotonDistribution::odd_mass() const {
    double s = 0.0;
    for (std::size_t n = 1; n < probs_.size(); n += 2) s += probs_[n];
    return s;
}

double thermal_probability(double nbar, int n) {
    if (nbar < 0.0) throw DomainError("thermal_probability: nbar must be >= 0");
    if (n < 0) return 0.0;
    if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
    // log form: nbar^n/(1+nbar)^(n+1) overflows for large n
    return std::exp(n * std::log(nbar / (1.0 + nbar))) / (1.0 + nbar);
}

int thermal_cutoff(double nbar, double tail_tol) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("thermal_cutoff: nbar must be finite and >= 0");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("thermal_cutoff: tail_tol must lie in (0, 1)");
    if (nbar == 0.0) return 0;
    const double lr = std::log(nbar / (1.0 + nbar));
    auto tail = [&](int n_max) { return std::exp((n_max + 1) * lr); };
    int n = std::max(0, static_cast<int>(std::ceil(std::log(tail_tol) / lr)) - 1);
    while (n > 0 && tail(n - 1) <= tail_tol) --n;
    while (tail(n) > tail_tol) ++n;
    return n;
}

ThermalInput ThermalInput::from_tail(double nbar, double tail_tol) {
    return ThermalInput{nbar, thermal_cutoff(nbar, tail_tol)};
}

double ThermalInput::tail_mass() const {
    if (nbar == 0.0) return 0.0;
    return std::exp((cutoff + 1) * std::log(nbar / (1.0 + nbar)));
}

PhotonDistribution ThermalInput::distribution() const {
    std::vector<double> p(static_cast<std::size_t>(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n) p[static_cast<std::size_t>(n)] = probability(n);
    return PhotonDistribution(std::move(p));
}

PhotonDistribution thermal_distribution(double nbar, double tail_tol) {
    if (nbar < 0.0) throw DomainError("thermal_distribution: nbar must be >= 0");
    return ThermalInput::from_tail(nbar, tail_tol).distribution();
}

TwoModeBlockState::TwoModeBlockState(int N, std::vector<cplx> amplitudes) : N_(N), amplitudes_(std::move(amplitudes)) {
    if (N < 0) throw DomainError("TwoModeBlockState: N must be >= 0");
    if (amplitudes_.size() != static_cast<std::size_t>(N) + 1)
        throw DomainError("TwoModeBlockState: amplitude vector must have length N+1");
    double norm = 0.0;
    for (const auto& a : amplitudes_) norm += std::norm(a);
    if (std::abs(norm - 1.0) > 1e-12) throw DomainError("TwoModeBlockState: state not normalized");
}

namespace {

PhotonDistribution reduce(std::span<const WeightedBlock> blocks, bool mode_a) {
    int max_n = 0;
    double wsum = 0.0;
    for (const auto& b : blocks) {
        if (b.weight < 0.0) throw DomainError("reduce_mode: negative block weight");
        wsum += b.weight;
        max_n = std::max(max_n, b.state.N());
    }
    if (wsum > 1.0 + 1e-12) throw DomainError("reduce_mode: block weights sum above 1");
    std::vector<double> p(static_cast<std::size_t>(max_n) + 1, 0.0);
    for (const auto& b : blocks) {
        const int N = b.state.N();
        const auto& amp = b.state.amplitudes();
        for (int j = 0; j <= N; ++j) {
            const int n = mode_a ? N - j : j;
            p[static_cast<std::size_t>(n)] += b.weight * std::norm(amp[static_cast<std::size_t>(j)]);
        }
    }
    return PhotonDistribution(std::move(p));
}

}  // namespace

PhotonDistribution reduce_mode_a(std::span<const WeightedBlock> blocks) { return reduce(blocks, true); }
PhotonDistribution reduce_mode_b(std::span<const WeightedBlock> blocks) { return reduce(blocks, false); }

double factorial_moment(const PhotonDistribution& dist, int m) {
    if (m < 1) throw DomainError("factorial_moment: m must be >= 1");
    double s = 0.0;
    const auto& p = dist.probs();
    for (std::size_t n = static_cast<std::size_t>(m); n < p.size(); ++n) {
        double f = 1.0;
        for (int r = 0; r < m; ++r) f *= static_cast<double>(n) - r;
        s += f * p[n];
    }
    return s;
}

}  // namespace wcsense
