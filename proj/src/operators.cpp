#include "wcsense/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wcsense/errors.hpp"

namespace wcsense {

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_block(int N, const Eigen::MatrixXcd& m, const char* who) {
    if (N < 0) throw DomainError(std::string(who) + ": N must be >= 0");
    if (m.rows() != N + 1 || m.cols() != N + 1) throw DomainError(std::string(who) + ": matrix must be (N+1)x(N+1)");
}

// sqrt(prod_{i=0}^{k-1} (n - i)), the a^k matrix element on |n>
double falling_sqrt(int n, int k) {
    if (k > n) return 0.0;
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= static_cast<double>(n - i);
    return std::sqrt(p);
}

}  // namespace

BlockOperator::BlockOperator(int N, Eigen::MatrixXcd matrix) : N_(N), matrix_(std::move(matrix)) {
    check_block(N_, matrix_, "BlockOperator");
    const double tol = 1e-12 * std::max(1.0, max_abs(matrix_));
    if (max_abs(matrix_ - matrix_.adjoint()) > tol) throw DomainError("BlockOperator: matrix is not Hermitian");
}

bool BlockOperator::is_real() const { return matrix_.imag().cwiseAbs().maxCoeff() == 0.0; }

Eigen::MatrixXd BlockOperator::real_matrix() const { return matrix_.real(); }

BlockUnitary::BlockUnitary(int N, Eigen::MatrixXcd matrix) : N_(N), matrix_(std::move(matrix)) {
    check_block(N_, matrix_, "BlockUnitary");
}

double BlockUnitary::unitarity_error() const {
    const Eigen::Index d = matrix_.rows();
    return max_abs(matrix_ * matrix_.adjoint() - Eigen::MatrixXcd::Identity(d, d));
}

bool is_block_process(const ProcessSpec& p) {
    return std::holds_alternative<CrossPhase>(p) || std::holds_alternative<Exchange>(p) ||
           std::holds_alternative<Hybrid>(p);
}

bool is_parity_filtering(const ProcessSpec& p) {
    if (std::holds_alternative<CrossPhase>(p)) return true;
    if (const auto* e = std::get_if<Exchange>(&p)) return e->k % 2 == 0;
    return false;
}

Eigen::MatrixXd ladder_monomial(int N, int p, int q, int r, int s) {
    if (N < 0 || p < 0 || q < 0 || r < 0 || s < 0) throw DomainError("ladder_monomial: negative argument");
    if (p - q + r - s != 0) throw DomainError("ladder_monomial: monomial does not conserve total photon number");
    const int d = N + 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        const int na = N - j;
        const int nb = j;
        if (q > na || s > nb) continue;
        const int na2 = na - q + p;
        const int nb2 = nb - s + r;
        const double v = falling_sqrt(na, q) * falling_sqrt(na2, p) * falling_sqrt(nb, s) * falling_sqrt(nb2, r);
        m(nb2, j) += v;  // row index is j' = n_b'
    }
    return m;
}

BlockOperator stokes(int N, Axis axis) {
    if (N < 0) throw DomainError("stokes: N must be >= 0");
    const int d = N + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    if (axis == Axis::Z) {
        for (int j = 0; j < d; ++j) m(j, j) = 0.5 * (N - 2 * j);
        return BlockOperator(N, std::move(m));
    }
    // a^+ b maps j -> j-1 with sqrt((N-j+1) j)
    for (int j = 1; j < d; ++j) {
        const double v = 0.5 * std::sqrt(static_cast<double>(N - j + 1) * j);
        if (axis == Axis::X) {
            m(j - 1, j) = v;
            m(j, j - 1) = v;
        } else {
            // Jy = (a^+ b - a b^+)/(2i)
            m(j - 1, j) = cplx(0.0, -v);
            m(j, j - 1) = cplx(0.0, v);
        }
    }
    return BlockOperator(N, std::move(m));
}

namespace {

Eigen::MatrixXd cross_phase_real(int N, int s) {
    if (N < 0) throw DomainError("cross_phase_generator: N must be >= 0");
    if (s < 1) throw DomainError("cross_phase_generator: order s must be >= 1");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int j = 0; j <= N; ++j) m(j, j) = std::pow(static_cast<double>(N - j) * j, s);
    return m;
}

Eigen::MatrixXd exchange_real(int N, int k, int max_order) {
    if (N < 0) throw DomainError("exchange_generator: N must be >= 0");
    if (k < 1 || k > max_order)
        throw ConfigurationError("exchange_generator: order k=" + std::to_string(k) + " outside guard [1, " +
                                 std::to_string(max_order) + "]");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int j = k; j <= N; ++j) {
        double p = 1.0;
        for (int i = 1; i <= k; ++i) p *= static_cast<double>(N - j + i);
        for (int i = 0; i < k; ++i) p *= static_cast<double>(j - i);
        const double v = std::sqrt(p);
        m(j - k, j) = v;
        m(j, j - k) = v;
    }
    return m;
}

Eigen::MatrixXd generator_term_real(const GeneratorSpec& g, int N) {
    if (const auto* c = std::get_if<CrossPhase>(&g)) return c->chi * cross_phase_real(N, c->s);
    const auto& e = std::get<Exchange>(g);
    return e.g * exchange_real(N, e.k, e.max_order);
}

Eigen::MatrixXd hybrid_real(int N, const std::vector<HybridTerm>& terms) {
    if (terms.empty()) throw DomainError("hybrid_generator: empty term list");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (const auto& t : terms) m += t.coefficient * generator_term_real(t.generator, N);
    return m;
}

}  // namespace

BlockOperator cross_phase_generator(int N, int s) { return BlockOperator(N, cross_phase_real(N, s).cast<cplx>()); }

BlockOperator exchange_generator(int N, int k, int max_order) {
    return BlockOperator(N, exchange_real(N, k, max_order).cast<cplx>());
}

BlockOperator hybrid_generator(int N, const std::vector<HybridTerm>& terms) {
    return BlockOperator(N, hybrid_real(N, terms).cast<cplx>());
}

Eigen::MatrixXd scaled_generator(const ProcessSpec& process, int N) {
    if (const auto* c = std::get_if<CrossPhase>(&process)) return c->chi * cross_phase_real(N, c->s);
    if (const auto* e = std::get_if<Exchange>(&process)) return e->g * exchange_real(N, e->k, e->max_order);
    if (const auto* h = std::get_if<Hybrid>(&process)) return hybrid_real(N, h->terms);
    throw UnsupportedVariantError("PDC processes are not block-structured; use generic_evolve");
}

BlockOperator process_generator(const ProcessSpec& process, int N) {
    return BlockOperator(N, scaled_generator(process, N).cast<cplx>());
}

cplx bs_phase(int j) {
    switch (((j % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

BeamSplitterLadder::BeamSplitterLadder() : N_(0), cur_{1.0} {}

void BeamSplitterLadder::advance() {
    const int n = N_;  // building block n+1 from block n
    const std::size_t d = static_cast<std::size_t>(n) + 1;
    // Block n+1 is the symmetric part of (block n) x (one photon):
    // |n+1-j, j> = [sqrt(n+1-j) |n-j, j>|a> + sqrt(j) |n+1-j, j-1>|b>] / sqrt(n+1),
    // and the one-photon matrix is [[1, -1], [1, 1]]/sqrt2. Each step is a
    // compression of an orthogonal map, so round-off does not grow.
    sa_.resize(d + 1);
    sb_.resize(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
        sa_[i] = std::sqrt(static_cast<double>(d - i));
        sb_[i] = std::sqrt(static_cast<double>(i));
    }
    const double scale = 1.0 / (static_cast<double>(d) * std::sqrt(2.0));
    const std::size_t m = d + 1;
    next_.resize(m * m);
    const double* old = cur_.data();  // d x d
    double* out = next_.data();       // m x m
    zero_.assign(d, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const double aj = sa_[j] * scale;
        const double bj = sb_[j] * scale;
        const double* c = j < d ? old + j * d : zero_.data();           // old(., j)
        const double* cm = j > 0 ? old + (j - 1) * d : zero_.data();    // old(., j-1)
        double* o = out + j * m;
        o[0] = sa_[0] * (aj * c[0] - bj * cm[0]);
        for (std::size_t i = 1; i < d; ++i)
            o[i] = sa_[i] * (aj * c[i] - bj * cm[i]) + sb_[i] * (aj * c[i - 1] + bj * cm[i - 1]);
        o[d] = sb_[d] * (aj * c[d - 1] + bj * cm[d - 1]);
    }
    cur_.swap(next_);
    N_ = n + 1;
}

BlockUnitary beam_splitter_unitary(int N) {
    if (N < 0) throw DomainError("beam_splitter_unitary: N must be >= 0");
    BeamSplitterLadder ladder;
    while (ladder.N() < N) ladder.advance();
    const auto& r = ladder.real_part();
    Eigen::MatrixXcd u(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j) u(i, j) = bs_phase(i) * r(i, j) / bs_phase(j);
    return BlockUnitary(N, std::move(u));
}

}  // namespace wcsense
