#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the block machinery of the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

inline double thermal_p(double nbar, int n) { return std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1); }

// V diag(exp(-i t lambda)) V^+ from Eigen's own solver.
inline Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd ph(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) ph(i) = std::polar(1.0, -t * es.eigenvalues()(i));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Two modes, each truncated at `cut` photons, state |na, nb> at na*(cut+1)+nb.
// Truncated ladder operators keep total-number sectors with na+nb <= cut exact.
struct TwoModeSpace {
    int cut;
    Eigen::MatrixXcd a, b, id;

    explicit TwoModeSpace(int c) : cut(c) {
        const int d = cut + 1;
        Eigen::MatrixXcd low = Eigen::MatrixXcd::Zero(d, d);
        for (int n = 1; n < d; ++n) low(n - 1, n) = std::sqrt(static_cast<double>(n));
        const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(d, d);
        a = kron(low, one);
        b = kron(one, low);
        id = Eigen::MatrixXcd::Identity(d * d, d * d);
    }

    static Eigen::MatrixXcd kron(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
        Eigen::MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return out;
    }

    int index(int na, int nb) const { return na * (cut + 1) + nb; }
    int dim() const { return (cut + 1) * (cut + 1); }

    Eigen::MatrixXcd ad() const { return a.adjoint(); }
    Eigen::MatrixXcd bd() const { return b.adjoint(); }
    Eigen::MatrixXcd jx() const { return 0.5 * (ad() * b + a * bd()); }
    Eigen::MatrixXcd jy() const { return (ad() * b - a * bd()) / cplx(0.0, 2.0); }
    Eigen::MatrixXcd jz() const { return 0.5 * (ad() * a - bd() * b); }
    Eigen::MatrixXcd na() const { return ad() * a; }
    Eigen::MatrixXcd nb() const { return bd() * b; }

    static Eigen::MatrixXcd power(const Eigen::MatrixXcd& m, int k) {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
        for (int i = 0; i < k; ++i) out = out * m;
        return out;
    }

    Eigen::MatrixXcd cross_phase(int s) const { return power(na() * nb(), s); }
    Eigen::MatrixXcd exchange(int k) const {
        const Eigen::MatrixXcd t = power(ad(), k) * power(b, k);
        return t + t.adjoint();
    }
    Eigen::MatrixXcd beam_splitter() const { return expm_hermitian(jx(), std::acos(-1.0) / 2.0); }

    // Restriction to total number N in the |N-j, j> ordering.
    Eigen::MatrixXcd block(const Eigen::MatrixXcd& m, int N) const {
        Eigen::MatrixXcd out(N + 1, N + 1);
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) out(i, j) = m(index(N - i, i), index(N - j, j));
        return out;
    }
};

struct Marginals {
    std::vector<double> a, b;
};

// Thermal |n,0> mixture (n <= cut) through bs * exp(-i t h) * bs in the full space.
inline Marginals full_space_mzi(const TwoModeSpace& sp, const Eigen::MatrixXcd& h, double t, double nbar) {
    const Eigen::MatrixXcd bs = sp.beam_splitter();
    const Eigen::MatrixXcd u = bs * expm_hermitian(h, t) * bs;
    Marginals m{std::vector<double>(sp.cut + 1, 0.0), std::vector<double>(sp.cut + 1, 0.0)};
    for (int n = 0; n <= sp.cut; ++n) {
        const Eigen::VectorXcd psi = u.col(sp.index(n, 0));
        const double w = thermal_p(nbar, n);
        for (int x = 0; x <= sp.cut; ++x)
            for (int y = 0; y <= sp.cut; ++y) {
                const double p = w * std::norm(psi(sp.index(x, y)));
                m.a[x] += p;
                m.b[y] += p;
            }
    }
    return m;
}

// ---- leading-order output probabilities for small nbar ----------------------

// two-photon exchange, P~2(gt)
inline double k2_p2(double nbar, double gt) {
    const double r3 = std::sqrt(3.0);
    return thermal_p(nbar, 2) * std::pow(std::sin(gt), 2) +
           thermal_p(nbar, 3) * 0.25 * std::pow(std::sin(2 * r3 * gt), 2) +
           thermal_p(nbar, 4) * 0.125 * std::pow(std::sin(4 * r3 * gt), 2);
}

// three-photon exchange, P~1..P~4(gt)
inline double k3_p(int n, double nbar, double gt) {
    const double p3 = thermal_p(nbar, 3), p4 = thermal_p(nbar, 4);
    const double s6 = std::sin(6 * gt), s12 = std::sin(12 * gt), s3 = std::sin(3 * gt);
    switch (n) {
        case 1: return 3.0 / 16 * p3 * s6 * s6 + 9.0 / 16 * p4 * s12 * s12;
        case 2: return 0.75 * p3 * std::pow(s3, 4) + 0.375 * p4 * std::pow(s6, 4);
        case 3: return 1.0 / 16 * p3 * s6 * s6 + 1.0 / 16 * p4 * s12 * s12;
        case 4: return 9.0 / 16 * p4 * std::pow(s6, 4);
        default: return 0.0;
    }
}

// ---- passive states by exhaustion -------------------------------------------

// Largest mean-energy drop over `trials` random permutations.
inline double best_permutation_drop(const std::vector<double>& p, int trials, std::mt19937_64& rng) {
    std::vector<int> perm(p.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    double mean = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) mean += static_cast<double>(n) * p[n];
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double m = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[static_cast<std::size_t>(perm[n])];
        best = std::max(best, mean - m);
    }
    return best;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double max_abs(const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return x.size() == y.size() ? m : INFINITY;
}

}  // namespace oracle
