#include "wcsense/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>

#include "parallel.hpp"
#include "wcsense/errors.hpp"
#include "wcsense/linalg.hpp"

namespace wcsense {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& h, const std::vector<int>& idx) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd s(m, m);
    for (Eigen::Index c = 0; c < m; ++c)
        for (Eigen::Index r = 0; r < m; ++r) s(r, c) = h(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
    return s;
}

linalg::RealEigenSystem solve_real(const Eigen::MatrixXd& sub) {
    if (sub.rows() == 1) return {sub.diagonal(), Eigen::MatrixXd::Ones(1, 1)};
    if (linalg::is_tridiagonal(sub)) {
        const Eigen::Index m = sub.rows();
        Eigen::VectorXd off(m - 1);
        for (Eigen::Index i = 0; i + 1 < m; ++i) off(i) = sub(i + 1, i);
        return linalg::symmetric_tridiagonal_eig(sub.diagonal(), off);
    }
    return linalg::symmetric_eig(sub);
}

// sqrt(C(N, j)) / 2^(N/2): magnitude of U_BS |N, 0> on index j
double bs_vacuum_column(int N, int j) {
    // evaluated identically for j and N - j
    const int lo = std::min(j, N - j);
    return std::exp(0.5 * (std::lgamma(N + 1.0) - std::lgamma(lo + 1.0) - std::lgamma(N - lo + 1.0)) -
                    0.5 * N * std::log(2.0));
}

// i^j
cplx inv_bs_phase(int j) { return std::conj(bs_phase(j)); }

bool off_diagonal_zero(const Eigen::MatrixXd& h) {
    for (Eigen::Index c = 0; c < h.cols(); ++c)
        for (Eigen::Index r = 0; r < h.rows(); ++r)
            if (r != c && h(r, c) != 0.0) return false;
    return true;
}

}  // namespace

std::vector<SpectralComponent> real_symmetric_components(const Eigen::MatrixXd& h) {
    std::vector<SpectralComponent> out;
    for (auto& idx : linalg::coupled_components(h)) {
        auto sys = solve_real(submatrix(h, idx));
        out.push_back({std::move(idx), std::move(sys.values), std::move(sys.vectors)});
    }
    return out;
}

EigenDecomposition hermitian_eig(const BlockOperator& op, EigenMethod method) {
    const Eigen::MatrixXcd& h = op.matrix();
    const Eigen::Index n = h.rows();
    EigenDecomposition out;

    if (method == EigenMethod::Jacobi) {
        auto sys = linalg::jacobi_hermitian_eig(h);
        return {std::move(sys.values), std::move(sys.vectors)};
    }
    if (method == EigenMethod::HouseholderQl) {
        if (!op.is_real()) throw DomainError("hermitian_eig: Householder/QL path needs a real symmetric matrix");
        auto sys = linalg::symmetric_eig(op.real_matrix());
        return {std::move(sys.values), sys.vectors.cast<cplx>()};
    }

    // Auto: solve coupled components independently, then merge.
    Eigen::VectorXd values(n);
    Eigen::MatrixXcd vectors = Eigen::MatrixXcd::Zero(n, n);
    Eigen::Index col = 0;
    if (op.is_real()) {
        for (const auto& comp : real_symmetric_components(op.real_matrix())) {
            for (Eigen::Index k = 0; k < comp.values.size(); ++k, ++col) {
                values(col) = comp.values(k);
                for (std::size_t r = 0; r < comp.indices.size(); ++r)
                    vectors(comp.indices[r], col) = comp.vectors(static_cast<Eigen::Index>(r), k);
            }
        }
    } else {
        for (const auto& idx : linalg::coupled_components(h)) {
            const auto m = static_cast<Eigen::Index>(idx.size());
            Eigen::MatrixXcd sub(m, m);
            for (Eigen::Index c = 0; c < m; ++c)
                for (Eigen::Index r = 0; r < m; ++r)
                    sub(r, c) = h(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
            auto sys = linalg::jacobi_hermitian_eig(sub);
            for (Eigen::Index k = 0; k < m; ++k, ++col) {
                values(col) = sys.values(k);
                for (Eigen::Index r = 0; r < m; ++r) vectors(idx[static_cast<std::size_t>(r)], col) = sys.vectors(r, k);
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = values(order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

BlockUnitary unitary_of(const BlockOperator& op, double theta) {
    if (!std::isfinite(theta)) throw DomainError("unitary_of: theta must be finite");
    const auto eig = hermitian_eig(op);
    Eigen::VectorXcd phases(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) phases(i) = std::polar(1.0, -theta * eig.values(i));
    Eigen::MatrixXcd u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
    return BlockUnitary(op.N(), std::move(u));
}

BlockUnitary mzi_unitary(const ProcessSpec& process, double t, int N) {
    if (!is_block_process(process))
        throw UnsupportedVariantError("mzi_unitary: PDC processes are not block-structured; use generic_evolve");
    const auto bs = beam_splitter_unitary(N);
    const auto nl = unitary_of(process_generator(process, N), t);
    return BlockUnitary(N, bs.matrix() * nl.matrix() * bs.matrix());
}

// ---- MziEngine ------------------------------------------------------------

// Mode swap j -> N - j. When a component is closed under the swap, its block
// of h commutes with it, and u restricted to it is (anti)symmetric, the
// evolution never leaves one parity sector. The sector is diagonalised at half
// size and the mirrored amplitudes are copied exactly at evaluation time.
bool MziEngine::fold_mirrored(const Eigen::MatrixXd& h, const Eigen::VectorXcd& u, const std::vector<int>& idx, int N,
                              double scale, Component& out) {
    const double tol = 1e-13 * scale;
    std::vector<char> member(static_cast<std::size_t>(N) + 1, 0);
    for (int j : idx) member[static_cast<std::size_t>(j)] = 1;
    for (int j : idx)
        if (!member[static_cast<std::size_t>(N - j)]) return false;
    for (int i : idx)
        for (int j : idx)
            if (std::abs(h(i, j) - h(N - i, N - j)) > tol) return false;

    double sign = 0.0;
    const double umax = u.cwiseAbs().maxCoeff();
    for (int j : idx) {
        if (std::abs(u(j)) <= 1e-300) continue;
        const cplx ratio = u(N - j) / u(j);
        for (double s : {1.0, -1.0})
            if (std::abs(ratio - s) < 1e-14) sign = s;
        break;
    }
    if (sign == 0.0) return false;
    for (int j : idx)
        if (std::abs(u(N - j) - sign * u(j)) > 1e-14 * umax) return false;

    std::vector<int> reps, mirror;
    for (int j : idx) {
        if (j < N - j) {
            reps.push_back(j);
            mirror.push_back(N - j);
        } else if (j == N - j && sign > 0.0) {
            reps.push_back(j);
            mirror.push_back(-1);
        }
    }
    if (reps.empty()) return false;
    const auto m = static_cast<Eigen::Index>(reps.size());
    const double r2 = std::sqrt(0.5);
    // basis b_q = (e_j + sign e_(N-j)) / sqrt2, or e_j for the midpoint
    Eigen::MatrixXd hr(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const int ja = reps[static_cast<std::size_t>(a)];
        const int ka = mirror[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < m; ++b) {
            const int jb = reps[static_cast<std::size_t>(b)];
            const int kb = mirror[static_cast<std::size_t>(b)];
            double v = h(ja, jb);
            if (ka >= 0 && kb >= 0) {
                v = 0.5 * (h(ja, jb) + sign * h(ja, kb) + sign * h(ka, jb) + h(ka, kb));
            } else if (ka >= 0) {
                v = r2 * (h(ja, jb) + sign * h(ka, jb));
            } else if (kb >= 0) {
                v = r2 * (h(ja, jb) + sign * h(ja, kb));
            }
            hr(a, b) = v;
        }
    }
    hr = 0.5 * (hr + hr.transpose()).eval();
    auto sys = solve_real(hr);
    for (Eigen::Index a = 0; a < m; ++a)
        if (mirror[static_cast<std::size_t>(a)] >= 0) sys.vectors.row(a) *= r2;
    // weights = (B V)^T u with (B V) restricted to the representative rows
    out.weights = Eigen::VectorXcd::Zero(m);
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index a = 0; a < m; ++a) {
            const double f = mirror[static_cast<std::size_t>(a)] >= 0 ? 2.0 : 1.0;
            out.weights(k) += f * sys.vectors(a, k) * u(reps[static_cast<std::size_t>(a)]);
        }
    out.indices = std::move(reps);
    out.mirror = std::move(mirror);
    out.mirror_sign = sign;
    out.values = std::move(sys.values);
    out.vectors = std::move(sys.vectors);
    return true;
}

MziEngine::MziEngine(ProcessSpec process, ThermalInput input)
    : process_(std::move(process)), input_(input), threads_(detail::default_threads()) {
    if (!is_block_process(process_))
        throw UnsupportedVariantError("MziEngine: PDC processes are not block-structured; use generic_evolve");
    if (input_.nbar < 0.0 || input_.cutoff < 0) throw DomainError("MziEngine: invalid thermal input");
    blocks_.resize(static_cast<std::size_t>(input_.cutoff) + 1);
    for (int N = 0; N <= input_.cutoff; ++N) {
        Block& blk = blocks_[static_cast<std::size_t>(N)];
        const Eigen::MatrixXd h = scaled_generator(process_, N);
        if (off_diagonal_zero(h)) {
            blk.diagonal = true;
            blk.diag = h.diagonal();
            blk.vacuum.resize(N + 1);
            for (int j = 0; j <= N; ++j) blk.vacuum(j) = bs_vacuum_column(N, j);
            continue;
        }
        Eigen::VectorXcd u(N + 1);
        for (int j = 0; j <= N; ++j) u(j) = bs_phase(j) * bs_vacuum_column(N, j);
        const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
        for (auto& idx : linalg::coupled_components(h)) {
            Component c;
            if (fold_mirrored(h, u, idx, N, scale, c)) {
                blk.components.push_back(std::move(c));
                continue;
            }
            auto sys = solve_real(submatrix(h, idx));
            const auto m = static_cast<Eigen::Index>(idx.size());
            Eigen::VectorXcd us(m);
            for (Eigen::Index r = 0; r < m; ++r) us(r) = u(idx[static_cast<std::size_t>(r)]);
            c.weights = sys.vectors.transpose() * us;
            c.indices = std::move(idx);
            c.values = std::move(sys.values);
            c.vectors = std::move(sys.vectors);
            blk.components.push_back(std::move(c));
        }
    }
}

namespace {

// Columns per GEMM panel. Panel boundaries depend only on the grid length, so
// every column goes through the same kernel whatever the thread count.
constexpr std::size_t kPanel = 128;

}  // namespace

// The beam-splitter matrix obeys R(i, N-j) = (-1)^(N+i) R(i, j). Pairing
// column j with N-j splits R Y into two half-size products: rows with
// (N+i) even see y_j + y_(N-j), the others see y_j - y_(N-j).
void MziEngine::evaluate_range(std::span<const double> ts, std::vector<std::vector<double>>& pa,
                               std::vector<std::vector<double>>& pb) const {
    BeamSplitterLadder ladder;
    Eigen::MatrixXd yre, yim, ere, eim, zre, zim;
    Eigen::MatrixXd rp, rm, yp_re, yp_im, ym_re, ym_im, ap_re, ap_im, am_re, am_im;
    for (int N = 0; N <= input_.cutoff; ++N) {
        if (N > 0) ladder.advance();
        const double weight = input_.probability(N);
        if (weight == 0.0) continue;
        const Block& blk = blocks_[static_cast<std::size_t>(N)];
        const Eigen::Index d = N + 1;
        const Eigen::Index hp = N / 2 + 1;    // rows i = N%2, N%2+2, ...; columns 0..N/2
        const Eigen::Index hm = (N + 1) / 2;  // rows i = 1-N%2, ...; columns 0..(N-1)/2
        const Eigen::Index op = N % 2, om = 1 - N % 2;
        {
            const auto r = ladder.real_part();
            rp.resize(hp, hp);
            rm.resize(hm, hm);
            for (Eigen::Index j = 0; j < hp; ++j)
                for (Eigen::Index q = 0; q < hp; ++q) rp(q, j) = r(op + 2 * q, j);
            for (Eigen::Index j = 0; j < hm; ++j)
                for (Eigen::Index q = 0; q < hm; ++q) rm(q, j) = r(om + 2 * q, j);
        }
        for (std::size_t p0 = 0; p0 < ts.size(); p0 += kPanel) {
            const auto panel = ts.subspan(p0, std::min(kPanel, ts.size() - p0));
            const auto T = static_cast<Eigen::Index>(panel.size());
            yre.resize(d, T);
            yim.resize(d, T);
            if (blk.diagonal) {
                for (Eigen::Index t = 0; t < T; ++t) {
                    for (Eigen::Index j = 0; j < d; ++j) {
                        const double c = blk.vacuum(j);
                        const double ph = panel[static_cast<std::size_t>(t)] * blk.diag(j);
                        yre(j, t) = c * std::cos(ph);
                        yim(j, t) = -c * std::sin(ph);
                    }
                }
            } else {
                for (const auto& comp : blk.components) {
                    const Eigen::Index m = comp.values.size();
                    ere.resize(m, T);
                    eim.resize(m, T);
                    for (Eigen::Index t = 0; t < T; ++t) {
                        for (Eigen::Index l = 0; l < m; ++l) {
                            const cplx e =
                                std::polar(1.0, -panel[static_cast<std::size_t>(t)] * comp.values(l)) * comp.weights(l);
                            ere(l, t) = e.real();
                            eim(l, t) = e.imag();
                        }
                    }
                    zre.noalias() = comp.vectors * ere;
                    zim.noalias() = comp.vectors * eim;
                    const Eigen::Index rows = comp.vectors.rows();
                    for (Eigen::Index q = 0; q < rows; ++q) {
                        const int j = comp.indices[static_cast<std::size_t>(q)];
                        const cplx ph = inv_bs_phase(j);
                        const int k = comp.mirror.empty() ? -1 : comp.mirror[static_cast<std::size_t>(q)];
                        const cplx phk = k >= 0 ? inv_bs_phase(k) * comp.mirror_sign : cplx(0.0);
                        for (Eigen::Index t = 0; t < T; ++t) {
                            const cplx z(zre(q, t), zim(q, t));
                            const cplx y = ph * z;
                            yre(j, t) = y.real();
                            yim(j, t) = y.imag();
                            if (k < 0) continue;
                            const cplx yk = phk * z;
                            yre(k, t) = yk.real();
                            yim(k, t) = yk.imag();
                        }
                    }
                }
            }

            yp_re.resize(hp, T);
            yp_im.resize(hp, T);
            ym_re.resize(hm, T);
            ym_im.resize(hm, T);
            bool even_class_empty = true, odd_class_empty = true;
            for (Eigen::Index t = 0; t < T; ++t) {
                for (Eigen::Index j = 0; j < hm; ++j) {
                    const Eigen::Index k = N - j;
                    yp_re(j, t) = yre(j, t) + yre(k, t);
                    yp_im(j, t) = yim(j, t) + yim(k, t);
                    ym_re(j, t) = yre(j, t) - yre(k, t);
                    ym_im(j, t) = yim(j, t) - yim(k, t);
                    even_class_empty = even_class_empty && yp_re(j, t) == 0.0 && yp_im(j, t) == 0.0;
                    odd_class_empty = odd_class_empty && ym_re(j, t) == 0.0 && ym_im(j, t) == 0.0;
                }
                if (hp > hm) {
                    yp_re(hm, t) = yre(hm, t);
                    yp_im(hm, t) = yim(hm, t);
                    even_class_empty = even_class_empty && yp_re(hm, t) == 0.0 && yp_im(hm, t) == 0.0;
                }
            }
            // parity-conserving generators leave one class identically zero
            const bool even_rows = !even_class_empty;
            const bool odd_rows = hm > 0 && !odd_class_empty;
            if (even_rows) {
                ap_re.noalias() = rp * yp_re;
                ap_im.noalias() = rp * yp_im;
            }
            if (odd_rows) {
                am_re.noalias() = rm * ym_re;
                am_im.noalias() = rm * ym_im;
            }
            for (Eigen::Index t = 0; t < T; ++t) {
                auto& da = pa[p0 + static_cast<std::size_t>(t)];
                auto& db = pb[p0 + static_cast<std::size_t>(t)];
                for (Eigen::Index q = 0; even_rows && q < hp; ++q) {
                    const Eigen::Index i = op + 2 * q;
                    const double p = weight * (ap_re(q, t) * ap_re(q, t) + ap_im(q, t) * ap_im(q, t));
                    da[static_cast<std::size_t>(N - i)] += p;
                    db[static_cast<std::size_t>(i)] += p;
                }
                if (!odd_rows) continue;
                for (Eigen::Index q = 0; q < hm; ++q) {
                    const Eigen::Index i = om + 2 * q;
                    const double p = weight * (am_re(q, t) * am_re(q, t) + am_im(q, t) * am_im(q, t));
                    da[static_cast<std::size_t>(N - i)] += p;
                    db[static_cast<std::size_t>(i)] += p;
                }
            }
        }
    }
}

std::vector<MziOutput> MziEngine::evaluate(std::span<const double> ts) const {
    for (double t : ts)
        if (!std::isfinite(t)) throw DomainError("MziEngine: t must be finite");
    const std::size_t T = ts.size();
    const std::size_t len = static_cast<std::size_t>(input_.cutoff) + 1;
    std::vector<std::vector<double>> pa(T, std::vector<double>(len, 0.0));
    std::vector<std::vector<double>> pb(T, std::vector<double>(len, 0.0));
    const std::size_t panels = (T + kPanel - 1) / kPanel;
    detail::parallel_chunks(panels, threads_, [&](std::size_t first, std::size_t last) {
        const std::size_t begin = first * kPanel;
        const std::size_t end = std::min(T, last * kPanel);
        std::vector<std::vector<double>> la(pa.begin() + static_cast<std::ptrdiff_t>(begin),
                                            pa.begin() + static_cast<std::ptrdiff_t>(end));
        std::vector<std::vector<double>> lb(pb.begin() + static_cast<std::ptrdiff_t>(begin),
                                            pb.begin() + static_cast<std::ptrdiff_t>(end));
        evaluate_range(ts.subspan(begin, end - begin), la, lb);
        for (std::size_t i = begin; i < end; ++i) {
            pa[i] = std::move(la[i - begin]);
            pb[i] = std::move(lb[i - begin]);
        }
    });
    std::vector<MziOutput> out;
    out.reserve(T);
    for (std::size_t i = 0; i < T; ++i)
        out.push_back({PhotonDistribution(std::move(pa[i])), PhotonDistribution(std::move(pb[i]))});
    return out;
}

MziOutput MziEngine::evaluate(double t) const {
    const double ts[1] = {t};
    return std::move(evaluate(std::span<const double>(ts, 1)).front());
}

MziOutput mzi_output(const ProcessSpec& process, double t, const ThermalInput& input) {
    MziEngine engine(process, input);
    engine.set_threads(1);
    return engine.evaluate(t);
}

// ---- generic engine -------------------------------------------------------

std::size_t GenericSystem::dimension() const {
    std::size_t d = 1;
    for (int c : cutoffs) {
        if (c < 0) throw DomainError("GenericSystem: negative mode cutoff");
        d *= static_cast<std::size_t>(c) + 1;
    }
    return d;
}

FockMixture FockMixture::thermal_on_mode(std::size_t n_modes, std::size_t mode, const ThermalInput& input) {
    if (mode >= n_modes) throw DomainError("FockMixture: mode index out of range");
    FockMixture mix;
    for (int n = 0; n <= input.cutoff; ++n) {
        const double w = input.probability(n);
        if (w == 0.0) continue;
        std::vector<int> occ(n_modes, 0);
        occ[mode] = n;
        mix.entries.push_back({w, std::move(occ)});
    }
    return mix;
}

GenericSystem degenerate_pdc_system(double g, int pump_cutoff, std::size_t dimension_guard) {
    GenericSystem s;
    s.cutoffs = {pump_cutoff, 2 * pump_cutoff};
    s.hamiltonian = {{cplx(g), {0, 2}, {1, 0}}, {cplx(g), {1, 0}, {0, 2}}};
    s.dimension_guard = dimension_guard;
    return s;
}

GenericSystem nondegenerate_pdc_system(double g, int pump_cutoff, std::size_t dimension_guard) {
    GenericSystem s;
    s.cutoffs = {pump_cutoff, pump_cutoff, pump_cutoff};
    s.hamiltonian = {{cplx(g), {0, 1, 1}, {1, 0, 0}}, {cplx(g), {1, 0, 0}, {0, 1, 1}}};
    s.dimension_guard = dimension_guard;
    return s;
}

namespace {

double falling_sqrt(int n, int k) {
    if (k > n) return 0.0;
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= static_cast<double>(n - i);
    return std::sqrt(p);
}

struct SparseHamiltonian {
    std::size_t dim = 0;
    std::vector<std::size_t> strides;
    // column -> list of (row, value)
    std::vector<std::vector<std::pair<std::size_t, cplx>>> columns;

    int occupation(std::size_t index, std::size_t mode, const std::vector<int>& cutoffs) const {
        return static_cast<int>((index / strides[mode]) % (static_cast<std::size_t>(cutoffs[mode]) + 1));
    }
};

SparseHamiltonian build_sparse(const GenericSystem& sys) {
    const std::size_t modes = sys.cutoffs.size();
    if (modes == 0) throw DomainError("generic_evolve: system has no modes");
    for (const auto& term : sys.hamiltonian)
        if (term.creation.size() != modes || term.annihilation.size() != modes)
            throw DomainError("generic_evolve: ladder term arity does not match the number of modes");
    SparseHamiltonian h;
    h.dim = sys.dimension();
    if (h.dim > sys.dimension_guard)
        throw ConfigurationError("generic_evolve: Hilbert-space dimension " + std::to_string(h.dim) +
                                 " exceeds the configured guard " + std::to_string(sys.dimension_guard));
    h.strides.assign(modes, 1);
    for (std::size_t m = modes - 1; m-- > 0;)
        h.strides[m] = h.strides[m + 1] * (static_cast<std::size_t>(sys.cutoffs[m + 1]) + 1);
    h.columns.resize(h.dim);

    std::vector<int> occ(modes);
    for (std::size_t s = 0; s < h.dim; ++s) {
        for (std::size_t m = 0; m < modes; ++m) occ[m] = h.occupation(s, m, sys.cutoffs);
        std::map<std::size_t, cplx> col;
        for (const auto& term : sys.hamiltonian) {
            cplx amp = term.coefficient;
            std::size_t target = 0;
            bool ok = true;
            for (std::size_t m = 0; m < modes && ok; ++m) {
                const int lowered = occ[m] - term.annihilation[m];
                const int raised = lowered + term.creation[m];
                if (lowered < 0 || raised > sys.cutoffs[m]) {
                    ok = false;
                    break;
                }
                amp *= falling_sqrt(occ[m], term.annihilation[m]) * falling_sqrt(raised, term.creation[m]);
                target += static_cast<std::size_t>(raised) * h.strides[m];
            }
            if (ok && amp != cplx(0.0)) col[target] += amp;
        }
        for (const auto& [row, v] : col)
            if (v != cplx(0.0)) h.columns[s].emplace_back(row, v);
    }

    for (std::size_t c = 0; c < h.dim; ++c) {
        for (const auto& [r, v] : h.columns[c]) {
            cplx back = 0.0;
            for (const auto& [r2, v2] : h.columns[r])
                if (r2 == c) back = v2;
            if (std::abs(back - std::conj(v)) > 1e-12 * std::max(1.0, std::abs(v)))
                throw DomainError("generic_evolve: Hamiltonian is not Hermitian (unpaired ladder term)");
        }
    }
    return h;
}

}  // namespace

std::vector<std::vector<PhotonDistribution>> generic_evolve(const GenericSystem& sys, const FockMixture& initial,
                                                            std::span<const double> ts) {
    for (double t : ts)
        if (!std::isfinite(t)) throw DomainError("generic_evolve: t must be finite");
    const SparseHamiltonian h = build_sparse(sys);
    const std::size_t modes = sys.cutoffs.size();

    linalg::DisjointSets sets(h.dim);
    for (std::size_t c = 0; c < h.dim; ++c)
        for (const auto& rv : h.columns[c]) sets.unite(rv.first, c);

    // initial basis states grouped by component root
    std::map<std::size_t, std::vector<std::pair<double, std::size_t>>> by_root;
    for (const auto& e : initial.entries) {
        if (e.weight < 0.0) throw DomainError("generic_evolve: negative mixture weight");
        if (e.occupation.size() != modes) throw DomainError("generic_evolve: occupation arity mismatch");
        std::size_t idx = 0;
        for (std::size_t m = 0; m < modes; ++m) {
            if (e.occupation[m] < 0 || e.occupation[m] > sys.cutoffs[m])
                throw DomainError("generic_evolve: initial occupation outside mode cutoff");
            idx += static_cast<std::size_t>(e.occupation[m]) * h.strides[m];
        }
        if (e.weight > 0.0) by_root[sets.find(idx)].emplace_back(e.weight, idx);
    }
    std::vector<std::vector<std::size_t>> members_of_root;
    std::unordered_map<std::size_t, std::size_t> root_slot;
    for (const auto& kv : by_root) {
        root_slot[kv.first] = members_of_root.size();
        members_of_root.emplace_back();
    }
    for (std::size_t s = 0; s < h.dim; ++s) {
        auto it = root_slot.find(sets.find(s));
        if (it != root_slot.end()) members_of_root[it->second].push_back(s);
    }

    const std::size_t T = ts.size();
    std::vector<std::vector<std::vector<double>>> diag(
        T, std::vector<std::vector<double>>(modes));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t m = 0; m < modes; ++m) diag[t][m].assign(static_cast<std::size_t>(sys.cutoffs[m]) + 1, 0.0);
    double worst_offdiag = 0.0;

    std::size_t slot = 0;
    for (const auto& [root, starts] : by_root) {
        const auto& members = members_of_root[slot++];
        const auto d = static_cast<Eigen::Index>(members.size());
        std::unordered_map<std::size_t, Eigen::Index> local;
        for (Eigen::Index i = 0; i < d; ++i) local[members[static_cast<std::size_t>(i)]] = i;
        Eigen::MatrixXcd hc = Eigen::MatrixXcd::Zero(d, d);
        for (Eigen::Index c = 0; c < d; ++c)
            for (const auto& [r, v] : h.columns[members[static_cast<std::size_t>(c)]]) hc(local.at(r), c) = v;

        Eigen::VectorXd lambda;
        Eigen::MatrixXcd vecs;
        if (hc.imag().cwiseAbs().maxCoeff() == 0.0) {
            auto sys_r = solve_real(hc.real());
            lambda = std::move(sys_r.values);
            vecs = sys_r.vectors.cast<cplx>();
        } else {
            auto sys_c = linalg::jacobi_hermitian_eig(hc);
            lambda = std::move(sys_c.values);
            vecs = std::move(sys_c.vectors);
        }

        for (const auto& [weight, start] : starts) {
            const Eigen::VectorXcd w = vecs.row(local.at(start)).adjoint();  // V^+ e_start
            for (std::size_t t = 0; t < T; ++t) {
                Eigen::VectorXcd ph(d);
                for (Eigen::Index l = 0; l < d; ++l) ph(l) = std::polar(1.0, -ts[t] * lambda(l)) * w(l);
                const Eigen::VectorXcd psi = vecs * ph;
                for (std::size_t m = 0; m < modes; ++m) {
                    std::unordered_map<std::size_t, std::vector<Eigen::Index>> by_rest;
                    for (Eigen::Index i = 0; i < d; ++i) {
                        const std::size_t s = members[static_cast<std::size_t>(i)];
                        const int n = h.occupation(s, m, sys.cutoffs);
                        diag[t][m][static_cast<std::size_t>(n)] += weight * std::norm(psi(i));
                        by_rest[s - static_cast<std::size_t>(n) * h.strides[m]].push_back(i);
                    }
                    for (const auto& [rest, idxs] : by_rest)
                        for (std::size_t x = 0; x < idxs.size(); ++x)
                            for (std::size_t y = x + 1; y < idxs.size(); ++y)
                                worst_offdiag = std::max(worst_offdiag,
                                                         weight * std::abs(psi(idxs[x]) * std::conj(psi(idxs[y]))));
                }
            }
        }
    }
    if (worst_offdiag >= 1e-10)
        throw NumericError("generic_evolve: reduced single-mode state has off-diagonal elements (" +
                           std::to_string(worst_offdiag) + ")");

    std::vector<std::vector<PhotonDistribution>> out(T);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t m = 0; m < modes; ++m) out[t].emplace_back(std::move(diag[t][m]));
    return out;
}

std::vector<PhotonDistribution> generic_evolve(const GenericSystem& system, const FockMixture& initial, double t) {
    const double ts[1] = {t};
    return std::move(generic_evolve(system, initial, std::span<const double>(ts, 1)).front());
}

std::vector<PhotonDistribution> pdc_signal_output(const ProcessSpec& process, const ThermalInput& pump,
                                                  std::span<const double> ts, std::size_t dimension_guard) {
    GenericSystem sys;
    std::size_t modes = 0;
    if (const auto* d = std::get_if<DegeneratePdc>(&process)) {
        sys = degenerate_pdc_system(d->g, pump.cutoff, dimension_guard);
        modes = 2;
    } else if (const auto* nd = std::get_if<NonDegeneratePdc>(&process)) {
        sys = nondegenerate_pdc_system(nd->g, pump.cutoff, dimension_guard);
        modes = 3;
    } else {
        throw UnsupportedVariantError("pdc_signal_output: process is not a PDC variant");
    }
    auto all = generic_evolve(sys, FockMixture::thermal_on_mode(modes, 0, pump), ts);
    std::vector<PhotonDistribution> out;
    out.reserve(all.size());
    for (auto& per_mode : all) out.push_back(std::move(per_mode[1]));
    return out;
}

}  // namespace wcsense
