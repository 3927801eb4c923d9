#include "wcsense/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wcsense/errors.hpp"

namespace wcsense::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Householder reduction of the symmetric matrix held in v. On exit v holds the
// orthogonal transform, d the diagonal and e the subdiagonal (e(0) = 0,
// e(i) couples i-1 and i).
void householder_tridiagonalize(Eigen::MatrixXd& v, Eigen::VectorXd& d, Eigen::VectorXd& e) {
    const Eigen::Index n = v.rows();
    d.resize(n);
    e.setZero(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = v(n - 1, j);

    for (Eigen::Index i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (Eigen::Index k = 0; k < i; ++k) scale += std::abs(d(k));
        if (scale == 0.0) {
            e(i) = d(i - 1);
            for (Eigen::Index j = 0; j < i; ++j) {
                d(j) = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (Eigen::Index k = 0; k < i; ++k) {
                d(k) /= scale;
                h += d(k) * d(k);
            }
            double f = d(i - 1);
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e(i) = scale * g;
            h -= f * g;
            d(i - 1) = f - g;
            for (Eigen::Index j = 0; j < i; ++j) e(j) = 0.0;
            for (Eigen::Index j = 0; j < i; ++j) {
                f = d(j);
                v(j, i) = f;
                g = e(j) + v(j, j) * f;
                for (Eigen::Index k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d(k);
                    e(k) += v(k, j) * f;
                }
                e(j) = g;
            }
            f = 0.0;
            for (Eigen::Index j = 0; j < i; ++j) {
                e(j) /= h;
                f += e(j) * d(j);
            }
            const double hh = f / (h + h);
            for (Eigen::Index j = 0; j < i; ++j) e(j) -= hh * d(j);
            for (Eigen::Index j = 0; j < i; ++j) {
                f = d(j);
                g = e(j);
                for (Eigen::Index k = j; k <= i - 1; ++k) v(k, j) -= (f * e(k) + g * d(k));
                d(j) = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d(i) = h;
    }

    for (Eigen::Index i = 0; i < n - 1; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d(i + 1);
        if (h != 0.0) {
            for (Eigen::Index k = 0; k <= i; ++k) d(k) = v(k, i + 1) / h;
            for (Eigen::Index j = 0; j <= i; ++j) {
                double g = 0.0;
                for (Eigen::Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (Eigen::Index k = 0; k <= i; ++k) v(k, j) -= g * d(k);
            }
        }
        for (Eigen::Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        d(j) = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e(0) = 0.0;
}

// Implicit QL with Wilkinson-type shifts. Same (d, e) layout as above.
void implicit_ql(Eigen::VectorXd& d, Eigen::VectorXd& e, Eigen::MatrixXd& v) {
    const Eigen::Index n = d.size();
    if (n == 0) return;
    for (Eigen::Index i = 1; i < n; ++i) e(i - 1) = e(i);
    e(n - 1) = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const int max_iter = 60;
    for (Eigen::Index l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d(l)) + std::abs(e(l)));
        Eigen::Index m = l;
        while (m < n) {
            if (std::abs(e(m)) <= kEps * tst1) break;
            ++m;
        }
        if (m == n) m = n - 1;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > max_iter) throw NumericError("implicit QL did not converge");
                double g = d(l);
                double p = (d(l + 1) - g) / (2.0 * e(l));
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d(l) = e(l) / (p + r);
                d(l + 1) = e(l) * (p + r);
                const double dl1 = d(l + 1);
                double h = g - d(l);
                for (Eigen::Index i = l + 2; i < n; ++i) d(i) -= h;
                f += h;

                p = d(m);
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e(l + 1);
                double s = 0.0;
                double s2 = 0.0;
                for (Eigen::Index i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e(i);
                    h = c * p;
                    r = std::hypot(p, e(i));
                    e(i + 1) = s * r;
                    s = e(i) / r;
                    c = p / r;
                    p = c * d(i) - s * g;
                    d(i + 1) = h + s * (c * g + s * d(i));
                    double* vi = v.col(i).data();
                    double* vi1 = v.col(i + 1).data();
                    for (Eigen::Index k = 0; k < v.rows(); ++k) {
                        h = vi1[k];
                        vi1[k] = s * vi[k] + c * h;
                        vi[k] = c * vi[k] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e(l) / dl1;
                e(l) = s * p;
                d(l) = c * p;
            } while (std::abs(e(l)) > kEps * tst1);
        }
        d(l) += f;
        e(l) = 0.0;
    }
}

void sort_ascending(Eigen::VectorXd& d, Eigen::MatrixXd& v) {
    const Eigen::Index n = d.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d(a) < d(b); });
    Eigen::VectorXd ds(n);
    Eigen::MatrixXd vs(v.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ds(i) = d(order[static_cast<std::size_t>(i)]);
        vs.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    d = std::move(ds);
    v = std::move(vs);
}

}  // namespace

RealEigenSystem symmetric_eig(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw DomainError("symmetric_eig: matrix not square");
    RealEigenSystem out;
    const Eigen::Index n = a.rows();
    if (n == 0) return out;
    Eigen::MatrixXd v = a;
    Eigen::VectorXd e;
    householder_tridiagonalize(v, out.values, e);
    implicit_ql(out.values, e, v);
    sort_ascending(out.values, v);
    out.vectors = std::move(v);
    return out;
}

RealEigenSystem symmetric_tridiagonal_eig(const Eigen::VectorXd& diag, const Eigen::VectorXd& off) {
    const Eigen::Index n = diag.size();
    if (n > 0 && off.size() != n - 1) throw DomainError("symmetric_tridiagonal_eig: off-diagonal length must be n-1");
    RealEigenSystem out;
    if (n == 0) return out;
    out.values = diag;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 1; i < n; ++i) e(i) = off(i - 1);
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    implicit_ql(out.values, e, v);
    sort_ascending(out.values, v);
    out.vectors = std::move(v);
    return out;
}

ComplexEigenSystem jacobi_hermitian_eig(const Eigen::MatrixXcd& a_in, double rel_tol, int max_sweeps) {
    if (a_in.rows() != a_in.cols()) throw DomainError("jacobi_hermitian_eig: matrix not square");
    const Eigen::Index n = a_in.rows();
    Eigen::MatrixXcd a = a_in;
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
    const double norm = a.norm();
    const double target = rel_tol * norm;

    auto off_norm = [&]() {
        double s = 0.0;
        for (Eigen::Index q = 0; q < n; ++q)
            for (Eigen::Index p = 0; p < n; ++p)
                if (p != q) s += std::norm(a(p, q));
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > target) {
        if (++sweep > max_sweeps) throw NumericError("Jacobi eigensolver did not converge");
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const cplx phase = apq / mag;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sp = s * phase;             // s e^{i phi}
                const cplx sm = s * std::conj(phase);  // s e^{-i phi}

                // A <- A G with G = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p, q)
                for (Eigen::Index k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp - sm * akq;
                    a(k, q) = sp * akp + c * akq;
                }
                // A <- G^H A
                for (Eigen::Index k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = c * apk - sp * aqk;
                    a(q, k) = sm * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (Eigen::Index k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = c * vkp - sm * vkq;
                    v(k, q) = sp * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
    ComplexEigenSystem out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        out.values(i) = a(src, src).real();
        out.vectors.col(i) = v.col(src);
    }
    return out;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

void DisjointSets::unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (rank_[x] < rank_[y]) std::swap(x, y);
    parent_[y] = x;
    if (rank_[x] == rank_[y]) ++rank_[x];
}

std::vector<std::vector<int>> DisjointSets::groups() {
    const std::size_t n = parent_.size();
    std::vector<int> slot(n, -1);
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(slot[r])].push_back(static_cast<int>(i));
    }
    return out;
}

namespace {
template <typename M>
std::vector<std::vector<int>> components_of(const M& a) {
    const auto n = static_cast<std::size_t>(a.rows());
    DisjointSets sets(n);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = j + 1; i < a.rows(); ++i)
            if (a(i, j) != typename M::Scalar(0) || a(j, i) != typename M::Scalar(0))
                sets.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return sets.groups();
}
}  // namespace

std::vector<std::vector<int>> coupled_components(const Eigen::MatrixXcd& a) { return components_of(a); }
std::vector<std::vector<int>> coupled_components(const Eigen::MatrixXd& a) { return components_of(a); }

bool is_tridiagonal(const Eigen::MatrixXd& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (std::abs(i - j) > 1 && a(i, j) != 0.0) return false;
    return true;
}

}  // namespace wcsense::linalg
