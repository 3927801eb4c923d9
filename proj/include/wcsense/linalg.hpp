#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace wcsense {

using cplx = std::complex<double>;

namespace linalg {

struct RealEigenSystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns
};

struct ComplexEigenSystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors;
};

// Householder tridiagonalization followed by implicit QL.
RealEigenSystem symmetric_eig(const Eigen::MatrixXd& a);

// Implicit QL on a symmetric tridiagonal matrix. off(i) couples i and i+1.
RealEigenSystem symmetric_tridiagonal_eig(const Eigen::VectorXd& diag, const Eigen::VectorXd& off);

// Cyclic Jacobi with complex rotations. Sweeps until the off-diagonal
// Frobenius norm drops below rel_tol * ||A||_F.
ComplexEigenSystem jacobi_hermitian_eig(const Eigen::MatrixXcd& a, double rel_tol = 1e-14,
                                        int max_sweeps = 100);

// Index sets of the connected components of the coupling graph
// (i ~ j when a(i,j) != 0). Components ordered by their smallest index.
std::vector<std::vector<int>> coupled_components(const Eigen::MatrixXcd& a);
std::vector<std::vector<int>> coupled_components(const Eigen::MatrixXd& a);

bool is_tridiagonal(const Eigen::MatrixXd& a);

// Union-find over n elements.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n);
    std::size_t find(std::size_t x);
    void unite(std::size_t x, std::size_t y);
    // Groups in ascending order of smallest member.
    std::vector<std::vector<int>> groups();

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

}  // namespace linalg
}  // namespace wcsense
