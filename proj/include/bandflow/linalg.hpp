#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "bandflow/half_integer.hpp"

namespace bandflow::linalg {

using Complex = std::complex<double>;

/// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Complex> data() const { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix conjugate() const;

    /// Column j as a vector.
    std::vector<Complex> column(std::size_t j) const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(Complex s);

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
std::vector<Complex> operator*(const ComplexMatrix& a, std::span<const Complex> x);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

double frobenius_norm(const ComplexMatrix& a);
double max_abs_entry(const ComplexMatrix& a);

Complex inner(std::span<const Complex> a, std::span<const Complex> b); // <a|b>, conjugates a
double norm(std::span<const Complex> a);

/// Complex matrix whose Hermiticity (|a_ij - conj(a_ji)| <= 1e-12) was
/// checked at construction. The stored entries are symmetrized exactly.
class HermitianMatrix {
public:
    static constexpr double kHermiticityTol = 1e-12;

    HermitianMatrix() = default;
    explicit HermitianMatrix(ComplexMatrix m);

    static HermitianMatrix zero(std::size_t n);

    std::size_t dim() const { return m_.rows(); }
    const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const ComplexMatrix& matrix() const { return m_; }

private:
    ComplexMatrix m_;
};

/// Spin matrices in the |j, m> basis ordered m = j, j-1, ..., -j.
struct SpinOperators {
    HalfInt j;
    HermitianMatrix sx;
    HermitianMatrix sy;
    HermitianMatrix sz;
    ComplexMatrix splus;
    ComplexMatrix sminus;

    std::size_t dim() const { return sz.dim(); }
};

SpinOperators spin_operators(HalfInt j);
SpinOperators spin_operators(double j);

/// sqrt(j(j+1) - m(m+1)): matrix element <m+1| J_+ |m>.
double ladder_coefficient(HalfInt j, HalfInt m);

struct EigenDecomposition {
    std::vector<double> values; // ascending
    ComplexMatrix vectors;      // column k belongs to values[k]

    std::size_t dim() const { return values.size(); }
};

struct EighOptions {
    int max_sweeps = 100;
    /// Stop when the off-diagonal Frobenius norm <= rel_tol * ||H||_F.
    double rel_tol = 1e-13;
};

/// Cyclic complex Jacobi eigensolver. Row-major sweep order, so identical
/// input produces identical output on a given platform.
EigenDecomposition eigh(const HermitianMatrix& h, const EighOptions& options = {});

/// Eigenvalues only, same algorithm.
std::vector<double> eigvalsh(const HermitianMatrix& h, const EighOptions& options = {});

} // namespace bandflow::linalg
