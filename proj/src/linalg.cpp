#include "bandflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bandflow/errors.hpp"

namespace bandflow::linalg {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0})
{
}

ComplexMatrix ComplexMatrix::identity(std::size_t n)
{
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values)
{
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const
{
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::conjugate() const
{
    ComplexMatrix out = *this;
    for (auto& z : out.data_) {
        z = std::conj(z);
    }
    return out;
}

std::vector<Complex> ComplexMatrix::column(std::size_t j) const
{
    std::vector<Complex> col(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        col[i] = (*this)(i, j);
    }
    return col;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o)
{
    if (rows_ != o.rows_ || cols_ != o.cols_) {
        throw Error("matrix shape mismatch in +=");
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += o.data_[k];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o)
{
    if (rows_ != o.rows_ || cols_ != o.cols_) {
        throw Error("matrix shape mismatch in -=");
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= o.data_[k];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s)
{
    for (auto& z : data_) {
        z *= s;
    }
    return *this;
}

bool ComplexMatrix::all_finite() const
{
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.cols() != b.rows()) {
        throw Error("matrix shape mismatch in product");
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

std::vector<Complex> operator*(const ComplexMatrix& a, std::span<const Complex> x)
{
    if (a.cols() != x.size()) {
        throw Error("matrix-vector shape mismatch");
    }
    std::vector<Complex> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < a.cols(); ++j) {
            acc += a(i, j) * x[j];
        }
        y[i] = acc;
    }
    return y;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return a * b - b * a;
}

double frobenius_norm(const ComplexMatrix& a)
{
    double acc = 0.0;
    for (const auto& z : a.data()) {
        acc += std::norm(z);
    }
    return std::sqrt(acc);
}

double max_abs_entry(const ComplexMatrix& a)
{
    double m = 0.0;
    for (const auto& z : a.data()) {
        m = std::max(m, std::abs(z));
    }
    return m;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b)
{
    Complex acc{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

double norm(std::span<const Complex> a)
{
    double acc = 0.0;
    for (const auto& z : a) {
        acc += std::norm(z);
    }
    return std::sqrt(acc);
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : m_(std::move(m))
{
    if (m_.rows() != m_.cols()) {
        throw Error("Hermitian matrix must be square");
    }
    if (!m_.all_finite()) {
        throw Error("Hermitian matrix has non-finite entries");
    }
    const std::size_t n = m_.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const Complex upper = m_(i, j);
            const Complex lower = std::conj(m_(j, i));
            if (std::abs(upper - lower) > kHermiticityTol) {
                std::ostringstream msg;
                msg << "matrix is not Hermitian at (" << i << ", " << j << "): " << upper << " vs "
                    << lower;
                throw Error(msg.str());
            }
            const Complex avg = 0.5 * (upper + lower);
            m_(i, j) = avg;
            m_(j, i) = std::conj(avg);
        }
        m_(i, i) = m_(i, i).real();
    }
}

HermitianMatrix HermitianMatrix::zero(std::size_t n) { return HermitianMatrix(ComplexMatrix(n, n)); }

double ladder_coefficient(HalfInt j, HalfInt m)
{
    const double jj = j.value();
    const double mm = m.value();
    const double v = jj * (jj + 1.0) - mm * (mm + 1.0);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

SpinOperators spin_operators(HalfInt j)
{
    if (j.twice() < 0) {
        throw ConfigError("spin must be non-negative, got " + j.str());
    }
    const auto n = static_cast<std::size_t>(j.twice() + 1);
    ComplexMatrix splus(n, n);
    std::vector<double> mz(n);
    for (std::size_t i = 0; i < n; ++i) {
        const HalfInt m = HalfInt::from_twice(j.twice() - 2 * static_cast<int>(i));
        mz[i] = m.value();
        if (i > 0) {
            // S+ |m> lands on |m+1>, which sits one row above.
            splus(i - 1, i) = ladder_coefficient(j, m);
        }
    }
    ComplexMatrix sminus = splus.adjoint();
    const Complex half{0.5, 0.0};
    const Complex minus_half_i{0.0, -0.5};
    ComplexMatrix sx = (splus + sminus) * half;
    ComplexMatrix sy = (splus - sminus) * minus_half_i;
    return SpinOperators{j,
                         HermitianMatrix(std::move(sx)),
                         HermitianMatrix(std::move(sy)),
                         HermitianMatrix(ComplexMatrix::diagonal(mz)),
                         std::move(splus),
                         std::move(sminus)};
}

SpinOperators spin_operators(double j)
{
    if (!(j >= 0.0)) {
        throw ConfigError("spin must be non-negative");
    }
    return spin_operators(HalfInt::from_double(j));
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) {
                acc += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(acc);
}

struct JacobiResult {
    ComplexMatrix diag;
    ComplexMatrix vectors;
};

JacobiResult jacobi(const HermitianMatrix& h, const EighOptions& options, bool want_vectors)
{
    const std::size_t n = h.dim();
    ComplexMatrix a = h.matrix();
    ComplexMatrix v = want_vectors ? ComplexMatrix::identity(n) : ComplexMatrix{};
    const double scale = frobenius_norm(a);
    const double target = options.rel_tol * scale;

    int sweep = 0;
    for (;; ++sweep) {
        const double off = off_diagonal_norm(a);
        if (off <= target || off == 0.0) {
            break;
        }
        if (sweep >= options.max_sweeps) {
            std::ostringstream msg;
            msg << "Jacobi eigensolver did not converge: dim=" << n << " sweeps=" << sweep
                << " off-diagonal norm=" << off << " target=" << target;
            throw ConvergenceError(msg.str());
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) {
                    continue;
                }
                const Complex phase_conj = std::conj(apq) / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) {
                    t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on (p, q).
                const Complex gpp = c;
                const Complex gpq = s;
                const Complex gqp = -s * phase_conj;
                const Complex gqq = c * phase_conj;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                if (want_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const Complex vkp = v(k, p);
                        const Complex vkq = v(k, q);
                        v(k, p) = vkp * gpp + vkq * gqp;
                        v(k, q) = vkp * gpq + vkq * gqq;
                    }
                }
            }
        }
    }
    return JacobiResult{std::move(a), std::move(v)};
}

std::vector<std::size_t> ascending_order(const ComplexMatrix& diag)
{
    std::vector<std::size_t> order(diag.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return diag(x, x).real() < diag(y, y).real();
    });
    return order;
}

} // namespace

EigenDecomposition eigh(const HermitianMatrix& h, const EighOptions& options)
{
    const std::size_t n = h.dim();
    JacobiResult r = jacobi(h, options, true);
    const auto order = ascending_order(r.diag);
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.values[k] = r.diag(src, src).real();
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = r.vectors(i, src);
        }
    }
    return out;
}

std::vector<double> eigvalsh(const HermitianMatrix& h, const EighOptions& options)
{
    JacobiResult r = jacobi(h, options, false);
    std::vector<double> values(h.dim());
    for (std::size_t k = 0; k < h.dim(); ++k) {
        values[k] = r.diag(k, k).real();
    }
    std::sort(values.begin(), values.end());
    return values;
}

} // namespace bandflow::linalg
