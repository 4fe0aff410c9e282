#pragma once

#include "wf/rat.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace wf {

// Gaussian rational re + i*im
struct GRat {
    Rat re, im;

    GRat() = default;
    GRat(long n) : re(n) {}
    GRat(const Rat& r) : re(r) {}
    GRat(const Rat& r, const Rat& i) : re(r), im(i) {}

    static GRat i_pow(int p) {
        switch (((p % 4) + 4) % 4) {
            case 0: return GRat(1);
            case 1: return GRat(0, 1);
            case 2: return GRat(-1);
            default: return GRat(0, -1);
        }
    }

    GRat& operator+=(const GRat& o) { re += o.re; im += o.im; return *this; }
    GRat& operator-=(const GRat& o) { re -= o.re; im -= o.im; return *this; }
    GRat& operator*=(const GRat& o) { return *this = *this * o; }
    friend GRat operator+(GRat a, const GRat& b) { return a += b; }
    friend GRat operator-(GRat a, const GRat& b) { return a -= b; }
    friend GRat operator-(const GRat& a) { return GRat(-a.re, -a.im); }
    friend GRat operator*(const GRat& a, const GRat& b) {
        return GRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend GRat operator*(const GRat& a, const Rat& s) { return GRat(a.re * s, a.im * s); }
    friend GRat operator*(const Rat& s, const GRat& a) { return a * s; }
    friend GRat operator/(const GRat& a, const GRat& b) { return a * inverse(b); }
    friend bool operator==(const GRat& a, const GRat& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GRat& a, const GRat& b) { return !(a == b); }

    friend GRat conj(const GRat& a) { return GRat(a.re, -a.im); }
    friend GRat inverse(const GRat& a) {
        Rat n = a.re * a.re + a.im * a.im;
        if (wf::is_zero(n)) throw DomainError("inverse of zero Gaussian rational");
        return GRat(a.re / n, -a.im / n);
    }
    GRat parity_flip() const { return *this; }
    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

inline bool is_zero(const GRat& a) { return wf::is_zero(a.re) && wf::is_zero(a.im); }
inline Rat conj(const Rat& a) { return a; }

inline std::string to_string(const GRat& a) {
    if (wf::is_zero(a.im)) return to_string(a.re);
    std::string ims = (a.im == 1) ? "i" : (a.im == -1) ? "-i" : to_string(a.im) + "i";
    if (wf::is_zero(a.re)) return ims;
    return to_string(a.re) + (sgn(a.im) > 0 ? " + " : " - ") +
           ((abs(a.im) == 1) ? std::string("i") : to_string(Rat(abs(a.im))) + "i");
}

// Dense matrix over an exact field (Rat or GRat).
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(size_t r, size_t c) : r_(r), c_(c), a_(r * c, T(0)) {}

    static Mat identity(size_t n) {
        Mat m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    T& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
    const T& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }

    friend Mat operator+(const Mat& a, const Mat& b) {
        check_same(a, b);
        Mat r = a;
        for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] += b.a_[k];
        return r;
    }
    friend Mat operator-(const Mat& a, const Mat& b) {
        check_same(a, b);
        Mat r = a;
        for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= b.a_[k];
        return r;
    }
    friend Mat operator-(const Mat& a) {
        Mat r = a;
        for (auto& x : r.a_) x = -x;
        return r;
    }
    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.c_ != b.r_) throw DomainError("matrix product: shape mismatch");
        Mat r(a.r_, b.c_);
        for (size_t i = 0; i < a.r_; ++i)
            for (size_t k = 0; k < a.c_; ++k) {
                const T& x = a(i, k);
                if (is_zero(x)) continue;
                for (size_t j = 0; j < b.c_; ++j)
                    if (!is_zero(b(k, j))) r(i, j) += x * b(k, j);
            }
        return r;
    }
    friend Mat operator*(const Mat& a, const T& s) {
        Mat r = a;
        for (auto& x : r.a_) x = x * s;
        return r;
    }
    friend Mat operator*(const T& s, const Mat& a) { return a * s; }
    friend bool operator==(const Mat& a, const Mat& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_; }
    friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }

    bool is_zero_matrix() const {
        for (auto& x : a_)
            if (!is_zero(x)) return false;
        return true;
    }

    Mat transpose() const {
        Mat r(c_, r_);
        for (size_t i = 0; i < r_; ++i)
            for (size_t j = 0; j < c_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    Mat adjoint() const {
        Mat r(c_, r_);
        for (size_t i = 0; i < r_; ++i)
            for (size_t j = 0; j < c_; ++j) r(j, i) = conj((*this)(i, j));
        return r;
    }
    T trace() const {
        T t(0);
        for (size_t i = 0; i < std::min(r_, c_); ++i) t += (*this)(i, i);
        return t;
    }

private:
    static void check_same(const Mat& a, const Mat& b) {
        if (a.r_ != b.r_ || a.c_ != b.c_) throw DomainError("matrix sum: shape mismatch");
    }
    size_t r_ = 0, c_ = 0;
    std::vector<T> a_;
};

// Reduced row echelon form; returns pivot columns.
template <class T>
std::vector<size_t> rref(Mat<T>& m) {
    std::vector<size_t> piv;
    size_t row = 0;
    for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        size_t p = row;
        while (p < m.rows() && is_zero(m(p, col))) ++p;
        if (p == m.rows()) continue;
        for (size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
        T inv = inverse(m(row, col));
        for (size_t j = 0; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == row || is_zero(m(i, col))) continue;
            T f = m(i, col);
            for (size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
        }
        piv.push_back(col);
        ++row;
    }
    return piv;
}

// Columns form a basis of the null space.
template <class T>
Mat<T> kernel_basis(const Mat<T>& a) {
    Mat<T> m = a;
    auto piv = rref(m);
    std::vector<bool> is_piv(a.cols(), false);
    for (auto p : piv) is_piv[p] = true;
    std::vector<size_t> free;
    for (size_t j = 0; j < a.cols(); ++j)
        if (!is_piv[j]) free.push_back(j);
    Mat<T> k(a.cols(), free.size());
    for (size_t f = 0; f < free.size(); ++f) {
        k(free[f], f) = T(1);
        for (size_t r = 0; r < piv.size(); ++r) k(piv[r], f) = -m(r, free[f]);
    }
    return k;
}

template <class T>
Mat<T> inverse(const Mat<T>& a) {
    if (a.rows() != a.cols()) throw DomainError("inverse of non-square matrix");
    size_t n = a.rows();
    Mat<T> aug(n, 2 * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = T(1);
    }
    auto piv = rref(aug);
    if (piv.size() < n || piv[n - 1] != n - 1) throw DomainError("matrix is singular");
    Mat<T> r(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) r(i, j) = aug(i, n + j);
    return r;
}

// Orthogonal projector onto the column span of K (K of full column rank).
template <class T>
Mat<T> orthogonal_projector(const Mat<T>& K) {
    if (K.cols() == 0) return Mat<T>(K.rows(), K.rows());
    Mat<T> Ka = K.adjoint();
    return K * inverse(Ka * K) * Ka;
}

// Best rational approximation with denominator <= max_den (continued fractions).
inline Rat rationalize(double x, long max_den = 1000000) {
    long sign = x < 0 ? -1 : 1;
    x = std::fabs(x);
    Int h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(v);
        Int ai(static_cast<long>(a));
        Int h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        double frac = v - a;
        if (frac < 1e-12) break;
        v = 1.0 / frac;
    }
    return rat(Int(sign) * h1, k1);
}

template <class T>
Eigen::MatrixXcd to_eigen(const Mat<T>& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) {
            if constexpr (std::is_same_v<T, GRat>) e(i, j) = m(i, j).to_complex();
            else e(i, j) = std::complex<double>(m(i, j).get_d(), 0.0);
        }
    return e;
}

// Spectral decomposition S = sum_mu mu * P_mu with rational mu, verified exactly:
// the projectors sum to the identity and prod_mu (S - mu) = 0. Eigenvalues are
// located numerically and then rationalized; anything unverifiable throws.
template <class T>
std::map<Rat, Mat<T>> rational_spectral_decomposition(const Mat<T>& S) {
    size_t n = S.rows();
    if (n != S.cols()) throw DomainError("spectral decomposition of non-square matrix");
    std::map<Rat, Mat<T>> out;
    if (n == 0) return out;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(S), false);
    if (es.info() != Eigen::Success) throw DomainError("eigenvalue solver failed");
    std::vector<Rat> mus;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        auto z = es.eigenvalues()(i);
        if (std::fabs(z.imag()) > 1e-6 * (1 + std::abs(z)))
            throw DomainError("matrix has non-real eigenvalue; not rationally diagonalizable");
        Rat mu = rationalize(z.real());
        if (std::find(mus.begin(), mus.end(), mu) == mus.end()) mus.push_back(mu);
    }
    std::sort(mus.begin(), mus.end());
    Mat<T> I = Mat<T>::identity(n);
    Mat<T> prod = I;
    for (auto& mu : mus) prod = prod * (S - I * T(mu));
    if (!prod.is_zero_matrix()) throw DomainError("matrix is not diagonalizable with rational spectrum");
    Mat<T> total(n, n);
    for (auto& mu : mus) {
        Mat<T> P = I;
        for (auto& nu : mus)
            if (nu != mu) P = P * (S - I * T(nu)) * T(inverse(mu - nu));
        if (P.is_zero_matrix()) continue;
        total = total + P;
        out.emplace(mu, P);
    }
    if (total != I) throw DomainError("spectral projectors do not sum to the identity");
    return out;
}

template <class T>
Mat<T> kronecker(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> r(a.rows() * b.rows(), a.cols() * b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) {
            if (is_zero(a(i, j))) continue;
            for (size_t k = 0; k < b.rows(); ++k)
                for (size_t l = 0; l < b.cols(); ++l) r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return r;
}

inline Mat<GRat> to_grat(const Mat<Rat>& m) {
    Mat<GRat> r(m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) r(i, j) = GRat(m(i, j));
    return r;
}

}  // namespace wf
