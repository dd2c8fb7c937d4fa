#include "lqriter/matlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lqriter/kernels.hpp"
#include "lqriter/tolerances.hpp"

namespace lqriter::matlin {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    // column (ja·bc + jb) of the result is made of a's column ja scaling
    // contiguous copies of b's column jb
    for (int ja = 0; ja < a.cols(); ++ja)
        for (int jb = 0; jb < b.cols(); ++jb) {
            double* dst = out.col(ja * b.cols() + jb);
            for (int ia = 0; ia < a.rows(); ++ia)
                kernels::scale(a(ia, ja), b.col(jb), dst + ia * b.rows(),
                               static_cast<std::size_t>(b.rows()));
        }
    return out;
}

Mat vec(const Mat& m) {
    // storage is column-major, so vec is exactly the stored data
    return Mat(m.rows() * m.cols(), 1,
               std::vector<double>(m.data(), m.data() + m.size()));
}

Mat unvec(const Mat& v, int rows, int cols) {
    if (v.cols() != 1 || v.rows() != rows * cols)
        throw DimensionError("unvec: vector length does not match target shape");
    return Mat(rows, cols, std::vector<double>(v.data(), v.data() + v.size()));
}

double frob_norm(const Mat& m) {
    return std::sqrt(kernels::sum_sq(m.data(), m.size()));
}

double frob_norm(const SymMat& m) { return frob_norm(m.mat()); }

EigResult sym_eig(const SymMat& input) {
    const int n = input.dim();
    Mat a = input.mat();
    Mat v = Mat::identity(n);
    const double thresh = tols().jacobi_off_rel * frob_norm(input);

    auto max_off = [&]() {
        double m = 0.0;
        for (int q = 1; q < n; ++q)
            for (int p = 0; p < q; ++p) m = std::max(m, std::fabs(a(p, q)));
        return m;
    };

    int sweep = 0;
    while (max_off() > thresh) {
        if (++sweep > tols().jacobi_max_sweeps)
            throw ConvergenceError("Jacobi eigensolver did not converge in " +
                                   std::to_string(tols().jacobi_max_sweeps) +
                                   " sweeps");
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= thresh) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = a(p, i) = c * aip - s * aiq;
                    a(i, q) = a(q, i) = s * aip + c * aiq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i) < a(j, j); });

    EigResult res;
    res.eigenvalues.resize(n);
    res.eigenvectors = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        res.eigenvalues[j] = a(order[j], order[j]);
        for (int i = 0; i < n; ++i) res.eigenvectors(i, j) = v(i, order[j]);
    }
    return res;
}

double min_eig(const SymMat& m) { return sym_eig(m).eigenvalues.front(); }
double max_eig(const SymMat& m) { return sym_eig(m).eigenvalues.back(); }

Mat solve_linear(const Mat& a, const Mat& b) {
    if (!a.is_square()) throw DimensionError("solve_linear: matrix not square");
    if (a.rows() != b.rows())
        throw DimensionError("solve_linear: right-hand side rows mismatch");
    const int n = a.rows();
    const int nb = b.cols();
    const double pivot_floor = tols().pivot_rel * frob_norm(a);

    Mat u = a;
    Mat x = b;

    for (int k = 0; k < n; ++k) {
        // partial pivot: largest entry in column k at or below the diagonal
        int piv = k;
        double best = std::fabs(u(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(u(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (!(best > pivot_floor))
            throw SingularError("singular matrix: pivot " + std::to_string(best) +
                                " at column " + std::to_string(k));
        if (piv != k) {
            for (int j = k; j < n; ++j) std::swap(u(k, j), u(piv, j));
            for (int j = 0; j < nb; ++j) std::swap(x(k, j), x(piv, j));
        }
        // multipliers live below the diagonal of column k (contiguous)
        const double inv_piv = 1.0 / u(k, k);
        double* ck = u.col(k);
        for (int i = k + 1; i < n; ++i) ck[i] *= inv_piv;
        const std::size_t len = static_cast<std::size_t>(n - k - 1);
        if (len > 0) {
            for (int j = k + 1; j < n; ++j)
                kernels::axpy(-u(k, j), ck + k + 1, u.col(j) + k + 1, len);
            for (int j = 0; j < nb; ++j)
                kernels::axpy(-x(k, j), ck + k + 1, x.col(j) + k + 1, len);
        }
    }

    // back substitution, column oriented so updates stay contiguous
    for (int j = 0; j < nb; ++j) {
        double* cj = x.col(j);
        for (int i = n - 1; i >= 0; --i) {
            cj[i] /= u(i, i);
            if (i > 0)
                kernels::axpy(-cj[i], u.col(i), cj, static_cast<std::size_t>(i));
        }
    }
    return x;
}

Mat pmat(const Mat& x) {
    if (!x.is_square()) throw DimensionError("pmat: matrix not square");
    const Mat xt = transpose(x);
    Mat p = kron(xt, xt);
    const int n2 = p.rows();
    for (int i = 0; i < n2; ++i) p(i, i) -= 1.0;
    return p;
}

SymMat dlyap(const Mat& x, const SymMat& w) {
    if (!x.is_square()) throw DimensionError("dlyap: matrix not square");
    if (w.dim() != x.rows()) throw DimensionError("dlyap: dimension mismatch");
    Mat rhs = -1.0 * vec(w.mat());
    Mat y;
    try {
        y = solve_linear(pmat(x), rhs);
    } catch (const SingularError&) {
        throw SingularError(
            "discrete Lyapunov equation has no unique solution "
            "(X has a reciprocal eigenvalue pair, e.g. on the unit circle)");
    }
    return SymMat::from_average(unvec(y, x.rows(), x.rows()));
}

SpectralRadiusEstimate spectral_radius_estimate(const Mat& m, int k) {
    if (!m.is_square())
        throw DimensionError("spectral_radius_estimate: matrix not square");
    if (k < 8)
        throw InvalidArgumentError("spectral_radius_estimate: k must be >= 8");

    constexpr double inf = std::numeric_limits<double>::infinity();

    // track M^p as B·e^L with ‖B‖_F = 1 so powering cannot overflow
    struct Scaled {
        Mat b;
        double log = 0.0;
        bool zero = false;
        bool overflow = false;
    };
    auto normalize = [](Mat b) {
        Scaled s{Mat(1, 1), 0.0, false, false};
        const double nrm = frob_norm(b);
        if (nrm == 0.0) {
            s.zero = true;
            return s;
        }
        if (!std::isfinite(nrm)) {
            s.overflow = true;
            return s;
        }
        s.b = (1.0 / nrm) * b;
        s.log = std::log(nrm);
        return s;
    };
    auto mul = [&](const Scaled& x, const Scaled& y) {
        Scaled s = normalize(x.b * y.b);
        s.log += x.log + y.log;
        return s;
    };

    Scaled base = normalize(m);
    if (base.zero) return {0.0, false, k};
    if (base.overflow) return {inf, true, k};

    // M^k by binary powering
    Scaled acc;
    bool acc_set = false;
    Scaled sq = base;
    for (int bits = k; bits > 0; bits >>= 1) {
        if (bits & 1) {
            acc = acc_set ? mul(acc, sq) : sq;
            acc_set = true;
            if (acc.zero) return {0.0, false, k};
            if (acc.overflow) return {inf, true, k};
        }
        if (bits > 1) {
            sq = mul(sq, sq);
            if (sq.zero && !acc_set) return {0.0, false, k};
            if (sq.overflow) return {inf, true, k};
            if (sq.zero) return {0.0, false, k};
        }
    }

    double estimate = std::exp(acc.log / k);
    int power = k;
    while (power < tols().gelfand_max_power) {
        Scaled next = mul(acc, acc);
        power *= 2;
        if (next.zero) return {0.0, false, power};
        if (next.overflow) return {inf, true, power};
        acc = next;
        const double refined = std::exp(acc.log / power);
        const bool settled = std::fabs(refined - estimate) < tols().gelfand_tol;
        estimate = refined;
        if (settled) break;
    }
    return {estimate, false, power};
}

StabilityCheck schur_stability(const Mat& m) {
    if (!m.is_square()) throw DimensionError("schur_stability: matrix not square");
    SymMat y;
    try {
        y = dlyap(m, SymMat::identity(m.rows()));
    } catch (const SingularError&) {
        return {false, true};
    }
    return {min_eig(y) > tols().pd_min_eig, false};
}

bool is_schur_stable(const Mat& m) { return schur_stability(m).stable; }

double peps_norm(const Mat& m, const SymMat& peps) {
    if (peps.dim() != m.rows())
        throw DimensionError("peps_norm: weight dimension mismatch");
    const EigResult eig = sym_eig(peps);
    if (eig.eigenvalues.front() <= tols().peps_min_eig)
        throw InvalidArgumentError("peps_norm: weight is not positive definite");
    if (eig.eigenvalues.back() > 1.0 + tols().peps_max_eig_slack)
        throw InvalidArgumentError("peps_norm: weight exceeds the identity");
    const SymMat s = SymMat::from_average(transpose(m) * (peps.mat() * m));
    return std::sqrt(std::max(0.0, max_eig(s)));
}

double spectral_norm(const Mat& m) {
    const SymMat s = SymMat::from_average(transpose(m) * m);
    return std::sqrt(std::max(0.0, max_eig(s)));
}

} // namespace lqriter::matlin
