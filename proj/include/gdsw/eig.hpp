#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace gdsw {

/// Eigenvalues of a symmetric tridiagonal matrix by the QL algorithm with
/// implicit shifts; `diag` and `off` are the diagonal and subdiagonal
/// (off[i] couples rows i and i+1). Returns ascending eigenvalues.
inline std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag,
                                                   std::vector<double> off) {
    const int n = static_cast<int>(diag.size());
    if (n == 0) return {};
    off.resize(static_cast<std::size_t>(n), 0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(off[m]) <= 2.3e-16 * dd + 1e-300) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw std::runtime_error("tridiagonal_eigenvalues: no convergence");
                double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
                double r = std::hypot(g, 1.0);
                g = diag[m] - diag[l] +
                    off[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * off[i];
                    double b = c * off[i];
                    r = std::hypot(f, g);
                    off[i + 1] = r;
                    if (r == 0.0) {
                        diag[i + 1] -= p;
                        off[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[i + 1] - p;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                diag[l] -= p;
                off[l] = g;
                off[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(diag.begin(), diag.end());
    return diag;
}

/// Eigenvalues of a real upper Hessenberg matrix (row-major, n x n) by the
/// Francis double-shift QR iteration; complex pairs come out conjugate.
inline std::vector<std::complex<double>> hessenberg_eigenvalues(
    std::vector<double> a, int n) {
    if (n == 0) return {};
    auto A = [&a, n](int i, int j) -> double& { return a[i * n + j]; };
    auto sign = [](double v, double s) { return s >= 0.0 ? std::abs(v) : -std::abs(v); };
    std::vector<double> wr(static_cast<std::size_t>(n), 0.0);
    std::vector<double> wi(static_cast<std::size_t>(n), 0.0);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(A(l, l - 1)) + s == s) {
                    A(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 1) l = 0;
            double x = A(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                --nn;
            } else {
                double y = A(nn - 1, nn - 1);
                double w = A(nn, nn - 1) * A(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn] = z;
                        wi[nn - 1] = -z;
                    }
                    nn -= 2;
                } else {
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) A(i, i) -= x;
                        double s = std::abs(A(nn, nn - 1)) +
                                   std::abs(A(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    if (its == 30)
                        throw std::runtime_error(
                            "hessenberg_eigenvalues: no convergence");
                    ++its;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        z = A(m, m);
                        double rt = x - z;
                        double st = y - z;
                        p = (rt * st - w) / A(m + 1, m) + A(m, m + 1);
                        q = A(m + 1, m + 1) - z - rt - st;
                        r = A(m + 2, m + 1);
                        double s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) * (std::abs(A(m - 1, m - 1)) +
                                                  std::abs(z) +
                                                  std::abs(A(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        A(i, i - 2) = 0.0;
                        if (i != m + 2) A(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = A(k, k - 1);
                            q = A(k + 1, k - 1);
                            r = (k != nn - 1) ? A(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = sign(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) A(k, k - 1) = -A(k, k - 1);
                            } else {
                                A(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                double pp = A(k, j) + q * A(k + 1, j);
                                if (k != nn - 1) {
                                    pp += r * A(k + 2, j);
                                    A(k + 2, j) -= pp * z;
                                }
                                A(k + 1, j) -= pp * y;
                                A(k, j) -= pp * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                double pp = x * A(i, k) + y * A(i, k + 1);
                                if (k != nn - 1) {
                                    pp += z * A(i, k + 2);
                                    A(i, k + 2) -= pp * r;
                                }
                                A(i, k + 1) -= pp * q;
                                A(i, k) -= pp;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    std::vector<std::complex<double>> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[i] = {wr[i], wi[i]};
    std::sort(eig.begin(), eig.end(), [](const auto& u, const auto& v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    return eig;
}

} // namespace gdsw
