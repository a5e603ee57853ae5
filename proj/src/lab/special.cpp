#include "lab/core.hpp"

namespace lab {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    // Newton iteration on Legendre polynomials, symmetric nodes
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double p0, p1, dp = 0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        double wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
}

void gauss_legendre_ab(int n, double a, double b, std::vector<double>& x,
                       std::vector<double>& w) {
    gauss_legendre(n, x, w);
    double m = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        x[i] = c + m * x[i];
        w[i] *= m;
    }
}

double brent(const std::function<double(double)>& f, double a, double b,
             double tol, int maxit) {
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (fa * fb > 0) throw numerical_error("brent: root not bracketed");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < maxit; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {  // secant
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {  // inverse quadratic
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                                   std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

std::vector<double> ChebInterp::nodes(int n, double a, double b) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * (2.0 * i + 1.0) / (2.0 * n));  // descending
        xs[n - 1 - i] = 0.5 * (a + b) + 0.5 * (b - a) * t;
    }
    return xs;
}

void ChebInterp::init(int n, double a_, double b_) {
    a = a_;
    b = b_;
    xs = nodes(n, a, b);
    bw.assign(n, 0.0);
    // Chebyshev-Gauss barycentric weights: (-1)^i sin((2i+1)pi/(2n)),
    // recomputed for the ascending node ordering used here.
    for (int i = 0; i < n; ++i) {
        int j = n - 1 - i;  // index in the descending-cos ordering
        double s = std::sin(pi * (2.0 * j + 1.0) / (2.0 * n));
        bw[i] = ((j % 2) ? -1.0 : 1.0) * s;
    }
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = x.size();
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double d = n * sxx - sx * sx;
    if (d == 0) throw numerical_error("fit_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / d;
}

}  // namespace lab
