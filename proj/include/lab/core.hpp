#pragma once
// Core numerics toolbox: grids, quadrature, root finding, interpolation,
// an adaptive Runge-Kutta integrator and deterministic random sampling.
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

using cplx = std::complex<double>;
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx iu{0.0, 1.0};

inline double sq(double x) { return x * x; }
inline cplx sq(cplx x) { return x * x; }
inline double cube(double x) { return x * x * x; }

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Uniform grid on [a, b] with n+1 nodes (closed endpoints).
struct Grid {
    double a = 0.0, b = 1.0;
    int n = 1;  // number of cells; n+1 nodes
    double h() const { return (b - a) / n; }
    double x(int i) const { return a + i * h(); }
    int size() const { return n + 1; }
    std::vector<double> nodes() const {
        std::vector<double> v(n + 1);
        for (int i = 0; i <= n; ++i) v[i] = x(i);
        return v;
    }
};

// Trapezoid rule over sampled values on a uniform grid.
template <class T>
T trapezoid(const std::vector<T>& f, double h) {
    T s = T(0);
    for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    if (f.size() >= 2) s += 0.5 * (f.front() + f.back());
    return s * h;
}

// Gauss-Legendre nodes/weights on [-1,1]; mapped helper for [a,b].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);
void gauss_legendre_ab(int n, double a, double b, std::vector<double>& x,
                       std::vector<double>& w);

// ---------------------------------------------------------------------------
// Root finding.
// Brent's method on [a,b] with f(a)*f(b) <= 0.
double brent(const std::function<double(double)>& f, double a, double b,
             double tol = 1e-13, int maxit = 200);

// ---------------------------------------------------------------------------
// Chebyshev interpolation on (a,b), Gauss nodes (no endpoints), barycentric.
struct ChebInterp {
    double a = -1.0, b = 1.0;
    std::vector<double> xs;        // nodes (ascending)
    std::vector<double> bw;        // barycentric weights
    std::vector<double> ys;        // real samples (optional)
    std::vector<cplx> yc;          // complex samples (optional)

    static std::vector<double> nodes(int n, double a, double b);
    void init(int n, double a_, double b_);

    template <class T>
    T eval(const std::vector<T>& vals, double x) const {
        // near-node hit guard + barycentric formula
        T num = T(0);
        double den = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            double dx = x - xs[i];
            if (std::abs(dx) < 1e-14 * (std::abs(b - a))) return vals[i];
            double q = bw[i] / dx;
            num += q * vals[i];
            den += q;
        }
        return num * (1.0 / den);
    }
    double operator()(double x) const { return eval(ys, x); }
};

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) integrator for dy/dx = f(x,y).
// State: any type with +, scalar *, and an inf-norm via state_norm().
inline double state_norm(double v) { return std::abs(v); }
template <class S, size_t N>
double state_norm(const std::array<S, N>& v) {
    double m = 0;
    for (auto& e : v) m = std::max(m, std::abs(e));
    return m;
}

template <class State>
struct RK45 {
    double rtol = 1e-10, atol = 1e-12;
    double hmin = 1e-12, hmax = 1.0;
    int max_steps = 2000000;

    // advance y from x0 to x1 (x1 > x0 or < x0)
    template <class F>
    void integrate(F&& f, double x0, double x1, State& y) const {
        static constexpr double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5,
                                c5 = 8. / 9;
        double dir = (x1 >= x0) ? 1.0 : -1.0;
        double span = std::abs(x1 - x0);
        if (span == 0) return;
        double h = std::min(hmax, span / 10);
        double x = x0;
        State k1 = f(x, y);
        int steps = 0;
        while (dir * (x1 - x) > 0) {
            if (++steps > max_steps)
                throw numerical_error("RK45: step limit exceeded");
            h = std::min(h, std::abs(x1 - x));
            double hd = dir * h;
            State k2 = f(x + c2 * hd, y + (hd * (1. / 5)) * k1);
            State k3 = f(x + c3 * hd, y + (hd * (3. / 40)) * k1 +
                                          (hd * (9. / 40)) * k2);
            State k4 = f(x + c4 * hd, y + (hd * (44. / 45)) * k1 -
                                          (hd * (56. / 15)) * k2 +
                                          (hd * (32. / 9)) * k3);
            State k5 =
                f(x + c5 * hd, y + (hd * (19372. / 6561)) * k1 -
                                   (hd * (25360. / 2187)) * k2 +
                                   (hd * (64448. / 6561)) * k3 -
                                   (hd * (212. / 729)) * k4);
            State k6 =
                f(x + hd, y + (hd * (9017. / 3168)) * k1 -
                              (hd * (355. / 33)) * k2 +
                              (hd * (46732. / 5247)) * k3 +
                              (hd * (49. / 176)) * k4 -
                              (hd * (5103. / 18656)) * k5);
            State y5 = y + (hd * (35. / 384)) * k1 +
                       (hd * (500. / 1113)) * k3 + (hd * (125. / 192)) * k4 -
                       (hd * (2187. / 6784)) * k5 + (hd * (11. / 84)) * k6;
            State k7 = f(x + hd, y5);
            // embedded 4th-order difference
            State err = (hd * (71. / 57600)) * k1 -
                        (hd * (71. / 16695)) * k3 + (hd * (71. / 1920)) * k4 -
                        (hd * (17253. / 339200)) * k5 +
                        (hd * (22. / 525)) * k6 - (hd * (1. / 40)) * k7;
            double sc = atol + rtol * std::max(state_norm(y), state_norm(y5));
            double e = state_norm(err) / sc;
            if (e <= 1.0) {
                x += hd;
                y = y5;
                k1 = k7;  // FSAL
            }
            double fac = (e > 0) ? 0.9 * std::pow(e, -0.2) : 5.0;
            fac = std::min(5.0, std::max(0.2, fac));
            h = std::min(hmax, h * fac);
            if (h < hmin) throw numerical_error("RK45: step underflow");
        }
    }
};

// ---------------------------------------------------------------------------
// Deterministic sampling (fixed algorithms; identical streams everywhere).
struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    uint64_t next_u64() {  // splitmix64
        uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() {  // in (0,1)
        return (next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double gaussian() {  // Box-Muller, deterministic
        double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * pi * u2);
    }
};

// ---------------------------------------------------------------------------
// Misc helpers.
inline double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lab

// arithmetic for std::array states used by RK45
template <class S, size_t N>
std::array<S, N> operator+(const std::array<S, N>& a,
                           const std::array<S, N>& b) {
    std::array<S, N> r;
    for (size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}
template <class S, size_t N>
std::array<S, N> operator-(const std::array<S, N>& a,
                           const std::array<S, N>& b) {
    std::array<S, N> r;
    for (size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}
template <class S, size_t N, class C>
std::array<S, N> operator*(const C& c, const std::array<S, N>& a) {
    std::array<S, N> r;
    for (size_t i = 0; i < N; ++i) r[i] = c * a[i];
    return r;
}
