#include "hill/fundamental.hpp"

namespace hill {

using lab::cplx;

namespace {

// y = (c, c', s, s') and optionally the first/second E-derivatives,
// chained through u'' = (P - E) u, u_E'' = (P - E) u_E - u,
// u_EE'' = (P - E) u_EE - 2 u_E.
template <class S>
struct Rhs4 {
    const PeriodicPotential* P;
    S E;
    std::array<S, 4> operator()(double x, const std::array<S, 4>& y) const {
        S w = (*P)(x) - E;
        return {y[1], w * y[0], y[3], w * y[2]};
    }
};

struct Rhs12 {
    const PeriodicPotential* P;
    double E;
    std::array<double, 12> operator()(double x,
                                      const std::array<double, 12>& y) const {
        double w = (*P)(x) - E;
        // blocks: [0..3] values, [4..7] d/dE, [8..11] d2/dE2
        return {y[1],  w * y[0],
                y[3],  w * y[2],
                y[5],  w * y[4] - y[0],
                y[7],  w * y[6] - y[2],
                y[9],  w * y[8] - 2 * y[4],
                y[11], w * y[10] - 2 * y[6]};
    }
};

template <class S>
std::array<S, 4> init4() {
    return {S(1), S(0), S(0), S(1)};
}

}  // namespace

PairValue FundamentalPair::at(double E, double x) const {
    auto y = init4<double>();
    lab::RK45<std::array<double, 4>> rk;
    rk.rtol = 3e-13;
    rk.atol = 1e-14;
    rk.integrate(Rhs4<double>{P_, E}, 0.0, x, y);
    return {y[0], y[1], y[2], y[3]};
}

PairValueC FundamentalPair::at(cplx E, double x) const {
    std::array<cplx, 4> y = {cplx(1), cplx(0), cplx(0), cplx(1)};
    lab::RK45<std::array<cplx, 4>> rk;
    rk.rtol = 3e-13;
    rk.atol = 1e-14;
    rk.integrate(Rhs4<cplx>{P_, E}, 0.0, x, y);
    return {y[0], y[1], y[2], y[3]};
}

PeriodMap FundamentalPair::period_map(double E) const {
    std::array<double, 12> y{};
    auto v = init4<double>();
    for (int i = 0; i < 4; ++i) y[i] = v[i];
    lab::RK45<std::array<double, 12>> rk;
    rk.rtol = 3e-13;
    rk.atol = 1e-14;
    rk.integrate(Rhs12{P_, E}, 0.0, 1.0, y);
    PeriodMap pm;
    pm.c1 = y[0];
    pm.cp1 = y[1];
    pm.s1 = y[2];
    pm.sp1 = y[3];
    pm.disc = y[0] + y[3];
    pm.disc_dE = y[4] + y[7];
    pm.disc_dE2 = y[8] + y[11];
    return pm;
}

double FundamentalPair::discriminant(double E) const {
    auto v = at(E, 1.0);
    return v.c + v.sp;
}

PeriodMapC FundamentalPair::period_map(cplx E) const {
    auto v = at(E, 1.0);
    return {v.c, v.s, v.cp, v.sp, v.c + v.sp};
}

std::vector<PairValue> FundamentalPair::on_period_grid(double E, int n) const {
    std::vector<PairValue> out(n + 1);
    auto y = init4<double>();
    out[0] = {y[0], y[1], y[2], y[3]};
    lab::RK45<std::array<double, 4>> rk;
    rk.rtol = 3e-13;
    rk.atol = 1e-14;
    Rhs4<double> rhs{P_, E};
    for (int i = 1; i <= n; ++i) {
        rk.integrate(rhs, double(i - 1) / n, double(i) / n, y);
        out[i] = {y[0], y[1], y[2], y[3]};
    }
    return out;
}

std::vector<PairValueC> FundamentalPair::on_period_grid(cplx E, int n) const {
    std::vector<PairValueC> out(n + 1);
    std::array<cplx, 4> y = {cplx(1), cplx(0), cplx(0), cplx(1)};
    out[0] = {y[0], y[1], y[2], y[3]};
    lab::RK45<std::array<cplx, 4>> rk;
    rk.rtol = 3e-13;
    rk.atol = 1e-14;
    Rhs4<cplx> rhs{P_, E};
    for (int i = 1; i <= n; ++i) {
        rk.integrate(rhs, double(i - 1) / n, double(i) / n, y);
        out[i] = {y[0], y[1], y[2], y[3]};
    }
    return out;
}

}  // namespace hill
