// Filon-panel quadrature of the evolution kernel over the quasimomentum
// axis: exact linear-phase moments, Taylor-folded phase curvature, shared
// per-panel wave data, free-tail closure for the part beyond the table.
#include "bloch/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace bloch {

using lab::cplx;
using lab::iu;
using lab::pi;

// ---------------------------------------------------------------------------
// moments

std::vector<cplx> filon_moments(double a, double h, int jmax) {
    std::vector<cplx> M(jmax + 1, cplx(0));
    const double half = 0.5 * h;
    if (std::abs(a) * h <= 30.0) {
        // series: sum_n (ia)^n / n! * int u^{j+n} du
        for (int j = 0; j <= jmax; ++j) {
            cplx term(1, 0), acc(0, 0);
            for (int n = 0; n <= 90; ++n) {
                const int m = j + n;
                if (m % 2 == 0) {
                    const double I =
                        2.0 * std::pow(half, m + 1) / double(m + 1);
                    acc += term * I;
                }
                term *= cplx(0, a) / double(n + 1);
                if (std::abs(term) * std::pow(half, m + 2) < 1e-22) break;
            }
            M[j] = acc;
        }
        return M;
    }
    // upward recurrence, stable here since j/|a h| stays below 1
    const cplx ia(0, a);
    const cplx ep = std::exp(iu * (a * half));
    const cplx em = std::conj(ep);
    M[0] = 2.0 * std::sin(a * half) / a;
    double hp = 1.0;  // (h/2)^j
    for (int j = 1; j <= jmax; ++j) {
        hp *= half;
        const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
        M[j] = (hp * ep - sgn * hp * em) / ia - (double(j) / ia) * M[j - 1];
    }
    return M;
}

namespace {

// 5 Chebyshev nodes on [-1, 1] (ascending) and the inverse Vandermonde
// taking node values to monomial coefficients.
struct Cheb5 {
    std::array<double, 5> v{};
    std::array<std::array<double, 5>, 5> winv{};
    Cheb5() {
        for (int i = 0; i < 5; ++i)
            v[i] = -std::cos(pi * (2.0 * i + 1.0) / 10.0);
        // invert W[i][j] = v_i^j by Gauss-Jordan
        double W[5][10] = {};
        for (int i = 0; i < 5; ++i) {
            double p = 1;
            for (int j = 0; j < 5; ++j) {
                W[i][j] = p;
                p *= v[i];
            }
            W[i][5 + i] = 1;
        }
        for (int c = 0; c < 5; ++c) {
            int piv = c;
            for (int r = c + 1; r < 5; ++r)
                if (std::abs(W[r][c]) > std::abs(W[piv][c])) piv = r;
            std::swap(W[c], W[piv]);
            const double d = W[c][c];
            for (int j = 0; j < 10; ++j) W[c][j] /= d;
            for (int r = 0; r < 5; ++r) {
                if (r == c) continue;
                const double f = W[r][c];
                for (int j = 0; j < 10; ++j) W[r][j] -= f * W[c][j];
            }
        }
        for (int j = 0; j < 5; ++j)
            for (int i = 0; i < 5; ++i) winv[j][i] = W[j][5 + i];
    }
};
const Cheb5& cheb5() {
    static const Cheb5 c;
    return c;
}

constexpr int kDeg = 12;  // highest moment used

struct Panel {
    int j = 0;  // owning branch (0 = free-subtraction panel)
    double k0 = 0, h = 0;
    std::array<double, 5> kn{};
    std::array<double, 5> p{};  // E(k0+u) ~ sum p_m u^m
    std::array<cplx, 9> S{};    // curvature series in u (degree 8)
    std::vector<hill::Fourier1> m0;  // per node, empty for free panels
};

// monomial coefficients from node values (scaled by (h/2)^{-m})
template <class T>
std::array<T, 5> fit5(const std::array<T, 5>& vals, double half) {
    const Cheb5& C = cheb5();
    std::array<T, 5> out{};
    double sc = 1;
    for (int m = 0; m < 5; ++m) {
        T acc = T(0);
        for (int i = 0; i < 5; ++i) acc += C.winv[m][i] * vals[i];
        out[m] = acc * (1.0 / sc);
        sc *= half;
    }
    return out;
}

// curvature series S(u) = exp(i theta) ~ 1 + i theta - theta^2/2 with
// theta = t2 u^2 + t3 u^3 + t4 u^4
std::array<cplx, 9> curvature_series(double t2, double t3, double t4) {
    std::array<cplx, 9> S{};
    S[0] = 1.0;
    S[2] += cplx(0, t2);
    S[3] += cplx(0, t3);
    S[4] += cplx(0, t4);
    S[4] -= 0.5 * t2 * t2;
    S[5] -= t2 * t3;
    S[6] -= 0.5 * (t3 * t3 + 2 * t2 * t4);
    S[7] -= t3 * t4;
    S[8] -= 0.5 * t4 * t4;
    return S;
}

double curvature_angle(double t, const std::array<double, 5>& p,
                       double half) {
    return std::abs(t) * (std::abs(p[2]) * half * half +
                          std::abs(p[3]) * half * half * half +
                          std::abs(p[4]) * half * half * half * half);
}

}  // namespace

// ---------------------------------------------------------------------------
// PropagatorKernel

PropagatorKernel::PropagatorKernel(
    std::shared_ptr<const hill::BlochTable> tab, int n0, double tol_osc,
    int max_refine)
    : tab_(std::move(tab)), n0_(n0), tol_osc_(tol_osc),
      max_refine_(max_refine) {
    if (n0_ < 1 || n0_ >= tab_->nbranch())
        throw lab::validation_error(
            "bounded-band count must leave at least one tail branch");
    // per-branch width-rule profiles
    const int ns = 65;
    rules_.resize(tab_->nbranch());
    for (int j = 1; j <= tab_->nbranch(); ++j) {
        RuleProfile& rp = rules_[j - 1];
        const double lo = (j - 1) * pi, hi = j * pi;
        std::vector<double> edd(ns);
        rp.k.resize(ns);
        for (int i = 0; i < ns; ++i) {
            rp.k[i] = lo + (hi - lo) * i / double(ns - 1);
            edd[i] = tab_->point(rp.k[i]).Eddot;
        }
        std::vector<double> e3(ns, 0);
        for (int i = 0; i < ns; ++i) {
            const int a = std::max(0, i - 1), b = std::min(ns - 1, i + 1);
            e3[i] = std::abs((edd[b] - edd[a]) / (rp.k[b] - rp.k[a]));
        }
        rp.b2.resize(ns);
        rp.b3.resize(ns);
        for (int i = 0; i < ns; ++i) {
            const int a = std::max(0, i - 1), b = std::min(ns - 1, i + 1);
            double m2 = 0, m3 = 0;
            for (int q = a; q <= b; ++q) {
                m2 = std::max(m2, std::abs(edd[q]));
                m3 = std::max(m3, e3[q]);
            }
            rp.b2[i] = 1.5 * m2;
            rp.b3[i] = 1.5 * m3;
        }
    }
}

namespace {

double rule_width(const PropagatorKernel* self, int j, double k, double t,
                  const std::vector<double>& ks,
                  const std::vector<double>& b2,
                  const std::vector<double>& b3) {
    (void)self;
    const double lo = ks.front(), hi = ks.back();
    const int ns = static_cast<int>(ks.size());
    double u = (k - lo) / (hi - lo) * (ns - 1);
    int i = std::min(ns - 2, std::max(0, static_cast<int>(u)));
    const double B2 = std::max(b2[i], b2[i + 1]);
    const double B3 = std::max(b3[i], b3[i + 1]);
    const double ta = std::max(std::abs(t), 1e-12);
    double h = 0.35;
    h = std::min(h, 0.35 / std::sqrt(ta * std::max(B2, 1e-9)));
    h = std::min(h, std::cbrt(0.5 / (ta * std::max(B3, 1e-9))));
    return h;
}

}  // namespace

std::vector<KernelValue> PropagatorKernel::pass(
    double t, const std::vector<std::array<double, 2>>& xy, double scale,
    double* est_err) const {
    const int npairs = static_cast<int>(xy.size());
    const Cheb5& C5 = cheb5();
    const bool zero_t = std::abs(t) < 1e-9;

    // --- build perturbed-side panels over all branches (positive k)
    std::vector<Panel> panels;
    auto push_panel = [&](int j, double a, double b, auto&& self) -> void {
        const double h = b - a, k0 = 0.5 * (a + b), half = 0.5 * h;
        Panel P;
        P.j = j;
        P.k0 = k0;
        P.h = h;
        std::array<double, 5> En{};
        P.m0.resize(5);
        for (int i = 0; i < 5; ++i) {
            P.kn[i] = k0 + half * C5.v[i];
            const hill::BlochWave w = tab_->wave(P.kn[i]);
            En[i] = w.E;
            P.m0[i] = w.s0;
        }
        P.p = fit5(En, half);
        // split when the curvature Taylor would not be accurate
        if (curvature_angle(t, P.p, half) > 0.08 && h > 1e-6) {
            self(j, a, 0.5 * (a + b), self);
            self(j, 0.5 * (a + b), b, self);
            return;
        }
        P.S = curvature_series(-t * P.p[2], -t * P.p[3], -t * P.p[4]);
        panels.push_back(std::move(P));
    };

    for (int j = 1; j <= tab_->nbranch(); ++j) {
        const double off = hill::BlochTable::threshold_offset;
        const double lo = (j - 1) * pi + off, hi = j * pi - off;
        // geometric ladders into both cell ends, rule-based interior
        std::vector<double> cuts = {lo};
        for (double d : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2})
            cuts.push_back(lo + d);
        const double ilo = lo + 5e-2, ihi = hi - 5e-2;
        double k = ilo;
        const RuleProfile& rp = rules_[j - 1];
        while (k < ihi - 1e-12) {
            double h = scale * rule_width(this, j, k, t, rp.k, rp.b2, rp.b3);
            h = std::min(h, ihi - k);
            k += h;
            cuts.push_back(std::min(k, ihi));
        }
        for (double d : {5e-2, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6})
            cuts.push_back(hi - d);
        cuts.push_back(hi);
        for (size_t i = 0; i + 1 < cuts.size(); ++i)
            if (cuts[i + 1] > cuts[i] + 1e-13)
                push_panel(j, cuts[i], cuts[i + 1], push_panel);
    }

    // --- free-subtraction panels over [0, K] (no wave data)
    std::vector<Panel> fpanels;
    const double K = tab_->kmax();
    if (!zero_t) {
        double k = 0;
        while (k < K - 1e-12) {
            double h = scale * std::min(0.35, 0.35 / std::sqrt(2 * std::abs(t)));
            h = std::min(h, K - k);
            Panel P;
            P.j = 0;
            P.k0 = k + 0.5 * h;
            P.h = h;
            P.p = {P.k0 * P.k0, 2 * P.k0, 1.0, 0.0, 0.0};
            P.S = curvature_series(-t, 0.0, 0.0);
            fpanels.push_back(std::move(P));
            k += h;
        }
    }

    // --- unique coordinate lists so wave factors are evaluated once
    std::vector<double> xs, ys;
    std::vector<std::pair<int, int>> pidx(npairs);
    {
        std::map<double, int> mx, my;
        for (int i = 0; i < npairs; ++i) {
            auto ix = mx.emplace(xy[i][0], static_cast<int>(mx.size()));
            auto iy = my.emplace(xy[i][1], static_cast<int>(my.size()));
            pidx[i] = {ix.first->second, iy.first->second};
        }
        xs.resize(mx.size());
        ys.resize(my.size());
        for (auto& [val, id] : mx) xs[id] = val;
        for (auto& [val, id] : my) ys[id] = val;
    }
    const int nxu = static_cast<int>(xs.size());
    const int nyu = static_cast<int>(ys.size());

    std::vector<KernelValue> out(npairs);
    const double inv2pi = 1.0 / (2 * pi);

    // --- accumulate perturbed panels
    std::vector<cplx> mx(5 * nxu), my(5 * nyu);
    for (const Panel& P : panels) {
        for (int i = 0; i < 5; ++i) {
            for (int n = 0; n < nxu; ++n)
                mx[i * nxu + n] = P.m0[i].eval(xs[n]);
            for (int n = 0; n < nyu; ++n)
                my[i * nyu + n] = P.m0[i].eval(ys[n]);
        }
        const double half = 0.5 * P.h;
        for (int ip = 0; ip < npairs; ++ip) {
            const double x = xy[ip][0], y = xy[ip][1], d = y - x;
            std::array<cplx, 5> A{};
            for (int i = 0; i < 5; ++i)
                A[i] = std::conj(mx[i * nxu + pidx[ip].first]) *
                       my[i * nyu + pidx[ip].second] * inv2pi;
            const std::array<cplx, 5> q = fit5(A, half);
            for (int sgn = 0; sgn < 2; ++sgn) {
                const double sd = sgn == 0 ? d : -d;
                const double a = -t * P.p[1] + sd;
                const cplx ph =
                    std::exp(cplx(0.0, -t * P.p[0] + P.k0 * sd));
                const std::vector<cplx> M = filon_moments(a, P.h, kDeg);
                // C = conv(S, q) truncated at kDeg
                cplx acc = 0;
                for (int s = 0; s <= 8; ++s) {
                    if (P.S[s] == cplx(0)) continue;
                    for (int m = 0; m < 5; ++m) {
                        const int dg = s + m;
                        if (dg > kDeg) break;
                        cplx c = P.S[s] * (sgn == 0 ? q[m] : std::conj(q[m]));
                        acc += c * M[dg];
                    }
                }
                const cplx val = ph * acc;
                if (P.j <= n0_) out[ip].U += val;
                else out[ip].V += val;
            }
        }
    }

    // --- tail closure: exact free tail + boundary correction
    double emax_est = 0;
    if (!zero_t) {
        const hill::BlochWave wK = tab_->wave(K);
        const double EK = wK.E, EdK = wK.Edot;
        for (int ip = 0; ip < npairs; ++ip) {
            const double x = xy[ip][0], y = xy[ip][1], d = y - x;
            // closed-form free kernel minus the finite free integral
            const cplx closed =
                std::exp(cplx(0.0, d * d / (4.0 * t))) /
                std::sqrt(cplx(0.0, 4.0 * pi * t));
            cplx finite = 0;
            for (const Panel& P : fpanels) {
                for (int sgn = 0; sgn < 2; ++sgn) {
                    const double sd = sgn == 0 ? d : -d;
                    const double a = -t * P.p[1] + sd;
                    const cplx ph =
                        std::exp(cplx(0.0, -t * P.p[0] + P.k0 * sd));
                    const std::vector<cplx> M = filon_moments(a, P.h, 8);
                    cplx acc = 0;
                    for (int s = 0; s <= 8; ++s)
                        if (P.S[s] != cplx(0)) acc += P.S[s] * M[s];
                    finite += ph * acc * inv2pi;
                }
            }
            out[ip].V += closed - finite;

            // perturbed-minus-free boundary terms at +-K
            const cplx mK =
                std::conj(wK.s0.eval(x)) * wK.s0.eval(y) * inv2pi;
            const cplx mKc =
                wK.s0.eval(x) * std::conj(wK.s0.eval(y)) * inv2pi;
            for (int sgn = 0; sgn < 2; ++sgn) {
                const double sd = sgn == 0 ? d : -d;
                const cplx Ap = sgn == 0 ? mK : mKc;
                const double dPp = -t * EdK + sd;
                const double dPf = -2 * t * K + sd;
                const cplx ep = std::exp(cplx(0.0, -t * EK + K * sd));
                const cplx ef = std::exp(cplx(0.0, -t * K * K + K * sd));
                // -[A e^{i Phi} / (i Phi')] at the outer boundary
                out[ip].V -= Ap * ep / cplx(0.0, dPp) -
                             inv2pi * ef / cplx(0.0, dPf);
                emax_est = std::max(
                    emax_est, (std::abs(Ap) + inv2pi) * 2 * std::abs(t) /
                                  lab::sq(std::min(std::abs(dPp),
                                                   std::abs(dPf))));
            }
        }
    } else {
        for (int ip = 0; ip < npairs; ++ip) {
            const double d = std::abs(xy[ip][1] - xy[ip][0]);
            emax_est = std::max(emax_est, 1.0 / (pi * std::max(d, 1e-3)));
        }
    }
    if (est_err) *est_err = emax_est;
    return out;
}

KernelBatch PropagatorKernel::eval(
    double t, const std::vector<std::array<double, 2>>& xy) const {
    KernelBatch out;
    double est = 0;
    out.vals = pass(t, xy, 1.0, &est);
    out.est_err = est;
    double scale = 1.0;
    for (int r = 1; r <= max_refine_; ++r) {
        scale *= 0.5;
        const std::vector<KernelValue> fine = pass(t, xy, scale, &est);
        double mu = 1e-300, mv = 1e-300, du = 0, dv = 0;
        for (size_t i = 0; i < fine.size(); ++i) {
            mu = std::max(mu, std::abs(fine[i].U));
            mv = std::max(mv, std::abs(fine[i].V));
            du = std::max(du, std::abs(fine[i].U - out.vals[i].U));
            dv = std::max(dv, std::abs(fine[i].V - out.vals[i].V));
        }
        out.vals = fine;
        out.residU = du / mu;
        out.residV = dv / mv;
        out.refinements = r;
        out.est_err = std::max(out.est_err, est);
        if (out.residU <= tol_osc_ && out.residV <= tol_osc_) return out;
    }
    if (max_refine_ > 0) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "kernel quadrature not converged: residuals %.2e/%.2e",
                      out.residU, out.residV);
        throw lab::numerical_error(buf);
    }
    return out;
}

KernelValue PropagatorKernel::eval1(double t, double x, double y) const {
    return eval(t, {{x, y}}).vals[0];
}

// ---------------------------------------------------------------------------
// decay measurement

std::vector<double> decay_velocities(const hill::BlochTable& tab, int n0) {
    std::vector<double> vs = {0.0};
    auto add = [&vs](double v) {
        for (double w : vs)
            if (std::abs(w - v) < 0.05) return;
        vs.push_back(v);
        vs.push_back(-v);
    };
    for (int j = 1; j <= n0; ++j) {
        double best = 0;
        for (int i = 1; i < 100; ++i) {
            const double k = (j - 1 + i / 100.0) * pi;
            best = std::max(best, std::abs(tab.Edot_of_k(k)));
        }
        add(best);
    }
    for (int j = n0 + 1; j <= std::min(n0 + 2, tab.nbranch()); ++j)
        add(std::abs(tab.Edot_of_k((j - 0.5) * pi)));
    std::sort(vs.begin(), vs.end());
    return vs;
}

DecayMeasurement measure_kernel_decay(const PropagatorKernel& kern,
                                      const std::vector<double>& times,
                                      int cell_samples) {
    DecayMeasurement out;
    out.velocities = decay_velocities(kern.table(), kern.n0());
    const int m = cell_samples;
    for (double t : times) {
        std::vector<std::array<double, 2>> pairs;
        for (double v : out.velocities) {
            const double y0 = std::floor(v * t);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    pairs.push_back(
                        {(i + 0.5) / m, y0 + (j + 0.5) / m});
        }
        const KernelBatch b = kern.eval(t, pairs);
        double su = 0, sv = 0;
        for (const KernelValue& kv : b.vals) {
            su = std::max(su, std::abs(kv.U));
            sv = std::max(sv, std::abs(kv.V));
        }
        out.times.push_back(t);
        out.supU.push_back(su);
        out.supV.push_back(sv);
    }
    out.fitU = decay_exponent_fit(out.times, out.supU);
    out.fitV = decay_exponent_fit(out.times, out.supV);
    return out;
}

}  // namespace bloch
