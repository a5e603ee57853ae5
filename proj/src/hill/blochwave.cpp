// Floquet-Bloch waves: coarse per-branch seed tables plus exact per-query
// refinement on the monodromy, and decaying pairs below the spectrum and
// at complex energy.  See blochwave.hpp for conventions.
#include "hill/blochwave.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace hill {

using lab::cplx;
using lab::iu;
using lab::pi;

// ---------------------------------------------------------------------------
// Fourier series evaluation (Horner in e^{2 pi i x}).

cplx Fourier1::eval(double x) const {
    const cplx w = std::polar(1.0, 2.0 * pi * x);
    const cplx wb = std::conj(w);
    cplx up = 0, dn = 0;
    for (int m = H; m >= 1; --m) {
        up = (up + cf[m + H]) * w;
        dn = (dn + cf[H - m]) * wb;
    }
    return up + dn + cf[H];
}

cplx Fourier1::eval_dx(double x) const {
    const cplx w = std::polar(1.0, 2.0 * pi * x);
    const cplx wb = std::conj(w);
    cplx up = 0, dn = 0;
    for (int m = H; m >= 1; --m) {
        const cplx fac = iu * (2.0 * pi * m);
        up = (up + fac * cf[m + H]) * w;
        dn = (dn - fac * cf[H - m]) * wb;
    }
    return up + dn;
}

cplx Fourier1::eval_dxx(double x) const {
    const cplx w = std::polar(1.0, 2.0 * pi * x);
    const cplx wb = std::conj(w);
    cplx up = 0, dn = 0;
    for (int m = H; m >= 1; --m) {
        const double fac = -lab::sq(2.0 * pi * m);
        up = (up + fac * cf[m + H]) * w;
        dn = (dn + fac * cf[H - m]) * wb;
    }
    return up + dn;
}

namespace {

// Trigonometric interpolation of n uniform samples v_q at x_q = q/n,
// modes -H..H with H = n/2 - 1 (top mode dropped: below noise for the
// analytic periodic factors handled here).
Fourier1 dft_series(const std::vector<cplx>& v) {
    const int n = static_cast<int>(v.size());
    const int H = n / 2 - 1;
    Fourier1 F;
    F.H = H;
    F.cf.assign(2 * H + 1, cplx(0));
    for (int m = -H; m <= H; ++m) {
        cplx acc = 0;
        for (int q = 0; q < n; ++q) {
            int r = ((m * q) % n + n) % n;
            acc += v[q] * std::polar(1.0, -2.0 * pi * r / n);
        }
        F.cf[m + H] = acc / double(n);
    }
    return F;
}

// Largest edge-mode magnitude relative to the peak: resolution check.
double tail_ratio(const Fourier1& F) {
    double mx = 0;
    for (const cplx& c : F.cf) mx = std::max(mx, std::abs(c));
    if (mx == 0) return 0;
    const int top = 2 * F.H;
    double t = std::max(std::max(std::abs(F.cf[0]), std::abs(F.cf[1])),
                        std::max(std::abs(F.cf[top]), std::abs(F.cf[top - 1])));
    return t / mx;
}

// Slope of the Floquet eigenvector: phi = c + m s with M phi-data =
// mu phi-data.  Two algebraically equivalent expressions; pick the one
// with the larger denominator.
template <class T>
T floquet_slope(T c1, T s1, T cp1, T sp1, T mu) {
    if (std::abs(s1) >= std::abs(mu - sp1)) return (mu - c1) / s1;
    return cp1 / (mu - sp1);
}

int branch_for_kabs(double ka, int nbranch) {
    int j = static_cast<int>(std::floor(ka / pi)) + 1;
    if (j < 1) j = 1;
    if (j > nbranch) {
        if (ka <= nbranch * pi + 1e-9) j = nbranch;
        else
            throw lab::validation_error(
                "quasimomentum beyond tabulated branches");
    }
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// BlochTable

BlochTable::BlochTable(const PeriodicPotential& P, int nbranch, int ncheb)
    : pot_(P), fp_(pot_), ncheb_(ncheb) {
    if (nbranch < 1) throw lab::validation_error("need at least one branch");
    if (ncheb < 8) throw lab::validation_error("Chebyshev order too small");

    double pmax = 0;
    for (int i = 0; i < 512; ++i)
        pmax = std::max(pmax, std::abs(pot_(i / 512.0)));

    double emax = lab::sq(nbranch * pi) + 2 * pmax + 20;
    for (int attempt = 0;; ++attempt) {
        bs_ = band_structure(fp_, emax);
        if (static_cast<int>(bs_.branches.size()) >= nbranch) break;
        if (attempt >= 3)
            throw lab::numerical_error(
                "band scan found fewer branches than requested");
        emax = 1.5 * emax + 50;
    }

    tabs_.resize(nbranch);
    for (int j = 1; j <= nbranch; ++j) build_branch(j);
}

void BlochTable::build_branch(int j) {
    const BandBranch& br = bs_.branches[j - 1];
    const double klo = (j - 1) * pi, khi = j * pi;

    BranchTab& tab = tabs_[j - 1];
    tab.cheb.init(ncheb_, klo, khi);
    const std::vector<double>& ks = tab.cheb.xs;

    tab.E.resize(ks.size());
    for (size_t i = 0; i < ks.size(); ++i) {
        const double target = 2 * std::cos(ks[i]);
        tab.E[i] = lab::brent(
            [&](double e) { return fp_.discriminant(e) - target; }, br.elo,
            br.ehi, 1e-13 * std::max(1.0, std::abs(br.ehi)));
    }
}

double BlochTable::clamp_k(double kabs, int j) const {
    const double lo = (j - 1) * pi + threshold_offset;
    const double hi = j * pi - threshold_offset;
    return std::min(std::max(kabs, lo), hi);
}

BlochTable::BandPoint BlochTable::point(double k) const {
    const double ka0 = std::abs(k);
    const int j = branch_for_kabs(ka0, nbranch());
    const double ka = clamp_k(ka0, j);
    const BandBranch& br = bs_.branches[j - 1];
    const double target = 2 * std::cos(ka);
    const double escale = std::max(1.0, std::abs(br.ehi));
    const double etol = 1e-13 * escale;

    double E = tabs_[j - 1].cheb.eval(tabs_[j - 1].E, ka);
    E = std::min(std::max(E, br.elo), br.ehi);

    PeriodMap pm{};
    bool ok = false;
    for (int it = 0; it < 6; ++it) {
        pm = fp_.period_map(E);
        if (std::abs(pm.disc_dE) < 1e-14) break;
        const double dE = (pm.disc - target) / pm.disc_dE;
        E -= dE;
        if (std::abs(dE) <= etol) {
            ok = true;
            break;
        }
    }
    // Newton left the branch window (or grazed a vanishing derivative):
    // fall back to a bracketed solve.  Edge values of the discriminant sit
    // within integrator noise of +-2, so guard the bracket signs.
    if (!ok || E < br.elo - 1e-8 * escale || E > br.ehi + 1e-8 * escale) {
        const double fa = fp_.discriminant(br.elo) - target;
        const double fb = fp_.discriminant(br.ehi) - target;
        if (fa == 0 || fa * fb > 0)
            E = (std::abs(fa) <= std::abs(fb)) ? br.elo : br.ehi;
        else
            E = lab::brent(
                [&](double e) { return fp_.discriminant(e) - target; },
                br.elo, br.ehi, etol);
        pm = fp_.period_map(E);
    }
    if (std::abs(pm.disc_dE) < 1e-14)
        throw lab::numerical_error(
            "discriminant derivative vanished inside a band");

    BandPoint bp;
    bp.j = j;
    bp.k = ka;
    bp.E = E;
    bp.disc_dE = pm.disc_dE;
    bp.Edot = -2 * std::sin(ka) / pm.disc_dE;
    bp.Eddot =
        (-2 * std::cos(ka) - pm.disc_dE2 * lab::sq(bp.Edot)) / pm.disc_dE;
    if (k < 0) bp.Edot = -bp.Edot;
    return bp;
}

double BlochTable::E_of_k(double k) const { return point(k).E; }

double BlochTable::Edot_of_k(double k) const { return point(k).Edot; }

double BlochTable::Eddot_of_k(double k) const { return point(k).Eddot; }

double BlochTable::k_of_E(double E, int j) const {
    if (j < 1 || j > static_cast<int>(bs_.branches.size()))
        throw lab::validation_error("branch index out of range");
    const BandBranch& br = bs_.branches[j - 1];
    const double pad = 1e-9 * std::max(1.0, std::abs(br.ehi));
    if (E < br.elo - pad || E > br.ehi + pad)
        throw lab::validation_error("energy outside the requested branch");
    double u = fp_.discriminant(E) / 2;
    u = std::min(1.0, std::max(-1.0, u));
    const double arc = std::acos(u);  // in [0, pi]
    return (j % 2 == 1) ? (j - 1) * pi + arc : j * pi - arc;
}

int BlochTable::branch_of_E(double E) const {
    for (const BandBranch& br : bs_.branches) {
        const double pad = 1e-9 * std::max(1.0, std::abs(br.ehi));
        if (E >= br.elo - pad && E <= br.ehi + pad) return br.j;
    }
    throw lab::validation_error("energy not inside a tabulated band");
}

bool BlochTable::in_spectrum(double E, double pad) const {
    for (const SpectralBand& b : bs_.bands)
        if (E >= b.elo - pad && E <= b.ehi + pad) return true;
    return false;
}

BlochWave BlochTable::wave(double k) const {
    const bool neg = k < 0;
    const BandPoint bp = point(std::abs(k));
    const double ka = bp.k;

    BlochWave w;
    w.k = neg ? -ka : ka;
    w.E = bp.E;
    w.Edot = neg ? -bp.Edot : bp.Edot;
    w.Eddot = bp.Eddot;

    const PeriodMap pm = fp_.period_map(bp.E);
    const cplx slope =
        floquet_slope<cplx>(pm.c1, pm.s1, pm.cp1, pm.sp1, std::polar(1.0, ka));

    Fourier1 F;
    double n2 = 1;
    for (int ngrid = 64;; ngrid *= 2) {
        const auto pv = fp_.on_period_grid(bp.E, ngrid);
        std::vector<cplx> u(ngrid);
        n2 = 0;
        for (int q = 0; q < ngrid; ++q) {
            const cplx v = pv[q].c + slope * pv[q].s;
            n2 += std::norm(v);
            u[q] = v * std::polar(1.0, -ka * q / double(ngrid));
        }
        n2 /= ngrid;
        F = dft_series(u);
        if (tail_ratio(F) <= 1e-10 || ngrid >= 256) break;
    }
    const double invN = 1.0 / std::sqrt(n2);
    for (cplx& c : F.cf) c *= invN;

    w.N2 = n2;
    double w0im = 2 * slope.imag() / n2;
    if (neg) {
        // phi_p(x,-k) = conj(phi_p(x,k)): coefficients reverse + conjugate
        const int H = F.H;
        std::vector<cplx> cr(2 * H + 1);
        for (int m = 0; m <= 2 * H; ++m) cr[m] = std::conj(F.cf[2 * H - m]);
        F.cf = std::move(cr);
        w0im = -w0im;
    }
    w.w0 = cplx(0.0, w0im);
    w.s0 = std::move(F);
    return w;
}

EvanescentPair BlochTable::evanescent(double zeta) const {
    const double e0 = bs_.e_min();
    if (!(zeta < e0 - 1e-9))
        throw lab::validation_error("energy not strictly below the spectrum");
    const PeriodMap pm = fp_.period_map(zeta);

    EvanescentPair ev;
    ev.zeta = zeta;
    ev.tau = std::acosh(pm.disc / 2);
    const double mu_p = std::exp(-ev.tau), mu_m = std::exp(ev.tau);
    const double mp =
        floquet_slope<double>(pm.c1, pm.s1, pm.cp1, pm.sp1, mu_p);
    const double mm =
        floquet_slope<double>(pm.c1, pm.s1, pm.cp1, pm.sp1, mu_m);

    const int n = 64;
    const auto pv = fp_.on_period_grid(zeta, n);
    std::vector<cplx> vp(n), vm(n);
    double n2 = 0;
    for (int q = 0; q < n; ++q) {
        const double x = q / double(n);
        const double up = pv[q].c + mp * pv[q].s;
        const double um = pv[q].c + mm * pv[q].s;
        vp[q] = up * std::exp(ev.tau * x);   // periodic factor of f_p
        vm[q] = um * std::exp(-ev.tau * x);  // periodic factor of f_m
        n2 += (vp[q] * vm[q]).real();        // = f_p f_m, periodic
    }
    n2 /= n;
    if (!(n2 > 0))
        throw lab::numerical_error("below-spectrum pair normalization");
    ev.N2 = n2;
    const double invN = 1.0 / std::sqrt(n2);
    for (int q = 0; q < n; ++q) {
        vp[q] *= invN;
        vm[q] *= invN;
    }
    ev.sp = dft_series(vp);
    ev.sm = dft_series(vm);
    ev.w0 = (mp - mm) / n2;
    return ev;
}

ComplexFloquetPair BlochTable::complex_pair(cplx z) const {
    const PeriodMapC pm = fp_.period_map(z);

    ComplexFloquetPair cp;
    cp.z = z;
    const cplx half = pm.disc * 0.5;
    const cplx rt = std::sqrt(half * half - 1.0);
    cplx mu_p = half + rt;
    if (std::abs(mu_p) > 1.0) mu_p = half - rt;  // pick |mu| <= 1
    if (std::abs(mu_p) > 1.0 - 1e-12)
        throw lab::validation_error(
            "energy on (or too close to) the spectrum: no decaying pair");
    const cplx mu_m = 1.0 / mu_p;
    cp.kap = -std::log(mu_p);  // Re kap > 0

    const cplx mp =
        floquet_slope<cplx>(pm.c1, pm.s1, pm.cp1, pm.sp1, mu_p);
    const cplx mm =
        floquet_slope<cplx>(pm.c1, pm.s1, pm.cp1, pm.sp1, mu_m);

    const int n = 64;
    const auto pv = fp_.on_period_grid(z, n);
    std::vector<cplx> vp(n), vm(n);
    for (int q = 0; q < n; ++q) {
        const double x = q / double(n);
        vp[q] = (pv[q].c + mp * pv[q].s) * std::exp(cp.kap * x);
        vm[q] = (pv[q].c + mm * pv[q].s) * std::exp(-cp.kap * x);
    }
    cp.sp = dft_series(vp);
    cp.sm = dft_series(vm);
    cp.w0 = mp - mm;
    return cp;
}

// ---------------------------------------------------------------------------
// shared cache

std::shared_ptr<const BlochTable> bloch_table_cached(
    const PeriodicPotential& P, int nbranch, int ncheb) {
    static std::mutex mtx;
    static std::map<std::string, std::shared_ptr<const BlochTable>> cache;
    const std::string key =
        P.key() + "#" + std::to_string(nbranch) + "#" + std::to_string(ncheb);
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto tab = std::make_shared<const BlochTable>(P, nbranch, ncheb);
    cache.emplace(key, tab);
    return tab;
}

}  // namespace hill
