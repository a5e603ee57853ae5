// Generalized Fourier transform over the branch cells: quadrature grids,
// wave matrix assembly, forward/inverse application, Plancherel checks,
// spectral multipliers, and the decay-exponent fit helper.
#include "bloch/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bloch {

using lab::cplx;
using lab::pi;

double GridFunction::norm2() const {
    double s = 0;
    for (int n = 0; n < size(); ++n) {
        double w = (n == 0 || n == size() - 1) ? 0.5 : 1.0;
        s += w * std::norm(v[n]);
    }
    return s * dx;
}

double GridFunction::sup() const {
    double m = 0;
    for (const cplx& c : v) m = std::max(m, std::abs(c));
    return m;
}

double SpectralFunction::norm2() const {
    double s = 0;
    for (int m = 0; m < size(); ++m) s += wk[m] * std::norm(v[m]);
    return s;
}

namespace {

// Panel boundaries over [lo, hi]: geometric refinement toward both ends
// (fractions 1/64, 1/16, 1/4 of the cell), uniform in the middle.
std::vector<double> panel_bounds(double lo, double hi, int npanel) {
    const double c = hi - lo;
    std::vector<double> fr = {0.0, 1.0 / 64, 1.0 / 16, 1.0 / 4};
    const int nmid = std::max(1, npanel - 6);
    for (int i = 1; i < nmid; ++i)
        fr.push_back(0.25 + 0.5 * i / double(nmid));
    fr.push_back(3.0 / 4);
    fr.push_back(15.0 / 16);
    fr.push_back(63.0 / 64);
    fr.push_back(1.0);
    std::vector<double> b(fr.size());
    for (size_t i = 0; i < fr.size(); ++i) b[i] = lo + c * fr[i];
    return b;
}

}  // namespace

BlochTransform::BlochTransform(std::shared_ptr<const hill::BlochTable> tab,
                               GridSpec g, int panels_per_branch,
                               int gl_order)
    : tab_(std::move(tab)), grid_(g) {
    if (grid_.n < 2 || grid_.dx <= 0)
        throw lab::validation_error("transform grid malformed");

    std::vector<double> gx, gw;
    lab::gauss_legendre(gl_order, gx, gw);
    const int nb = tab_->nbranch();

    // positive-side nodes per branch
    std::vector<double> kp, wp;
    std::vector<int> bp;
    for (int j = 1; j <= nb; ++j) {
        const double lo = (j - 1) * pi + hill::BlochTable::threshold_offset;
        const double hi = j * pi - hill::BlochTable::threshold_offset;
        const auto bounds = panel_bounds(lo, hi, panels_per_branch);
        for (size_t p = 0; p + 1 < bounds.size(); ++p) {
            const double a = bounds[p], b = bounds[p + 1];
            for (int q = 0; q < gl_order; ++q) {
                kp.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[q]);
                wp.push_back(0.5 * (b - a) * gw[q]);
                bp.push_back(j);
            }
        }
    }

    const int np = static_cast<int>(kp.size());
    const int nx = grid_.n;
    knodes_.resize(2 * np);
    kweights_.resize(2 * np);
    kbranch_.resize(2 * np);
    Ek_.resize(2 * np);
    Phi_.assign(2 * np, std::vector<cplx>(nx));

    for (int m = 0; m < np; ++m) {
        const hill::BlochWave w = tab_->wave(kp[m]);
        const int mp = np + m;        // positive-side slot (ascending)
        const int mm = np - 1 - m;    // mirrored negative-side slot
        knodes_[mp] = kp[m];
        knodes_[mm] = -kp[m];
        kweights_[mp] = kweights_[mm] = wp[m];
        kbranch_[mp] = kbranch_[mm] = bp[m];
        Ek_[mp] = Ek_[mm] = w.E;
        for (int n = 0; n < nx; ++n) {
            const double x = grid_.x0 + n * grid_.dx;
            const cplx ph =
                std::exp(lab::iu * (kp[m] * x)) * w.s0.eval(x);
            Phi_[mp][n] = ph;
            Phi_[mm][n] = std::conj(ph);
        }
    }
}

SpectralFunction BlochTransform::forward(const GridFunction& f) const {
    if (f.size() != grid_.n ||
        std::abs(f.x0 - grid_.x0) > 1e-12 ||
        std::abs(f.dx - grid_.dx) > 1e-14)
        throw lab::validation_error("grid mismatch in forward transform");
    const int nx = grid_.n, nk = static_cast<int>(knodes_.size());
    const double fac = grid_.dx / std::sqrt(2 * pi);

    SpectralFunction out;
    out.k = knodes_;
    out.wk = kweights_;
    out.branch = kbranch_;
    out.v.assign(nk, cplx(0));
    for (int m = 0; m < nk; ++m) {
        cplx acc = 0;
        const std::vector<cplx>& row = Phi_[m];
        for (int n = 0; n < nx; ++n) acc += row[n] * f.v[n];
        // trapezoid end correction
        acc -= 0.5 * (row[0] * f.v[0] + row[nx - 1] * f.v[nx - 1]);
        out.v[m] = acc * fac;
    }
    return out;
}

GridFunction BlochTransform::inverse(const SpectralFunction& fh) const {
    const int nx = grid_.n, nk = static_cast<int>(knodes_.size());
    if (fh.size() != nk)
        throw lab::validation_error("spectral size mismatch in inverse");
    const double fac = 1.0 / std::sqrt(2 * pi);

    GridFunction out;
    out.x0 = grid_.x0;
    out.dx = grid_.dx;
    out.v.assign(nx, cplx(0));
    for (int m = 0; m < nk; ++m) {
        const cplx amp = fh.v[m] * kweights_[m] * fac;
        const std::vector<cplx>& row = Phi_[m];
        for (int n = 0; n < nx; ++n) out.v[n] += std::conj(row[n]) * amp;
    }
    return out;
}

double BlochTransform::plancherel_residual(const GridFunction& f) const {
    const double a = f.norm2();
    if (a <= 0) throw lab::validation_error("zero function");
    const double b = forward(f).norm2();
    return std::abs(a - b) / a;
}

void BlochTransform::check_resolved(const GridFunction& f,
                                    double tol) const {
    const double r = plancherel_residual(f);
    if (r > tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "k-grid underresolved: Plancherel residual %.3e > "
                      "%.3e; suggest doubling panels per branch",
                      r, tol);
        throw lab::numerical_error(buf);
    }
}

GridFunction BlochTransform::apply_multiplier(
    const GridFunction& f,
    const std::function<cplx(double, double)>& m) const {
    SpectralFunction fh = forward(f);
    for (int i = 0; i < fh.size(); ++i)
        fh.v[i] *= m(fh.k[i], Ek_[i]);
    return inverse(fh);
}

GridFunction BlochTransform::evolve(const GridFunction& f, double t) const {
    return apply_multiplier(f, [t](double, double E) {
        return std::exp(lab::cplx(0.0, -t * E));
    });
}

DecayFit decay_exponent_fit(const std::vector<double>& times,
                            const std::vector<double>& values) {
    const int n = static_cast<int>(times.size());
    if (n < 6 || values.size() != times.size())
        throw lab::validation_error("decay fit needs >= 6 samples");
    for (int i = 0; i < n; ++i) {
        if (!(values[i] > 0))
            throw lab::validation_error("decay fit needs positive values");
        if (!(times[i] >= 1) || (i > 0 && times[i] <= times[i - 1]))
            throw lab::validation_error(
                "decay fit needs increasing times >= 1");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        const double X = std::log(times[i]), Y = std::log(values[i]);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        syy += Y * Y;
    }
    const double det = n * sxx - sx * sx;
    DecayFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sxx * sy - sx * sxy) / det;
    const double a = fit.intercept, b = fit.slope;
    const double ssres =
        syy + n * a * a + b * b * sxx - 2 * a * sy - 2 * b * sxy +
        2 * a * b * sx;
    const double sstot = syy - sy * sy / n;
    fit.r2 = (sstot > 0) ? 1.0 - std::max(0.0, ssres) / sstot : 1.0;
    return fit;
}

}  // namespace bloch
