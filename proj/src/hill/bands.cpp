#include "hill/bands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hill {

namespace {

// golden-section maximization of f on [a,b]
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

struct Event {
    double e;
    int kind;  // +1 enter band, -1 exit band, 0 touch (closed gap)
};

}  // namespace

BandStructure band_structure(const FundamentalPair& fp, double emax,
                             double closed_gap_tol) {
    // Work with g(E) = D(E)^2 - 4 in the cancellation-free factored form
    // (c1 - s1')^2 + 4 s1 c1' (valid since the monodromy has det 1).
    // Spectrum = {g <= 0}; edges are simple sign changes of g; a closed gap
    // is an interior maximum where g touches 0 from below.  Near-degenerate
    // gaps stay resolvable because g scales like the squared monodromy
    // defect, far above the evaluation noise of the same expression.
    auto gval = [&fp](double e) {
        auto v = fp.at(e, 1.0);
        return lab::sq(v.c - v.sp) + 4 * v.s * v.cp;
    };
    auto disc = [&fp](double e) { return fp.discriminant(e); };

    // lower bound of the spectrum: below min P the discriminant exceeds 2
    double pmin = 1e300;
    for (int i = 0; i < 256; ++i)
        pmin = std::min(pmin, fp.potential()(i / 256.0));
    double e0 = pmin - 0.25;
    while (disc(e0) <= 2.0) e0 -= std::max(1.0, std::abs(e0));

    // sample g on a sqrt-stretched grid (resolves the cos(sqrt E) scale)
    std::vector<double> es, gs;
    {
        double sig_end = std::sqrt(std::max(4.0, emax - e0)) + 1.0;
        double dsig = 0.06;
        for (double sig = 0.0;; sig += dsig) {
            double e = e0 + sig * sig;
            es.push_back(e);
            gs.push_back(gval(e));
            if (e > emax && gs.back() > 0) break;     // ends in a gap
            if (sig > sig_end + 3 * lab::pi) break;   // ends inside a band
        }
    }

    // open iff the squared defect at the gap extremum clears this level
    const double thr_open = lab::sq(std::max(closed_gap_tol, 1e-12));
    const double thr_touch = 1e-16;

    std::vector<Event> events;
    const size_t n = es.size();
    // edges visible at sampling resolution
    for (size_t i = 0; i + 1 < n; ++i) {
        if ((gs[i] > 0) == (gs[i + 1] > 0)) continue;
        double e = lab::brent(gval, es[i], es[i + 1],
                              1e-12 * (1 + std::abs(es[i + 1])));
        events.push_back({e, gs[i] > 0 ? +1 : -1});
    }
    // gap markers: interior maxima of g (possibly far below sampling
    // resolution); refine and classify
    for (size_t i = 1; i + 1 < n; ++i) {
        if (!(gs[i] >= gs[i - 1] && gs[i] >= gs[i + 1])) continue;
        double estar = golden_max(gval, es[i - 1], es[i + 1],
                                  1e-11 * (1 + std::abs(es[i + 1])));
        double gm = gval(estar);
        if (gm > thr_open) {
            // open gap; add whichever edges sampling did not already see
            if (gs[i - 1] < 0)
                events.push_back(
                    {lab::brent(gval, es[i - 1], estar,
                                1e-12 * (1 + std::abs(estar))),
                     -1});
            if (gs[i + 1] < 0)
                events.push_back(
                    {lab::brent(gval, estar, es[i + 1],
                                1e-12 * (1 + std::abs(es[i + 1]))),
                     +1});
        } else if (gm > -thr_touch) {
            events.push_back({estar, 0});
        }
        // else: a noise-level interior maximum well inside a band; ignore
    }

    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.e < b.e; });
    // drop duplicate detections of the same event
    {
        std::vector<Event> uniq;
        for (const Event& ev : events) {
            if (!uniq.empty() && ev.kind == uniq.back().kind &&
                ev.e - uniq.back().e < 1e-9 * (1 + std::abs(ev.e)))
                continue;
            uniq.push_back(ev);
        }
        events.swap(uniq);
    }

    // assemble branches from the event stream
    BandStructure bs;
    bool inside = false;
    double cur_lo = 0;
    int j = 1;
    for (size_t i = 0; i < events.size(); ++i) {
        const Event& ev = events[i];
        if (!inside) {
            if (ev.kind == +1) {
                inside = true;
                cur_lo = ev.e;
            }
            continue;
        }
        if (ev.kind == -1 || ev.kind == 0) {
            BandBranch br;
            br.j = j++;
            br.elo = cur_lo;
            br.ehi = ev.e;
            br.gap_above = (ev.kind == -1);
            bs.branches.push_back(br);
            if (ev.kind == 0) {
                cur_lo = ev.e;  // touch: next branch starts here
            } else {
                inside = false;
            }
        }
    }
    if (bs.branches.empty())
        throw lab::numerical_error("band_structure: no band found");

    // merge branches into spectral bands across closed gaps
    double lo = bs.branches.front().elo;
    for (size_t i = 0; i < bs.branches.size(); ++i) {
        const BandBranch& br = bs.branches[i];
        bool open_above = br.gap_above && i + 1 < bs.branches.size();
        bool last = i + 1 == bs.branches.size();
        if (open_above || last) {
            SpectralBand sb;
            sb.elo = lo;
            sb.ehi = br.ehi;
            sb.gap_above = last ? 0.0 : (bs.branches[i + 1].elo - br.ehi);
            bs.bands.push_back(sb);
            if (!last) lo = bs.branches[i + 1].elo;
        }
    }
    return bs;
}

}  // namespace hill
