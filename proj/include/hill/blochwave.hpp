#pragma once
// Normalized Floquet-Bloch waves on the spectral bands, plus the decaying
// Floquet solutions below the spectrum and at complex energy.
//
// Accuracy model: a coarse Chebyshev table per branch only seeds a Newton
// solve of D(E) = 2 cos k on the monodromy, and the wave data is rebuilt
// from the fundamental pair at the refined energy on every query.  Near a
// narrow gap the band map is analytic only in a sliver around the branch
// cell, so any fixed interpolant stalls there; re-solving keeps every
// returned quantity at integrator accuracy uniformly across the cell.
//
// Conventions:
//   branch j <-> |k| in [(j-1) pi, j pi], D(E(k)) = 2 cos k,
//   ft_p = c + m s with ft_p(1) = e^{ik}; N^2 = int_0^1 |ft_p|^2;
//   phi_p(x,k) = ft_p(x)/N = e^{ikx} m0(x,k), phi_m = conj at real k;
//   w0(k) = W[phi_p, phi_m], W[f,g] = f' g - f g';
//   group velocity identity: dE/dk = -i w0(k).
#include <map>
#include <memory>

#include "hill/bands.hpp"

namespace hill {

// Trigonometric series on period 1 (engine behind the periodic factors).
struct Fourier1 {
    std::vector<lab::cplx> cf;  // modes m -> cf[m+H]
    int H = 0;
    lab::cplx eval(double x) const;
    lab::cplx eval_dx(double x) const;
    lab::cplx eval_dxx(double x) const;
};

// Bloch wave data at one real quasimomentum k (band interior).
// m0 denotes the periodic part of phi_p = e^{ikx} m0(x).
struct BlochWave {
    double k = 0;
    double E = 0, Edot = 0, Eddot = 0;
    double N2 = 1;
    lab::cplx w0;   // Wronskian W[phi_p, phi_m]
    Fourier1 s0;    // periodic factor m0

    lab::cplx m0(double x) const { return s0.eval(x); }
    lab::cplx m0_dx(double x) const { return s0.eval_dx(x); }
    lab::cplx phi_p(double x) const {
        return std::exp(lab::iu * (k * x)) * m0(x);
    }
    lab::cplx phi_p_dx(double x) const {
        return std::exp(lab::iu * (k * x)) *
               (m0_dx(x) + lab::iu * k * m0(x));
    }
    lab::cplx phi_m(double x) const { return std::conj(phi_p(x)); }
    lab::cplx phi_m_dx(double x) const { return std::conj(phi_p_dx(x)); }
};

// Decaying/growing Floquet pair at real energy below the spectrum.
// fp(x) = pp(x) e^{-tau x}, fm(x) = pm(x) e^{+tau x} with pp, pm period 1,
// real-valued, fp(0) = fm(0) = 1/N; w0 = W[fp, fm] (constant, real).
struct EvanescentPair {
    double zeta = 0;   // energy, below the spectrum
    double tau = 0;    // decay exponent per period, tau > 0
    double N2 = 1;
    double w0 = 0;
    Fourier1 sp, sm;   // periodic factors pp, pm

    double pp(double x) const { return sp.eval(x).real(); }
    double pm(double x) const { return sm.eval(x).real(); }
    double pp_dx(double x) const { return sp.eval_dx(x).real(); }
    double pm_dx(double x) const { return sm.eval_dx(x).real(); }
    double fp(double x) const { return pp(x) * std::exp(-tau * x); }
    double fm(double x) const { return pm(x) * std::exp(tau * x); }
    double fp_dx(double x) const {
        return (pp_dx(x) - tau * pp(x)) * std::exp(-tau * x);
    }
    double fm_dx(double x) const {
        return (pm_dx(x) + tau * pm(x)) * std::exp(tau * x);
    }
};

// Floquet pair at complex energy z off the real axis (or any z where
// |mu| != 1): f_p = p_p(x) e^{-kap x} with Re kap > 0 (decaying at +inf),
// f_m = p_m(x) e^{+kap x}; normalization p_p(0) = p_m(0) = 1.
struct ComplexFloquetPair {
    lab::cplx z;
    lab::cplx kap;
    lab::cplx w0;  // W[f_p, f_m]
    Fourier1 sp, sm;

    lab::cplx pp(double x) const { return sp.eval(x); }
    lab::cplx pm(double x) const { return sm.eval(x); }
    lab::cplx pp_dx(double x) const { return sp.eval_dx(x); }
    lab::cplx pm_dx(double x) const { return sm.eval_dx(x); }
    lab::cplx fp(double x) const { return pp(x) * std::exp(-kap * x); }
    lab::cplx fm(double x) const { return pm(x) * std::exp(kap * x); }
    lab::cplx fp_dx(double x) const {
        return (pp_dx(x) - kap * pp(x)) * std::exp(-kap * x);
    }
    lab::cplx fm_dx(double x) const {
        return (pm_dx(x) + kap * pm(x)) * std::exp(kap * x);
    }
};

class BlochTable {
  public:
    // Tabulate branches 1..nbranch (enough to cover |k| <= nbranch*pi).
    BlochTable(const PeriodicPotential& P, int nbranch, int ncheb = 48);

    const PeriodicPotential& potential() const { return pot_; }
    const BandStructure& structure() const { return bs_; }
    const FundamentalPair& pair() const { return fp_; }
    int nbranch() const { return static_cast<int>(tabs_.size()); }
    double kmax() const { return nbranch() * lab::pi; }

    // offset policy: evaluation points are pushed this far inside a cell
    static constexpr double threshold_offset = 1e-7;

    // branch data
    const BandBranch& branch(int j) const { return bs_.branches[j - 1]; }
    bool gap_is_open(int j) const { return bs_.branches[j - 1].gap_above; }

    // One fully resolved point of the band map: the tabulated values give
    // an initial guess, then D(E) = 2 cos k is re-solved by Newton on the
    // monodromy, so E, Edot, Eddot carry no interpolation error.
    struct BandPoint {
        int j = 0;           // branch index
        double k = 0;        // clamped |k|, sign restored in E maps
        double E = 0;
        double Edot = 0;     // dE/dk (for the signed k)
        double Eddot = 0;    // d2E/dk2
        double disc_dE = 0;  // D'(E)
    };
    BandPoint point(double k) const;

    // scalar maps (k may be negative; clamped away from thresholds)
    double E_of_k(double k) const;
    double Edot_of_k(double k) const;
    double Eddot_of_k(double k) const;
    // inverse map: quasimomentum in branch j for energy E
    double k_of_E(double E, int j) const;
    // locate the branch containing E (throws if E is in a gap / outside)
    int branch_of_E(double E) const;
    bool in_spectrum(double E, double pad = 0.0) const;

    // full wave data (k may be negative: conjugate-mirrored tables)
    BlochWave wave(double k) const;

    // decaying Floquet pair below the spectrum (zeta < min spectrum)
    EvanescentPair evanescent(double zeta) const;
    // complex-energy pair (Im z != 0, or z below the spectrum)
    ComplexFloquetPair complex_pair(lab::cplx z) const;

  private:
    struct BranchTab {
        lab::ChebInterp cheb;    // nodes in k over [(j-1) pi, j pi]
        std::vector<double> E;   // energy at the nodes (Newton seed only)
    };
    PeriodicPotential pot_;  // owned copy (fp_ refers to it)
    FundamentalPair fp_;
    BandStructure bs_;
    std::vector<BranchTab> tabs_;
    int ncheb_;

    double clamp_k(double kabs, int j) const;
    void build_branch(int j);
};

// shared cache keyed by potential and branch count
std::shared_ptr<const BlochTable> bloch_table_cached(
    const PeriodicPotential& P, int nbranch, int ncheb = 48);

}  // namespace hill
