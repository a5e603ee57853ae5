#pragma once
// Pointwise kernel of the spectral evolution e^{-i t h0}, split into the
// bounded-band part U (branches <= n0) and the tail part V (branches
// above n0, closed at the table edge K by the exact free tail plus a
// boundary correction for the perturbed-minus-free remainder).
//
// Quadrature: Filon-type panels in k.  Panel widths keep the quadratic
// and cubic phase variation small; the linear phase is integrated exactly
// through moments int u^j e^{iau} du, and the residual phase curvature is
// Taylor-folded into a degree-4 Chebyshev amplitude fit.  Wave data per
// panel node is shared across all (x, y) pairs and both signs of k.
#include <array>
#include <memory>

#include "bloch/transform.hpp"

namespace bloch {

// int_{-h/2}^{h/2} u^j e^{i a u} du for j = 0..jmax (series for small
// |a| h, upward recurrence otherwise).
std::vector<lab::cplx> filon_moments(double a, double h, int jmax);

struct KernelValue {
    lab::cplx U{0, 0}, V{0, 0};
    lab::cplx full() const { return U + V; }
};

struct KernelBatch {
    std::vector<KernelValue> vals;  // aligned with the (x, y) pair list
    double residU = 0, residV = 0;  // relative change at last refinement
    int refinements = 0;
    double est_err = 0;             // tail closure estimate (absolute)
};

class PropagatorKernel {
  public:
    // n0: number of bounded branches in U; the table's remaining branches
    // feed V, whose tail beyond the table edge is closed analytically.
    PropagatorKernel(std::shared_ptr<const hill::BlochTable> tab, int n0,
                     double tol_osc = 2e-4, int max_refine = 1);

    const hill::BlochTable& table() const { return *tab_; }
    int n0() const { return n0_; }
    double kmax() const { return tab_->kmax(); }

    // kernel values at fixed t for a batch of (x, y) pairs
    KernelBatch eval(double t,
                     const std::vector<std::array<double, 2>>& xy) const;
    KernelValue eval1(double t, double x, double y) const;

  private:
    std::shared_ptr<const hill::BlochTable> tab_;
    int n0_;
    double tol_osc_;
    int max_refine_;
    // per-branch width-rule profiles (t-independent): local bounds on
    // |Eddot| and |E'''| sampled along the branch
    struct RuleProfile {
        std::vector<double> k, b2, b3;
    };
    std::vector<RuleProfile> rules_;

    std::vector<KernelValue> pass(
        double t, const std::vector<std::array<double, 2>>& xy,
        double scale, double* est_err) const;
};

// Velocity samples for decay measurements: 0, the extremal group
// velocities of the bounded branches, and mid-band group velocities of
// up to two tail branches (each with both signs).
std::vector<double> decay_velocities(const hill::BlochTable& tab, int n0);

struct DecayMeasurement {
    std::vector<double> times, supU, supV;
    DecayFit fitU, fitV;
    std::vector<double> velocities;
};

// sup_{x in cell, y in cell + floor(v t)} |U|, |V| over the velocity set,
// fitted against t in log-log.
DecayMeasurement measure_kernel_decay(const PropagatorKernel& kern,
                                      const std::vector<double>& times,
                                      int cell_samples = 5);

}  // namespace bloch
