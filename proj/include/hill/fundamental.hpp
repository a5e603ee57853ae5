#pragma once
// Fundamental solutions of -u'' + P u = E u on [0,1] with the canonical
// initial data c(0)=1, c'(0)=0 and s(0)=0, s'(0)=1, optionally carrying
// first and second derivatives in E (variational systems), and the period
// map derived from them.
#include <array>

#include "lab/core.hpp"
#include "hill/potential.hpp"

namespace hill {

// values of (c, c', s, s') at a point
struct PairValue {
    double c, cp, s, sp;
};
struct PairValueC {
    lab::cplx c, cp, s, sp;
};

// Period map data at energy E: entries of the unit-cell transfer matrix
// M = [[c(1), s(1)], [c'(1), s'(1)]], the discriminant D = tr M and its
// E-derivatives.
struct PeriodMap {
    double c1, s1, cp1, sp1;
    double disc;      // c1 + sp1
    double disc_dE;   // d disc / dE
    double disc_dE2;  // d^2 disc / dE^2
};
struct PeriodMapC {
    lab::cplx c1, s1, cp1, sp1;
    lab::cplx disc;
};

class FundamentalPair {
  public:
    explicit FundamentalPair(const PeriodicPotential& P) : P_(&P) {}

    // integrate to x (any real); depth 0 is values only
    PairValue at(double E, double x) const;
    PairValueC at(lab::cplx E, double x) const;

    PeriodMap period_map(double E) const;          // with disc', disc''
    double discriminant(double E) const;           // cheap, depth 0
    PeriodMapC period_map(lab::cplx E) const;

    // values of (c,c',s,s') at the n+1 nodes of a uniform grid over [0,1]
    std::vector<PairValue> on_period_grid(double E, int n) const;
    std::vector<PairValueC> on_period_grid(lab::cplx E, int n) const;

    const PeriodicPotential& potential() const { return *P_; }

  private:
    const PeriodicPotential* P_;
};

}  // namespace hill
