#pragma once
// Band structure of -d^2/dx^2 + P: the spectrum is the set {|D(E)| <= 2}
// with D the discriminant. Monotone branches of D give one spectral branch
// per quasimomentum cell [ (j-1) pi, j pi ].
#include <vector>

#include "hill/fundamental.hpp"

namespace hill {

// One monotone branch: E interval [elo, ehi] carrying k in [(j-1)pi, j pi].
struct BandBranch {
    int j = 1;          // 1-based branch index
    double elo, ehi;    // branch endpoints (band-edge energies)
    bool gap_above;     // true if an open gap separates this branch from j+1
};

// Spectral band after merging branches across closed gaps.
struct SpectralBand {
    double elo, ehi;
    double gap_above;  // width of the gap to the next band (0 if last)
};

struct BandStructure {
    std::vector<BandBranch> branches;
    std::vector<SpectralBand> bands;
    double e_min() const { return branches.front().elo; }
};

// Scan the discriminant up to emax and assemble branches/bands.
// closed_gap_tol: monodromy-defect scale at a gap extremum below which the
// gap is treated as closed (the scan works with D^2 - 4 in a factored,
// cancellation-free form, so hairline gaps far below the |D|-2 evaluation
// noise are still resolved).
BandStructure band_structure(const FundamentalPair& fp, double emax,
                             double closed_gap_tol = 1e-10);

}  // namespace hill
