#pragma once
// Generalized Fourier transform attached to the periodic operator
// h0 = -d2/dx2 + P: forward pairs f against the Bloch waves phi_+(x,k),
// the inverse against their conjugates, with quadrature over the branch
// cells of the quasimomentum axis (both signs of k).
//
// Conventions (free case P = 0 reduces to the classical transform):
//   (Ff)(k)  = (2 pi)^{-1/2} int phi_+(x,k) f(x) dx
//   f(x)     = (2 pi)^{-1/2} int conj(phi_+(x,k)) (Ff)(k) dk
// Plancherel: int |f|^2 dx = int |Ff|^2 dk over the covered branches.
#include <functional>
#include <memory>

#include "hill/blochwave.hpp"

namespace bloch {

// Complex samples on a uniform x-grid.
struct GridFunction {
    double x0 = 0, dx = 1;
    std::vector<lab::cplx> v;

    int size() const { return static_cast<int>(v.size()); }
    double x(int n) const { return x0 + n * dx; }
    double xmax() const { return x0 + (size() - 1) * dx; }
    // trapezoid L2 norm squared
    double norm2() const;
    // largest |v| over the grid
    double sup() const;
};

// Complex values on the transform's k-quadrature nodes.
struct SpectralFunction {
    std::vector<double> k;    // nodes, ascending over [-kmax, kmax] cells
    std::vector<double> wk;   // quadrature weights
    std::vector<int> branch;  // owning branch (1-based) of each node
    std::vector<lab::cplx> v;

    int size() const { return static_cast<int>(v.size()); }
    // weighted l2 norm squared (= int |v|^2 dk)
    double norm2() const;
};

// Uniform x-grid descriptor.
struct GridSpec {
    double x0 = -20.0;
    double dx = 0.04;
    int n = 1001;
};

class BlochTransform {
  public:
    // Panels per branch cell are refined geometrically toward the cell
    // ends (band-edge behavior of the integrands is only Hoelder there).
    BlochTransform(std::shared_ptr<const hill::BlochTable> tab, GridSpec g,
                   int panels_per_branch = 10, int gl_order = 10);

    const hill::BlochTable& table() const { return *tab_; }
    const GridSpec& grid() const { return grid_; }
    int nk() const { return static_cast<int>(knodes_.size()); }
    const std::vector<double>& knodes() const { return knodes_; }
    const std::vector<double>& kweights() const { return kweights_; }

    SpectralFunction forward(const GridFunction& f) const;
    GridFunction inverse(const SpectralFunction& fh) const;

    // |  ||f||^2 - ||Ff||^2 | / ||f||^2
    double plancherel_residual(const GridFunction& f) const;
    // throws numerical_error("k-grid underresolved ...") above tol
    void check_resolved(const GridFunction& f, double tol) const;

    // inverse( multiplier(k, E(k)) * forward(f) )
    GridFunction apply_multiplier(
        const GridFunction& f,
        const std::function<lab::cplx(double k, double E)>& m) const;
    // spectral evolution f -> e^{-i t h0} f
    GridFunction evolve(const GridFunction& f, double t) const;

    // energies at the k-nodes
    const std::vector<double>& Ek() const { return Ek_; }

  private:
    std::shared_ptr<const hill::BlochTable> tab_;
    GridSpec grid_;
    std::vector<double> knodes_, kweights_, Ek_;
    std::vector<int> kbranch_;
    // Phi(m, n) = phi_+(x_n, k_m); forward = Phi * (f dx) / sqrt(2 pi),
    // inverse = Phi^H * (fh .* wk) / sqrt(2 pi)
    std::vector<std::vector<lab::cplx>> Phi_;
};

// Least-squares power-law fit of log(values) against log(times).
struct DecayFit {
    double slope = 0, intercept = 0, r2 = 0;
};
DecayFit decay_exponent_fit(const std::vector<double>& times,
                            const std::vector<double>& values);

}  // namespace bloch
