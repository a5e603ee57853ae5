#pragma once
// Period-1 potentials represented by a finite trigonometric series.
#include <string>
#include <vector>

#include "lab/core.hpp"

namespace hill {

class PeriodicPotential {
  public:
    // P(x) = c0 + sum_m ( ac[m-1] cos(2 pi m x) + as[m-1] sin(2 pi m x) )
    PeriodicPotential() = default;
    PeriodicPotential(double c0, std::vector<double> ac,
                      std::vector<double> as);

    static PeriodicPotential free();                 // P = 0
    static PeriodicPotential mathieu(double a);      // P = 2 a cos(2 pi x)
    static PeriodicPotential two_mode(double a1, double a2);
    // trigonometric interpolation of uniform samples over one period
    static PeriodicPotential from_samples(const std::vector<double>& samples);

    double operator()(double x) const;
    bool is_zero() const;
    double mean() const { return c0_; }
    // stable identity for caching
    const std::string& key() const { return key_; }

  private:
    double c0_ = 0.0;
    std::vector<double> ac_, as_;
    std::string key_;
    void make_key();
};

}  // namespace hill
