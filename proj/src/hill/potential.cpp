#include "hill/potential.hpp"

#include <cstdio>

namespace hill {

PeriodicPotential::PeriodicPotential(double c0, std::vector<double> ac,
                                     std::vector<double> as)
    : c0_(c0), ac_(std::move(ac)), as_(std::move(as)) {
    make_key();
}

PeriodicPotential PeriodicPotential::free() { return {}; }

PeriodicPotential PeriodicPotential::mathieu(double a) {
    return PeriodicPotential(0.0, {2.0 * a}, {});
}

PeriodicPotential PeriodicPotential::two_mode(double a1, double a2) {
    return PeriodicPotential(0.0, {2.0 * a1, 2.0 * a2}, {});
}

PeriodicPotential PeriodicPotential::from_samples(
    const std::vector<double>& samples) {
    // naive DFT of one period; keeps modes up to n/2 (real series)
    int n = static_cast<int>(samples.size());
    if (n < 2) throw lab::validation_error("potential samples: need >= 2");
    double c0 = 0;
    for (double v : samples) c0 += v;
    c0 /= n;
    int mmax = (n - 1) / 2;
    std::vector<double> ac(mmax, 0.0), as(mmax, 0.0);
    for (int m = 1; m <= mmax; ++m) {
        double cr = 0, ci = 0;
        for (int q = 0; q < n; ++q) {
            double ph = 2 * lab::pi * m * q / n;
            cr += samples[q] * std::cos(ph);
            ci += samples[q] * std::sin(ph);
        }
        ac[m - 1] = 2.0 * cr / n;
        as[m - 1] = 2.0 * ci / n;
    }
    return PeriodicPotential(c0, std::move(ac), std::move(as));
}

double PeriodicPotential::operator()(double x) const {
    double v = c0_;
    for (size_t m = 0; m < ac_.size(); ++m) {
        double ph = 2 * lab::pi * (m + 1) * x;
        v += ac_[m] * std::cos(ph);
        if (m < as_.size() && as_[m] != 0.0) v += as_[m] * std::sin(ph);
    }
    return v;
}

bool PeriodicPotential::is_zero() const {
    if (c0_ != 0.0) return false;
    for (double a : ac_)
        if (a != 0.0) return false;
    for (double a : as_)
        if (a != 0.0) return false;
    return true;
}

void PeriodicPotential::make_key() {
    char buf[64];
    key_ = "pot";
    std::snprintf(buf, sizeof buf, ":%.17g", c0_);
    key_ += buf;
    for (double a : ac_) {
        std::snprintf(buf, sizeof buf, ":c%.17g", a);
        key_ += buf;
    }
    for (double a : as_) {
        std::snprintf(buf, sizeof buf, ":s%.17g", a);
        key_ += buf;
    }
}

}  // namespace hill
