#pragma once

#include <complex>
#include <vector>

#include "qkin/physical_params.hpp"

namespace qkin {

using cdouble = std::complex<double>;

// Reduced density matrix rho(r, s) on a uniform periodic grid,
// r = (X + Y)/2, s = X - Y. Both axes span [-L/2, L/2) with L the extent;
// r = 0 sits at index nr/2 and s = 0 at index ns/2. Storage is row-major
// with the r index major.
class DensityMatrixGrid {
  public:
    DensityMatrixGrid(int nr, int ns, double r_extent, double s_extent);

    // Pure Gaussian wave packet: position mean q0, position spread sigma_q,
    // mean momentum p0. rho(r,s) = N exp(-(r-q0)^2/2sq^2 - s^2/8sq^2 + i p0 s/hbar).
    static DensityMatrixGrid gaussian_pure(int nr, int ns, double r_extent, double s_extent,
                                           double q0, double sigma_q, double p0, double hbar,
                                           bool normalize = true);

    // Gaussian mixture with independent momentum spread sigma_p
    // (sigma_q * sigma_p >= hbar/2 required for a physical state).
    static DensityMatrixGrid gaussian_mixed(int nr, int ns, double r_extent, double s_extent,
                                            double q0, double sigma_q, double p0,
                                            double sigma_p, double hbar,
                                            bool normalize = true);

    int nr() const { return nr_; }
    int ns() const { return ns_; }
    double r_extent() const { return r_extent_; }
    double s_extent() const { return s_extent_; }
    double dr() const { return r_extent_ / nr_; }
    double ds() const { return s_extent_ / ns_; }
    double r_at(int ir) const { return -0.5 * r_extent_ + ir * dr(); }
    double s_at(int is) const { return -0.5 * s_extent_ + is * ds(); }
    int s_zero_index() const { return ns_ / 2; }
    int r_zero_index() const { return nr_ / 2; }

    double time_stamp = 0.0;

    cdouble& at(int ir, int is) { return values_[static_cast<std::size_t>(ir) * ns_ + is]; }
    const cdouble& at(int ir, int is) const {
        return values_[static_cast<std::size_t>(ir) * ns_ + is];
    }
    cdouble* data() { return values_.data(); }
    const cdouble* data() const { return values_.data(); }
    std::size_t size() const { return values_.size(); }

    // dr * sum_r rho(r, 0); equals 1 for a normalized state.
    cdouble trace() const;

    // max_{r,s} |rho(r,-s) - conj(rho(r,s))| over the periodic grid.
    double hermiticity_defect() const;

    // min over r of Re rho(r, 0).
    double min_diagonal() const;

    // Position density rho(r, 0) (real part of the diagonal).
    std::vector<double> diagonal() const;

    // Momentum characteristic function chi(s) = dr * sum_r rho(r, s).
    std::vector<cdouble> char_function() const;

    // Off-diagonal weight sum_{s != 0} |rho|^2 dr ds.
    double offdiagonal_mass() const;

    // Grid L2 norm sqrt(sum |rho|^2 dr ds).
    double l2_norm() const;

    void scale(double factor);

  private:
    int nr_, ns_;
    double r_extent_, s_extent_;
    std::vector<cdouble> values_;
};

// max |a - b| over all grid points; grids must share shape.
double linf_distance(const DensityMatrixGrid& a, const DensityMatrixGrid& b);

}  // namespace qkin
