#pragma once

#include <complex>
#include <vector>

namespace qkin {

using cdouble = std::complex<double>;

// Unnormalized in-place c2c transforms on an nr x ns row-major array
// (r index major, s index minor). Plans are created with FFTW_ESTIMATE so
// repeated runs are bit-identical. Inverse transforms divide by the
// transform length.
class FftWorkspace {
  public:
    FftWorkspace(int nr, int ns);
    ~FftWorkspace();

    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    int nr() const { return nr_; }
    int ns() const { return ns_; }

    void forward_2d(cdouble* data) const;
    void inverse_2d(cdouble* data) const;

    // Batched 1d transforms along the contiguous s rows.
    void forward_rows(cdouble* data) const;
    void inverse_rows(cdouble* data) const;

    // Batched 1d transforms along the strided r columns.
    void forward_cols(cdouble* data) const;
    void inverse_cols(cdouble* data) const;

  private:
    int nr_, ns_;
    void* plan_fwd2d_;
    void* plan_inv2d_;
    void* plan_fwd_rows_;
    void* plan_inv_rows_;
    void* plan_fwd_cols_;
    void* plan_inv_cols_;
    mutable std::vector<cdouble> scratch_;
};

// Signed frequency index for DFT bin m of an n-point transform
// (the Nyquist bin of an even-length transform maps to -n/2).
inline int freq_index(int m, int n) { return m < (n + 1) / 2 ? m : m - n; }

// One-off unnormalized 1d c2c transform (plan per call; fine for occasional
// use on analysis paths).
void fft_1d(std::vector<cdouble>& data, bool forward);

}  // namespace qkin
