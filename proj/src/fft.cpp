#include "qkin/fft.hpp"

#include <fftw3.h>

#include <stdexcept>

namespace qkin {

namespace {
fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

FftWorkspace::FftWorkspace(int nr, int ns) : nr_(nr), ns_(ns), scratch_(nr * ns) {
    if (nr < 2 || ns < 2) throw std::invalid_argument("FftWorkspace: nr, ns must be >= 2");
    fftw_complex* buf = as_fftw(scratch_.data());

    plan_fwd2d_ = fftw_plan_dft_2d(nr, ns, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_inv2d_ = fftw_plan_dft_2d(nr, ns, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);

    // nr transforms of length ns, contiguous rows.
    plan_fwd_rows_ = fftw_plan_many_dft(1, &ns_, nr_, buf, nullptr, 1, ns_, buf, nullptr, 1,
                                        ns_, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_inv_rows_ = fftw_plan_many_dft(1, &ns_, nr_, buf, nullptr, 1, ns_, buf, nullptr, 1,
                                        ns_, FFTW_BACKWARD, FFTW_ESTIMATE);

    // ns transforms of length nr, stride ns between consecutive elements.
    plan_fwd_cols_ = fftw_plan_many_dft(1, &nr_, ns_, buf, nullptr, ns_, 1, buf, nullptr, ns_,
                                        1, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_inv_cols_ = fftw_plan_many_dft(1, &nr_, ns_, buf, nullptr, ns_, 1, buf, nullptr, ns_,
                                        1, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftWorkspace::~FftWorkspace() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd2d_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv2d_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_rows_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_rows_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_cols_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_cols_));
}

void FftWorkspace::forward_2d(cdouble* data) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd2d_), as_fftw(data), as_fftw(data));
}

void FftWorkspace::inverse_2d(cdouble* data) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_inv2d_), as_fftw(data), as_fftw(data));
    const double norm = 1.0 / (static_cast<double>(nr_) * ns_);
    for (int i = 0; i < nr_ * ns_; ++i) data[i] *= norm;
}

void FftWorkspace::forward_rows(cdouble* data) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_rows_), as_fftw(data), as_fftw(data));
}

void FftWorkspace::inverse_rows(cdouble* data) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_inv_rows_), as_fftw(data), as_fftw(data));
    const double norm = 1.0 / ns_;
    for (int i = 0; i < nr_ * ns_; ++i) data[i] *= norm;
}

void fft_1d(std::vector<cdouble>& data, bool forward) {
    const int n = static_cast<int>(data.size());
    fftw_plan plan = fftw_plan_dft_1d(n, as_fftw(data.data()), as_fftw(data.data()),
                                      forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

void FftWorkspace::forward_cols(cdouble* data) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_cols_), as_fftw(data), as_fftw(data));
}

void FftWorkspace::inverse_cols(cdouble* data) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_inv_cols_), as_fftw(data), as_fftw(data));
    const double norm = 1.0 / nr_;
    for (int i = 0; i < nr_ * ns_; ++i) data[i] *= norm;
}

}  // namespace qkin
