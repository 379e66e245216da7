#include "fft.hpp"

#include "scir/error.hpp"

#include <fftw3.h>

#include <mutex>

namespace scir::detail {

namespace {
// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Fft2d::Plans {
    // SIMD plans for 16-byte aligned buffers, generic plans for anything else.
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    fftw_plan forward_unaligned = nullptr;
    fftw_plan inverse_unaligned = nullptr;
    int alignment = 0;

    fftw_plan pick(bool fwd, const void* in, const void* out) const {
        const bool aligned = fftw_alignment_of(static_cast<double*>(const_cast<void*>(in))) == alignment &&
                             fftw_alignment_of(static_cast<double*>(const_cast<void*>(out))) == alignment;
        if (fwd) return aligned ? forward : forward_unaligned;
        return aligned ? inverse : inverse_unaligned;
    }
};

Fft2d::Fft2d(Size size) : size_(size), plans_(std::make_unique<Plans>()) {
    std::lock_guard lock(planner_mutex());
    auto* pa = fftw_alloc_complex(size.area());
    auto* pb = fftw_alloc_complex(size.area());
    plans_->alignment = fftw_alignment_of(reinterpret_cast<double*>(pa));
    // FFTW_ESTIMATE picks the same algorithm every run, keeping results bit-identical.
    // Row-major: height is the slow dimension.
    plans_->forward = fftw_plan_dft_2d(size.height, size.width, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->inverse = fftw_plan_dft_2d(size.height, size.width, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE);
    plans_->forward_unaligned =
        fftw_plan_dft_2d(size.height, size.width, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->inverse_unaligned =
        fftw_plan_dft_2d(size.height, size.width, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(pa);
    fftw_free(pb);
    if (!plans_->forward || !plans_->inverse || !plans_->forward_unaligned || !plans_->inverse_unaligned) {
        throw Error(Errc::InvariantViolation, "FFTW planning failed");
    }
}

Fft2d::~Fft2d() {
    std::lock_guard lock(planner_mutex());
    for (auto plan : {plans_->forward, plans_->inverse, plans_->forward_unaligned, plans_->inverse_unaligned}) {
        if (plan) fftw_destroy_plan(plan);
    }
}

void Fft2d::forward(std::span<std::complex<double>> in, std::span<std::complex<double>> out) const {
    fftw_execute_dft(plans_->pick(true, in.data(), out.data()), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void Fft2d::inverse(std::span<std::complex<double>> in, std::span<std::complex<double>> out) const {
    fftw_execute_dft(plans_->pick(false, in.data(), out.data()), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double norm = 1.0 / static_cast<double>(size_.area());
    for (auto& v : out) v *= norm;
}

}  // namespace scir::detail
