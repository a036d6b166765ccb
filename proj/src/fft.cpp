#include "otdoa/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace otdoa {

namespace {

// Plans are created once per (size, direction) and executed with the
// new-array interface, which FFTW allows from any thread.
fftw_plan plan_for(int n, FftDirection dir) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::lock_guard lock(mutex);
    const auto key = std::make_pair(n, static_cast<int>(dir));
    if (auto it = plans.find(key); it != plans.end()) return it->second;

    auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    const int sign = dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans.emplace(key, p);
    return p;
}

}  // namespace

void dft(std::span<const cplx> in, std::span<cplx> out, FftDirection dir) {
    if (in.size() != out.size() || in.empty()) throw Error("dft: size mismatch");
    const int n = static_cast<int>(in.size());
    fftw_plan p = plan_for(n, dir);
    if (in.data() == out.data()) {
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(out.data()), reinterpret_cast<fftw_complex*>(out.data()));
        return;
    }
    // FFTW's out-of-place new-array execute needs a writable input; copy into out first.
    std::copy(in.begin(), in.end(), out.begin());
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(out.data()), reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace otdoa
