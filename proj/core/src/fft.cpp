#include "msfno/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace msfno::fft {

namespace {

// FFTW planning is not thread-safe; execution via fftw_execute_dft is.
// Plans are created once per (size, direction) with FFTW_ESTIMATE so results
// are deterministic on a given platform, and FFTW_UNALIGNED so they can run
// on arbitrary caller buffers.
struct PlanCache {
    std::mutex mutex;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans;

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mutex);
        auto key = std::make_pair(n, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        fftw_complex* scratch = fftw_alloc_complex(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(std::complex<double>* buf, std::size_t n, int sign) {
    if (n == 1) return;
    fftw_plan p = cache().get(n, sign);
    auto* raw = reinterpret_cast<fftw_complex*>(buf);
    fftw_execute_dft(p, raw, raw);
}

}  // namespace

void forward(std::complex<double>* buf, std::size_t n) { execute(buf, n, FFTW_FORWARD); }

void inverse_unnormalized(std::complex<double>* buf, std::size_t n) {
    execute(buf, n, FFTW_BACKWARD);
}

}  // namespace msfno::fft
