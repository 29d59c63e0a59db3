#include "supersde/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace supersde::fft {

namespace {

struct PlanKey {
    int dim;
    int N;
    int sign;
    bool operator<(const PlanKey& o) const {
        if (dim != o.dim) return dim < o.dim;
        if (N != o.N) return N < o.N;
        return sign < o.sign;
    }
};

// Plans are created with FFTW_UNALIGNED so they can execute on any buffer
// (std::vector storage has no SIMD alignment guarantee). FFTW_ESTIMATE keeps
// planning deterministic and cheap.
class PlanCache {
  public:
    fftw_plan get(const TorusGrid& g, int sign) {
        const PlanKey key{g.dim, g.N, sign};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> scratch(g.size());
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p;
        if (g.dim == 2)
            p = fftw_plan_dft_2d(g.N, g.N, buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        else
            p = fftw_plan_dft_3d(g.N, g.N, g.N, buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void forward(const TorusGrid& g, std::complex<double>* data) {
    fftw_plan p = cache().get(g, FFTW_FORWARD);
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, buf, buf);
}

void backward(const TorusGrid& g, std::complex<double>* data) {
    fftw_plan p = cache().get(g, FFTW_BACKWARD);
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, buf, buf);
}

}  // namespace supersde::fft
