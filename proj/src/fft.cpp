#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace ppct::detail {

namespace {

// The FFTW planner is not thread-safe; plan execution is.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(int rows, int cols, FftDirection direction)
    {
        const auto key = std::make_tuple(rows, cols, direction == FftDirection::forward);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(rows) * cols);
        const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
        fftw_plan plan = fftw_plan_dft_2d(rows, cols, scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache()
{
    static PlanCache cache;
    return cache;
}

}  // namespace

void fft2_inplace(Complex* data, int rows, int cols, FftDirection direction)
{
    if (rows <= 0 || cols <= 0)
        return;
    fftw_plan plan = plan_cache().get(rows, cols, direction);
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace ppct::detail
