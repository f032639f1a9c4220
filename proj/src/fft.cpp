#include "shearlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "shearlab/error.hpp"

namespace shearlab::fft {

void* aligned_alloc_bytes(std::size_t bytes) {
    void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
    if (p == nullptr) throw std::bad_alloc();
    return p;
}

void aligned_free(void* p) noexcept { fftw_free(p); }

namespace {

enum class Kind { full_2d, columns, rows, one_d };

using Key = std::tuple<Kind, int, int, int>;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan make_plan(Kind kind, int rows, int cols, int sign) {
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (buf == nullptr) throw std::bad_alloc();
    fftw_plan plan = nullptr;
    const unsigned flags = FFTW_ESTIMATE;
    switch (kind) {
        case Kind::full_2d:
            plan = fftw_plan_dft_2d(rows, cols, buf, buf, sign, flags);
            break;
        case Kind::columns: {
            int len[1] = {rows};
            plan = fftw_plan_many_dft(1, len, cols, buf, nullptr, cols, 1, buf, nullptr, cols, 1, sign, flags);
            break;
        }
        case Kind::rows: {
            int len[1] = {cols};
            plan = fftw_plan_many_dft(1, len, rows, buf, nullptr, 1, cols, buf, nullptr, 1, cols, sign, flags);
            break;
        }
        case Kind::one_d:
            plan = fftw_plan_dft_1d(cols, buf, buf, sign, flags);
            break;
    }
    fftw_free(buf);
    if (plan == nullptr) throw Error("FFTW planner failed");
    return plan;
}

fftw_plan cached_plan(Kind kind, int rows, int cols, Direction dir) {
    static std::map<Key, fftw_plan> cache;
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    std::lock_guard<std::mutex> lock(planner_mutex());
    const Key key{kind, rows, cols, sign};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_plan p = make_plan(kind, rows, cols, sign);
    cache.emplace(key, p);
    return p;
}

void run(Kind kind, CVec& data, int rows, int cols, Direction dir) {
    if (rows <= 0 || cols <= 0) throw InvalidArgument("fft: empty shape");
    if (data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw InvalidArgument("fft: buffer size does not match shape");
    }
    fftw_plan p = cached_plan(kind, rows, cols, dir);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

void dft_2d(CVec& data, int rows, int cols, Direction dir) { run(Kind::full_2d, data, rows, cols, dir); }
void dft_columns(CVec& data, int rows, int cols, Direction dir) { run(Kind::columns, data, rows, cols, dir); }
void dft_rows(CVec& data, int rows, int cols, Direction dir) { run(Kind::rows, data, rows, cols, dir); }
void dft_1d(CVec& data, Direction dir) { run(Kind::one_d, data, 1, static_cast<int>(data.size()), dir); }

}  // namespace shearlab::fft
