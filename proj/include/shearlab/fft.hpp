#pragma once

// Thin FFTW3 wrapper.  Plans are created once per shape with FFTW_ESTIMATE
// (deterministic algorithm choice) under a global lock and cached; execution
// uses the new-array interface and is thread-safe.  All transforms are
// in-place on buffers from FftwAllocator (SIMD-aligned).

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace shearlab::fft {

void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p) noexcept;

template <typename T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <typename U>
    FftwAllocator(const FftwAllocator<U>&) noexcept {}
    T* allocate(std::size_t n) { return static_cast<T*>(aligned_alloc_bytes(n * sizeof(T))); }
    void deallocate(T* p, std::size_t) noexcept { aligned_free(p); }
    template <typename U>
    bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using cplx = std::complex<double>;
using CVec = std::vector<cplx, FftwAllocator<cplx>>;

enum class Direction { forward = -1, backward = +1 };

/// Unnormalized 2-D DFT of a row-major (rows x cols) array.
void dft_2d(CVec& data, int rows, int cols, Direction dir);

/// Unnormalized 1-D DFT of every column (length `rows`, stride `cols`).
void dft_columns(CVec& data, int rows, int cols, Direction dir);

/// Unnormalized 1-D DFT of every row (length `cols`).
void dft_rows(CVec& data, int rows, int cols, Direction dir);

/// Unnormalized 1-D DFT of a contiguous array.
void dft_1d(CVec& data, Direction dir);

}  // namespace shearlab::fft
