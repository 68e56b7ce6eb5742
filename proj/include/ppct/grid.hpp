#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppct {

using Complex = std::complex<double>;

/// Raised when a computation has no defined value for the given inputs
/// (zero-variance correlation, cancelling phasors, empty subsets).
class UndefinedResult : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Dense row-major 2D array.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(check_dims(rows, cols), fill) {}
    Grid(int rows, int cols, std::vector<T> data) : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != check_dims(rows, cols))
            throw std::invalid_argument("grid data length does not match " + std::to_string(rows) + "x" +
                                        std::to_string(cols));
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int r, int c) noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept
    {
        return rows_ == other.rows() && cols_ == other.cols();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    static std::size_t check_dims(int rows, int cols)
    {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("negative grid dimension");
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using RealGrid = Grid<double>;
using ComplexGrid = Grid<Complex>;

}  // namespace ppct
