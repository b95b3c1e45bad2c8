#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

namespace rwcert {

/// Dense cubic array of rank R over a dim-sized index range, row-major.
template <class T, int R>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, const T& init) : dim_(dim), data_(size_for(dim), init) {}

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size(); }

  template <class... I>
  T& operator()(I... idx) noexcept {
    static_assert(sizeof...(I) == R);
    return data_[offset(idx...)];
  }

  template <class... I>
  const T& operator()(I... idx) const noexcept {
    static_assert(sizeof...(I) == R);
    return data_[offset(idx...)];
  }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

 private:
  static std::size_t size_for(int dim) {
    std::size_t s = 1;
    for (int r = 0; r < R; ++r) s *= static_cast<std::size_t>(dim);
    return s;
  }

  template <class... I>
  std::size_t offset(I... idx) const noexcept {
    std::size_t off = 0;
    ((off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  int dim_ = 0;
  std::vector<T> data_;
};

}  // namespace rwcert
