#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kspin/tensor.hpp"

namespace kspin {

/// n x p matrix of +/-1 spins, row-major. Immutable once built.
class SampleMatrix {
 public:
  // Validates every entry; throws InvalidSample on anything but +/-1.
  SampleMatrix(std::size_t n, int p, std::vector<std::int8_t> data);

  std::size_t n() const noexcept { return n_; }
  int p() const noexcept { return p_; }

  SpinView row(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(p_), static_cast<std::size_t>(p_)};
  }
  // Spin of node `col + 1` in sample i.
  std::int8_t at(std::size_t i, int col) const {
    return data_[i * static_cast<std::size_t>(p_) + static_cast<std::size_t>(col)];
  }
  const std::vector<std::int8_t>& data() const noexcept { return data_; }

  // Columns permuted so that node r of the result is node perm^{-1}(r) of this,
  // i.e. the spin of old node v moves to new node perm[v-1].
  SampleMatrix relabeled(std::span<const int> perm) const;

  friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

 private:
  std::size_t n_;
  int p_;
  std::vector<std::int8_t> data_;
};

// Samples CSV: one row per observation, p entries each exactly 1 or -1.
// Lines starting with '#' are comments (the writer emits `# p=.. n=.. seed=..`).
// Malformed rows raise Parse errors naming `source` and the 1-based line number.
SampleMatrix read_samples_csv(std::istream& in, const std::string& source = "<samples>");
SampleMatrix read_samples_file(const std::string& path);
void write_samples_csv(std::ostream& out, const SampleMatrix& X,
                       std::optional<std::uint64_t> seed = std::nullopt);
void write_samples_file(const std::string& path, const SampleMatrix& X,
                        std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace kspin
