#include "kspin/samples.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "kspin/error.hpp"

namespace kspin {

SampleMatrix::SampleMatrix(std::size_t n, int p, std::vector<std::int8_t> data)
    : n_(n), p_(p), data_(std::move(data)) {
  if (n == 0) throw Error(ErrorKind::InvalidSample, "sample matrix needs at least one row");
  if (p < 1) throw Error(ErrorKind::InvalidSample, "sample matrix needs at least one column");
  if (data_.size() != n * static_cast<std::size_t>(p)) {
    throw Error(ErrorKind::Shape, "sample buffer size does not match n*p");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] != 1 && data_[i] != -1) {
      throw Error(ErrorKind::InvalidSample, "sample " + std::to_string(i / p + 1) + ", node " +
                                                std::to_string(i % p + 1) + " is not +/-1");
    }
  }
}

SampleMatrix SampleMatrix::relabeled(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != p_) {
    throw Error(ErrorKind::InvalidArgument, "permutation length does not match p");
  }
  std::vector<std::int8_t> out(data_.size());
  const auto p = static_cast<std::size_t>(p_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t v = 0; v < p; ++v) {
      out[i * p + static_cast<std::size_t>(perm[v] - 1)] = data_[i * p + v];
    }
  }
  return SampleMatrix(n_, p_, std::move(out));
}

SampleMatrix read_samples_csv(std::istream& in, const std::string& source) {
  std::vector<std::int8_t> data;
  std::size_t n = 0;
  int p = -1;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    int count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (cell == "1") {
        data.push_back(1);
      } else if (cell == "-1") {
        data.push_back(-1);
      } else {
        fail("entry " + std::to_string(count + 1) + " is '" + cell + "', expected 1 or -1");
      }
      ++count;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (p < 0) {
      p = count;
    } else if (count != p) {
      fail("row has " + std::to_string(count) + " entries, expected " + std::to_string(p));
    }
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::Parse, source + ": no sample rows");
  return SampleMatrix(n, p, std::move(data));
}

SampleMatrix read_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open samples file " + path);
  return read_samples_csv(in, path);
}

void write_samples_csv(std::ostream& out, const SampleMatrix& X, std::optional<std::uint64_t> seed) {
  out << "# p=" << X.p() << " n=" << X.n();
  if (seed) out << " seed=" << *seed;
  out << '\n';
  std::string line;
  for (std::size_t i = 0; i < X.n(); ++i) {
    line.clear();
    for (int j = 0; j < X.p(); ++j) {
      if (j) line += ',';
      line += X.at(i, j) > 0 ? "1" : "-1";
    }
    line += '\n';
    out << line;
  }
}

void write_samples_file(const std::string& path, const SampleMatrix& X, std::optional<std::uint64_t> seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write samples file " + path);
  write_samples_csv(out, X, seed);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace kspin
