#include "kspin/tensor_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <regex>
#include <unordered_set>
#include <vector>

#include "kspin/error.hpp"

namespace kspin {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool parse_double(const std::string& text, double& out) {
  std::size_t b = text.find_first_not_of(" \t");
  std::size_t e = text.find_last_not_of(" \t");
  if (b == std::string::npos) return false;
  const char* first = text.data() + b;
  const char* last = text.data() + e + 1;
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_int(const std::string& text, long long& out) {
  std::size_t b = text.find_first_not_of(" \t");
  std::size_t e = text.find_last_not_of(" \t");
  if (b == std::string::npos) return false;
  const char* first = text.data() + b;
  const char* last = text.data() + e + 1;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

InteractionTensor read_tensor_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(lineno) + ": " + msg);
  };
  int p = 0;
  int k = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    static const std::regex header(R"(^#\s*p=(\d+)\s+k=(\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(line, m, header)) fail("expected header '# p=<p> k=<k>'");
    p = std::stoi(m[1].str());
    k = std::stoi(m[2].str());
    break;
  }
  if (p == 0) throw Error(ErrorKind::Parse, source + ": missing '# p=<p> k=<k>' header");
  std::optional<InteractionTensor> parsed;
  try {
    parsed.emplace(p, k);
  } catch (const Error& e) {
    fail(e.what());
  }
  InteractionTensor& J = *parsed;
  std::unordered_set<Hyperedge, HyperedgeHash> seen;
  std::vector<std::string> cells;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    cells.clear();
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (static_cast<int>(cells.size()) != k + 1) {
      fail("expected " + std::to_string(k) + " node ids and a weight");
    }
    Hyperedge e;
    for (int i = 0; i < k; ++i) {
      long long v = 0;
      if (!parse_int(cells[i], v)) fail("node id '" + cells[i] + "' is not an integer");
      if (v < 1 || v > p) fail("node id " + cells[i] + " outside [1," + std::to_string(p) + "]");
      if (!e.empty() && v <= e.back()) fail("node ids are not strictly increasing");
      e.push_back(static_cast<int>(v));
    }
    double w = 0.0;
    if (!parse_double(cells[k], w) || !std::isfinite(w)) fail("weight '" + cells[k] + "' is not a finite number");
    if (!seen.insert(e).second) fail("duplicate hyperedge");
    J.set(e, w);
  }
  return std::move(*parsed);
}

InteractionTensor read_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open tensor file " + path);
  return read_tensor_csv(in, path);
}

void write_tensor_csv(std::ostream& out, const InteractionTensor& J) {
  out << "# p=" << J.p() << " k=" << J.k() << '\n';
  for (const auto& [edge, w] : J.sorted_entries()) {
    for (int v : edge) out << v << ',';
    out << format_double(w) << '\n';
  }
}

void write_tensor_file(const std::string& path, const InteractionTensor& J) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write tensor file " + path);
  write_tensor_csv(out, J);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace kspin
