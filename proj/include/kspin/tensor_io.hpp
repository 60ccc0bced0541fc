#pragma once

#include <iosfwd>
#include <string>

#include "kspin/tensor.hpp"

namespace kspin {

// Tensor CSV: header `# p=<p> k=<k>`, then one `r1,...,rk,weight` line per
// hyperedge with strictly increasing 1-based ids. Duplicate or non-increasing
// tuples are rejected with a line-numbered Parse error.
InteractionTensor read_tensor_csv(std::istream& in, const std::string& source = "<tensor>");
InteractionTensor read_tensor_file(const std::string& path);

// Writes entries in lexicographic tuple order with shortest round-trip weights.
void write_tensor_csv(std::ostream& out, const InteractionTensor& J);
void write_tensor_file(const std::string& path, const InteractionTensor& J);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

// Strict full-string parse; returns false on any trailing garbage.
bool parse_double(const std::string& text, double& out);
bool parse_int(const std::string& text, long long& out);

}  // namespace kspin
