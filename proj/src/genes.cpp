#include "kspin/genes.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "kspin/error.hpp"
#include "kspin/tensor_io.hpp"

namespace kspin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// Comma split honoring double-quoted fields with "" escapes.
bool split_csv(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(trim(cell));
  return !quoted;
}

std::string file_label(const std::string& label) {
  std::string out;
  for (char c : label) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  return out.empty() ? "_" : out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

GeneTable read_gene_csv(std::istream& in, const std::string& class_column, const std::vector<std::string>& ignore,
                        const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(lineno) + ": " + msg);
  };
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!split_csv(line, header)) fail("unterminated quote in header");
  }
  if (header.empty()) throw Error(ErrorKind::Parse, source + ": missing header row");

  GeneTable table;
  std::vector<int> role(header.size(), -1);  // column slot, -2 for the class column, -1 ignored
  const std::set<std::string> skipped(ignore.begin(), ignore.end());
  bool class_found = false;
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!seen.insert(header[c]).second) fail("duplicate column name '" + header[c] + "'");
    if (!class_column.empty() && header[c] == class_column) {
      role[c] = -2;
      class_found = true;
    } else if (!skipped.count(header[c])) {
      role[c] = static_cast<int>(table.genes.size());
      table.genes.push_back(header[c]);
    }
  }
  if (!class_column.empty() && !class_found) {
    throw Error(ErrorKind::InvalidArgument, source + ": class column '" + class_column + "' not found");
  }
  if (table.genes.empty()) throw Error(ErrorKind::Parse, source + ": no gene columns");
  table.columns.resize(table.genes.size());

  std::vector<std::string> cells;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!split_csv(line, cells)) fail("unterminated quote");
    if (cells.size() != header.size()) {
      fail("row has " + std::to_string(cells.size()) + " fields, expected " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (role[c] == -2) {
        table.classes.push_back(cells[c]);
      } else if (role[c] >= 0) {
        double v = 0.0;
        if (!parse_double(cells[c], v) || !std::isfinite(v)) v = std::numeric_limits<double>::quiet_NaN();
        table.columns[static_cast<std::size_t>(role[c])].push_back(v);
      }
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorKind::Parse, source + ": no sample rows");
  return table;
}

GeneTable read_gene_file(const std::string& path, const std::string& class_column,
                         const std::vector<std::string>& ignore) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open gene table " + path);
  return read_gene_csv(in, class_column, ignore, path);
}

std::optional<std::vector<std::int8_t>> binarize_column(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) return std::nullopt;
    sum += v;
  }
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    return std::nullopt;
  }
  const double mean = sum / static_cast<double>(values.size());
  std::vector<std::int8_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] > mean ? 1 : -1;
  return out;
}

BinarizedCohort binarize(const GeneTable& table, std::span<const std::size_t> rows) {
  const std::size_t n = rows.size();
  const auto p = table.genes.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "cohort has no samples");
  std::vector<std::int8_t> data(n * p, -1);
  std::vector<std::string> warnings;
  std::vector<double> values(n);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t i = 0; i < n; ++i) values[i] = table.columns[c].at(rows[i]);
    const auto spins = binarize_column(values);
    if (!spins) {
      const bool numeric = std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
      warnings.push_back("column '" + table.genes[c] + "' " + (numeric ? "is constant" : "has non-numeric cells") +
                         "; mapped to all -1");
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) data[i * p + c] = (*spins)[i];
  }
  return {SampleMatrix(n, static_cast<int>(p), std::move(data)), std::move(warnings)};
}

GenesResult run_genes(const GeneTable& table, const GenesConfig& cfg) {
  cfg.learn.validate();
  if (cfg.k < 2 || cfg.k > static_cast<int>(table.genes.size())) {
    throw Error(ErrorKind::InvalidArgument, "k must lie in [2, number of genes]");
  }
  if (cfg.top_m == 0) throw Error(ErrorKind::InvalidArgument, "top_m must be positive");

  std::map<std::string, std::vector<std::size_t>> cohorts;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    cohorts[table.classes.empty() ? std::string("all") : table.classes[i]].push_back(i);
  }

  GenesResult result;
  result.genes = table.genes;
  for (const auto& [label, rows] : cohorts) {
    auto bin = binarize(table, rows);
    for (auto& w : bin.warnings) result.warnings.push_back("cohort " + label + ": " + w);
    const RecoveryReport report = recover_tensor(bin.X, cfg.k, cfg.learn);

    CohortReport cohort;
    cohort.label = label;
    cohort.samples = rows.size();
    cohort.top_edges = ranked_edges(report.estimate);
    if (cohort.top_edges.size() > cfg.top_m) cohort.top_edges.resize(cfg.top_m);
    std::map<int, int> counts;
    for (const auto& [edge, w] : cohort.top_edges) {
      for (int v : edge) ++counts[v];
    }
    for (const auto& [v, c] : counts) cohort.frequencies.push_back({v, c});
    std::stable_sort(cohort.frequencies.begin(), cohort.frequencies.end(),
                     [](const NodeFrequency& a, const NodeFrequency& b) { return a.frequency > b.frequency; });
    result.cohorts.push_back(std::move(cohort));
  }
  return result;
}

void write_top_edges_csv(std::ostream& out, const CohortReport& cohort, const std::vector<std::string>& genes) {
  const std::size_t k = cohort.top_edges.empty() ? 0 : cohort.top_edges.front().first.size();
  out << "rank";
  for (std::size_t i = 1; i <= k; ++i) out << ",node_" << i;
  for (std::size_t i = 1; i <= k; ++i) out << ",gene_" << i;
  out << ",weight\n";
  std::size_t rank = 0;
  for (const auto& [edge, w] : cohort.top_edges) {
    out << ++rank;
    for (int v : edge) out << ',' << v;
    for (int v : edge) out << ',' << csv_field(genes[static_cast<std::size_t>(v - 1)]);
    out << ',' << format_double(w) << '\n';
  }
}

void write_frequency_csv(std::ostream& out, const CohortReport& cohort, const std::vector<std::string>& genes) {
  out << "node,gene,frequency\n";
  for (const auto& f : cohort.frequencies) {
    out << f.node << ',' << csv_field(genes[static_cast<std::size_t>(f.node - 1)]) << ',' << f.frequency << '\n';
  }
}

void write_node_map_csv(std::ostream& out, const std::vector<std::string>& genes) {
  out << "node,gene\n";
  for (std::size_t v = 0; v < genes.size(); ++v) out << v + 1 << ',' << csv_field(genes[v]) << '\n';
}

std::vector<std::string> write_gene_reports(const std::string& dir, const GenesResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, auto&& body) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    body(out);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
    written.push_back(path);
  };
  emit("node_map.csv", [&](std::ostream& o) { write_node_map_csv(o, result.genes); });
  for (const auto& c : result.cohorts) {
    const std::string stem = file_label(c.label);
    emit(stem + "_hyperedges.csv", [&](std::ostream& o) { write_top_edges_csv(o, c, result.genes); });
    emit(stem + "_node_frequency.csv", [&](std::ostream& o) { write_frequency_csv(o, c, result.genes); });
  }
  return written;
}

}  // namespace kspin
