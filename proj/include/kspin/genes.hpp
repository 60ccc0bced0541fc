#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kspin/learner.hpp"
#include "kspin/samples.hpp"

namespace kspin {

// Expression table: one header row of column names, one row per sample.
struct GeneTable {
  std::vector<std::string> genes;            // node v is genes[v-1]
  std::vector<std::vector<double>> columns;  // columns[v-1][row]; NaN marks a non-numeric cell
  std::vector<std::string> classes;          // per-row class label, empty without a class column
  std::size_t rows() const { return columns.empty() ? classes.size() : columns.front().size(); }
};

// `class_column` (if non-empty) must exist and is held out of the genes, as
// is every column named in `ignore`. Ragged rows raise line-numbered Parse errors.
GeneTable read_gene_csv(std::istream& in, const std::string& class_column = "",
                        const std::vector<std::string>& ignore = {}, const std::string& source = "<genes>");
GeneTable read_gene_file(const std::string& path, const std::string& class_column = "",
                         const std::vector<std::string>& ignore = {});

// +1 where the value is strictly above the column mean, else -1. Returns
// nullopt (caller maps the column to all -1) when the column is constant or
// holds a non-finite value.
std::optional<std::vector<std::int8_t>> binarize_column(std::span<const double> values);

struct BinarizedCohort {
  SampleMatrix X;
  std::vector<std::string> warnings;
};

// Binarizes the given rows of the table, each column against its mean over
// those rows only.
BinarizedCohort binarize(const GeneTable& table, std::span<const std::size_t> rows);

struct GenesConfig {
  int k = 3;
  LearnConfig learn;  // RISE, BIC-tuned, support threshold 0 by default
  std::size_t top_m = 10;
};

struct NodeFrequency {
  int node = 1;
  int frequency = 0;
};

struct CohortReport {
  std::string label;  // class value, or "all"
  std::size_t samples = 0;
  std::vector<std::pair<Hyperedge, double>> top_edges;  // by |weight| descending
  std::vector<NodeFrequency> frequencies;              // over top_edges, descending, ties by node
};

struct GenesResult {
  std::vector<std::string> genes;
  std::vector<CohortReport> cohorts;  // sorted by label
  std::vector<std::string> warnings;
};

GenesResult run_genes(const GeneTable& table, const GenesConfig& cfg);

void write_top_edges_csv(std::ostream& out, const CohortReport& cohort, const std::vector<std::string>& genes);
void write_frequency_csv(std::ostream& out, const CohortReport& cohort, const std::vector<std::string>& genes);
void write_node_map_csv(std::ostream& out, const std::vector<std::string>& genes);

// Writes node_map.csv plus <label>_hyperedges.csv and <label>_node_frequency.csv
// per cohort into `dir` (created if missing). Returns the paths written.
std::vector<std::string> write_gene_reports(const std::string& dir, const GenesResult& result);

}  // namespace kspin
