#pragma once

#include <string>

#include "rw/cantor.hpp"
#include "rw/measure.hpp"

namespace rw {

// Shortest decimal string that round-trips the double bit-exactly.
std::string double_to_string(double v);
double string_to_double(const std::string& s);

// Measure file format: JSON {d, s, atoms: [[x..., w], ...]} with coordinates
// and weights as decimal strings.
std::string measure_to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const std::string& text);
void save_measure(const AtomicMeasure& mu, const std::string& path);
AtomicMeasure load_measure(const std::string& path);

// Tree file: levels, cells (atom indices, balls), covers, mu' weights, and the
// verification report.  Loading requires the generating measure.
std::string tree_to_json(const CantorTree& tree);
CantorTree tree_from_json(const std::string& text, const AtomicMeasure& mu);
void save_tree(const CantorTree& tree, const std::string& path);
CantorTree load_tree(const std::string& path, const AtomicMeasure& mu);

}  // namespace rw
