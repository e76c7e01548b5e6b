#include "qtp/stats.hpp"

#include <map>
#include <sstream>

#include "qtp/error.hpp"
#include "qtp/io_util.hpp"

namespace qtp {

StatsTables stats(const DatasetManifest& m) {
  if (m.entries.empty()) throw DataError("stats needs a non-empty manifest");
  std::map<int, std::array<int, 2>> hist;
  std::ostringstream norm, depth;
  norm << "name,qubits,depth_norm,gates_norm,label\n";
  depth << "name,qubits,depth,label\n";
  for (const auto& e : m.entries) {
    ++hist[e.num_qubits][e.label];
    const double q = e.num_qubits;
    norm << e.name << ',' << e.num_qubits << ',' << format_double(e.depth / q) << ','
         << format_double(e.num_gates / q) << ',' << e.label << '\n';
    depth << e.name << ',' << e.num_qubits << ',' << e.depth << ',' << e.label << '\n';
  }
  std::ostringstream h;
  h << "qubits,class0,class1\n";
  for (const auto& [q, c] : hist) h << q << ',' << c[0] << ',' << c[1] << '\n';
  return {h.str(), norm.str(), depth.str()};
}

void write_stats(const std::filesystem::path& dir, const StatsTables& t) {
  write_text_file(dir / "class_by_qubits.csv", t.qubit_histogram);
  write_text_file(dir / "depth_gates_normalized.csv", t.normalized);
  write_text_file(dir / "qubits_depth.csv", t.qubits_depth);
}

}  // namespace qtp
