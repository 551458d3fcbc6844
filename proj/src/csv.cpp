#include "aoed/csv.hpp"

#include <stdexcept>
#include <vector>

namespace aoed {

CsvWriter::CsvWriter(const std::string& path, const std::string& schema) {
  out_.open(path);
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  out_ << "# schema: " << schema << "\n";
}

void write_counters_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, CounterSnapshot>>& phases) {
  CsvWriter csv(path, "counters v1");
  csv.row("phase", "forward_like_solves", "inner_cg", "outer_cg", "newton_iters");
  for (const auto& [phase, s] : phases)
    csv.row(phase, s.forward_like, s.inner_cg, s.outer_cg, s.newton);
}

}  // namespace aoed
