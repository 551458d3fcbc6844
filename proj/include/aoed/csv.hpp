#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aoed/counters.hpp"

namespace aoed {

// CSV writer with a versioned schema line. All doubles are written with 17
// significant digits so reruns are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& schema);

  template <typename... Args>
  void row(const Args&... args) {
    std::ostringstream line;
    line.precision(17);
    bool first = true;
    ((line << (first ? "" : ","), first = false, line << args), ...);
    out_ << line.str() << "\n";
  }

 private:
  std::ofstream out_;
};

void write_counters_csv(const std::string& path,
                        const std::vector<std::pair<std::string, CounterSnapshot>>& phases);

}  // namespace aoed
