#include "ftsim/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ftsim {

void export_csv(const SimTrace& trace, const std::string& path) {
  if (trace.empty()) throw std::invalid_argument("export_csv: refusing to write an empty trace");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("export_csv: cannot open " + path + " for writing");

  std::fputs("t", f);
  for (const auto& name : trace.channels) std::fprintf(f, ",%s", name.c_str());
  std::fputc('\n', f);

  char buf[32];
  for (std::size_t s = 0; s < trace.n_samples(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g", trace.times[s]);
    std::fputs(buf, f);
    for (const auto& col : trace.columns) {
      std::snprintf(buf, sizeof buf, ",%.17g", col[s]);
      std::fputs(buf, f);
    }
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("export_csv: write to " + path + " failed");
}

SimTrace read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);

  SimTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: " + path + " is empty");
  {
    std::istringstream hs(line);
    std::string name;
    bool first = true;
    while (std::getline(hs, name, ',')) {
      if (first) {
        if (name != "t") throw std::runtime_error("read_csv: first column must be 't'");
        first = false;
      } else
        trace.channels.push_back(name);
    }
  }
  trace.columns.assign(trace.channels.size(), {});

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const char* p = line.c_str();
    char* end = nullptr;
    double t = std::strtod(p, &end);
    if (end == p)
      throw std::runtime_error("read_csv: " + path + ":" + std::to_string(lineno) + ": bad time");
    trace.times.push_back(t);
    p = end;
    for (std::size_t c = 0; c < trace.columns.size(); ++c) {
      if (*p != ',')
        throw std::runtime_error("read_csv: " + path + ":" + std::to_string(lineno) +
                                 ": expected " + std::to_string(trace.columns.size()) +
                                 " value columns");
      ++p;
      double v = std::strtod(p, &end);
      if (end == p)
        throw std::runtime_error("read_csv: " + path + ":" + std::to_string(lineno) +
                                 ": bad value in column " + std::to_string(c + 2));
      trace.columns[c].push_back(v);
      p = end;
    }
  }
  if (trace.times.empty()) throw std::runtime_error("read_csv: " + path + " has no samples");
  return trace;
}

}  // namespace ftsim
