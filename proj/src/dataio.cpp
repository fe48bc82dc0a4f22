#include "dprh/dataio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dprh {

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string pairs_to_csv(std::span<const CensoredPair> pairs) {
  std::string out = "t1,d1,t2,d2\n";
  for (const auto& p : pairs) {
    out += format_double(p.t1);
    out += p.d1 ? ",1," : ",0,";
    out += format_double(p.t2);
    out += p.d2 ? ",1\n" : ",0\n";
  }
  return out;
}

void write_pairs_csv(const std::string& path,
                     std::span<const CensoredPair> pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pairs_csv: cannot open " + path);
  out << pairs_to_csv(pairs);
  if (!out) throw std::runtime_error("write_pairs_csv: write failed for " + path);
}

std::vector<CensoredPair> read_pairs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_pairs_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_pairs_csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t1,d1,t2,d2")
    throw std::runtime_error("read_pairs_csv: expected header t1,d1,t2,d2 in " +
                             path);
  std::vector<CensoredPair> pairs;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    double values[4];
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      if (!std::getline(ss, field, ',')) {
        ok = false;
        break;
      }
      const char* begin = field.data();
      const auto parsed =
          std::from_chars(begin, begin + field.size(), values[i]);
      ok = parsed.ec == std::errc() && parsed.ptr == begin + field.size();
    }
    std::string trailing;
    if (ok && std::getline(ss, trailing, ',')) ok = false;
    if (ok)
      ok = (values[1] == 0.0 || values[1] == 1.0) &&
           (values[3] == 0.0 || values[3] == 1.0) && std::isfinite(values[0]) &&
           std::isfinite(values[2]);
    if (!ok)
      throw std::runtime_error("read_pairs_csv: malformed row at line " +
                               std::to_string(line_number) + " of " + path +
                               ": " + line);
    pairs.push_back({values[0], values[1] == 1.0, values[2], values[3] == 1.0});
  }
  if (pairs.empty())
    throw std::runtime_error("read_pairs_csv: no data rows in " + path);
  return pairs;
}

}  // namespace dprh
