#include "polymer/field.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pldp {

void MapField::set(int t, std::span<const Coord> x, double v) {
  values_[Key{t, pack_point(x)}] = v;
}

double MapField::at(int t, std::span<const Coord> x) const {
  auto it = values_.find(Key{t, pack_point(x)});
  if (it == values_.end()) {
    std::ostringstream oss;
    oss << "field: missing site t=" << t << " x=(";
    for (std::size_t i = 0; i < x.size(); ++i)
      oss << (i ? "," : "") << x[i];
    oss << ")";
    throw std::out_of_range(oss.str());
  }
  return it->second;
}

void dump_field(std::ostream& os, const GeneratedField& field, int T,
                std::uint64_t seed, std::uint64_t stream) {
  const int d = field.dim();
  os << "# polymer-ldp field v1\n";
  os << "# dim " << d << " T " << T << " seed " << seed << " stream " << stream
     << " model " << field.distribution().model().hash() << "\n";
  char buf[32];
  for (int t = 0; t < T; ++t) {
    const auto pts = cone_slice_points(d, t);
    const std::size_t n = pts.size() / static_cast<std::size_t>(d);
    for (std::size_t i = 0; i < n; ++i) {
      std::span<const Coord> x(&pts[i * d], static_cast<std::size_t>(d));
      os << t;
      for (Coord c : x) os << ' ' << c;
      std::snprintf(buf, sizeof(buf), "%.17g", field.at(t, x));
      os << ' ' << buf << '\n';
    }
  }
}

MapField load_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# polymer-ldp field", 0) != 0)
    throw std::runtime_error("field load: bad magic line");
  if (!std::getline(is, line) || line.rfind("# dim ", 0) != 0)
    throw std::runtime_error("field load: bad header line");
  int d = 0;
  {
    std::istringstream hs(line.substr(2));
    std::string tag;
    hs >> tag >> d;
    if (tag != "dim" || d < 1) throw std::runtime_error("field load: bad dim");
  }
  MapField field(d);
  std::vector<Coord> x(static_cast<std::size_t>(d));
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int t = 0;
    double v = 0.0;
    ls >> t;
    for (int i = 0; i < d; ++i) ls >> x[static_cast<std::size_t>(i)];
    ls >> v;
    if (!ls) throw std::runtime_error("field load: bad row: " + line);
    field.set(t, x, v);
  }
  return field;
}

}  // namespace pldp
