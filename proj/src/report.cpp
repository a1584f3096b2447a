#include "gff/report.hpp"

#include <json.hpp>

#include <cstring>
#include <ostream>

#include "gff/errors.hpp"

namespace gff {

std::string report_json(const EstimateReport& rep, std::uint64_t config_hash) {
  nlohmann::ordered_json j;
  j["quantity"] = rep.quantity;
  j["estimate"] = rep.estimate;
  j["stderr"] = rep.stderr_value;
  j["replicas"] = rep.replicas;
  j["seed"] = rep.seed;
  j["stream"] = rep.stream;
  j["tilt"] = rep.tilt;
  j["route"] = rep.route;
  j["bound_only"] = rep.bound_only;
  if (rep.bound_only) j["bound_kind"] = rep.bound_kind;
  j["ess"] = rep.ess;
  j["aborted"] = rep.aborted;
  nlohmann::ordered_json extra;
  for (const auto& [k, v] : rep.extra) extra[k] = v;
  j["extra"] = extra;
  j["config_hash"] = config_hash;
  return j.dump();
}

void write_sites_csv(std::ostream& os, const SiteList& sites) {
  os << "x,y\n";
  for (Site s : sites) os << s.x << ',' << s.y << '\n';
}

void write_field_csv(std::ostream& os, const ScalarField& field) {
  os << "x,y,value\n";
  char buf[64];
  for (int i = 0; i < field.domain().size(); ++i) {
    const Site s = field.domain().site(i);
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", s.x, s.y,
                  field.values()[i]);
    os << buf;
  }
}

void write_measure_csv(std::ostream& os, const BoundaryMeasure& measure) {
  os << "x,y,weight\n";
  char buf[64];
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const Site s = measure.support()[i];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", s.x, s.y,
                  measure.weight(i));
    os << buf;
  }
}

namespace {
constexpr char kGreenMagic[4] = {'G', 'F', 'F', 'G'};
constexpr std::uint32_t kGreenVersion = 1;
}  // namespace

void write_green_binary(std::ostream& os, const GreenMatrix& g) {
  os.write(kGreenMagic, 4);
  os.write(reinterpret_cast<const char*>(&kGreenVersion), 4);
  const std::uint64_t n = static_cast<std::uint64_t>(g.domain->size());
  os.write(reinterpret_cast<const char*>(&n), 8);
  for (Site s : g.domain->sites()) {
    os.write(reinterpret_cast<const char*>(&s.x), 4);
    os.write(reinterpret_cast<const char*>(&s.y), 4);
  }
  // Row-major to honor the declared layout (Eigen stores column-major).
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) {
      const double v = g.values(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j));
      os.write(reinterpret_cast<const char*>(&v), 8);
    }
}

GreenMatrix read_green_binary(std::istream& is) {
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&n), 8);
  if (!is || std::memcmp(magic, kGreenMagic, 4) != 0 || version != kGreenVersion)
    throw Error("read_green_binary: bad header");
  SiteList sites(n);
  for (auto& s : sites) {
    is.read(reinterpret_cast<char*>(&s.x), 4);
    is.read(reinterpret_cast<char*>(&s.y), 4);
  }
  GreenMatrix g;
  g.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) {
      double v;
      is.read(reinterpret_cast<char*>(&v), 8);
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  if (!is) throw Error("read_green_binary: truncated payload");
  g.domain = make_domain(std::move(sites));
  return g;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace gff
