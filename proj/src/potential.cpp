#include "vcl/potential.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "vcl/error.hpp"
#include "vcl/format.hpp"

namespace vcl {

namespace {

constexpr double kMirrorTol = 1e-12;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s) {
  s = trim(s);
  double x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::ParseError, "not a number: '" + std::string(s) + "'");
  return x;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::map<std::string, double, std::less<>> parse_keyvals(std::string_view body) {
  std::map<std::string, double, std::less<>> kv;
  if (trim(body).empty()) return kv;
  for (auto item : split(body, ',')) {
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::ParseError, "expected key=value, got '" + std::string(item) + "'");
    kv.emplace(std::string(trim(item.substr(0, eq))), parse_number(item.substr(eq + 1)));
  }
  return kv;
}

double require(const std::map<std::string, double, std::less<>>& kv, std::string_view key,
               std::string_view what) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw Error(ErrorKind::ParseError, std::string(what) + " needs " + std::string(key) + "=...");
  return it->second;
}

void reject_unknown(const std::map<std::string, double, std::less<>>& kv,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : kv) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw Error(ErrorKind::ParseError, "unknown potential parameter '" + k + "'");
  }
}

}  // namespace

PotentialSpec::PotentialSpec(Shape shape, double mass) : shape_(std::move(shape)), mass_(mass) {
  validate_and_cache();
}

PotentialSpec PotentialSpec::free(double mass) { return PotentialSpec(DeltaShape{0.0}, mass); }

PotentialSpec PotentialSpec::delta(double lambda, double mass) {
  return PotentialSpec(DeltaShape{lambda}, mass);
}

PotentialSpec PotentialSpec::square_well(double v0, double a, double mass) {
  return PotentialSpec(SquareWellShape{v0, a}, mass);
}

PotentialSpec PotentialSpec::piecewise(std::vector<Segment> segments, double mass) {
  return PotentialSpec(PiecewiseShape{std::move(segments)}, mass);
}

PotentialSpec PotentialSpec::with_mass(double m) const { return PotentialSpec(shape_, m); }

PotentialSpec PotentialSpec::with_lambda(double lambda) const {
  if (!is_delta()) throw Error(ErrorKind::InvalidArgument, "with_lambda needs a delta potential");
  return PotentialSpec(DeltaShape{lambda}, mass_);
}

void PotentialSpec::validate_and_cache() {
  if (!(mass_ > 0) || !std::isfinite(mass_))
    throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  right_half_.clear();
  if (const auto* d = std::get_if<DeltaShape>(&shape_)) {
    if (!std::isfinite(d->lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be finite");
  } else if (const auto* w = std::get_if<SquareWellShape>(&shape_)) {
    if (!(w->a >= 0) || !std::isfinite(w->v0))
      throw Error(ErrorKind::InvalidArgument, "square well needs a >= 0 and finite v0");
    if (w->a > 0) right_half_.push_back({0.0, w->a, -w->v0});
  } else {
    auto segs = std::get<PiecewiseShape>(shape_).segments;
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.z_lo < y.z_lo; });
    for (const auto& s : segs) {
      if (!(s.z_hi > s.z_lo) || !std::isfinite(s.v))
        throw Error(ErrorKind::InvalidArgument, "segment needs z_lo < z_hi and finite v");
    }
    for (size_t i = 1; i < segs.size(); ++i) {
      if (std::abs(segs[i].z_lo - segs[i - 1].z_hi) > kMirrorTol)
        throw Error(ErrorKind::InvalidArgument, "segments must be contiguous and non-overlapping");
    }
    // mirror symmetry: segment i must match segment n-1-i reflected
    for (size_t i = 0, n = segs.size(); i < n; ++i) {
      const auto& s = segs[i];
      const auto& t = segs[n - 1 - i];
      if (std::abs(s.z_lo + t.z_hi) > kMirrorTol || std::abs(s.z_hi + t.z_lo) > kMirrorTol ||
          std::abs(s.v - t.v) > kMirrorTol)
        throw Error(ErrorKind::InvalidArgument, "piecewise potential is not mirror symmetric");
    }
    for (const auto& s : segs) {
      if (s.z_hi <= 0) continue;
      right_half_.push_back({std::max(s.z_lo, 0.0), s.z_hi, s.v});
    }
    std::get<PiecewiseShape>(shape_).segments = std::move(segs);
  }
}

double PotentialSpec::support() const {
  return right_half_.empty() ? 0.0 : right_half_.back().z_hi;
}

double PotentialSpec::integral() const {
  double sum = delta_strength();
  for (const auto& s : right_half_) sum += 2.0 * s.v * (s.z_hi - s.z_lo);
  return sum;
}

double PotentialSpec::delta_strength() const {
  if (const auto* d = std::get_if<DeltaShape>(&shape_)) return d->lambda;
  return 0.0;
}

bool PotentialSpec::is_free() const {
  if (delta_strength() != 0.0) return false;
  return std::all_of(right_half_.begin(), right_half_.end(), [](const Segment& s) { return s.v == 0.0; });
}

double PotentialSpec::value(double z) const {
  const double az = std::abs(z);
  for (const auto& s : right_half_) {
    if (az >= s.z_lo && az <= s.z_hi) return s.v;
  }
  return 0.0;
}

std::string PotentialSpec::tag() const {
  if (const auto* d = std::get_if<DeltaShape>(&shape_)) return "delta:lambda=" + format_double(d->lambda);
  if (const auto* w = std::get_if<SquareWellShape>(&shape_))
    return "well:v0=" + format_double(w->v0) + ",a=" + format_double(w->a);
  std::string out = "pcw:";
  const auto& segs = std::get<PiecewiseShape>(shape_).segments;
  for (size_t i = 0; i < segs.size(); ++i) {
    if (i) out += ';';
    out += format_double(segs[i].z_lo) + "," + format_double(segs[i].z_hi) + "," + format_double(segs[i].v);
  }
  return out;
}

PotentialSpec PotentialSpec::parse(std::string_view text, double mass) {
  text = trim(text);
  const auto colon = text.find(':');
  const std::string_view kind = trim(text.substr(0, colon));
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (kind == "free") return free(mass);
  if (kind == "delta") {
    auto kv = parse_keyvals(body);
    reject_unknown(kv, {"lambda"});
    auto it = kv.find("lambda");
    return delta(it == kv.end() ? 0.0 : it->second, mass);
  }
  if (kind == "well") {
    auto kv = parse_keyvals(body);
    reject_unknown(kv, {"v0", "a"});
    return square_well(require(kv, "v0", "well"), require(kv, "a", "well"), mass);
  }
  if (kind == "pcw") {
    std::vector<Segment> segs;
    for (auto piece : split(body, ';')) {
      if (trim(piece).empty()) continue;
      auto f = split(piece, ',');
      if (f.size() != 3)
        throw Error(ErrorKind::ParseError, "pcw segment needs z0,z1,v: '" + std::string(piece) + "'");
      segs.push_back({parse_number(f[0]), parse_number(f[1]), parse_number(f[2])});
    }
    if (segs.empty()) throw Error(ErrorKind::ParseError, "pcw needs at least one segment");
    return piecewise(std::move(segs), mass);
  }
  throw Error(ErrorKind::ParseError, "unknown potential '" + std::string(text) + "'");
}

nlohmann::json PotentialSpec::to_json() const {
  nlohmann::json j;
  if (const auto* d = std::get_if<DeltaShape>(&shape_)) {
    j["type"] = "delta";
    j["lambda"] = d->lambda;
  } else if (const auto* w = std::get_if<SquareWellShape>(&shape_)) {
    j["type"] = "well";
    j["v0"] = w->v0;
    j["a"] = w->a;
  } else {
    j["type"] = "pcw";
    j["segments"] = nlohmann::json::array();
    for (const auto& s : std::get<PiecewiseShape>(shape_).segments)
      j["segments"].push_back({s.z_lo, s.z_hi, s.v});
  }
  j["mass"] = mass_;
  return j;
}

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
  try {
    const double mass = j.value("mass", 1.0);
    const std::string type = j.at("type").get<std::string>();
    if (type == "delta") return delta(j.value("lambda", 0.0), mass);
    if (type == "free") return free(mass);
    if (type == "well") return square_well(j.at("v0").get<double>(), j.at("a").get<double>(), mass);
    if (type == "pcw") {
      std::vector<Segment> segs;
      for (const auto& s : j.at("segments")) segs.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()});
      return piecewise(std::move(segs), mass);
    }
    throw Error(ErrorKind::ParseError, "unknown potential type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad potential JSON: ") + e.what());
  }
}

}  // namespace vcl
