#include "clansim/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "clansim/errors.hpp"

namespace clansim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace

const std::vector<std::string>& spec_keys() {
  static const std::vector<std::string> keys = {
      "family", "dimension", "lambda_plus", "lambda_minus", "lambda", "radius",
      "half_length", "lattice", "orientation", "h", "j_plus", "j_minus",
      "beta", "lmax", "envelope_inflation", "cell_size"};
  return keys;
}

ModelSpec ModelSpec::parse(std::istream& in) {
  ModelSpec s;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kParseError, "line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& known = spec_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorCode::kParseError, "line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (s.has(key))
      throw Error(ErrorCode::kParseError, "line " + std::to_string(number) + ": duplicate key '" + key + "'");
    s.set(key, value);
  }
  if (!s.has("family")) throw Error(ErrorCode::kParseError, "spec lacks 'family'");
  return s;
}

ModelSpec ModelSpec::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ModelSpec ModelSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open spec file " + path);
  return parse(in);
}

bool ModelSpec::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& ModelSpec::get(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  throw Error(ErrorCode::kParseError, "spec lacks '" + key + "'");
}

std::string ModelSpec::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double ModelSpec::number(const std::string& key) const { return parse_real(get(key)); }

double ModelSpec::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int ModelSpec::integer_or(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = number(key);
  if (v != std::floor(v)) throw Error(ErrorCode::kParseError, "'" + key + "' must be an integer");
  return static_cast<int>(v);
}

void ModelSpec::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_)
    if (e.first == key) {
      e.second = value;
      return;
    }
  entries_.emplace_back(key, value);
  std::sort(entries_.begin(), entries_.end());
}

std::string ModelSpec::canonical() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += (s.empty() ? "" : ";") + k + "=" + v;
  return s;
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return kInfinity;
  double v = 0.0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || t.empty())
    throw Error(ErrorCode::kParseError, "not a number: '" + t + "'");
  return v;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ','))
    if (!part.empty()) out.push_back(parse_real(part));
  return out;
}

StepFunction parse_step_function(const std::string& text) {
  StepFunction f;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::kParseError, "step needs radius:value, got '" + part + "'");
    f.steps.emplace_back(parse_real(part.substr(0, colon)), parse_real(part.substr(colon + 1)));
  }
  return f;
}

MarkMeasure parse_orientation(const std::string& text) {
  MarkMeasure m;
  if (trim(text) == "uniform") {
    m.uniform_angle = 1.0;
    return m;
  }
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    const auto colon = part.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::kParseError, "orientation needs angle:weight, got '" + part + "'");
    m.atoms.emplace_back(Angle{parse_real(part.substr(0, colon))}, parse_real(part.substr(colon + 1)));
  }
  return m;
}

Box parse_box(const std::string& text) {
  Box b;
  const auto parts = split(text, ',');
  if (parts.empty() || static_cast<int>(parts.size()) > kMaxDim)
    throw Error(ErrorCode::kParseError, "box needs 1..3 intervals lo:hi");
  b.dim = static_cast<int>(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto colon = parts[i].find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::kParseError, "interval needs lo:hi");
    b.lo[i] = parse_real(parts[i].substr(0, colon));
    b.hi[i] = parse_real(parts[i].substr(colon + 1));
    if (!(b.lo[i] <= b.hi[i])) throw Error(ErrorCode::kParseError, "interval with lo > hi");
  }
  return b;
}

ModelPtr build_model(const ModelSpec& spec) {
  const std::string family = spec.get("family");
  const int dim = spec.integer_or("dimension", 2);
  const double lambda = spec.number_or("lambda", 0.0);
  const double lp = spec.number_or("lambda_plus", lambda);
  const double lm = spec.number_or("lambda_minus", lambda);
  const double inflation = spec.number_or("envelope_inflation", 0.0);
  if (family == "discrete_wr") {
    WidomRowlinson::Params p;
    p.dim = dim;
    p.lambda_plus = lp;
    p.lambda_minus = lm;
    p.radius = spec.integer_or("radius", 1);
    p.spacing = 1.0;
    p.same_site_exclusion = true;
    p.envelope_inflation = inflation;
    return std::make_shared<WidomRowlinson>(p);
  }
  if (family == "continuum_wr")
    return WidomRowlinson::continuum(dim, lp, lm, spec.number_or("radius", 0.5), inflation);
  if (family == "generalized_wr") {
    GeneralizedWidomRowlinson::Params p;
    p.dim = dim;
    p.lambda_plus = lp;
    p.lambda_minus = lm;
    p.h = parse_step_function(spec.get_or("h", ""));
    p.j_plus = parse_step_function(spec.get_or("j_plus", ""));
    p.j_minus = parse_step_function(spec.get_or("j_minus", ""));
    p.envelope_inflation = inflation;
    return std::make_shared<GeneralizedWidomRowlinson>(p);
  }
  if (family == "thin_rods") {
    ThinRods::Params p;
    const std::string lat = spec.get_or("lattice", "false");
    p.lattice = lat == "true" || lat == "1";
    p.lambda = lambda;
    p.half_length = spec.number_or("half_length", 0.5);
    p.orientation = parse_orientation(spec.get_or("orientation", "uniform"));
    p.envelope_inflation = inflation;
    return std::make_shared<ThinRods>(p);
  }
  if (family == "peierls") {
    const int lmax = spec.integer_or("lmax", 10);
    auto catalog = std::make_shared<const ContourCatalog>(ContourCatalog::enumerate(lmax));
    return std::make_shared<PeierlsContours>(spec.number("beta"), catalog);
  }
  throw Error(ErrorCode::kParseError, "unknown family '" + family + "'");
}

std::uint64_t model_hash(const ModelSpec& spec) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : spec.canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string mark_text(const Mark& m) {
  if (const auto* s = std::get_if<Spin>(&m)) return *s == kPlus ? "+" : "-";
  if (const auto* a = std::get_if<Angle>(&m)) return "a:" + format_real(a->radians);
  return "c:" + std::to_string(std::get<ShapeId>(m).index);
}

void write_sample_header(std::ostream& out, int dim) {
  out << "replica,epsilon";
  for (int i = 0; i < dim; ++i) out << ",x" << i;
  out << ",mark,multiplicity\n";
}

void write_sample_rows(std::ostream& out, const SampleRow& row) {
  for (const auto& e : row.config.entries()) {
    out << row.replica << ',' << format_real(row.epsilon);
    for (int i = 0; i < e.particle.x.dim; ++i) out << ',' << format_real(e.particle.x[i]);
    out << ',' << mark_text(e.particle.mark) << ',' << e.multiplicity << '\n';
  }
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& f : fields_)
    if (f.first == key) {
      f.second = value;
      return;
    }
  fields_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_real(value)); }

std::string Manifest::text() const {
  std::string s;
  for (const auto& [k, v] : fields_) s += k + "=" + v + "\n";
  return s;
}

void Manifest::write_for(const std::string& output_path) const {
  std::ofstream out(output_path + ".manifest");
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + output_path + ".manifest");
  out << text();
}

}  // namespace clansim
