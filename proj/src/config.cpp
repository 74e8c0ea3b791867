#include "hartree/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "hartree/errors.hpp"

namespace hartree {

namespace {

using Complex = std::complex<double>;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

/// Parsed sections with bookkeeping of which keys were consumed.
class KeyValueDocument {
 public:
  KeyValueDocument(std::istream& in, std::string source) : source_(std::move(source)) {
    static const std::set<std::string> kSections = {"domain", "time",    "potential", "kernel",
                                                    "coupling", "initial", "solver",   "output"};
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (text.empty()) continue;
      if (text.front() == '[') {
        if (text.back() != ']') fail(line, "unterminated section header");
        section = trim(text.substr(1, text.size() - 2));
        if (!kSections.count(section)) fail(line, "unknown section [" + section + "]");
        if (!seen_sections_.insert(section).second) fail(line, "duplicate section [" + section + "]");
        entries_[section];
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string::npos) fail(line, "expected 'key = value'");
      if (section.empty()) fail(line, "key outside of any [section]");
      const std::string key = trim(text.substr(0, eq));
      const std::string value = trim(text.substr(eq + 1));
      if (key.empty()) fail(line, "empty key");
      if (value.empty()) fail(line, "empty value for '" + section + "." + key + "'");
      auto& bucket = entries_[section];
      if (bucket.count(key)) fail(line, "duplicate key '" + section + "." + key + "'");
      bucket[key] = {value, line};
    }
  }

  bool has_section(const std::string& section) const { return entries_.count(section) > 0; }

  std::optional<Entry> take(const std::string& section, const std::string& key) {
    const auto s = entries_.find(section);
    if (s == entries_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    used_.insert(section + "." + key);
    return k->second;
  }

  Entry require(const std::string& section, const std::string& key) {
    auto e = take(section, key);
    if (!e) throw ConfigError(source_ + ": missing required key '" + section + "." + key + "'");
    return *e;
  }

  double number(const std::string& section, const std::string& key, std::optional<double> fallback = {}) {
    auto e = fallback ? take(section, key) : std::optional<Entry>(require(section, key));
    if (!e) return *fallback;
    return parse_double(*e, section + "." + key);
  }

  long long integer(const std::string& section, const std::string& key, std::optional<long long> fallback = {}) {
    auto e = fallback ? take(section, key) : std::optional<Entry>(require(section, key));
    if (!e) return *fallback;
    long long v = 0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(e->line, "'" + section + "." + key + "' must be an integer");
    return v;
  }

  std::string word(const std::string& section, const std::string& key, std::optional<std::string> fallback = {}) {
    auto e = fallback ? take(section, key) : std::optional<Entry>(require(section, key));
    return e ? e->value : *fallback;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) {
    const Entry e = require(section, key);
    std::vector<double> out;
    std::istringstream is(e.value);
    std::string token;
    while (is >> token) out.push_back(parse_double({token, e.line}, section + "." + key));
    return out;
  }

  /// Every key that was never consumed is an error.
  void reject_unused() const {
    for (const auto& [section, bucket] : entries_) {
      for (const auto& [key, entry] : bucket) {
        if (!used_.count(section + "." + key)) {
          fail(entry.line, "unknown key '" + section + "." + key + "'");
        }
      }
    }
  }

  int line_of(const std::string& section, const std::string& key) const {
    const auto s = entries_.find(section);
    if (s == entries_.end()) return 0;
    const auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.line;
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message);
  }

  [[noreturn]] void invalid(const std::string& section, const std::string& key, const std::string& message) const {
    const int line = line_of(section, key);
    throw ConfigError(source_ + (line ? ":" + std::to_string(line) : std::string()) + ": invalid '" + section +
                      "." + key + "': " + message);
  }

 private:
  double parse_double(const Entry& e, const std::string& name) const {
    double v = 0.0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail(e.line, "'" + name + "' must be a finite number");
    return v;
  }

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> entries_;
  std::set<std::string> seen_sections_;
  std::set<std::string> used_;
};

}  // namespace

double PotentialSpec::evaluate(double x, double y, double side_length) const {
  const double dx = x - 0.5 * side_length;
  const double dy = y - 0.5 * side_length;
  const double r2 = dx * dx + dy * dy;
  switch (family) {
    case Family::none:
      return 0.0;
    case Family::harmonic:
      return 0.5 * strength * r2 * smooth_plateau(x, y, margin, side_length);
    case Family::gaussian_well:
      return -depth * std::exp(-r2 / (2.0 * sigma * sigma));
  }
  return 0.0;
}

Field InitialSpec::field(double side_length) const {
  Field f;
  if (family == Family::eigenmode) {
    const double kx = p * std::numbers::pi / side_length;
    const double ky = q * std::numbers::pi / side_length;
    const double a = amplitude;
    f.value = [=](double x, double y) { return Complex(a * std::sin(kx * x) * std::sin(ky * y)); };
    f.gradient = [=](double x, double y) {
      return std::array<Complex, 2>{Complex(a * kx * std::cos(kx * x) * std::sin(ky * y)),
                                    Complex(a * ky * std::sin(kx * x) * std::cos(ky * y))};
    };
    return f;
  }
  const InitialSpec s = *this;
  f.value = [s](double x, double y) {
    const double dx = x - s.center_x;
    const double dy = y - s.center_y;
    const double envelope = s.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * s.width * s.width));
    return envelope * std::polar(1.0, s.momentum_x * x + s.momentum_y * y);
  };
  f.gradient = [s, value = f.value](double x, double y) {
    const Complex v = value(x, y);
    const double w2 = s.width * s.width;
    return std::array<Complex, 2>{v * Complex(-(x - s.center_x) / w2, s.momentum_x),
                                  v * Complex(-(y - s.center_y) / w2, s.momentum_y)};
  };
  return f;
}

Complex ExactSolution::phase(double t) const { return std::polar(1.0, -frequency * t); }

Field ExactSolution::at(double t) const {
  const Complex c = phase(t);
  Field f;
  f.value = [base = profile, c](double x, double y) { return c * base.value(x, y); };
  f.gradient = [base = profile, c](double x, double y) {
    auto g = base.gradient(x, y);
    return std::array<Complex, 2>{c * g[0], c * g[1]};
  };
  return f;
}

std::optional<ExactSolution> ProblemSpec::exact_solution() const {
  const bool linear = coupling.is_zero();
  if (!linear || potential.family != PotentialSpec::Family::none || initial.family != InitialSpec::Family::eigenmode) {
    return std::nullopt;
  }
  const double d = side_length;
  return ExactSolution{initial.field(d),
                       (initial.p * initial.p + initial.q * initial.q) * std::numbers::pi * std::numbers::pi / (d * d)};
}

ProblemSpec parse_config(std::istream& in, const std::string& source) {
  KeyValueDocument doc(in, source);
  ProblemSpec spec;

  spec.side_length = doc.number("domain", "side_length");
  if (!(spec.side_length > 0.0)) doc.invalid("domain", "side_length", "must be positive");
  const long long nodes = doc.integer("domain", "nodes_per_side");
  if (nodes < 3 || nodes > 100000) doc.invalid("domain", "nodes_per_side", "must be at least 3");
  spec.nodes_per_side = static_cast<int>(nodes);
  const double d = spec.side_length;

  spec.horizon = doc.number("time", "horizon");
  const long long steps = doc.integer("time", "steps");
  if (steps < 0) doc.invalid("time", "steps", "must be nonnegative");
  spec.steps = static_cast<std::size_t>(steps);
  const std::string scheme = doc.word("time", "scheme");
  if (scheme == "coherent") {
    spec.scheme = SchemeKind::coherent;
  } else if (scheme == "incoherent") {
    spec.scheme = SchemeKind::incoherent;
  } else {
    doc.invalid("time", "scheme", "expected 'coherent' or 'incoherent', got '" + scheme + "'");
  }

  const std::string potential = doc.word("potential", "family", std::string("none"));
  if (potential == "none") {
    spec.potential.family = PotentialSpec::Family::none;
  } else if (potential == "harmonic") {
    spec.potential.family = PotentialSpec::Family::harmonic;
    spec.potential.strength = doc.number("potential", "strength");
    spec.potential.margin = doc.number("potential", "margin", 0.1 * d);
    if (!(spec.potential.margin > 0.0) || !(spec.potential.margin < 0.25 * d)) {
      doc.invalid("potential", "margin", "must lie in (0, side_length/4)");
    }
  } else if (potential == "gaussian-well") {
    spec.potential.family = PotentialSpec::Family::gaussian_well;
    spec.potential.depth = doc.number("potential", "depth");
    spec.potential.sigma = doc.number("potential", "sigma");
    if (!(spec.potential.sigma > 0.0)) doc.invalid("potential", "sigma", "must be positive");
  } else {
    doc.invalid("potential", "family", "expected none, harmonic or gaussian-well, got '" + potential + "'");
  }

  const std::string coupling = doc.word("coupling", "family", std::string("constant"));
  const double lambda = doc.number("coupling", "value", 0.0);
  if (coupling == "constant") {
    spec.coupling = CouplingField::constant(lambda);
  } else if (coupling == "plateau") {
    const double margin = doc.number("coupling", "margin", 0.1 * d);
    if (!(margin > 0.0) || !(margin < 0.25 * d)) doc.invalid("coupling", "margin", "must lie in (0, side_length/4)");
    spec.coupling = CouplingField::plateau(lambda, margin, d);
  } else {
    doc.invalid("coupling", "family", "expected constant or plateau, got '" + coupling + "'");
  }

  if (doc.has_section("kernel") || !spec.coupling.is_zero()) {
    const std::string kernel = doc.word("kernel", "family");
    const double amplitude = kernel == "table" ? 1.0 : doc.number("kernel", "amplitude", 1.0);
    if (kernel == "gaussian") {
      const double sigma = doc.number("kernel", "sigma");
      if (!(sigma > 0.0)) doc.invalid("kernel", "sigma", "must be positive");
      spec.kernel = KernelSpec::gaussian(sigma, amplitude);
    } else if (kernel == "smoothed-indicator") {
      const double radius = doc.number("kernel", "radius");
      const double width = doc.number("kernel", "width");
      if (!(radius > 0.0)) doc.invalid("kernel", "radius", "must be positive");
      if (!(width > 0.0)) doc.invalid("kernel", "width", "must be positive");
      spec.kernel = KernelSpec::smoothed_indicator(radius, width, amplitude);
    } else if (kernel == "table") {
      const long long radius = doc.integer("kernel", "table_radius");
      if (radius < 0) doc.invalid("kernel", "table_radius", "must be nonnegative");
      try {
        spec.kernel = KernelSpec::from_table(static_cast<int>(radius), doc.numbers("kernel", "values"));
      } catch (const SpecificationError& e) {
        doc.invalid("kernel", "values", e.what());
      }
    } else {
      doc.invalid("kernel", "family", "expected gaussian, smoothed-indicator or table, got '" + kernel + "'");
    }
  }

  const std::string initial = doc.word("initial", "family");
  spec.initial.amplitude = doc.number("initial", "amplitude", 1.0);
  if (initial == "dirichlet-eigenmode") {
    spec.initial.family = InitialSpec::Family::eigenmode;
    const long long p = doc.integer("initial", "p");
    const long long q = doc.integer("initial", "q");
    if (p < 1) doc.invalid("initial", "p", "eigenmode indices must be >= 1");
    if (q < 1) doc.invalid("initial", "q", "eigenmode indices must be >= 1");
    spec.initial.p = static_cast<int>(p);
    spec.initial.q = static_cast<int>(q);
  } else if (initial == "gaussian-packet") {
    spec.initial.family = InitialSpec::Family::gaussian_packet;
    spec.initial.center_x = doc.number("initial", "center_x");
    spec.initial.center_y = doc.number("initial", "center_y");
    spec.initial.width = doc.number("initial", "width");
    if (!(spec.initial.width > 0.0)) doc.invalid("initial", "width", "must be positive");
    spec.initial.momentum_x = doc.number("initial", "momentum_x", 0.0);
    spec.initial.momentum_y = doc.number("initial", "momentum_y", 0.0);
  } else {
    doc.invalid("initial", "family", "expected dirichlet-eigenmode or gaussian-packet, got '" + initial + "'");
  }
  const std::string projection = doc.word("initial", "projection", std::string("interpolation"));
  if (projection == "interpolation") {
    spec.projection = InitialProjection::interpolation;
  } else if (projection == "ritz") {
    spec.projection = InitialProjection::ritz;
  } else {
    doc.invalid("initial", "projection", "expected interpolation or ritz, got '" + projection + "'");
  }

  spec.relative_tolerance = doc.number("solver", "relative_tolerance", 1e-13);
  if (!(spec.relative_tolerance > 0.0)) doc.invalid("solver", "relative_tolerance", "must be positive");
  const long long max_iterations = doc.integer("solver", "max_iterations", 500);
  if (max_iterations < 2) doc.invalid("solver", "max_iterations", "must be at least 2");
  spec.fixed_point.max_iterations = static_cast<std::size_t>(max_iterations);
  spec.fixed_point.guard_ratio = doc.number("solver", "guard_ratio", 1.0);
  if (!(spec.fixed_point.guard_ratio > 0.0)) doc.invalid("solver", "guard_ratio", "must be positive");
  const std::string guess = doc.word("solver", "initial_guess", std::string("previous"));
  if (guess == "previous") {
    spec.fixed_point.extrapolate_guess = false;
  } else if (guess == "extrapolated") {
    spec.fixed_point.extrapolate_guess = true;
  } else {
    doc.invalid("solver", "initial_guess", "expected previous or extrapolated, got '" + guess + "'");
  }

  spec.output_directory = doc.word("output", "directory", std::string("output"));
  const long long stride = doc.integer("output", "snapshot_stride", 0);
  if (stride < 0) doc.invalid("output", "snapshot_stride", "must be nonnegative");
  spec.snapshot_stride = static_cast<std::size_t>(stride);

  doc.reject_unused();
  return spec;
}

ProblemSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string());
}

}  // namespace hartree
