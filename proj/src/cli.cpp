#include "adiabatic/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include "CLI11.hpp"
#include "adiabatic/asymptotics.hpp"
#include "adiabatic/errors.hpp"
#include "adiabatic/heat_trace.hpp"
#include "adiabatic/heisenberg.hpp"
#include "adiabatic/spectrum.hpp"
#include "adiabatic/torus.hpp"

namespace adiabatic::cli {

using nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}

namespace {

const std::vector<std::string> kCommands = {
    "torus-spectrum", "torus-count", "torus-audit",  "heis-spectrum",
    "heat-trace",     "trace-ratio", "branch-audit", "weyl-check"};

// ---------------------------------------------------------------------------
// Config reading. Every key a command reads is marked; leftovers are errors,
// so typos do not silently fall back to defaults.

class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
    used_ = {"command", "output", "threads"};
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!obj_.contains(key)) throw ConfigError(at(key), "missing required field");
    return obj_.at(key);
  }

  double number(const std::string& key) { return as_number(raw(key), at(key)); }

  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (used_.insert(key), fallback);
  }

  double positive(const std::string& key) {
    const double x = number(key);
    if (!(x > 0.0)) throw ConfigError(at(key), "must be positive");
    return x;
  }

  double positive(const std::string& key, double fallback) {
    return has(key) ? positive(key) : (used_.insert(key), fallback);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return as_integer(raw(key), at(key));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed) {
    const std::string v = text(key, fallback);
    for (const auto& a : allowed) {
      if (a == v) return v;
    }
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(at(key), "expected one of " + list);
  }

  // Either the scalar `key` or the array `grid_key`, each entry positive.
  std::vector<double> positive_grid(const std::string& key,
                                    const std::string& grid_key,
                                    std::optional<std::vector<double>> fallback) {
    used_.insert(key);
    used_.insert(grid_key);
    if (has(key) && has(grid_key)) {
      throw ConfigError(at(grid_key), "give either " + key + " or " + grid_key);
    }
    if (has(key)) return {positive(key)};
    if (!has(grid_key)) {
      if (fallback) return *fallback;
      throw ConfigError(at(key), "missing required field (or " + grid_key + ")");
    }
    const json& arr = obj_.at(grid_key);
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError(at(grid_key), "expected a non-empty array");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = at(grid_key) + "[" + std::to_string(i) + "]";
      const double x = as_number(arr[i], p);
      if (!(x > 0.0)) throw ConfigError(p, "must be positive");
      out.push_back(x);
    }
    return out;
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!used_.count(item.key())) {
        throw ConfigError(at(item.key()), "unknown field for this command");
      }
    }
  }

  void mark(const std::string& key) { used_.insert(key); }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
  }

  static std::int64_t as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<std::int64_t>();
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

SlopeParam read_slope_object(const json& s, const std::string& path) {
  if (!s.is_object() || s.size() != 1) {
    throw ConfigError(path, R"(expected {"rational":[p,q]} or {"irrational":x})");
  }
  if (s.contains("rational")) {
    const json& pq = s.at("rational");
    const std::string p = path + ".rational";
    if (!pq.is_array() || pq.size() != 2) {
      throw ConfigError(p, "expected [p, q]");
    }
    const auto num = Fields::as_integer(pq[0], p + "[0]");
    const auto den = Fields::as_integer(pq[1], p + "[1]");
    if (den == 0) throw ConfigError(p + "[1]", "denominator must be nonzero");
    return SlopeParam::Rational(num, den);
  }
  if (s.contains("irrational")) {
    return SlopeParam::Irrational(
        Fields::as_number(s.at("irrational"), path + ".irrational"));
  }
  throw ConfigError(path, R"(expected {"rational":[p,q]} or {"irrational":x})");
}

// Accepts "slope": {...} or the inline "rational" / "irrational" keys.
SlopeParam read_slope(Fields& f, const json& config) {
  const int given = f.has("slope") + f.has("rational") + f.has("irrational");
  if (given != 1) {
    throw ConfigError(f.at("slope"),
                      given == 0 ? "missing required field"
                                 : "give exactly one of slope, rational, irrational");
  }
  if (f.has("slope")) return read_slope_object(f.raw("slope"), f.at("slope"));
  json inline_slope = json::object();
  for (const char* key : {"rational", "irrational"}) {
    if (f.has(key)) {
      f.mark(key);
      inline_slope[key] = config.at(key);
    }
  }
  return read_slope_object(inline_slope, "$");
}

int read_degree(Fields& f, int max_degree) {
  const auto d = f.integer("degree", 0);
  if (d < 0 || d > max_degree) {
    throw ConfigError(f.at("degree"),
                      "must be between 0 and " + std::to_string(max_degree));
  }
  return static_cast<int>(d);
}

CountMode read_mode(Fields& f) {
  return f.choice("mode", "closed", {"closed", "open"}) == "open" ? CountMode::Open
                                                                  : CountMode::Closed;
}

// ---------------------------------------------------------------------------
// Tables. All data files are tables except the raw spectrum slices.

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    // JSON has no nan/inf literals.
    return std::isfinite(*d) ? format_number(*d) : "null";
  }
  if (std::holds_alternative<std::int64_t>(c)) return cell_text(c);
  return json(std::get<std::string>(c)).dump();
}

std::string render(const Table& t, const std::string& command, Format format) {
  std::string out;
  if (format == Format::Csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      out += (i ? "," : "") + t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out += (i ? "," : "") + cell_text(row[i]);
      }
      out += '\n';
    }
    return out;
  }
  out = "{\"command\":" + json(command).dump() + ",\"columns\":[";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out += (i ? "," : "") + json(t.columns[i]).dump();
  }
  out += "],\"rows\":[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += r ? ",[" : "[";
    for (std::size_t i = 0; i < t.rows[r].size(); ++i) {
      out += (i ? "," : "") + json_cell(t.rows[r][i]);
    }
    out += "]";
  }
  out += "]}\n";
  return out;
}

std::string render(const SpectrumSlice& s, Format format) {
  return format == Format::Csv ? to_csv(s) : to_json(s) + "\n";
}

class Summary {
 public:
  explicit Summary(const std::string& command) : text_(command) {}
  Summary& add(const std::string& key, const std::string& value) {
    text_ += " " + key + "=" + value;
    return *this;
  }
  Summary& add(const std::string& key, double value) {
    return add(key, format_number(value));
  }
  Summary& add(const std::string& key, std::int64_t value) {
    return add(key, std::to_string(value));
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
};

std::string grid_text(const std::vector<double>& g) {
  if (g.size() == 1) return format_number(g.front());
  return "[" + format_number(g.front()) + ".." + format_number(g.back()) + "]x" +
         std::to_string(g.size());
}

// ---------------------------------------------------------------------------
// Commands

Output torus_spectrum_cmd(Fields& f, const json& config, Format format) {
  const SlopeParam slope = read_slope(f, config);
  const double h = f.positive("h");
  const int degree = read_degree(f, 2);
  const double cutoff = f.number("cutoff");
  f.finish();

  const SpectrumSlice s = torus_spectrum(TorusModel(slope, h), degree, cutoff);
  Output out;
  out.data = render(s, format);
  out.provenance = s.provenance();
  out.summary = Summary("torus-spectrum")
                    .add("slope", slope.describe())
                    .add("h", h)
                    .add("degree", std::int64_t{degree})
                    .add("cutoff", cutoff)
                    .add("eigenvalues", s.total_multiplicity())
                    .str();
  return out;
}

Output torus_count_cmd(Fields& f, const json& config, Format format,
                       unsigned threads) {
  const SlopeParam slope = read_slope(f, config);
  const auto hs = f.positive_grid("h", "h_grid", std::nullopt);
  const auto lambdas = f.positive_grid("lambda", "lambda_grid", std::nullopt);
  const int degree = read_degree(f, 2);
  const CountMode mode = read_mode(f);
  f.finish();

  Table t{{"h", "lambda", "count"}, {}};
  std::int64_t last = 0;
  for (double h : hs) {
    const TorusModel m(slope, h);
    for (double lambda : lambdas) {
      last = torus_count_exact(m, lambda, degree, mode, threads);
      t.rows.push_back({h, lambda, last});
    }
  }
  Output out;
  out.data = render(t, "torus-count", format);
  out.provenance = {"exact lattice count from row-wise quadratic bounds"};
  Summary s("torus-count");
  s.add("slope", slope.describe())
      .add("h", grid_text(hs))
      .add("lambda", grid_text(lambdas))
      .add("degree", std::int64_t{degree})
      .add("mode", mode == CountMode::Open ? "open" : "closed");
  if (t.rows.size() == 1) {
    s.add("count", last);
  } else {
    s.add("rows", static_cast<std::int64_t>(t.rows.size()));
  }
  out.summary = s.str();
  return out;
}

Output torus_audit_cmd(Fields& f, const json& config, Format format,
                       unsigned threads) {
  const SlopeParam slope = read_slope(f, config);
  const double lambda = f.positive("lambda");
  const auto hs = f.positive_grid(
      "h", "h_grid", std::vector<double>{0.1, 0.05, 0.02, 0.01, 0.005});
  const CountMode mode = read_mode(f);
  f.finish();

  Table t{{"h", "count", "predicted", "ratio"}, {}};
  std::vector<CountSample> samples;
  for (double h : hs) {
    const auto n = torus_count_exact(TorusModel(slope, h), lambda, 0, mode, threads);
    const double predicted = torus_predicted_count(slope, lambda, h);
    t.rows.push_back({h, n, predicted, static_cast<double>(n) / predicted});
    samples.push_back({h, static_cast<double>(n)});
  }
  Output out;
  out.data = render(t, "torus-audit", format);
  out.provenance = {"exact lattice count from row-wise quadratic bounds"};
  Summary s("torus-audit");
  s.add("slope", slope.describe()).add("lambda", lambda).add("h", grid_text(hs));
  s.add("predicted_coefficient", torus_predicted_count(slope, lambda, 1.0));
  bool fitted = false;
  if (samples.size() >= 3) {
    try {
      s.add("fitted_coefficient", fit_leading_coefficient(samples, 1).coefficient);
      fitted = true;
    } catch (const PreconditionError&) {
      // zero counts or repeated h: the table is still meaningful
    }
  }
  if (!fitted) {
    s.add("ratio", std::get<double>(t.rows.back().back()));
  }
  out.summary = s.str();
  return out;
}

Output heis_spectrum_cmd(Fields& f, Format format) {
  const double h = f.positive("h");
  const double alpha = f.number("alpha", 0.0);
  const int degree = read_degree(f, 3);
  const double cutoff = f.number("cutoff");
  f.finish();

  const SpectrumSlice s =
      heis_form_spectrum(HeisenbergAdiabaticModel(h, alpha), degree, cutoff);
  Output out;
  out.data = render(s, format);
  out.provenance = s.provenance();
  out.summary = Summary("heis-spectrum")
                    .add("h", h)
                    .add("alpha", alpha)
                    .add("degree", std::int64_t{degree})
                    .add("cutoff", cutoff)
                    .add("eigenvalues", s.total_multiplicity())
                    .str();
  return out;
}

const std::vector<std::string> kTraceColumns = {"t", "h", "trace", "tail_bound",
                                                "ratio"};

Output heat_trace_cmd(Fields& f, const json& config, Format format) {
  const std::string model = f.choice("model", "heisenberg", {"heisenberg", "torus"});
  std::optional<SlopeParam> slope;
  double alpha = 0.0;
  int degree = 0;
  if (model == "torus") {
    slope = read_slope(f, config);
    degree = read_degree(f, 2);
  } else {
    alpha = f.number("alpha", 0.0);
    degree = read_degree(f, 3);
  }
  const auto hs = f.positive_grid("h", "h_grid", std::nullopt);
  const auto ts = f.positive_grid("t", "t_grid", std::nullopt);
  const double eps = f.positive("eps", 1e-9);
  f.finish();

  Output out;
  Table t{kTraceColumns, {}};
  double last = 0.0;
  for (double time : ts) {
    const double limit = (model == "heisenberg" && degree == 0)
                             ? limit_integral(time, 1e-12)
                             : std::nan("");
    for (double h : hs) {
      HeatTraceResult r;
      if (model == "torus") {
        r = heat_trace(TorusSource(TorusModel(*slope, h), degree), time, eps);
      } else {
        r = heat_trace(HeisenbergSource(HeisenbergAdiabaticModel(h, alpha), degree),
                       time, eps);
      }
      const double ratio = std::isnan(limit)
                               ? limit
                               : trace_ratio_from(r.value, h, limit / (4.0 * std::numbers::pi));
      t.rows.push_back({time, h, r.value, r.truncation_bound, ratio});
      last = r.value;
      if (out.provenance.empty()) out.provenance = r.provenance;
    }
  }
  out.data = render(t, "heat-trace", format);
  Summary s("heat-trace");
  s.add("model", model);
  if (slope) s.add("slope", slope->describe());
  if (model == "heisenberg") s.add("alpha", alpha);
  s.add("degree", std::int64_t{degree})
      .add("t", grid_text(ts))
      .add("h", grid_text(hs))
      .add("eps", eps);
  if (t.rows.size() == 1) {
    s.add("trace", last);
  } else {
    s.add("rows", static_cast<std::int64_t>(t.rows.size()));
  }
  out.summary = s.str();
  return out;
}

Output trace_ratio_cmd(Fields& f, Format format) {
  const double alpha = f.number("alpha", 0.0);
  const auto hs =
      f.positive_grid("h", "h_grid", std::vector<double>{0.2, 0.1, 0.05, 0.02});
  const double time = f.positive("t", 1.0);
  const double eps = f.positive("eps", 1e-10);
  f.finish();

  Output out;
  Table t{kTraceColumns, {}};
  double last = 0.0;
  for (double h : hs) {
    const auto r = trace_ratio_detail(HeisenbergAdiabaticModel(h, alpha), time, eps);
    t.rows.push_back({time, h, r.trace.value, r.trace.truncation_bound, r.ratio});
    last = r.ratio;
    if (out.provenance.empty()) out.provenance = r.trace.provenance;
  }
  out.data = render(t, "trace-ratio", format);
  out.summary = Summary("trace-ratio")
                    .add("alpha", alpha)
                    .add("t", time)
                    .add("h", grid_text(hs))
                    .add("ratio", last)
                    .str();
  return out;
}

std::string kind_text(const AuditedBranch& b) {
  if (!b.report) return "ambiguous";
  if (b.report->kind == BranchKind::Order) {
    return "order:" + std::to_string(b.report->order);
  }
  return to_string(b.report->kind);
}

Output branch_audit_cmd(Fields& f, const json& config, Format format) {
  const std::string model = f.choice("model", "heisenberg", {"heisenberg", "torus"});
  BranchSource source;
  int degree = 0;
  std::string slope_text;
  if (model == "torus") {
    const SlopeParam slope = read_slope(f, config);
    degree = read_degree(f, 2);
    const auto pairing = f.choice("pairing", "index", {"index", "labeled"});
    if (pairing == "labeled" && degree == 1) {
      throw ConfigError(f.at("pairing"), "labeled pairing needs degree 0 or 2");
    }
    source = torus_branch_source(slope, degree,
                                 pairing == "labeled" ? BranchPairing::Labeled
                                                      : BranchPairing::IndexSorted);
    slope_text = slope.describe();
  } else {
    degree = read_degree(f, 3);
    source = heisenberg_branch_source(degree);
  }

  std::vector<double> grid;
  if (f.has("h_grid")) {
    grid = f.positive_grid("h", "h_grid", std::nullopt);
  } else {
    f.mark("h_grid");
    const double h_max = f.positive("h_max", 1e-1);
    const double h_min = f.positive("h_min", 1e-3);
    const auto points = f.integer("points", 9);
    if (points < 4) throw ConfigError(f.at("points"), "must be at least 4");
    if (!(h_min < h_max)) throw ConfigError(f.at("h_min"), "must be below h_max");
    grid = log_grid(h_max, h_min, static_cast<std::size_t>(points));
  }
  const auto i_max = f.integer("i_max", 12);
  if (i_max < 1) throw ConfigError(f.at("i_max"), "must be at least 1");
  ClassifierConfig classifier;
  classifier.slope_tolerance = f.positive("slope_tolerance", classifier.slope_tolerance);
  classifier.zero_threshold = f.positive("zero_threshold", classifier.zero_threshold);
  classifier.crossing_residual =
      f.positive("crossing_residual", classifier.crossing_residual);
  f.finish();

  const BranchAudit audit =
      branch_audit(source, grid, static_cast<std::size_t>(i_max), classifier);
  Table t{{"branch_index", "kind", "slope", "constant"}, {}};
  for (const auto& b : audit.branches) {
    t.rows.push_back({static_cast<std::int64_t>(b.index), kind_text(b),
                      b.fitted_slope,
                      b.report ? b.report->fitted_constant : std::nan("")});
  }
  Output out;
  out.data = render(t, "branch-audit", format);
  out.ambiguous = audit.ambiguous() > 0;
  for (const auto& m : audit.mismatches) out.provenance.push_back("mismatch: " + m);
  Summary s("branch-audit");
  s.add("model", model);
  if (!slope_text.empty()) s.add("slope", slope_text);
  s.add("degree", std::int64_t{degree})
      .add("h", grid_text(grid))
      .add("branches", static_cast<std::int64_t>(audit.branches.size()))
      .add("zero", audit.count(BranchKind::Zero))
      .add("ambiguous", audit.ambiguous())
      .add("matches", audit.matches() ? "true" : "false");
  out.summary = s.str();
  return out;
}

Output weyl_check_cmd(Fields& f, const json& config, Format format) {
  const SlopeParam slope = read_slope(f, config);
  const auto lambdas = f.positive_grid("lambda", "lambda_grid", std::nullopt);
  f.finish();

  const WeylInput input{1, torus_leafwise_sdf(slope)};
  Table t{{"lambda", "weyl_coefficient", "closed_form_coefficient",
           "relative_difference"},
          {}};
  double last = 0.0;
  for (double lambda : lambdas) {
    const double w = weyl_transform(input, lambda);
    const double closed = torus_predicted_count(slope, lambda, 1.0);
    t.rows.push_back({lambda, w, closed, std::abs(w - closed) / std::abs(closed)});
    last = w;
  }
  Output out;
  out.data = render(t, "weyl-check", format);
  out.provenance = {"leafwise spectral distribution in closed form"};
  Summary s("weyl-check");
  s.add("slope", slope.describe()).add("lambda", grid_text(lambdas));
  if (t.rows.size() == 1) s.add("weyl_coefficient", last);
  out.summary = s.str();
  return out;
}

// ---------------------------------------------------------------------------
// I/O

void write_atomically(const std::filesystem::path& target, const std::string& data) {
  namespace fs = std::filesystem;
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw fs::filesystem_error("cannot open for writing", tmp,
                                 std::make_error_code(std::errc::io_error));
    }
    f << data;
    f.flush();
    if (!f) {
      throw fs::filesystem_error("write failed", tmp,
                                 std::make_error_code(std::errc::io_error));
    }
  }
  fs::rename(tmp, target);
}

json read_config(const std::string& source, std::istream& in) {
  std::string text;
  if (source == "-") {
    text.assign(std::istreambuf_iterator<char>(in), {});
  } else {
    std::ifstream f(source, std::ios::binary);
    if (!f) throw ConfigError("$", "cannot read config file " + source);
    text.assign(std::istreambuf_iterator<char>(f), {});
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

Output execute(const json& config, Format format, unsigned threads) {
  if (!config.is_object()) throw ConfigError("$", "expected an object");
  if (!config.contains("command")) throw ConfigError("$.command", "missing required field");
  if (!config.at("command").is_string()) {
    throw ConfigError("$.command", "expected a string");
  }
  const std::string command = config.at("command").get<std::string>();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  Fields f(config, "$");
  Output out;
  if (command == "torus-spectrum") {
    out = torus_spectrum_cmd(f, config, format);
  } else if (command == "torus-count") {
    out = torus_count_cmd(f, config, format, threads);
  } else if (command == "torus-audit") {
    out = torus_audit_cmd(f, config, format, threads);
  } else if (command == "heis-spectrum") {
    out = heis_spectrum_cmd(f, format);
  } else if (command == "heat-trace") {
    out = heat_trace_cmd(f, config, format);
  } else if (command == "trace-ratio") {
    out = trace_ratio_cmd(f, format);
  } else if (command == "branch-audit") {
    out = branch_audit_cmd(f, config, format);
  } else if (command == "weyl-check") {
    out = weyl_check_cmd(f, config, format);
  } else {
    throw ConfigError("$.command", "unknown command '" + command + "'");
  }
  out.command = command;
  return out;
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set", "expected key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  if (!config.is_object()) throw ConfigError("$", "expected an object");
  if (config.contains(key) && config.at(key).is_structured()) {
    throw ConfigError("$." + key, "only scalar fields can be overridden");
  }
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded() || parsed.is_structured()) parsed = value;
  config[key] = parsed;
}

std::string help_footer() {
  return R"(Commands (config field "command", or the positional argument):
  torus-spectrum  slope, h, degree (0-2), cutoff
  torus-count     slope, h | h_grid, lambda | lambda_grid, degree, mode
  torus-audit     slope, lambda, h | h_grid, mode
  heis-spectrum   h, alpha, degree (0-3), cutoff
  heat-trace      model (heisenberg|torus), slope, alpha, degree, h | h_grid,
                  t | t_grid, eps
  trace-ratio     alpha, h | h_grid, t, eps
  branch-audit    model, slope, degree, pairing (index|labeled),
                  h_grid | h_max, h_min, points, i_max,
                  slope_tolerance, zero_threshold, crossing_residual
  weyl-check      slope, lambda | lambda_grid

A slope is {"rational":[p,q]} or {"irrational":x}, either under "slope" or
inline. mode is closed (count <= lambda) or open (count < lambda).

CSV columns:
  torus-spectrum, heis-spectrum  value,multiplicity
  torus-count                    h,lambda,count
  torus-audit                    h,count,predicted,ratio
  heat-trace, trace-ratio        t,h,trace,tail_bound,ratio
  branch-audit                   branch_index,kind,slope,constant
  weyl-check                     lambda,weyl_coefficient,closed_form_coefficient,relative_difference

heat-trace fills ratio only for the heisenberg function Laplacian (degree 0)
and writes nan otherwise. branch-audit kinds: zero, order:k, not_small,
ambiguous.

With --out, data goes to the file (written via rename), metadata to
<out>.meta.json and the summary line to stdout. Without it, data goes to
stdout and the summary to stderr.

Exit status: 0 success, 1 malformed config or violated precondition,
2 ambiguous numerical result.
)";
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Exact spectra and asymptotic checks for adiabatic metrics on "
               "linear torus foliations and Heisenberg flows.",
               "adiabatic"};
  std::string command;
  std::string config_source;
  std::string out_path;
  std::string format_name;
  std::optional<unsigned> threads_flag;
  std::vector<std::string> overrides;
  app.add_option("command", command, "Command; overrides the config's command")
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_source, "Run config: JSON file path or - for stdin")
      ->required();
  app.add_option("--out", out_path, "Output data file");
  app.add_option("--format", format_name, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads_flag, "Worker threads, 0 = auto");
  app.add_option("--set", overrides, "Override a top-level scalar: key=value");
  app.footer(help_footer());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    json config = read_config(config_source, in);
    if (!config.is_object()) throw ConfigError("$", "expected an object");
    for (const auto& o : overrides) apply_override(config, o);
    if (!command.empty()) config["command"] = command;

    if (config.contains("output")) {
      const json& o = config.at("output");
      if (!o.is_object()) throw ConfigError("$.output", "expected an object");
      for (const auto& item : o.items()) {
        const std::string p = "$.output." + item.key();
        if (item.key() != "path" && item.key() != "format") {
          throw ConfigError(p, "unknown field");
        }
        if (!item.value().is_string()) throw ConfigError(p, "expected a string");
      }
      if (out_path.empty() && o.contains("path")) out_path = o.at("path");
      if (format_name.empty() && o.contains("format")) {
        format_name = o.at("format");
        if (format_name != "csv" && format_name != "json") {
          throw ConfigError("$.output.format", "expected csv or json");
        }
      }
    }
    const Format format = format_name == "json" ? Format::Json : Format::Csv;

    unsigned threads = 1;
    if (threads_flag) {
      threads = *threads_flag;
    } else if (config.contains("threads")) {
      const auto n = Fields::as_integer(config.at("threads"), "$.threads");
      if (n < 0) throw ConfigError("$.threads", "must be nonnegative");
      threads = static_cast<unsigned>(n);
    }

    const Output result = execute(config, format, threads);
    const auto wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    if (out_path.empty() || out_path == "-") {
      out << result.data;
      err << result.summary << '\n';
    } else {
      write_atomically(out_path, result.data);
      json meta = {{"command", result.command},
                   {"config", config},
                   {"wall_time_ms", wall_ms},
                   {"completeness_provenance", result.provenance}};
      write_atomically(out_path + ".meta.json", meta.dump(2) + "\n");
      out << result.summary << " -> " << out_path << '\n';
    }
    return result.ambiguous ? 2 : 0;
  } catch (const ConfigError& e) {
    err << "config error at " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return 1;
  } catch (const AmbiguityError& e) {
    err << "ambiguous result: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace adiabatic::cli
